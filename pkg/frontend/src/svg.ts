/** Minimal hand-built SVG chart primitives (no DOM needed). */

export interface Series {
  label: string;
  color: string;
  x: number[];
  y: number[];
  dash?: string;
  width?: number;
}

export interface Panel {
  title: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 860;
const PANEL_HEIGHT = 240;
const MARGIN = { top: 34, right: 20, bottom: 38, left: 64 };
const MAX_POINTS = 2000;

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.001) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

/** Stride-decimate long series so the SVG stays lightweight. */
function decimate(x: number[], y: number[]): [number[], number[]] {
  if (x.length <= MAX_POINTS) return [x, y];
  const stride = Math.ceil(x.length / MAX_POINTS);
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < x.length; i += stride) {
    xs.push(x[i]);
    ys.push(y[i]);
  }
  if (xs[xs.length - 1] !== x[x.length - 1]) {
    xs.push(x[x.length - 1]);
    ys.push(y[y.length - 1]);
  }
  return [xs, ys];
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function renderPanel(panel: Panel, index: number): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const top = index * PANEL_HEIGHT;

  const allX = panel.series.flatMap((s) => [s.x[0], s.x[s.x.length - 1]]);
  const [x0, x1] = extent(allX);
  const allY = panel.series.flatMap((s) => s.y);
  let [y0, y1] = extent(allY);
  const pad = 0.06 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const sx = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * innerW;
  const sy = (v: number) => top + MARGIN.top + innerH - ((v - y0) / (y1 - y0)) * innerH;

  const parts: string[] = [`<g class="panel" data-title="${esc(panel.title)}">`];
  parts.push(`<text x="${MARGIN.left}" y="${top + 20}" class="title">${esc(panel.title)}</text>`);

  for (const tick of niceTicks(y0, y1, 5)) {
    const y = sy(tick);
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${WIDTH - MARGIN.right}" y2="${y}" class="grid"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${y + 4}" class="ylab">${fmt(tick)}</text>`);
  }
  for (const tick of niceTicks(x0, x1, 8)) {
    const x = sx(tick);
    const yb = top + MARGIN.top + innerH;
    parts.push(`<line x1="${x}" y1="${yb}" x2="${x}" y2="${yb + 4}" class="axis"/>`);
    parts.push(`<text x="${x}" y="${yb + 18}" class="xlab">${fmt(tick)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${top + MARGIN.top}" width="${innerW}" height="${innerH}" class="frame"/>`);
  parts.push(`<text x="${14}" y="${top + MARGIN.top + innerH / 2}" class="ylabel" transform="rotate(-90 14 ${top + MARGIN.top + innerH / 2})">${esc(panel.yLabel)}</text>`);

  panel.series.forEach((s, si) => {
    const [xs, ys] = decimate(s.x, s.y);
    const pts = xs.map((v, i) => `${sx(v).toFixed(2)},${sy(ys[i]).toFixed(2)}`).join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.3}"${dash}/>`);
    const lx = MARGIN.left + innerW - 190;
    const ly = top + MARGIN.top + 16 + 16 * si;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${lx + 32}" y="${ly}" class="legend">${esc(s.label)}</text>`);
  });

  parts.push("</g>");
  return parts.join("\n");
}

export function renderFigure(panels: Panel[], xLabel: string): string {
  const height = panels.length * PANEL_HEIGHT + 8;
  const body = panels.map(renderPanel).join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" viewBox="0 0 ${WIDTH} ${height}">
<style>
  text { font-family: sans-serif; font-size: 12px; fill: #222; }
  .title { font-weight: bold; font-size: 13px; }
  .ylab { text-anchor: end; font-size: 11px; }
  .xlab { text-anchor: middle; font-size: 11px; }
  .ylabel { text-anchor: middle; font-size: 12px; }
  .legend { font-size: 11px; }
  .grid { stroke: #ddd; stroke-width: 0.6; }
  .axis { stroke: #444; stroke-width: 1; }
  .frame { fill: none; stroke: #444; stroke-width: 1; }
</style>
<rect width="100%" height="100%" fill="white"/>
${body}
<text x="${WIDTH / 2}" y="${height - 4}" class="xlab">${esc(xLabel)}</text>
</svg>
`;
}
