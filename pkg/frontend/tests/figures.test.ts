import { existsSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, test } from "vitest";

import { buildFigure } from "../src/figures.js";
import { renderToFile } from "../src/render.js";
import { parseTrace } from "../src/trace.js";

const HEADER =
  "t,x1,x2,x3,x4,x5,x6,xh1,xh2,xh3,xh4,xh5,xh6," +
  "xf1,xf2,xf3,xf4,xf5,xf6,ref_av,ref_ah,u_v,u_h,f1,f2,fhat1,fhat2";

function syntheticCsv(rows = 400): string {
  const lines = [HEADER];
  for (let k = 0; k < rows; k++) {
    const t = k * 0.01;
    const vals = [
      t,
      0.2 * Math.sin(t), 0, 0.5, 0.1 * t, 0, 0,
      0.2 * Math.sin(t), 0, 0.5, 0.1 * t, 0, 0,
      0.2 * Math.sin(t), 0, 0.5, 0.1 * t, 0, 0,
      0.2, 0.4, 1.2 * Math.cos(t), -0.3,
      t > 2 ? 0.5 : 0, 0, t > 2 ? 0.49 : 0, 0.001,
    ];
    lines.push(vals.map((v) => v.toPrecision(9)).join(","));
  }
  return lines.join("\n") + "\n";
}

describe("buildFigure", () => {
  const trace = parseTrace(syntheticCsv());

  test("tracking figure holds two subplots with reference overlays", () => {
    const svg = buildFigure("tracking", trace);
    expect(svg).toContain("<svg");
    expect(svg).toContain('data-title="Pitch angle tracking"');
    expect(svg).toContain('data-title="Yaw angle tracking"');
    expect(svg).toContain(">reference</text>");
    expect(svg).toContain(">output</text>");
  });

  test("commands figure shows both input channels", () => {
    const svg = buildFigure("commands", trace);
    expect(svg).toContain('data-title="Main rotor command"');
    expect(svg).toContain('data-title="Tail rotor command"');
    expect(svg).toContain(">u_v</text>");
    expect(svg).toContain(">u_h</text>");
  });

  test("fault figure legend carries both signals per channel", () => {
    const svg = buildFigure("fault_estimate", trace);
    expect(svg).toContain('data-title="Fault channel 1"');
    expect(svg).toContain('data-title="Fault channel 2"');
    expect(svg).toContain(">fault</text>");
    expect(svg).toContain(">estimate</text>");
  });

  test("rendering is deterministic for identical input", () => {
    expect(buildFigure("tracking", trace)).toBe(buildFigure("tracking", trace));
  });
});

describe("renderToFile", () => {
  test("writes an svg file", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotviz-"));
    const tracePath = join(dir, "trace.csv");
    writeFileSync(tracePath, syntheticCsv());
    const out = join(dir, "fig.svg");
    renderToFile(tracePath, "tracking", out);
    expect(existsSync(out)).toBe(true);
  });

  test("empty trace fails and writes nothing", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotviz-"));
    const tracePath = join(dir, "empty.csv");
    writeFileSync(tracePath, HEADER + "\n");
    const out = join(dir, "fig.svg");
    expect(() => renderToFile(tracePath, "tracking", out)).toThrow(
      "trace contains no samples",
    );
    expect(existsSync(out)).toBe(false);
  });
});
