/** File-level rendering: read a trace CSV, write one SVG figure. */

import { readFileSync, writeFileSync } from "node:fs";

import { buildFigure, FigureKind } from "./figures.js";
import { parseTrace } from "./trace.js";

export function renderToFile(tracePath: string, kind: FigureKind, outPath: string): void {
  const text = readFileSync(tracePath, "utf-8");
  const trace = parseTrace(text);
  const svg = buildFigure(kind, trace);
  writeFileSync(outPath, svg);
}
