/**
 * Simulation trace parsing.
 *
 * A trace is the CSV written by the simulator: a fixed block of columns
 *   t, x1..x6, xh1..xh6, xf1..xf6, ref_av, ref_ah, u_v, u_h
 * followed by paired fault columns f1..fs and fhat1..fhats.
 */

export class MissingColumnError extends Error {
  constructor(column: string) {
    super(`missing required column "${column}"`);
    this.name = "MissingColumnError";
  }
}

export class EmptyTraceError extends Error {
  constructor() {
    super("trace contains no samples");
    this.name = "EmptyTraceError";
  }
}

export class TraceFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "TraceFormatError";
  }
}

export interface Trace {
  columns: string[];
  nFaults: number;
  length: number;
  column(name: string): number[];
  has(name: string): boolean;
}

class ParsedTrace implements Trace {
  columns: string[];
  nFaults: number;
  length: number;
  private data: Map<string, number[]>;

  constructor(columns: string[], rows: number[][], nFaults: number) {
    this.columns = columns;
    this.nFaults = nFaults;
    this.length = rows.length;
    this.data = new Map(columns.map((name, i) => [name, rows.map((r) => r[i])]));
  }

  has(name: string): boolean {
    return this.data.has(name);
  }

  column(name: string): number[] {
    const values = this.data.get(name);
    if (values === undefined) throw new MissingColumnError(name);
    return values;
  }
}

/** Count trailing fault columns and check they pair up as f1..fs, fhat1..fhats. */
function faultDimension(extra: string[]): number {
  if (extra.length % 2 !== 0) {
    throw new TraceFormatError(
      `fault columns are not paired with estimates: ${extra.join(",")}`);
  }
  const s = extra.length / 2;
  for (let i = 0; i < s; i++) {
    if (extra[i] !== `f${i + 1}`) throw new MissingColumnError(`f${i + 1}`);
    if (extra[s + i] !== `fhat${i + 1}`) throw new MissingColumnError(`fhat${i + 1}`);
  }
  return s;
}

export function parseTrace(text: string): Trace {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) throw new EmptyTraceError();

  const header = lines[0].split(",").map((c) => c.trim());
  const fixed = ["t"]
    .concat([1, 2, 3, 4, 5, 6].map((i) => `x${i}`))
    .concat([1, 2, 3, 4, 5, 6].map((i) => `xh${i}`))
    .concat([1, 2, 3, 4, 5, 6].map((i) => `xf${i}`))
    .concat(["ref_av", "ref_ah", "u_v", "u_h"]);
  for (let i = 0; i < fixed.length; i++) {
    if (header[i] !== fixed[i]) throw new MissingColumnError(fixed[i]);
  }
  const nFaults = faultDimension(header.slice(fixed.length));

  const rows: number[][] = [];
  for (let k = 1; k < lines.length; k++) {
    const parts = lines[k].split(",");
    if (parts.length !== header.length) {
      throw new TraceFormatError(
        `row ${k} has ${parts.length} fields, header has ${header.length}`);
    }
    const row = parts.map(Number);
    if (row.some((v) => Number.isNaN(v))) {
      throw new TraceFormatError(`row ${k} holds non-numeric data`);
    }
    rows.push(row);
  }
  if (rows.length === 0) throw new EmptyTraceError();
  return new ParsedTrace(header, rows, nFaults);
}
