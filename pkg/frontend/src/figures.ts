/** The three figure kinds built from a simulation trace. */

import { Panel, renderFigure } from "./svg.js";
import { MissingColumnError, Trace } from "./trace.js";

export const FIGURE_KINDS = ["tracking", "commands", "fault_estimate"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

function need(trace: Trace, ...names: string[]): number[][] {
  return names.map((n) => trace.column(n));
}

function trackingFigure(trace: Trace): string {
  const [t, pitch, yaw, refAv, refAh] = need(trace, "t", "x1", "x4", "ref_av", "ref_ah");
  const panels: Panel[] = [
    {
      title: "Pitch angle tracking",
      yLabel: "alpha_v (rad)",
      series: [
        { label: "reference", color: "#d62728", x: t, y: refAv, dash: "6,3", width: 1.2 },
        { label: "output", color: "#1f77b4", x: t, y: pitch },
      ],
    },
    {
      title: "Yaw angle tracking",
      yLabel: "alpha_h (rad)",
      series: [
        { label: "reference", color: "#d62728", x: t, y: refAh, dash: "6,3", width: 1.2 },
        { label: "output", color: "#1f77b4", x: t, y: yaw },
      ],
    },
  ];
  return renderFigure(panels, "time (s)");
}

function commandsFigure(trace: Trace): string {
  const [t, uv, uh] = need(trace, "t", "u_v", "u_h");
  const panels: Panel[] = [
    {
      title: "Main rotor command",
      yLabel: "u_v (V)",
      series: [{ label: "u_v", color: "#2ca02c", x: t, y: uv }],
    },
    {
      title: "Tail rotor command",
      yLabel: "u_h (V)",
      series: [{ label: "u_h", color: "#9467bd", x: t, y: uh }],
    },
  ];
  return renderFigure(panels, "time (s)");
}

function faultEstimateFigure(trace: Trace): string {
  if (trace.nFaults === 0) throw new MissingColumnError("f1");
  const t = trace.column("t");
  const panels: Panel[] = [];
  for (let i = 1; i <= trace.nFaults; i++) {
    panels.push({
      title: `Fault channel ${i}`,
      yLabel: `f${i}`,
      series: [
        { label: "fault", color: "#d62728", x: t, y: trace.column(`f${i}`) },
        { label: "estimate", color: "#1f77b4", x: t, y: trace.column(`fhat${i}`), dash: "5,3" },
      ],
    });
  }
  return renderFigure(panels, "time (s)");
}

export function buildFigure(kind: FigureKind, trace: Trace): string {
  switch (kind) {
    case "tracking":
      return trackingFigure(trace);
    case "commands":
      return commandsFigure(trace);
    case "fault_estimate":
      return faultEstimateFigure(trace);
    default: {
      const exhaustive: never = kind;
      throw new Error(`unknown figure kind ${exhaustive}`);
    }
  }
}
