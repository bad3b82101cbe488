#!/usr/bin/env node
/** plotviz: render simulation trace CSVs as SVG figures. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderToFile } from "./render.js";

await yargs(hideBin(process.argv))
  .command(
    "plot",
    "render one figure from a trace CSV",
    (y) =>
      y
        .option("trace", { type: "string", demandOption: true, describe: "trace CSV path" })
        .option("kind", {
          choices: FIGURE_KINDS,
          demandOption: true,
          describe: "figure kind",
        })
        .option("out", { type: "string", demandOption: true, describe: "output SVG path" }),
    (argv) => {
      try {
        renderToFile(argv.trace, argv.kind as FigureKind, argv.out);
        console.log(`wrote ${argv.kind} figure to ${argv.out}`);
      } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : err}`);
        process.exit(1);
      }
    },
  )
  .demandCommand(1)
  .strict()
  .help()
  .parseAsync();
