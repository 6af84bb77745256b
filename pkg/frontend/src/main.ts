import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { DEFAULT_FACET, DEFAULT_SERIES, render } from "./chart.js";
import { parseSweepCsv } from "./csv.js";

export function run(argv: string[]): number {
  let code = 0;
  yargs(argv)
    .scriptName("sweep-charts")
    .command(
      "render",
      "render a sweep CSV to a faceted SVG revenue chart",
      (y) =>
        y
          .option("in", { type: "string", demandOption: true, describe: "sweep CSV path" })
          .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
          .option("facet", { type: "string", default: DEFAULT_FACET, describe: "column to facet panels by" })
          .option("series", { type: "string", default: DEFAULT_SERIES, describe: "column to draw lines by" })
          .option("reference", { type: "boolean", default: true, describe: "dashed fair-share line y = alpha" }),
      (args) => {
        let text: string;
        try {
          text = readFileSync(args.in, "utf8");
        } catch (e) {
          console.error(`cannot read ${args.in}: ${(e as Error).message}`);
          code = 1;
          return;
        }
        try {
          const rows = parseSweepCsv(text, [args.facet, args.series]);
          const svg = render(rows, {
            facet: args.facet,
            series: args.series,
            reference: args.reference,
          });
          writeFileSync(args.out, svg);
        } catch (e) {
          console.error((e as Error).message);
          code = 1;
        }
      },
    )
    .demandCommand(1, "expected a command (render)")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      console.error(msg ?? err?.message);
      code = 1;
    })
    .parseSync();
  return code;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exitCode = run(hideBin(process.argv));
}
