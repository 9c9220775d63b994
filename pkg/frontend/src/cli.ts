#!/usr/bin/env node
/**
 * mhdlab-plot <kind> --in PATH --out PATH [--title TEXT]
 *
 * kinds: rate_loglog | components_timeseries | corrector_comparison | energy_slack
 * Output format follows the extension of --out (.svg or .png).
 * Exit codes: 0 ok, 1 bad arguments, 2 malformed/invalid input CSV.
 */

import * as fs from "fs";
import * as path from "path";

import { CsvError, parseCaseCsv, parseRateCsv } from "./csv";
import {
  FIGURE_KINDS,
  FigureKind,
  FIGURE_SIZE,
  renderComparison,
  renderComponents,
  renderRate,
  renderSlack,
} from "./figures";
import { surfaceForPath } from "./surface";

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
  title?: string;
}

function usage(): string {
  return (
    "usage: mhdlab-plot <kind> --in <csv> --out <image.(svg|png)> [--title TEXT]\n" +
    `kinds: ${FIGURE_KINDS.join(" | ")}`
  );
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) throw new Error(usage());
  const [kind, ...rest] = argv;
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown figure kind "${kind}"\n${usage()}`);
  }
  let input: string | undefined;
  let output: string | undefined;
  let title: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new Error(`flag ${flag} needs a value\n${usage()}`);
    if (flag === "--in") input = value;
    else if (flag === "--out") output = value;
    else if (flag === "--title") title = value;
    else throw new Error(`unknown flag "${flag}"\n${usage()}`);
    i++;
  }
  if (!input || !output) throw new Error(`--in and --out are required\n${usage()}`);
  return { kind: kind as FigureKind, input, output, title };
}

export function renderFigure(args: Args): Buffer {
  const text = fs.readFileSync(args.input, "utf8");
  const surface = surfaceForPath(args.output, FIGURE_SIZE.width, FIGURE_SIZE.height);
  if (args.kind === "rate_loglog") {
    renderRate(surface, parseRateCsv(text, args.input), args.title);
  } else {
    const file = parseCaseCsv(text, args.input);
    if (args.kind === "components_timeseries") renderComponents(surface, file, args.title);
    else if (args.kind === "corrector_comparison") renderComparison(surface, file, args.title);
    else renderSlack(surface, file, args.title);
  }
  return surface.toBuffer();
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  try {
    const buffer = renderFigure(args);
    fs.mkdirSync(path.dirname(path.resolve(args.output)), { recursive: true });
    fs.writeFileSync(args.output, buffer);
    console.log(`${args.kind}: ${args.input} -> ${args.output} (${buffer.length} bytes)`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`invalid input: ${(err as Error).message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`cannot read ${args.input}: no such file`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
