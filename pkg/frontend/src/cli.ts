#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { ParseError } from "./csv.js";
import { KINDS, render, type Kind } from "./figures.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("$0 --input CSV --kind KIND --out PATH")
    .option("input", { type: "string", demandOption: true, describe: "input CSV file" })
    .option("kind", {
      choices: KINDS,
      demandOption: true,
      describe: "which figure the CSV feeds",
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .strict()
    .help()
    .parseAsync();

  try {
    const path = render({ inputCsv: args.input, kind: args.kind as Kind, output: args.out });
    console.log(path);
    return 0;
  } catch (err) {
    if (err instanceof ParseError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

main(hideBin(process.argv)).then(
  (code) => {
    process.exitCode = code;
  },
  (err) => {
    console.error(err instanceof Error ? err.message : String(err));
    process.exitCode = 1;
  },
);
