#!/usr/bin/env node
import { readFileSync, mkdirSync } from "fs";
import { FIGURES, Figure, PlotSpec, presetSpec, render } from "./render.js";

const USAGE = `usage:
  spinfilter-figures render --spec SPEC.json
  spinfilter-figures fig1|fig2|fig3|fig4 --in CSV_DIR --out IMG_DIR`;

function flag(args: string[], name: string): string {
  const i = args.indexOf(name);
  if (i < 0 || i + 1 >= args.length) throw new Error(`missing ${name} PATH\n${USAGE}`);
  return args[i + 1];
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "render") {
      const spec = JSON.parse(readFileSync(flag(rest, "--spec"), "utf8")) as PlotSpec;
      console.log(`wrote ${render(spec)}`);
      return 0;
    }
    if ((FIGURES as readonly string[]).includes(command)) {
      const outDir = flag(rest, "--out");
      mkdirSync(outDir, { recursive: true });
      const spec = presetSpec(command as Figure, flag(rest, "--in"), outDir);
      console.log(`wrote ${render(spec)}`);
      return 0;
    }
    throw new Error(`unknown command: ${command ?? "(none)"}\n${USAGE}`);
  } catch (err) {
    console.error(err instanceof Error ? `${err.name}: ${err.message}` : String(err));
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
