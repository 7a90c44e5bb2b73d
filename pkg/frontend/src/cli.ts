/** Shared --in / --out argument handling for the figure scripts. */

import { writeFileSync, mkdirSync } from "fs";
import { dirname } from "path";

export interface FigureArgs {
  inDir: string;
  outFile: string;
}

export function parseArgs(argv: string[], name: string): FigureArgs {
  let inDir: string | undefined;
  let outFile: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--in") inDir = argv[++i];
    else if (argv[i] === "--out") outFile = argv[++i];
    else {
      console.error(`${name}: unknown argument '${argv[i]}'`);
      process.exit(2);
    }
  }
  if (!inDir || !outFile) {
    console.error(`usage: ${name} --in <dir> --out <file.svg>`);
    process.exit(2);
  }
  return { inDir, outFile };
}

export function writeSvg(path: string, svg: string): void {
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, svg);
}

export function runFigure(
  name: string,
  build: (dir: string) => { svg: string },
): void {
  const args = parseArgs(process.argv.slice(2), name);
  try {
    const { svg } = build(args.inDir);
    writeSvg(args.outFile, svg);
    console.log(`${name}: wrote ${args.outFile}`);
  } catch (err) {
    console.error(`${name}: ${(err as Error).message}`);
    process.exit(1);
  }
}
