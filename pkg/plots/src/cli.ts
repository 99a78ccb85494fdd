/**
 * Render evaluation charts from a simulator aggregate CSV.
 *
 * Usage:
 *   node dist/cli.js --input aggregate.csv --outdir charts --kind all
 *   node dist/cli.js --input aggregate.csv --outdir charts --kind phase_stack
 */

import * as path from 'path';

import { FIGURE_KINDS, FigureKind, render } from './render';

interface CliArgs {
  input: string;
  outdir: string;
  kind: FigureKind | 'all';
}

export function parseArgs(argv: string[]): CliArgs {
  let input: string | undefined;
  let outdir = 'charts';
  let kind: CliArgs['kind'] = 'all';
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    switch (flag) {
      case '--input':
        input = value;
        break;
      case '--outdir':
        outdir = value;
        break;
      case '--kind':
        if (value !== 'all' && !FIGURE_KINDS.includes(value as FigureKind)) {
          throw new Error(
            `unknown kind "${value}"; expected all|${FIGURE_KINDS.join('|')}`);
        }
        kind = value as CliArgs['kind'];
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (input === undefined) {
    throw new Error('--input is required');
  }
  return { input, outdir, kind };
}

export function run(args: CliArgs): string[] {
  const kinds: FigureKind[] = args.kind === 'all' ? [...FIGURE_KINDS] : [args.kind];
  return kinds.map((kind) =>
    render({ kind, input: args.input, output: path.join(args.outdir, `${kind}.svg`) }));
}

if (require.main === module) {
  try {
    const written = run(parseArgs(process.argv.slice(2)));
    for (const file of written) {
      console.log(`wrote ${file}`);
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
