import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';

import { afterEach, beforeEach, describe, expect, it } from 'vitest';

import { parseArgs, run } from '../src/cli';
import { FIGURE_KINDS, render } from '../src/render';

const FIXTURE = path.join(__dirname, 'fixtures', 'aggregate.csv');

let tmpdir: string;

beforeEach(() => {
  tmpdir = fs.mkdtempSync(path.join(os.tmpdir(), 'migsim-plots-'));
});

afterEach(() => {
  fs.rmSync(tmpdir, { recursive: true, force: true });
});

describe('render', () => {
  it('writes one image per figure spec', () => {
    for (const kind of FIGURE_KINDS) {
      const output = path.join(tmpdir, `${kind}.svg`);
      expect(render({ kind, input: FIXTURE, output })).toBe(output);
      expect(fs.existsSync(output)).toBe(true);
      expect(fs.readFileSync(output, 'utf8')).toContain('<svg');
    }
  });

  it('re-running produces identical files', () => {
    const output = path.join(tmpdir, 'curve.svg');
    render({ kind: 'per_strategy_curve', input: FIXTURE, output });
    const first = fs.readFileSync(output);
    render({ kind: 'per_strategy_curve', input: FIXTURE, output });
    expect(fs.readFileSync(output).equals(first)).toBe(true);
  });

  it('empty CSV errors and writes nothing', () => {
    const empty = path.join(tmpdir, 'empty.csv');
    fs.writeFileSync(empty, '');
    const output = path.join(tmpdir, 'out.svg');
    expect(() => render({ kind: 'phase_stack', input: empty, output }))
      .toThrow(/no header/);
    expect(fs.existsSync(output)).toBe(false);
  });

  it('missing column errors name the column and write nothing', () => {
    const broken = path.join(tmpdir, 'broken.csv');
    const text = fs.readFileSync(FIXTURE, 'utf8').replace('replay_share', 'replay_pct');
    fs.writeFileSync(broken, text);
    const output = path.join(tmpdir, 'out.svg');
    expect(() => render({ kind: 'phase_stack', input: broken, output }))
      .toThrow(/missing column: replay_share/);
    expect(fs.existsSync(output)).toBe(false);
  });
});

describe('cli', () => {
  it('parses flags and defaults kind to all', () => {
    const args = parseArgs(['--input', 'agg.csv', '--outdir', 'charts']);
    expect(args).toEqual({ input: 'agg.csv', outdir: 'charts', kind: 'all' });
  });

  it('requires --input and a known kind', () => {
    expect(() => parseArgs([])).toThrow(/--input is required/);
    expect(() => parseArgs(['--input', 'x.csv', '--kind', 'pie']))
      .toThrow(/unknown kind/);
    expect(() => parseArgs(['--bogus', '1'])).toThrow(/unknown flag/);
    expect(() => parseArgs(['--input'])).toThrow(/missing value/);
  });

  it('kind=all writes one image per family', () => {
    const written = run({ input: FIXTURE, outdir: tmpdir, kind: 'all' });
    expect(written).toEqual(FIGURE_KINDS.map((k) => path.join(tmpdir, `${k}.svg`)));
    for (const file of written) {
      expect(fs.existsSync(file)).toBe(true);
    }
  });

  it('single kind writes exactly one file', () => {
    const written = run({ input: FIXTURE, outdir: tmpdir, kind: 'phase_stack' });
    expect(written.length).toBe(1);
    expect(fs.readdirSync(tmpdir)).toEqual(['phase_stack.svg']);
  });
});
