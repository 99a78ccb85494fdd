import * as fs from 'fs';
import * as path from 'path';

import { describe, expect, it } from 'vitest';

import {
  CsvError,
  lambdasOf,
  parseAggregateCsv,
  REQUIRED_COLUMNS,
  strategiesOf,
} from '../src/csv';

const FIXTURE = path.join(__dirname, 'fixtures', 'aggregate.csv');
const fixtureText = fs.readFileSync(FIXTURE, 'utf8');

describe('parseAggregateCsv', () => {
  it('parses the simulator sweep fixture', () => {
    const rows = parseAggregateCsv(fixtureText);
    expect(rows.length).toBe(20); // 4 strategies x 5 rates
    expect(strategiesOf(rows)).toEqual([
      'stop-and-copy', 'ms2m-individual', 'ms2m-cutoff', 'ms2m-statefulset',
    ]);
    expect(lambdasOf(rows)).toEqual([4, 8, 10, 12, 16]);
    const sc = rows.find((r) => r.strategy === 'stop-and-copy' && r.lambda === 4)!;
    expect(sc.totalMean).toBeCloseTo(49.055, 6);
    expect(sc.downtimeMean).toBeCloseTo(49.055, 6);
    expect(sc.n).toBe(3);
  });

  it('phase shares of each fixture row sum to one', () => {
    for (const row of parseAggregateCsv(fixtureText)) {
      const sum = Object.values(row.shares).reduce((a, b) => a + b, 0);
      expect(sum).toBeCloseTo(1.0, 9);
    }
  });

  it('names the missing column', () => {
    const lines = fixtureText.split('\n');
    const header = lines[0].split(',').filter((c) => c !== 'downtime_mean_s');
    const mangled = [header.join(','), ...lines.slice(1)].join('\n');
    expect(() => parseAggregateCsv(mangled)).toThrow(/missing column: downtime_mean_s/);
  });

  it('rejects a header-only file as empty', () => {
    expect(() => parseAggregateCsv(REQUIRED_COLUMNS.join(',') + '\n'))
      .toThrow(/no data rows/);
  });

  it('rejects a fully empty file', () => {
    expect(() => parseAggregateCsv('')).toThrow(CsvError);
    expect(() => parseAggregateCsv('\n\n')).toThrow(/no header/);
  });

  it('rejects non-numeric cells, naming the column', () => {
    const lines = fixtureText.split('\n');
    const cells = lines[1].split(',');
    cells[3] = 'banana'; // total_mean_s
    const mangled = [lines[0], cells.join(',')].join('\n');
    expect(() => parseAggregateCsv(mangled)).toThrow(/total_mean_s.*banana/);
  });

  it('rejects short rows', () => {
    const lines = fixtureText.split('\n');
    const mangled = [lines[0], 'stop-and-copy,4.0,3'].join('\n');
    expect(() => parseAggregateCsv(mangled)).toThrow(/expected .* cells/);
  });

  it('keeps unknown strategies after the canonical ones', () => {
    const lines = fixtureText.trim().split('\n');
    const custom = lines[1].replace('stop-and-copy', 'zz-experimental');
    const rows = parseAggregateCsv([lines[0], lines[1], custom].join('\n'));
    const order = strategiesOf(rows);
    expect(order[order.length - 1]).toBe('zz-experimental');
  });
});
