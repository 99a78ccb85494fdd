/**
 * Parser for the simulator's aggregate CSV.
 *
 * Expected columns:
 *   strategy,lambda,n,total_mean_s,total_std_s,downtime_mean_s,downtime_std_s
 * followed by the mean phase-share columns (replay_share, checkpoint_share,
 * ...). Charts consume only this file; they never see simulator internals.
 */

export const PHASE_NAMES = [
  'replay', 'checkpoint', 'build', 'push', 'pull',
  'restore', 'pod_delete', 'pod_create', 'handover', 'wait',
] as const;

export type PhaseName = (typeof PHASE_NAMES)[number];

const BASE_COLUMNS = [
  'strategy', 'lambda', 'n', 'total_mean_s', 'total_std_s',
  'downtime_mean_s', 'downtime_std_s',
];

export const REQUIRED_COLUMNS: string[] = [
  ...BASE_COLUMNS,
  ...PHASE_NAMES.map((p) => `${p}_share`),
];

export interface AggregateRow {
  strategy: string;
  lambda: number;
  n: number;
  totalMean: number;
  totalStd: number;
  downtimeMean: number;
  downtimeStd: number;
  shares: Record<PhaseName, number>;
}

export class CsvError extends Error {}

function toNumber(cell: string, column: string, line: number): number {
  const value = Number(cell);
  if (cell === '' || Number.isNaN(value)) {
    throw new CsvError(`line ${line}: column ${column}: not a number: "${cell}"`);
  }
  return value;
}

export function parseAggregateCsv(text: string): AggregateRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError('empty CSV: no header row');
  }
  const header = lines[0].split(',');
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new CsvError(`missing column: ${column}`);
    }
  }
  if (lines.length < 2) {
    throw new CsvError('empty CSV: no data rows');
  }
  const index = new Map(header.map((name, i) => [name, i]));
  const cell = (cols: string[], name: string) => cols[index.get(name)!];

  return lines.slice(1).map((line, i) => {
    const cols = line.split(',');
    if (cols.length < header.length) {
      throw new CsvError(`line ${i + 2}: expected ${header.length} cells, got ${cols.length}`);
    }
    const shares = {} as Record<PhaseName, number>;
    for (const phase of PHASE_NAMES) {
      shares[phase] = toNumber(cell(cols, `${phase}_share`), `${phase}_share`, i + 2);
    }
    return {
      strategy: cell(cols, 'strategy'),
      lambda: toNumber(cell(cols, 'lambda'), 'lambda', i + 2),
      n: toNumber(cell(cols, 'n'), 'n', i + 2),
      totalMean: toNumber(cell(cols, 'total_mean_s'), 'total_mean_s', i + 2),
      totalStd: toNumber(cell(cols, 'total_std_s'), 'total_std_s', i + 2),
      downtimeMean: toNumber(cell(cols, 'downtime_mean_s'), 'downtime_mean_s', i + 2),
      downtimeStd: toNumber(cell(cols, 'downtime_std_s'), 'downtime_std_s', i + 2),
      shares,
    };
  });
}

/** Canonical strategy order for panels and legends. */
const STRATEGY_ORDER = [
  'stop-and-copy', 'ms2m-individual', 'ms2m-cutoff', 'ms2m-statefulset',
];

export function strategiesOf(rows: AggregateRow[]): string[] {
  const present = [...new Set(rows.map((r) => r.strategy))];
  const known = STRATEGY_ORDER.filter((s) => present.includes(s));
  const extra = present.filter((s) => !STRATEGY_ORDER.includes(s)).sort();
  return [...known, ...extra];
}

export function lambdasOf(rows: AggregateRow[]): number[] {
  return [...new Set(rows.map((r) => r.lambda))].sort((a, b) => a - b);
}
