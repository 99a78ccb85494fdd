/** FigureSpec dispatch: read the CSV, render one SVG, write it out.
 *
 * The output file is only written after a successful render, so a bad or
 * empty CSV never leaves a partial image behind.
 */

import * as fs from 'fs';
import * as path from 'path';

import { parseAggregateCsv } from './csv';
import {
  renderPerRateComparison,
  renderPerStrategyCurves,
  renderPhaseStack,
} from './charts';

export const FIGURE_KINDS = [
  'per_strategy_curve', 'per_rate_comparison', 'phase_stack',
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
}

const RENDERERS: Record<FigureKind, (rows: ReturnType<typeof parseAggregateCsv>) => string> = {
  per_strategy_curve: renderPerStrategyCurves,
  per_rate_comparison: renderPerRateComparison,
  phase_stack: renderPhaseStack,
};

export function render(spec: FigureSpec): string {
  const csvText = fs.readFileSync(spec.input, 'utf8');
  const rows = parseAggregateCsv(csvText);
  const svg = RENDERERS[spec.kind](rows);
  fs.mkdirSync(path.dirname(spec.output), { recursive: true });
  fs.writeFileSync(spec.output, svg);
  return spec.output;
}
