/**
 * The three chart families over aggregate rows:
 *
 *  - per_strategy_curve: one panel per strategy, total and downtime means
 *    against the message rate (line + points).
 *  - per_rate_comparison: one panel per rate, grouped total/downtime bars
 *    per strategy.
 *  - phase_stack: one panel per strategy, a stacked share bar per rate.
 */

import { AggregateRow, PHASE_NAMES, lambdasOf, strategiesOf } from './csv';
import { el, fmt, niceMax, svgDocument, text, yTicks } from './svg';

const PANEL_W = 330;
const PANEL_H = 250;
const MARGIN = { top: 36, right: 16, bottom: 42, left: 52 };
const PLOT_W = PANEL_W - MARGIN.left - MARGIN.right;
const PLOT_H = PANEL_H - MARGIN.top - MARGIN.bottom;

const TOTAL_COLOR = '#2563eb';
const DOWNTIME_COLOR = '#dc2626';

const PHASE_COLORS: Record<string, string> = {
  replay: '#dc2626',
  checkpoint: '#2563eb',
  build: '#059669',
  push: '#d97706',
  pull: '#7c3aed',
  restore: '#0d9488',
  pod_delete: '#f59e0b',
  pod_create: '#6366f1',
  handover: '#475569',
  wait: '#94a3b8',
};

interface Panel {
  title: string;
  body: string[];
}

function panelGrid(panels: Panel[], title: string, footer: string[]): string {
  const cols = Math.min(panels.length, 2);
  const rows = Math.ceil(panels.length / cols);
  const width = cols * PANEL_W + 20;
  const height = rows * PANEL_H + 48 + 24;
  const children: string[] = [
    text(title, { x: 12, y: 22, 'font-size': 15, 'font-weight': 'bold', fill: '#111' }),
  ];
  panels.forEach((panel, i) => {
    const px = 10 + (i % cols) * PANEL_W;
    const py = 32 + Math.floor(i / cols) * PANEL_H;
    children.push(el('g', { transform: `translate(${fmt(px)},${fmt(py)})` }, [
      text(panel.title, {
        x: MARGIN.left + PLOT_W / 2, y: 18, 'text-anchor': 'middle',
        'font-size': 12, fill: '#111',
      }),
      ...panel.body,
    ]));
  });
  const fy = 32 + rows * PANEL_H + 8;
  footer.forEach((line, i) => {
    children.push(text(line, { x: 12, y: fy + i * 14, 'font-size': 11, fill: '#444' }));
  });
  return svgDocument(width, height, children);
}

function axes(yMax: number, xLabel: string, yLabel: string): string[] {
  const out: string[] = [];
  out.push(el('rect', {
    x: MARGIN.left, y: MARGIN.top, width: PLOT_W, height: PLOT_H,
    fill: 'none', stroke: '#999', 'stroke-width': 1,
  }));
  for (const tick of yTicks(yMax)) {
    const y = MARGIN.top + PLOT_H - (tick / yMax) * PLOT_H;
    out.push(el('line', {
      x1: MARGIN.left, y1: y, x2: MARGIN.left + PLOT_W, y2: y,
      stroke: '#eee', 'stroke-width': 1,
    }));
    out.push(text(fmt(tick), {
      x: MARGIN.left - 6, y: y + 3, 'text-anchor': 'end', 'font-size': 9, fill: '#444',
    }));
  }
  out.push(text(xLabel, {
    x: MARGIN.left + PLOT_W / 2, y: PANEL_H - 8, 'text-anchor': 'middle',
    'font-size': 10, fill: '#444',
  }));
  out.push(text(yLabel, {
    x: 12, y: MARGIN.top - 8, 'font-size': 10, fill: '#444',
  }));
  return out;
}

function xBand(values: number[], i: number): { center: number; width: number } {
  const band = PLOT_W / values.length;
  return { center: MARGIN.left + band * (i + 0.5), width: band };
}

export function renderPerStrategyCurves(rows: AggregateRow[]): string {
  const strategies = strategiesOf(rows);
  const lambdas = lambdasOf(rows);
  const panels: Panel[] = strategies.map((strategy) => {
    const mine = lambdas
      .map((lam) => rows.find((r) => r.strategy === strategy && r.lambda === lam))
      .filter((r): r is AggregateRow => r !== undefined);
    const yMax = niceMax(Math.max(...mine.map((r) => r.totalMean)));
    const body = axes(yMax, 'message rate (msg/s)', 'seconds');
    const x = (lam: number) => xBand(lambdas, lambdas.indexOf(lam)).center;
    const y = (v: number) => MARGIN.top + PLOT_H - (v / yMax) * PLOT_H;
    for (const lam of lambdas) {
      body.push(text(fmt(lam), {
        x: x(lam), y: MARGIN.top + PLOT_H + 14, 'text-anchor': 'middle',
        'font-size': 9, fill: '#444',
      }));
    }
    for (const [key, color] of [['totalMean', TOTAL_COLOR],
                                ['downtimeMean', DOWNTIME_COLOR]] as const) {
      const pts = mine.map((r) => `${fmt(x(r.lambda))},${fmt(y(r[key]))}`).join(' ');
      body.push(el('polyline', {
        points: pts, fill: 'none', stroke: color, 'stroke-width': 2,
      }));
      for (const r of mine) {
        body.push(el('circle', { cx: x(r.lambda), cy: y(r[key]), r: 3, fill: color }));
      }
    }
    return { title: strategy, body };
  });
  return panelGrid(panels, 'Migration time vs message rate', [
    `blue: total migration time, red: downtime (means over n runs)`,
  ]);
}

export function renderPerRateComparison(rows: AggregateRow[]): string {
  const strategies = strategiesOf(rows);
  const lambdas = lambdasOf(rows);
  const panels: Panel[] = lambdas.map((lam) => {
    const mine = strategies
      .map((s) => rows.find((r) => r.strategy === s && r.lambda === lam))
      .filter((r): r is AggregateRow => r !== undefined);
    const yMax = niceMax(Math.max(...mine.map((r) => r.totalMean)));
    const body = axes(yMax, 'strategy', 'seconds');
    const y = (v: number) => MARGIN.top + PLOT_H - (v / yMax) * PLOT_H;
    mine.forEach((r, i) => {
      const { center, width } = xBand(mine.map((m) => m.lambda), i);
      const barW = width * 0.3;
      body.push(el('rect', {
        x: center - barW, y: y(r.totalMean), width: barW,
        height: MARGIN.top + PLOT_H - y(r.totalMean), fill: TOTAL_COLOR,
      }));
      body.push(el('rect', {
        x: center, y: y(r.downtimeMean), width: barW,
        height: MARGIN.top + PLOT_H - y(r.downtimeMean), fill: DOWNTIME_COLOR,
      }));
      body.push(text(r.strategy.replace('ms2m-', ''), {
        x: center, y: MARGIN.top + PLOT_H + 14, 'text-anchor': 'middle',
        'font-size': 8, fill: '#444',
      }));
    });
    return { title: `message rate ${fmt(lam)}/s`, body };
  });
  return panelGrid(panels, 'Strategy comparison per message rate', [
    'blue: total migration time, red: downtime',
  ]);
}

export function renderPhaseStack(rows: AggregateRow[]): string {
  const strategies = strategiesOf(rows);
  const lambdas = lambdasOf(rows);
  const panels: Panel[] = strategies.map((strategy) => {
    const body = axes(1, 'message rate (msg/s)', 'share of total time');
    const yBase = MARGIN.top + PLOT_H;
    lambdas.forEach((lam, i) => {
      const row = rows.find((r) => r.strategy === strategy && r.lambda === lam);
      const { center, width } = xBand(lambdas, i);
      body.push(text(fmt(lam), {
        x: center, y: yBase + 14, 'text-anchor': 'middle', 'font-size': 9, fill: '#444',
      }));
      if (row === undefined) return;
      const barW = width * 0.55;
      let cursor = 0;
      for (const phase of PHASE_NAMES) {
        const share = row.shares[phase];
        if (share <= 0) continue;
        const h = share * PLOT_H;
        body.push(el('rect', {
          x: center - barW / 2, y: yBase - cursor - h, width: barW, height: h,
          fill: PHASE_COLORS[phase],
        }));
        cursor += h;
      }
    });
    return { title: strategy, body };
  });
  const legend = PHASE_NAMES.map((p) => `${p}: ${PHASE_COLORS[p]}`).join('  ');
  return panelGrid(panels, 'Time share per migration phase', [legend]);
}
