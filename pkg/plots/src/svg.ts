/**
 * Tiny deterministic SVG builder: plain string assembly, fixed number
 * formatting, no timestamps or generated ids, so identical input data
 * always yields byte-identical markup.
 */

export function fmt(n: number): string {
  if (!Number.isFinite(n)) {
    throw new Error(`non-finite coordinate: ${n}`);
  }
  const rounded = Math.round(n * 1000) / 1000;
  return Object.is(rounded, -0) ? '0' : String(rounded);
}

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === 'number' ? fmt(v) : v}"`)
    .join(' ');
  const open = parts.length > 0 ? `<${tag} ${parts}>` : `<${tag}>`;
  if (children.length === 0) {
    return open.replace(/>$/, '/>');
  }
  return `${open}${children.join('')}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === 'number' ? fmt(v) : v}"`)
    .join(' ');
  return `<text ${parts}>${escapeText(content)}</text>`;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function svgDocument(width: number, height: number, children: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" height="${fmt(height)}" viewBox="0 0 ${fmt(width)} ${fmt(height)}" font-family="sans-serif">`,
    ...children,
    '</svg>',
    '',
  ].join('\n');
}

/** Round a positive value up to a "nice" axis maximum (1/2/5 ladder). */
export function niceMax(value: number): number {
  if (value <= 0) return 1;
  const power = Math.pow(10, Math.floor(Math.log10(value)));
  for (const step of [1, 2, 5, 10]) {
    if (value <= step * power) return step * power;
  }
  return 10 * power;
}

export function yTicks(max: number, count = 5): number[] {
  const ticks = [];
  for (let i = 0; i <= count; i += 1) {
    ticks.push((max * i) / count);
  }
  return ticks;
}
