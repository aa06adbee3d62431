export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const scale = ((value: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/**
 * Round tick positions covering [lo, hi]: step is 1, 2, or 5 times a power
 * of ten, chosen so the count lands near the target.
 */
export function ticks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (step >= rawStep) break;
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

/** Extend [lo, hi] so it always has width; pad is a fraction of the span. */
export function padDomain(lo: number, hi: number, pad = 0.02): [number, number] {
  if (lo > hi) [lo, hi] = [hi, lo];
  if (lo === hi) {
    const bump = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - bump, hi + bump];
  }
  const extra = (hi - lo) * pad;
  return [lo - extra, hi + extra];
}
