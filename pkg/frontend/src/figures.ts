import * as path from 'path';

import { LawRow, NeighborhoodRow, readLaw, readNeighborhood } from './csv';
import {
  Frame, STYLE, decadeTicks, drawBox, linearScale, logScale, label,
  newFrame, niceTicks, xAxis, yAxis, yAxisRight,
} from './svg';

export interface FigureRecipe {
  id: string;
  slug: string;
  title: string;
  /** law.csv / neighborhood.csv paths relative to the results dir */
  inputs: string[];
  render(frame: Frame, tables: Map<string, Record<string, number>[]>): void;
}

function uniqueSorted(xs: number[]): number[] {
  return [...new Set(xs)].sort((a, b) => a - b);
}

function groupBy(rows: LawRow[], key: 'level' | 'n'): Map<number, LawRow[]> {
  const m = new Map<number, LawRow[]>();
  for (const r of rows) {
    const k = r[key];
    const bucket = m.get(k);
    if (bucket) bucket.push(r); else m.set(k, [r]);
  }
  return m;
}

// ---------------------------------------------------------------- wireframe

/**
 * Oblique projection of a (level, n, value) grid.  Lines connect raw
 * data points at constant n and at constant level; nothing is
 * interpolated or meshed.
 */
function wireframe(
  f: Frame, rows: LawRow[], value: (r: LawRow) => number,
  color: string, vMax: number | null, dash = '',
): void {
  if (rows.length === 0) return;
  const levels = uniqueSorted(rows.map((r) => r.level));
  const ns = uniqueSorted(rows.map((r) => r.n));
  const vTop = vMax ?? Math.max(...rows.map(value), 1e-300);
  const depthX = 90;
  const depthY = 70;
  const lSpan = Math.max(levels[levels.length - 1] - levels[0], 1);
  const proj = (lv: number, n: number, v: number): [number, number] => {
    const u = (lv - levels[0]) / lSpan;
    const w = Math.min(v / vTop, 1);
    const d = ns.length > 1 ? ns.indexOf(n) / (ns.length - 1) : 0;
    return [
      f.x0 + u * (f.x1 - f.x0 - depthX) + d * depthX,
      f.y0 - w * (f.y0 - f.y1 - depthY) - d * depthY,
    ];
  };

  const byN = groupBy(rows, 'n');
  for (const n of ns) {
    const line = (byN.get(n) ?? []).slice().sort((a, b) => a.level - b.level);
    f.doc.polyline(line.map((r) => proj(r.level, n, value(r))), color, 1.2, dash);
    const last = line[line.length - 1];
    if (last) {
      const [x, y] = proj(last.level, n, value(last));
      f.doc.text(x + 6, y + 4, `n=${n}`, 10, 'start');
    }
  }
  const byLevel = groupBy(rows, 'level');
  for (const lv of levels) {
    const line = (byLevel.get(lv) ?? []).slice().sort((a, b) => a.n - b.n);
    f.doc.polyline(line.map((r) => proj(r.level, r.n, value(r))), color, 0.6, dash);
  }
}

function wireframeAxes(f: Frame, rows: LawRow[], vMax: number | null, vName: string): void {
  f.doc.line(f.x0, f.y0, f.x1 - 90, f.y0, STYLE.frame);
  f.doc.line(f.x0, f.y0, f.x0, f.y1 + 70, STYLE.frame);
  if (rows.length === 0) return;
  const levels = uniqueSorted(rows.map((r) => r.level));
  const lo = levels[0];
  const hi = levels[levels.length - 1];
  f.doc.text(f.x0, f.y0 + 16, label(lo));
  f.doc.text(f.x1 - 90, f.y0 + 16, label(hi));
  f.doc.text((f.x0 + f.x1 - 90) / 2, f.y0 + 34, 'level', 12);
  const top = vMax ?? Math.max(...rows.map((r) => r.a_hat));
  f.doc.text(f.x0 - 8, f.y1 + 74, label(top), 11, 'end');
  f.doc.text(f.x0 - 8, f.y0 + 4, '0', 11, 'end');
  f.doc.text(f.x0 - 46, (f.y0 + f.y1) / 2, vName, 12, 'middle', -90);
}

// ------------------------------------------------------------- law vs tau

function lawVersusTau(f: Frame, rows: LawRow[], refName: string): void {
  const pos = rows.filter((r) => r.tau > 0);
  const xs = pos.length > 0
    ? logScale(Math.min(...pos.map((r) => r.tau)) / 1.5,
      Math.max(...pos.map((r) => r.tau)) * 1.5, f.x0, f.x1)
    : logScale(1e-2, 10, f.x0, f.x1);
  const ys = linearScale(0, 1, f.y0, f.y1);
  drawBox(f);
  xAxis(f, xs, decadeTicks(xs.d0, xs.d1), 'tau');
  yAxis(f, ys, niceTicks(0, 1, 5), 'A');

  // reference curve through the raw grid, sorted in tau
  const ref = pos.slice().sort((a, b) => a.tau - b.tau);
  f.doc.polyline(ref.map((r) => [xs(r.tau), ys(r.reference)]), STYLE.ratio, 1.4);

  // constant-level joins across the block lengths
  const byLevel = groupBy(pos, 'level');
  for (const [, line] of [...byLevel.entries()].sort((a, b) => a[0] - b[0])) {
    const sorted = line.slice().sort((a, b) => a.n - b.n);
    f.doc.polyline(sorted.map((r) => [xs(r.tau), ys(r.a_hat)]), STYLE.join, 0.8);
  }
  for (const r of pos) f.doc.cross(xs(r.tau), ys(r.a_hat), 3, STYLE.sample);
  f.doc.text(f.x1 - 8, f.y1 + 14, refName, 11, 'end');
}

// ------------------------------------------------- neighborhood log-log

function neighborhoodLogLog(f: Frame, rows: NeighborhoodRow[], refName: string): void {
  const pos = rows.filter((r) => r.mu_hat > 0 && r.reference > 0);
  const mus = pos.flatMap((r) => [r.mu_hat, r.reference]);
  const xs = pos.length > 0
    ? logScale(Math.min(...pos.map((r) => r.eps)) / 1.5,
      Math.max(...pos.map((r) => r.eps)) * 1.5, f.x0, f.x1)
    : logScale(1e-6, 1e-1, f.x0, f.x1);
  const ys = pos.length > 0
    ? logScale(Math.min(...mus) / 1.5, Math.max(...mus) * 1.5, f.y0, f.y1)
    : logScale(1e-3, 1, f.y0, f.y1);
  drawBox(f);
  xAxis(f, xs, decadeTicks(xs.d0, xs.d1), 'eps');
  yAxis(f, ys, decadeTicks(ys.d0, ys.d1), 'measure');

  const sorted = pos.slice().sort((a, b) => a.eps - b.eps);
  f.doc.polyline(sorted.map((r) => [xs(r.eps), ys(r.reference)]), STYLE.reference, 1.4);
  for (const r of pos) f.doc.cross(xs(r.eps), ys(r.mu_hat), 3, STYLE.sample);

  // ratio of sample to the power law, on its own right-hand scale
  const ratios = sorted.map((r) => r.mu_hat / r.reference);
  const rLo = ratios.length > 0 ? Math.min(...ratios, 1) : 0.5;
  const rHi = ratios.length > 0 ? Math.max(...ratios, 1) : 2;
  const pad = 0.1 * (rHi - rLo || 1);
  const rs = linearScale(rLo - pad, rHi + pad, f.y0, f.y1);
  f.doc.polyline(sorted.map((r, i) => [xs(r.eps), rs(ratios[i])]), STYLE.ratio, 1.2);
  yAxisRight(f, rs, niceTicks(rs.d0, rs.d1, 5), 'ratio to reference');
  f.doc.text(f.x1 - 8, f.y1 + 14, refName, 11, 'end');
}

// ------------------------------------------------------------ the recipes

function renderLadderSketch(f: Frame): void {
  // geometry of the removed middle thirds, computed right here; the
  // observable takes the value (3/2)^m on every gap of order m
  const beta = 1.5;
  const orders = 6;
  const gaps: { m: number; lo: number; hi: number }[] = [];
  let intervals: [number, number][] = [[0, 1]];
  for (let m = 1; m <= orders; m++) {
    const next: [number, number][] = [];
    for (const [a, b] of intervals) {
      const w = (b - a) / 3;
      gaps.push({ m, lo: a + w, hi: b - w });
      next.push([a, a + w], [b - w, b]);
    }
    intervals = next;
  }
  const xs = linearScale(0, 1, f.x0, f.x1);
  const ys = linearScale(0, beta ** orders * 1.08, f.y0, f.y1);
  drawBox(f);
  xAxis(f, xs, niceTicks(0, 1, 5), 'x');
  yAxis(f, ys, niceTicks(0, beta ** orders * 1.08, 5), 'observable value');
  for (const g of gaps) {
    const y = ys(beta ** g.m);
    f.doc.line(xs(g.lo), y, xs(g.hi), y, STYLE.sample, 1.6);
  }
  f.doc.text(f.x1 - 8, f.y1 + 14, 'value (3/2)^m on gaps of order m, m <= 6', 11, 'end');
}

function renderLadderSurfaces(
  f: Frame, tables: Map<string, Record<string, number>[]>,
): void {
  const tent = (tables.get('ladder-tent/law.csv') ?? []) as LawRow[];
  const rot = (tables.get('ladder-rotation/law.csv') ?? []) as LawRow[];
  wireframeAxes(f, tent.length > 0 ? tent : rot, 1, 'A(level, n)');
  wireframe(f, tent, (r) => r.a_hat, STYLE.sample, 1);
  wireframe(f, rot, (r) => r.a_hat, STYLE.second, 1, '4 3');
  f.doc.text(f.x1 - 8, f.y1 + 14, 'solid: tent map, dashed: rotation', 11, 'end');
}

function renderDeviationSurface(input: string, refName: string) {
  return (f: Frame, tables: Map<string, Record<string, number>[]>): void => {
    const rows = (tables.get(input) ?? []) as LawRow[];
    const vMax = rows.length > 0 ? Math.max(...rows.map((r) => r.deviation)) : null;
    wireframeAxes(f, rows, vMax, 'abs deviation');
    wireframe(f, rows, (r) => r.deviation, STYLE.sample, vMax);
    f.doc.text(f.x1 - 8, f.y1 + 14, refName, 11, 'end');
  };
}

function renderLevelDensities(
  f: Frame, tables: Map<string, Record<string, number>[]>,
): void {
  const tent = (tables.get('ladder-tent/law.csv') ?? []) as LawRow[];
  const rot = (tables.get('ladder-rotation/law.csv') ?? []) as LawRow[];
  // density across levels: increments of A at constant n, still raw
  // plot data, just differenced between adjacent grid points
  const densities = (rows: LawRow[]) => {
    const out: { n: number; pts: [number, number][] }[] = [];
    for (const [n, line] of groupBy(rows, 'n')) {
      const sorted = line.slice().sort((a, b) => a.level - b.level);
      const pts: [number, number][] = [];
      for (let i = 1; i < sorted.length; i++) {
        pts.push([sorted[i].level, sorted[i].a_hat - sorted[i - 1].a_hat]);
      }
      out.push({ n, pts });
    }
    return out.sort((a, b) => a.n - b.n);
  };
  const dt = densities(tent);
  const dr = densities(rot);
  const allPts = [...dt, ...dr].flatMap((d) => d.pts);
  const levels = allPts.map((p) => p[0]);
  const lo = levels.length > 0 ? Math.min(...levels) : 0;
  const hi = levels.length > 0 ? Math.max(...levels) : 1;
  const top = allPts.length > 0 ? Math.max(...allPts.map((p) => p[1])) * 1.1 : 1;
  const xs = linearScale(lo, hi, f.x0, f.x1);
  const ys = linearScale(0, top > 0 ? top : 1, f.y0, f.y1);
  drawBox(f);
  xAxis(f, xs, niceTicks(lo, hi, 6), 'level');
  yAxis(f, ys, niceTicks(0, top > 0 ? top : 1, 5), 'density of the maximum');
  for (const d of dt) {
    f.doc.polyline(d.pts.map(([l, v]) => [xs(l), ys(v)]), STYLE.sample, 1.2);
  }
  for (const d of dr) {
    f.doc.polyline(d.pts.map(([l, v]) => [xs(l), ys(v)]), STYLE.second, 1.2, '4 3');
  }
  for (const d of [...dt, ...dr]) {
    const last = d.pts[d.pts.length - 1];
    if (last) f.doc.text(xs(last[0]) + 4, ys(last[1]), `n=${d.n}`, 10, 'start');
  }
  f.doc.text(f.x1 - 8, f.y1 + 14, 'solid: tent map, dashed: rotation', 11, 'end');
}

export const RECIPES: FigureRecipe[] = [
  {
    id: 'F01',
    slug: 'ladder_observable',
    title: 'Ladder observable on the Cantor gaps',
    inputs: [],
    render: (f) => renderLadderSketch(f),
  },
  {
    id: 'F02',
    slug: 'ladder_law_surfaces',
    title: 'Empirical law A(level, n), tent map and rotation',
    inputs: ['ladder-tent/law.csv', 'ladder-rotation/law.csv'],
    render: renderLadderSurfaces,
  },
  {
    id: 'F03',
    slug: 'ladder_rotation_deviation',
    title: 'Deviation from exp(-tau), rotation ladder',
    inputs: ['ladder-rotation/law.csv'],
    render: renderDeviationSurface('ladder-rotation/law.csv', 'reference exp(-tau)'),
  },
  {
    id: 'F04',
    slug: 'ladder_level_densities',
    title: 'Level densities of the block maximum',
    inputs: ['ladder-tent/law.csv', 'ladder-rotation/law.csv'],
    render: renderLevelDensities,
  },
  {
    id: 'F05',
    slug: 'lebesgue_cantor_neighborhood',
    title: 'Lebesgue measure of Cantor neighborhoods',
    inputs: ['minkowski-scan/neighborhood.csv'],
    render: (f, t) => neighborhoodLogLog(
      f, (t.get('minkowski-scan/neighborhood.csv') ?? []) as NeighborhoodRow[],
      'reference (5/2) eps^(1 - log2/log3)',
    ),
  },
  {
    id: 'F06',
    slug: 'qmark_cantor_neighborhood',
    title: 'Question-mark measure of Cantor neighborhoods',
    inputs: ['qmark-cantor-content/neighborhood.csv'],
    render: (f, t) => neighborhoodLogLog(
      f, (t.get('qmark-cantor-content/neighborhood.csv') ?? []) as NeighborhoodRow[],
      'reference eps^(1 - log2/log3)',
    ),
  },
  {
    id: 'F07',
    slug: 'rare_singleton_law',
    title: 'Hitting law for the ball around 1/4',
    inputs: ['rare-singleton/law.csv'],
    render: (f, t) => lawVersusTau(
      f, (t.get('rare-singleton/law.csv') ?? []) as LawRow[], 'reference exp(-tau)',
    ),
  },
  {
    id: 'F08',
    slug: 'rare_singleton_deviation',
    title: 'Deviation from exp(-tau), ball around 1/4',
    inputs: ['rare-singleton/law.csv'],
    render: renderDeviationSurface('rare-singleton/law.csv', 'reference exp(-tau)'),
  },
  {
    id: 'F09',
    slug: 'harmonic_closure_law',
    title: 'Hitting law near the harmonic closure',
    inputs: ['harmonic-closure/law.csv'],
    render: (f, t) => lawVersusTau(
      f, (t.get('harmonic-closure/law.csv') ?? []) as LawRow[],
      'reference exp(-0.47 tau)',
    ),
  },
  {
    id: 'F10',
    slug: 'harmonic_closure_deviation',
    title: 'Deviation from exp(-0.47 tau), harmonic closure',
    inputs: ['harmonic-closure/law.csv'],
    render: renderDeviationSurface('harmonic-closure/law.csv', 'reference exp(-0.47 tau)'),
  },
];

export function renderFigure(recipe: FigureRecipe, resultsDir: string): string {
  const tables = new Map<string, Record<string, number>[]>();
  for (const rel of recipe.inputs) {
    const file = path.join(resultsDir, rel);
    const rows = rel.endsWith('neighborhood.csv') ? readNeighborhood(file) : readLaw(file);
    tables.set(rel, rows as unknown as Record<string, number>[]);
  }
  const frame = newFrame(`${recipe.id}  ${recipe.title}`);
  recipe.render(frame, tables);
  return frame.doc.toString();
}
