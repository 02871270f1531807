// Synthetic results trees for the renderer tests: same headers and
// column order as the experiment runner, tiny grids, no randomness.

import { mkdirSync, writeFileSync } from 'fs';
import * as path from 'path';

export const LAW_HEADER = 'level,n,tau,a_hat,stderr,reference,deviation';
export const NEIGHBORHOOD_HEADER = 'eps,mu_hat,stderr,reference';

export function lawCsv(levels: number[], ns: number[], theta = 1): string {
  const lines = [LAW_HEADER];
  for (const lv of levels) {
    for (const n of ns) {
      const tau = n * (2 / 3) ** lv;
      const ref = Math.exp(-theta * tau);
      const a = Math.min(1, ref + 0.004);
      lines.push([lv, n, tau, a, 0.001, ref, Math.abs(a - ref)].join(','));
    }
  }
  return lines.join('\n') + '\n';
}

export function neighborhoodCsv(epsCount = 9): string {
  const lines = [NEIGHBORHOOD_HEADER];
  for (let i = 0; i < epsCount; i++) {
    const eps = 10 ** (-5 + (4 * i) / Math.max(epsCount - 1, 1));
    const ref = 2.5 * eps ** 0.369;
    const mu = ref * 1.03;
    lines.push([eps, mu, mu * 0.002, ref].join(','));
  }
  return lines.join('\n') + '\n';
}

export interface TreeOptions {
  emptyLaw?: string[];      // scenarios whose law.csv is header-only
  corruptLaw?: string;      // scenario whose law.csv drops a column
}

export function writeResultsTree(root: string, opts: TreeOptions = {}): void {
  const lawScenarios: Record<string, string> = {
    'ladder-tent': lawCsv([2, 4, 6, 8, 10], [100, 1000]),
    'ladder-rotation': lawCsv([2, 4, 6, 8, 10], [100, 1000]),
    'rare-singleton': lawCsv([3, 4, 5, 6], [100, 1000, 10000]),
    'harmonic-closure': lawCsv([3, 4, 5, 6], [100, 1000, 10000], 0.47),
  };
  const neighborhoodScenarios = ['minkowski-scan', 'qmark-cantor-content'];

  for (const [name, body] of Object.entries(lawScenarios)) {
    const dir = path.join(root, name);
    mkdirSync(dir, { recursive: true });
    let text = body;
    if (opts.emptyLaw?.includes(name)) text = LAW_HEADER + '\n';
    if (opts.corruptLaw === name) {
      text = text.split('\n').map((line) =>
        line.split(',').slice(0, 6).join(',')).join('\n');
    }
    writeFileSync(path.join(dir, 'law.csv'), text);
    writeFileSync(path.join(dir, 'neighborhood.csv'), NEIGHBORHOOD_HEADER + '\n');
  }
  for (const name of neighborhoodScenarios) {
    const dir = path.join(root, name);
    mkdirSync(dir, { recursive: true });
    writeFileSync(path.join(dir, 'law.csv'), LAW_HEADER + '\n');
    writeFileSync(path.join(dir, 'neighborhood.csv'), neighborhoodCsv());
  }
}
