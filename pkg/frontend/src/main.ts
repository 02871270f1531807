#!/usr/bin/env node
// render_figures <results-dir> <figures-dir>
//
// Reads the law.csv / neighborhood.csv files written by the experiment
// runner and regenerates the whole figure suite as SVG.  No statistic
// is recomputed; everything drawn is a column of an input file (or a
// row-wise ratio or difference of plotted columns).

import { mkdirSync, writeFileSync } from 'fs';
import * as path from 'path';

import { RECIPES, renderFigure } from './figures';

export function main(argv: string[]): number {
  const args = argv.filter((a) => a !== '--');
  if (args.length !== 2) {
    process.stderr.write('usage: render_figures <results-dir> <figures-dir>\n');
    return 2;
  }
  const [resultsDir, figuresDir] = args;
  mkdirSync(figuresDir, { recursive: true });
  for (const recipe of RECIPES) {
    let svg: string;
    try {
      svg = renderFigure(recipe, resultsDir);
    } catch (err) {
      process.stderr.write(`render_figures: ${recipe.id}: ${(err as Error).message}\n`);
      return 1;
    }
    const out = path.join(figuresDir, `${recipe.id}_${recipe.slug}.svg`);
    writeFileSync(out, svg);
    const from = recipe.inputs.join(', ') || 'construction geometry, no inputs';
    console.log(`${recipe.id} ${recipe.slug}  (${from})`);
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
