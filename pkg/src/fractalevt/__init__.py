"""Extreme value laws and Minkowski scaling for fractal observables of
interval maps.

Subpackage layout:

- `qmark`: Minkowski question-mark function and its interval measure
- `cantor`: middle-third Cantor geometry (gap order, distances, neighborhoods)
- `intensity`: observable shapes, target sets, threshold schedules
- `maps`: the three interval maps and reproducible trajectory generation
- `evt`: block-maxima engine, empirical hitting laws, extremal index
- `minkowski`: neighborhood scaling curves and dimension/content fits
- `scenarios`, `cli`: packaged experiments and the `fractal-evt` entry point
"""

__version__ = "0.1.0"
