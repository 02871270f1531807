"""Named experiments with complete default parameter sets.

Each scenario builds its configuration objects up front (so every override
is validated before any computation starts), runs the simulation or the
exact evaluators, and returns an EmpiricalLaw and/or a NeighborhoodCurve
together with a summary dict of fitted constants, theory values and
pass/fail verdicts.  Serialization to law.csv / neighborhood.csv /
summary.json lives here too; the CLI only parses arguments and reports.

All floating values are written with 17 significant digits so the files
round-trip doubles exactly; rerunning a scenario with the same seed and
parameters reproduces every CSV byte regardless of worker count.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cantor import CANTOR_CODIMENSION
from .evt import (
    BlockMaximaConfig,
    EmpiricalLaw,
    block_maxima,
    empirical_law,
    estimate_theta,
    frechet_weibull_check,
    law_deviation,
    level_set_exponent,
)
from .intensity import (
    Bounded,
    Exponential,
    HarmonicClosure,
    Ladder,
    LadderDiscrete,
    Linear,
    LogDistance,
    Singleton,
    TernaryCantor,
)
from .maps import Mobius, Rotation, Tent
from .minkowski import (
    Exact,
    MonteCarlo,
    Qmark,
    Lebesgue,
    fit_nonstandard,
    fit_standard,
    harmonic_series_asymptotic,
    harmonic_series_measure,
    neighborhood_curve,
    saddle_point_constants,
)
from .qmark import (
    LOG2,
    ball_measure_asymptotic,
    ball_measure_asymptotic_log2,
    interval_measure,
    interval_measure_log2,
)

__all__ = [
    "ExperimentConfig",
    "ScenarioResult",
    "SCENARIOS",
    "scenario_table",
    "parse_parameters",
    "run_experiment",
    "LAW_HEADER",
    "NEIGHBORHOOD_HEADER",
    "law_csv",
    "neighborhood_csv",
    "summary_json",
]

LAW_HEADER = "level,n,tau,a_hat,stderr,reference,deviation"
NEIGHBORHOOD_HEADER = "eps,mu_hat,stderr,reference"

# extremal index of the harmonic-closure observable; exceedances cluster
# because consecutive orbit points share the accumulation point's basin
THETA_CLUSTERED = 0.47

_GAP_RATIO = 1.5  # inverse branch ratio of the ternary gap hierarchy


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    output_dir: str = "results"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            known = ", ".join(sorted(SCENARIOS))
            raise ValueError(f"unknown scenario {self.scenario!r}; known: {known}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class ScenarioResult:
    law: EmpiricalLaw | None
    curve: object | None
    curve_reference: np.ndarray | None
    summary: dict


def _int(s: str) -> int:
    return int(s)


def _float(s: str) -> float:
    return float(s)


def _int_list(s: str) -> tuple:
    return tuple(int(t) for t in s.split(","))


def parse_parameters(name: str, overrides: dict) -> dict:
    """Defaults for `name` updated by string overrides, fully typed."""
    spec = SCENARIOS[name]
    converters = dict(spec.converters)
    merged = dict(spec.defaults)
    for key, value in overrides.items():
        if key not in converters:
            known = ", ".join(sorted(converters))
            raise ValueError(
                f"unknown parameter {key!r} for scenario {name!r}; known: {known}"
            )
        merged[key] = str(value)
    return {k: converters[k](v) for k, v in merged.items()}


def _verdict(observed, expected, tolerance, ok) -> dict:
    return {
        "observed": observed,
        "expected": expected,
        "tolerance": tolerance,
        "pass": bool(ok),
    }


# ---------------------------------------------------------------------------
# ladder scenarios


def _ladder_levels(params) -> tuple:
    return tuple(range(params["level_min"], params["level_max"] + 1))


def _run_ladder(map_spec, threshold, params, seed, workers) -> ScenarioResult:
    cfg = BlockMaximaConfig(
        map_spec,
        Ladder(),
        params["block_lengths"],
        params["samples"],
        seed,
        _ladder_levels(params),
    )
    bm = block_maxima(cfg, workers)
    law = empirical_law(bm, regime=LadderDiscrete())
    dev, _ = law_deviation(law)
    window = law.levels <= params["dev_level_max"]
    sup = dev[window].max(axis=0)
    est = estimate_theta(law)
    decreasing = bool(np.all(np.diff(sup) < 0))
    summary = {
        "extremal_index": {
            "value": est.value,
            "stderr": est.stderr,
            "block_length": est.n,
            "points": est.points,
            "theory": 1.0,
        },
        "law": {
            "sup_abs_deviation": {
                str(n): float(s) for n, s in zip(law.block_lengths, sup)
            },
            "deviation_levels": [1, params["dev_level_max"]],
            "monotone_decreasing": decreasing,
            "final": float(sup[-1]),
            "threshold": threshold,
        },
        "verdicts": {
            "law_convergence": _verdict(
                float(sup[-1]), 0.0, threshold, decreasing and sup[-1] < threshold
            ),
            "extremal_index": _verdict(
                est.value, 1.0, 0.05, abs(est.value - 1.0) <= 0.05
            ),
        },
    }
    return ScenarioResult(law, None, None, summary)


def _run_ladder_tent(params, seed, workers):
    return _run_ladder(Tent(params["peak"]), 0.02, params, seed, workers)


def _run_ladder_rotation(params, seed, workers):
    return _run_ladder(Rotation(), 0.03, params, seed, workers)


def _run_cantor_dist_rotation(params, seed, workers) -> ScenarioResult:
    beta, gamma = params["beta"], params["gamma"]
    cfg = BlockMaximaConfig(
        Rotation(),
        Ladder(),
        params["block_lengths"],
        params["samples"],
        seed,
        _ladder_levels(params),
    )
    bm = block_maxima(cfg, workers)
    law = empirical_law(bm, regime=LadderDiscrete())
    est = estimate_theta(law)
    eta_theory = beta * math.log(_GAP_RATIO)
    zeta_theory = gamma * math.log(_GAP_RATIO)
    eta_ls = level_set_exponent(
        bm.base_maxima[1], Exponential(beta), m_hi=params["level_set_max"]
    )
    fre = frechet_weibull_check(bm, form=Exponential(beta))
    wei = frechet_weibull_check(bm, form=Bounded(gamma))
    summary = {
        "extremal_index": {
            "value": est.value,
            "stderr": est.stderr,
            "block_length": est.n,
            "points": est.points,
            "theory": 1.0,
        },
        "level_set": {"eta": eta_ls, "theory": eta_theory},
        "tail_fits": {
            "frechet": {"exponent": fre.exponent, "points": fre.points,
                        "theory": eta_theory},
            "weibull": {"exponent": wei.exponent, "points": wei.points,
                        "theory": zeta_theory},
        },
        "verdicts": {
            "level_set_exponent": _verdict(
                eta_ls, eta_theory, 0.05,
                abs(eta_ls - eta_theory) / eta_theory <= 0.05,
            ),
            "frechet_exponent": _verdict(
                fre.exponent, eta_theory, 0.10,
                abs(fre.exponent - eta_theory) / eta_theory <= 0.10,
            ),
            "weibull_exponent": _verdict(
                wei.exponent, zeta_theory, 0.10,
                abs(wei.exponent - zeta_theory) / zeta_theory <= 0.10,
            ),
        },
    }
    return ScenarioResult(law, None, None, summary)


# ---------------------------------------------------------------------------
# question-mark measure scenarios


def _run_qmark_cantor(params, seed, workers) -> ScenarioResult:
    target, measure = TernaryCantor(), Qmark()
    scan = 3.0 ** -np.linspace(
        params["scan_exp_hi"], params["scan_exp_lo"], params["scan_points"]
    )
    method = MonteCarlo(params["samples"], seed)
    mc = neighborhood_curve(target, measure, scan, method, workers)
    fit = fit_standard(mc)
    exact = neighborhood_curve(target, measure, scan, Exact())
    efit = fit_standard(exact)
    deep_eps = 3.0 ** -np.arange(
        params["deep_exp_hi"], params["deep_exp_lo"] - 1, -1.0
    )
    deep = neighborhood_curve(target, measure, deep_eps, Exact())
    dl, dm = np.log(deep.eps_grid), np.log(deep.mu_hat)
    deep_slope = float(np.polyfit(dl, dm, 1)[0])
    deep_content = float(np.exp(np.mean(dm - CANTOR_CODIMENSION * dl)))
    summary = {
        "fit": {"d_M": fit.d_M, "content": fit.content,
                "residual_band": fit.residual_band},
        "exact_window_fit": {"d_M": efit.d_M, "content": efit.content},
        "theory": {"d_M": CANTOR_CODIMENSION, "content": 1.0},
        "deep_window": {
            "eps": [float(e) for e in deep.eps_grid],
            "slope": deep_slope,
            "content_factor": deep_content,
        },
        "note": (
            "the scan window is preasymptotic for this singular measure: the "
            "exact curve fitted over the same window gives the same biased "
            "constants, and the local slope only approaches the codimension "
            "below the window floor (see deep_window)"
        ),
        "verdicts": {
            "dimension": _verdict(
                fit.d_M, CANTOR_CODIMENSION, 0.01,
                abs(fit.d_M - CANTOR_CODIMENSION) <= 0.01,
            ),
            "content": _verdict(
                fit.content, 1.0, 0.07, abs(fit.content - 1.0) <= 0.07
            ),
        },
    }
    reference = mc.eps_grid**CANTOR_CODIMENSION
    return ScenarioResult(None, mc, reference, summary)


def _run_rare_singleton(params, seed, workers) -> ScenarioResult:
    k = params["target_index"]
    levels = np.linspace(
        params["level_lo"], params["level_hi"], params["level_count"]
    )
    cfg = BlockMaximaConfig(
        Mobius(),
        LogDistance(Singleton(k), Linear()),
        params["block_lengths"],
        params["samples"],
        seed,
        tuple(levels),
    )
    ball = np.array(
        [interval_measure(1.0 / k - math.exp(-h), 1.0 / k + math.exp(-h))
         for h in levels]
    )
    tau = ball[:, None] * np.asarray(cfg.block_lengths)[None, :]
    bm = block_maxima(cfg, workers)
    law = empirical_law(bm, tau_override=tau)
    est = estimate_theta(law)

    eps_fit = np.geomspace(
        params["fit_eps_lo"], params["fit_eps_hi"], params["fit_eps_points"]
    )
    curve = neighborhood_curve(Singleton(k), Qmark(), eps_fit, Exact())
    with warnings.catch_warnings():
        # the smallest-eps measures underflow a double; the fit drops them
        warnings.simplefilter("ignore", UserWarning)
        fit = fit_nonstandard(curve)
    d_theory = LOG2 / k**2
    b_theory = 2.0 ** (3.0 - k - 1.0 / k)
    ratios = {}
    for eps in (1e-3, 1e-4, 1e-5):
        lg = interval_measure_log2(1.0 / k - eps, 1.0 / k + eps)
        ratios["%.0e" % eps] = float(
            2.0 ** (lg - ball_measure_asymptotic_log2(k, eps))
        )
    rv = list(ratios.values())
    tightens = all(
        abs(b - 1.0) <= abs(a - 1.0) + 1e-12 for a, b in zip(rv, rv[1:])
    )
    summary = {
        "extremal_index": {
            "value": est.value,
            "stderr": est.stderr,
            "block_length": est.n,
            "points": est.points,
            "theory": 1.0,
        },
        "fit": {"B": fit.B, "D": fit.D, "q": fit.q},
        "theory": {"B": b_theory, "D": d_theory, "q": 1.0},
        "asymptotic_ratio": ratios,
        "verdicts": {
            "extremal_index": _verdict(
                est.value, 1.0, 0.05, abs(est.value - 1.0) <= 0.05
            ),
            "ratio_band": _verdict(
                rv[0], 1.0, "within [0.8, 1.25]", 0.8 <= rv[0] <= 1.25
            ),
            "ratio_tightens": _verdict(rv, 1.0, "monotone approach", tightens),
        },
    }
    reference = np.array([ball_measure_asymptotic(k, e) for e in eps_fit])
    return ScenarioResult(law, curve, reference, summary)


def _run_harmonic_closure(params, seed, workers) -> ScenarioResult:
    levels = np.linspace(
        params["level_lo"], params["level_hi"], params["level_count"]
    )
    cfg = BlockMaximaConfig(
        Mobius(),
        LogDistance(HarmonicClosure(), Linear()),
        params["block_lengths"],
        params["samples"],
        seed,
        tuple(levels),
    )
    union = np.array([harmonic_series_measure(math.exp(-h)) for h in levels])
    tau = union[:, None] * np.asarray(cfg.block_lengths)[None, :]
    bm = block_maxima(cfg, workers)
    law = empirical_law(bm, tau_override=tau, theta_ref=THETA_CLUSTERED)
    est = estimate_theta(law)

    eps_fit = np.geomspace(
        params["fit_eps_lo"], params["fit_eps_hi"], params["fit_eps_points"]
    )
    curve = neighborhood_curve(HarmonicClosure(), Qmark(), eps_fit, Exact())
    fit = fit_nonstandard(curve)
    d_saddle, b_saddle = saddle_point_constants()
    series_ratio = harmonic_series_asymptotic(1e-3) / harmonic_series_measure(1e-3)
    summary = {
        "extremal_index": {
            "value": est.value,
            "stderr": est.stderr,
            "block_length": est.n,
            "points": est.points,
            "theory": THETA_CLUSTERED,
        },
        "fit": {"B": fit.B, "D": fit.D, "q": fit.q},
        "theory": {
            "q": 1.0 / 3.0,
            "D_quoted": 1.26,
            "D_saddle": d_saddle,
            "B_saddle": b_saddle,
        },
        "series_check": {"asymptotic_over_exact_at_1e-3": float(series_ratio)},
        "verdicts": {
            "extremal_index": _verdict(
                est.value, THETA_CLUSTERED, "within [0.42, 0.52]",
                0.42 <= est.value <= 0.52,
            ),
            "stretch_exponent": _verdict(
                fit.q, 1.0 / 3.0, 0.10,
                abs(fit.q - 1.0 / 3.0) / (1.0 / 3.0) <= 0.10,
            ),
            "decay_constant": _verdict(
                fit.D, 1.26, 0.15, abs(fit.D - 1.26) / 1.26 <= 0.15
            ),
        },
    }
    reference = b_saddle * np.exp(-d_saddle * eps_fit ** (-1.0 / 3.0))
    return ScenarioResult(law, curve, reference, summary)


def _run_minkowski_scan(params, seed, workers) -> ScenarioResult:
    eps = 3.0 ** -np.linspace(
        params["exp_hi"], params["exp_lo"], params["points"]
    )
    curve = neighborhood_curve(TernaryCantor(), Lebesgue(), eps, Exact())
    fit = fit_standard(curve)
    summary = {
        "fit": {"d_M": fit.d_M, "content": fit.content,
                "residual_band": fit.residual_band},
        "theory": {"d_M": CANTOR_CODIMENSION, "content": 2.5},
        "verdicts": {
            "dimension": _verdict(
                fit.d_M, CANTOR_CODIMENSION, 0.005,
                abs(fit.d_M - CANTOR_CODIMENSION) <= 0.005,
            ),
            "content": _verdict(
                fit.content, 2.5, 0.05, abs(fit.content - 2.5) / 2.5 <= 0.05
            ),
        },
    }
    reference = 2.5 * eps**CANTOR_CODIMENSION
    return ScenarioResult(None, curve, reference, summary)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    anchor: str
    expected_runtime: str
    defaults: tuple  # ((key, value-string), ...)
    converters: tuple  # ((key, parser), ...)
    runner: object

    @property
    def default_dict(self) -> dict:
        return dict(self.defaults)


def _spec(name, anchor, runtime, defaults, converters, runner):
    return ScenarioSpec(
        name, anchor, runtime, tuple(defaults.items()), tuple(converters.items()),
        runner,
    )


# level_max reaches past the retention window of the largest block length:
# tau = n (2/3)^m falls in [0.05, 3] for m in [21, 28] at n = 10^4, so the
# index estimator can read its slope from converged blocks
_LADDER_DEFAULTS = {
    "samples": "100000",
    "block_lengths": "100,1000,10000",
    "level_min": "1",
    "level_max": "28",
    "dev_level_max": "12",
}
_LADDER_CONVERTERS = {
    "samples": _int,
    "block_lengths": _int_list,
    "level_min": _int,
    "level_max": _int,
    "dev_level_max": _int,
}

_FIT_GRID_DEFAULTS = {
    "fit_eps_lo": "1e-5",
    "fit_eps_hi": "1e-3",
    "fit_eps_points": "25",
}
_FIT_GRID_CONVERTERS = {
    "fit_eps_lo": _float,
    "fit_eps_hi": _float,
    "fit_eps_points": _int,
}

_REGISTRY = [
    _spec(
        "ladder-tent",
        "gap-order ladder observable on the skew tent map; "
        "law A(m, n) against exp(-n (2/3)^m)",
        "about 70 s single worker",
        {**_LADDER_DEFAULTS, "peak": "0.45"},
        {**_LADDER_CONVERTERS, "peak": _float},
        _run_ladder_tent,
    ),
    _spec(
        "ladder-rotation",
        "gap-order ladder observable along the golden rotation",
        "about 70 s single worker",
        _LADDER_DEFAULTS,
        _LADDER_CONVERTERS,
        _run_ladder_rotation,
    ),
    _spec(
        "cantor-dist-rotation",
        "Cantor-distance level sets and Frechet/Weibull tail families "
        "along the golden rotation",
        "about 80 s single worker",
        {
            **_LADDER_DEFAULTS,
            "block_lengths": "1,100,1000,10000",
            "beta": "1.5",
            "gamma": "1.0",
            "level_set_max": "12",
        },
        {
            **_LADDER_CONVERTERS,
            "beta": _float,
            "gamma": _float,
            "level_set_max": _int,
        },
        _run_cantor_dist_rotation,
    ),
    _spec(
        "qmark-cantor-content",
        "question-mark measure of ternary-Cantor neighborhoods, "
        "Monte Carlo scan plus exact deep-window diagnostic",
        "about 10 s single worker",
        {
            "samples": "1000000",
            "scan_exp_lo": "2.1",
            "scan_exp_hi": "10.1",
            "scan_points": "65",
            "deep_exp_lo": "13",
            "deep_exp_hi": "16",
        },
        {
            "samples": _int,
            "scan_exp_lo": _float,
            "scan_exp_hi": _float,
            "scan_points": _int,
            "deep_exp_lo": _float,
            "deep_exp_hi": _float,
        },
        _run_qmark_cantor,
    ),
    _spec(
        "rare-singleton",
        "rare entries near a single rational point under the "
        "question-mark preserving map",
        "about 15 s single worker",
        {
            "samples": "40000",
            "block_lengths": "100,1000,10000",
            "target_index": "4",
            "level_lo": "5.0",
            "level_hi": "5.65",
            "level_count": "14",
            **_FIT_GRID_DEFAULTS,
        },
        {
            "samples": _int,
            "block_lengths": _int_list,
            "target_index": _int,
            "level_lo": _float,
            "level_hi": _float,
            "level_count": _int,
            **_FIT_GRID_CONVERTERS,
        },
        _run_rare_singleton,
    ),
    _spec(
        "harmonic-closure",
        "clustered rare entries near the closure of the harmonic "
        "sequence, with the stretched-exponential neighborhood fit",
        "about 20 s single worker",
        {
            "samples": "40000",
            "block_lengths": "100,1000,10000",
            "level_lo": "6.0",
            "level_hi": "7.9",
            "level_count": "20",
            **_FIT_GRID_DEFAULTS,
        },
        {
            "samples": _int,
            "block_lengths": _int_list,
            "level_lo": _float,
            "level_hi": _float,
            "level_count": _int,
            **_FIT_GRID_CONVERTERS,
        },
        _run_harmonic_closure,
    ),
    _spec(
        "minkowski-scan",
        "exact Lebesgue neighborhood scan of the ternary Cantor set "
        "with the Cesaro-averaged content",
        "under 1 s",
        {"exp_lo": "5", "exp_hi": "13", "points": "65"},
        {"exp_lo": _float, "exp_hi": _float, "points": _int},
        _run_minkowski_scan,
    ),
]

SCENARIOS = {s.name: s for s in _REGISTRY}


def scenario_table() -> list:
    """Static metadata rows: name, anchor, expected runtime, defaults."""
    return [
        {
            "name": s.name,
            "anchor": s.anchor,
            "expected_runtime": s.expected_runtime,
            "defaults": s.default_dict,
        }
        for s in _REGISTRY
    ]


# ---------------------------------------------------------------------------
# serialization


def _fmt(x) -> str:
    return "%.17g" % float(x)


def law_csv(law: EmpiricalLaw | None) -> str:
    lines = [LAW_HEADER]
    if law is not None:
        reference = np.exp(-law.theta_ref * law.tau)
        deviation = np.abs(law.a_hat - reference)
        a, s = law.a_hat, law.stderr
        for i, level in enumerate(law.levels):
            for j, n in enumerate(law.block_lengths):
                lines.append(
                    ",".join(
                        (
                            _fmt(level),
                            str(int(n)),
                            _fmt(law.tau[i, j]),
                            _fmt(a[i, j]),
                            _fmt(s[i, j]),
                            _fmt(reference[i, j]),
                            _fmt(deviation[i, j]),
                        )
                    )
                )
    return "\n".join(lines) + "\n"


def neighborhood_csv(curve, reference) -> str:
    lines = [NEIGHBORHOOD_HEADER]
    if curve is not None:
        for i, eps in enumerate(curve.eps_grid):
            lines.append(
                ",".join(
                    (
                        _fmt(eps),
                        _fmt(curve.mu_hat[i]),
                        _fmt(curve.stderr[i]),
                        _fmt(reference[i]),
                    )
                )
            )
    return "\n".join(lines) + "\n"


def _json_render(value, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f'{pad}  "{k}": {_json_render(v, indent + 1)}'
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            return "[]"
        items = [f"{pad}  {_json_render(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "null"
        return _fmt(v)
    if isinstance(value, str):
        escaped = (
            value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        )
        return f'"{escaped}"'
    raise TypeError(f"cannot serialize {type(value).__name__}")


def summary_json(summary: dict) -> str:
    return _json_render(summary, 0) + "\n"


# ---------------------------------------------------------------------------
# orchestration


def run_experiment(config: ExperimentConfig) -> dict:
    """Run one scenario and write law.csv, neighborhood.csv, summary.json.

    Files are staged under temporary names in the output directory and
    renamed once all three are complete, so failures never leave partial
    artifacts behind.
    """
    spec = SCENARIOS[config.scenario]
    raw = dict(spec.defaults)
    raw.update({k: str(v) for k, v in config.parameters.items()})
    params = parse_parameters(config.scenario, config.parameters)

    start = time.perf_counter()
    result = spec.runner(params, config.seed, config.workers)
    elapsed = time.perf_counter() - start

    summary = {
        "scenario": config.scenario,
        "seed": config.seed,
        "workers": config.workers,
        "parameters": raw,
    }
    summary.update(result.summary)
    summary["wall_clock_seconds"] = elapsed

    os.makedirs(config.output_dir, exist_ok=True)
    contents = {
        "law.csv": law_csv(result.law),
        "neighborhood.csv": neighborhood_csv(result.curve, result.curve_reference),
        "summary.json": summary_json(summary),
    }
    staged = []
    try:
        for name, text in contents.items():
            fd, tmp = tempfile.mkstemp(
                prefix=f".{name}.", dir=config.output_dir
            )
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, os.path.join(config.output_dir, name)))
        while staged:
            tmp, final = staged[0]
            os.replace(tmp, final)
            staged.pop(0)
    finally:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
    return {
        "output_dir": config.output_dir,
        "files": sorted(contents),
        "summary": summary,
    }
