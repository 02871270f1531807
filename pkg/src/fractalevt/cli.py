"""Command line front end: `fractal-evt run <scenario>` and `fractal-evt list`.

Precedence for every setting is defaults < config file < command line
flags.  The config file is flat key=value text; `seed`, `workers` and
`out` are recognized alongside scenario parameters.  Worker count falls
back to the FRACTAL_EVT_WORKERS environment variable when neither the
flag nor the file provides one.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .scenarios import (
    ExperimentConfig,
    SCENARIOS,
    parse_parameters,
    run_experiment,
    scenario_table,
)

_RESERVED_KEYS = ("scenario", "seed", "workers", "out")


def read_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and # comments are skipped."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {text!r}")
            key, _, value = text.partition("=")
            values[key.strip()] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractal-evt",
        description="extreme value laws and neighborhood scaling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one named scenario")
    run.add_argument("scenario", choices=sorted(SCENARIOS))
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--config", default=None, help="flat key=value file")
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one scenario parameter (repeatable)",
    )

    lst = sub.add_parser("list", help="list scenarios with expected runtimes")
    lst.add_argument("--json", action="store_true", dest="as_json")
    return parser


def _env_workers() -> int | None:
    raw = os.environ.get("FRACTAL_EVT_WORKERS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"FRACTAL_EVT_WORKERS must be an integer, got {raw!r}") from exc


def _run_command(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    parameters = {
        k: v for k, v in file_values.items() if k not in _RESERVED_KEYS
    }
    for item in args.overrides:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        parameters[key.strip()] = value.strip()

    seed = args.seed
    if seed is None:
        seed = int(file_values.get("seed", 0))
    workers = args.workers
    if workers is None and "workers" in file_values:
        workers = int(file_values["workers"])
    if workers is None:
        workers = _env_workers()
    if workers is None:
        workers = 1
    out = args.out
    if out is None:
        out = file_values.get("out", os.path.join("results", args.scenario))

    config = ExperimentConfig(
        scenario=args.scenario,
        parameters=parameters,
        seed=seed,
        workers=workers,
        output_dir=out,
    )
    # fail on bad overrides before any computation starts
    parse_parameters(config.scenario, config.parameters)
    result = run_experiment(config)
    verdicts = result["summary"].get("verdicts", {})
    for name, verdict in verdicts.items():
        state = "pass" if verdict["pass"] else "FAIL"
        print(f"{config.scenario}: {name}: {state}")
    print(f"wrote {', '.join(result['files'])} to {result['output_dir']}")
    return 0


def _list_command(args) -> int:
    rows = scenario_table()
    if args.as_json:
        print(json.dumps({"scenarios": rows}, indent=2))
        return 0
    width = max(len(r["name"]) for r in rows)
    for row in rows:
        print(f"{row['name']:<{width}}  {row['expected_runtime']:<24}  {row['anchor']}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run_command(args)
        return _list_command(args)
    except Exception as exc:  # noqa: BLE001 - the record is the interface
        record = {
            "error": type(exc).__name__,
            "message": str(exc),
            "scenario": getattr(args, "scenario", None),
        }
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
