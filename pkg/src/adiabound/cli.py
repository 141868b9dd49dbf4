"""``adiabound`` command line: bound tables, simulations, noise calibration, checks.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 property-suite failure.
"""

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_tau
from .errors import AdiaboundError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def _plain(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def render(rows: List[dict], fmt: str) -> str:
    """CSV with shortest round-trip floats, or JSON."""
    if fmt == "json":
        return json.dumps([{k: _plain(v) for k, v in r.items()} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(list(rows[0].keys()))
        for r in rows:
            out.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


def _emit(rows, config: Optional[RunConfig], args):
    fmt = args.format or (config.output.format if config else "csv")
    path = args.out or (config.output.path if config else None)
    text = render(rows, fmt)
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    config = load_config(args.config)
    update = {}
    if args.tau is not None:
        update["tau"] = parse_tau(args.tau)
    if args.seed is not None:
        if config.noise is None:
            raise ConfigError("--seed given but the config has no noise section")
        update["noise"] = config.noise.model_copy(update={"seeds": [args.seed]})
    return config.model_copy(update=update) if update else config


def cmd_bound(args) -> int:
    from .pipeline import sweep

    config = _load(args)
    _emit(sweep("bound", config, args.parallel), config, args)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .pipeline import sweep

    config = _load(args)
    rows = sweep("simulate", config, args.parallel)
    _emit(rows, config, args)
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"tau={r['tau']} seed={r['seed']}: {r['status']}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_calibrate(args) -> int:
    from .pipeline import calibration_report, seeds_for

    config = _load(args)
    if config.noise is None:
        raise ConfigError("noise: section required for calibrate-noise")
    rows = [row for seed in seeds_for(config) for row in calibration_report(config, seed)]
    _emit(rows, config, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    results = run_suite()
    rows = [
        {"check": r.name, "passed": bool(r.passed), "measured": float(r.measured),
         "threshold": float(r.threshold), "detail": r.detail}
        for r in results
    ]
    _emit(rows, None, args)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adiabound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    handlers = {
        "bound": (cmd_bound, "bound coefficients and values per tau"),
        "simulate": (cmd_simulate, "simulated adiabatic error per tau (and seed)"),
        "calibrate-noise": (cmd_calibrate, "noise amplitude suprema and resulting bound inputs"),
        "verify": (cmd_verify, "run the property suite"),
    }
    for name, (fn, help_) in handlers.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="YAML run configuration")
        sp.add_argument("--seed", type=int, help="override noise seeds with a single seed")
        sp.add_argument("--tau", help="'1,5,10', 'start:stop:num' or 'log:start:stop:num'")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--parallel", type=int, default=1, help="worker processes for sweeps")
        sp.set_defaults(handler=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (AdiaboundError, ArithmeticError) as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
