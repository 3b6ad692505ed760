"""Command-line entry point: ``magraph <subcommand> [flags]``.

Every flag may also be given in a ``--config`` file of ``key=value`` lines
(keys are flag names without the leading dashes). Flags on the command line
override the file. The swept quantity's flag accepts a comma-separated list.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .channel import ScenarioConfig, db_to_linear, make_grid
from .harness import (
    DEFAULT_SWEEPS,
    SCHEMES,
    SWEEP_PARAMS,
    ExperimentSpec,
    dump_profile,
    run_sweep,
)
from .selectors import grid_as_init, sequential_update
from .solver import InfeasibleError, solve_optimal

SWEEP_FLAG = {"sweep-m": "m", "sweep-n": "n", "sweep-l": "length", "sweep-paths": "paths"}

# flag -> (parser, default)
OPTIONS = {
    "m": (int, 48),
    "n": (int, 8),
    "length": (float, 0.36),
    "dmin": (float, 0.03),
    "paths": (int, 9),
    "wavelength": (float, 0.06),
    "distance": (float, 100.0),
    "alpha": (float, 2.8),
    "beta_db": (float, -46.0),
    "snr_db": (float, 100.0),
    "resolution": (float, 0.01),
    "trials": (int, 1000),
    "seed": (int, 0),
    "jobs": (int, 1),
    "schemes": (str, ",".join(SCHEMES)),
    "out": (str, None),
    "amin": (int, None),
}


def read_config(path) -> dict:
    cfg = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in OPTIONS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = value
    return cfg


def read_gains(path) -> list:
    gains = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            g = float(line)
            if not g >= 0:
                raise ValueError(f"{path}:{lineno}: gain must be non-negative, got {line}")
            gains.append(g)
    if not gains:
        raise ValueError(f"{path}: no gains found")
    return gains


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magraph", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*SWEEP_PARAMS, "profile", "solve"):
        p = sub.add_parser(name)
        if name == "solve":
            p.add_argument("gains", help="file with one linear power gain per line")
        p.add_argument("--config")
        for key in OPTIONS:
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def resolve(args) -> dict:
    """Merge defaults, config file and command-line flags (in that order).

    The swept quantity's list lands in ``opts["values"]``; its scalar slot
    keeps the default.
    """
    given = read_config(args.config) if args.config else {}
    given.update({k: getattr(args, k) for k in OPTIONS if getattr(args, k) is not None})
    swept = SWEEP_FLAG.get(args.command)
    opts = {"values": ()}
    for key, (kind, default) in OPTIONS.items():
        if key == swept:
            if key in given:
                opts["values"] = tuple(kind(v) for v in str(given[key]).split(","))
            opts[key] = default
        elif key in given:
            opts[key] = kind(given[key])
        else:
            opts[key] = default
    return opts


def make_spec(command: str, opts: dict) -> ExperimentSpec:
    scenario = ScenarioConfig(
        wavelength=opts["wavelength"],
        length=opts["length"],
        d_min=opts["dmin"],
        distance=opts["distance"],
        alpha=opts["alpha"],
        beta=db_to_linear(opts["beta_db"]),
        tx_snr=db_to_linear(opts["snr_db"]),
        num_paths=opts["paths"],
    )
    values = tuple(sorted(opts["values"])) or DEFAULT_SWEEPS.get(command, ())
    return ExperimentSpec(
        kind=command,
        values=values,
        scenario=scenario,
        num_points=opts["m"],
        num_antennas=opts["n"],
        resolution=opts["resolution"],
        trials=opts["trials"],
        seed=opts["seed"],
        schemes=tuple(s.strip() for s in opts["schemes"].split(",") if s.strip()),
    )


def cmd_solve(args, opts) -> int:
    gains = read_gains(args.gains)
    m, n = len(gains), opts["n"]
    a_min = opts["amin"] or make_grid(opts["length"], m, opts["dmin"]).a_min
    try:
        best = solve_optimal(gains, a_min, n)
        init = grid_as_init(gains, a_min, n)
        seq = sequential_update(gains, a_min, n, init)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    fmt_idx = lambda s: ",".join(map(str, s))
    print(f"points={m} antennas={n} a_min={a_min}")
    print(f"optimal indices={fmt_idx(best.indices)} value={best.value:.6g}")
    print(f"sequential indices={fmt_idx(seq.indices)} value={seq.value:.6g} "
          f"init={fmt_idx(init)}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        opts = resolve(args)
        if args.command == "solve":
            return cmd_solve(args, opts)
        spec = make_spec(args.command, opts)
        if args.command == "profile":
            text = dump_profile(spec, out=opts["out"])
        else:
            text = run_sweep(spec, jobs=opts["jobs"], out=opts["out"]).to_csv()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if opts["out"] is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
