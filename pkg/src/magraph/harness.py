"""Seeded Monte Carlo comparison of movable and fixed antenna schemes."""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import (
    ScenarioConfig,
    channel_gains,
    draw_path_set,
    field_response,
    linear_to_db,
    make_grid,
    near_integer,
    trial_rng,
)
from .selectors import (
    fpa_as_select,
    fpa_no_as_layout,
    mrt_received_power,
    sequential_update,
    snap_to_grid,
)
from .solver import InfeasibleError, solve_optimal

log = logging.getLogger(__name__)

MA_OPTIMAL = "ma-optimal"
MA_SEQUENTIAL = "ma-sequential"
FPA_AS = "fpa-as"
FPA_NO_AS = "fpa-no-as"
SCHEMES = (MA_OPTIMAL, MA_SEQUENTIAL, FPA_AS, FPA_NO_AS)

SWEEP_PARAMS = {"sweep-m": "M", "sweep-n": "N", "sweep-l": "L", "sweep-paths": "paths"}
DEFAULT_SWEEPS = {
    "sweep-m": (12, 24, 36, 48, 60, 72),
    "sweep-n": tuple(range(1, 13)),
    "sweep-l": tuple(round(0.12 + 0.06 * k, 2) for k in range(9)),
    "sweep-paths": tuple(range(1, 16)),
}
CSV_HEADER = "experiment,param,value,scheme,trials,mean_snr_db,std_snr_db"


def fmt(x) -> str:
    return f"{x:.6g}"


@dataclass(frozen=True)
class ExperimentSpec:
    """What to simulate: sweep kind and values, scenario, trials and seed.

    ``num_points`` and ``num_antennas`` are the fixed M and N for sweeps that
    do not vary them; ``resolution`` is the grid spacing used by ``sweep-l``.
    """

    kind: str = "sweep-m"
    values: tuple = ()
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    num_points: int = 48
    num_antennas: int = 8
    resolution: float = 0.01
    trials: int = 1000
    seed: int = 0
    schemes: tuple = SCHEMES

    def __post_init__(self):
        if self.kind not in SWEEP_PARAMS and self.kind not in ("profile", "solve"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if any(not v > 0 for v in self.values):
            raise ValueError("sweep values must be positive")
        if list(self.values) != sorted(self.values):
            raise ValueError("sweep values must be sorted")

    @property
    def sweep_values(self) -> tuple:
        return self.values or DEFAULT_SWEEPS.get(self.kind, ())


@dataclass(frozen=True)
class PointSetup:
    scenario: ScenarioConfig
    num_points: int
    num_antennas: int


def point_setup(spec: ExperimentSpec, value=None) -> PointSetup:
    """Resolve the scenario, M and N at one sweep value."""
    cfg, m, n = spec.scenario, spec.num_points, spec.num_antennas
    if spec.kind == "sweep-m":
        m = int(value)
    elif spec.kind == "sweep-n":
        n = int(value)
    elif spec.kind == "sweep-l":
        cfg = replace(cfg, length=float(value))
        m = near_integer(cfg.length / spec.resolution)
        if m is None:
            raise ValueError(f"length {value} is not a multiple of resolution {spec.resolution}")
    elif spec.kind == "sweep-paths":
        cfg = replace(cfg, num_paths=int(value))
    return PointSetup(cfg, m, n)


@dataclass
class TrialOutcome:
    """Per-scheme linear SNR and the grid selections behind the MA schemes."""

    snr: dict
    optimal: object = None
    sequential: object = None
    init: object = None


def evaluate_realization(paths, setup: PointSetup, schemes=SCHEMES) -> TrialOutcome:
    """Run every requested scheme on one channel realization.

    Schemes that cannot be placed (too few points or fixed sites) report NaN.
    """
    cfg, m, n = setup.scenario, setup.num_points, setup.num_antennas
    lam = cfg.wavelength
    out = TrialOutcome({})
    grid = profile = fpa = None

    def snr_of(channel):
        return mrt_received_power(channel, cfg.tx_snr).power

    need_grid = MA_OPTIMAL in schemes or MA_SEQUENTIAL in schemes
    if need_grid:
        grid = make_grid(cfg.length, m, cfg.d_min)
        profile = channel_gains(paths, grid, lam)
    if FPA_AS in schemes or MA_SEQUENTIAL in schemes:
        try:
            fpa = fpa_as_select(paths, cfg.length, cfg.d_min, n, lam)
        except InfeasibleError:
            fpa = None
    if MA_OPTIMAL in schemes:
        try:
            out.optimal = solve_optimal(profile, grid.a_min, n)
            out.snr[MA_OPTIMAL] = snr_of(profile.channel[np.array(out.optimal.indices) - 1])
        except InfeasibleError:
            out.snr[MA_OPTIMAL] = math.nan
    if MA_SEQUENTIAL in schemes:
        try:
            if fpa is None:
                raise InfeasibleError("fixed-site initialization unavailable")
            out.init = snap_to_grid(fpa.positions, grid)
            out.sequential = sequential_update(profile, grid.a_min, n, out.init)
            out.snr[MA_SEQUENTIAL] = snr_of(profile.channel[np.array(out.sequential.indices) - 1])
        except InfeasibleError:
            out.snr[MA_SEQUENTIAL] = math.nan
    if FPA_AS in schemes:
        out.snr[FPA_AS] = snr_of(fpa.channel) if fpa is not None else math.nan
    if FPA_NO_AS in schemes:
        try:
            layout = fpa_no_as_layout(paths, cfg.length, n, cfg.d_min, lam)
            out.snr[FPA_NO_AS] = snr_of(layout.channel)
        except InfeasibleError:
            out.snr[FPA_NO_AS] = math.nan
    return out


def run_trial(spec: ExperimentSpec, value, trial: int) -> dict:
    """Received SNR in dB per scheme for trial ``trial`` at sweep ``value``."""
    setup = point_setup(spec, value)
    paths = draw_path_set(setup.scenario, trial_rng(spec.seed, trial))
    outcome = evaluate_realization(paths, setup, spec.schemes)
    with np.errstate(divide="ignore"):
        return {s: float(linear_to_db(outcome.snr[s])) for s in spec.schemes}


def _trial_block(args):
    spec, value, start, stop = args
    return [run_trial(spec, value, t) for t in range(start, stop)]


@dataclass
class SweepResult:
    """Aggregated statistics keyed by (sweep value, scheme)."""

    spec: ExperimentSpec
    rows: list = field(default_factory=list)

    def get(self, value, scheme) -> dict:
        for row in self.rows:
            if row["value"] == value and row["scheme"] == scheme:
                return row
        raise KeyError((value, scheme))

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write(CSV_HEADER + "\n")
        param = SWEEP_PARAMS[self.spec.kind]
        for r in self.rows:
            buf.write(",".join([
                self.spec.kind, param, fmt(r["value"]), r["scheme"], str(r["trials"]),
                fmt(r["mean_snr_db"]), fmt(r["std_snr_db"]),
            ]) + "\n")
        return buf.getvalue()


def trial_matrix(spec: ExperimentSpec, value, jobs: int = 1) -> np.ndarray:
    """SNR (dB) of shape (trials, schemes), rows ordered by trial index."""
    if jobs > 1:
        bounds = np.linspace(0, spec.trials, jobs + 1).astype(int)
        blocks = [(spec, value, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [r for block in pool.map(_trial_block, blocks) for r in block]
    else:
        results = _trial_block((spec, value, 0, spec.trials))
    return np.array([[r[s] for s in spec.schemes] for r in results])


def run_sweep(spec: ExperimentSpec, jobs: int = 1, out=None) -> SweepResult:
    """Average every scheme over ``spec.trials`` realizations at each sweep value.

    The mean and sample standard deviation are taken over per-trial dB values.
    Infeasible (value, scheme) pairs are kept with zero trials and NaN stats.
    If ``out`` is a path, the CSV is written there.
    """
    if spec.kind not in SWEEP_PARAMS:
        raise ValueError(f"{spec.kind!r} is not a sweep")
    result = SweepResult(spec)
    for value in spec.sweep_values:
        snr = trial_matrix(spec, value, jobs)
        for k, scheme in enumerate(spec.schemes):
            col = snr[:, k]
            if np.all(np.isnan(col)):
                log.warning("%s=%s: %s infeasible, skipped", SWEEP_PARAMS[spec.kind], value, scheme)
                row = dict(value=value, scheme=scheme, trials=0,
                           mean_snr_db=math.nan, std_snr_db=math.nan)
            else:
                row = dict(value=value, scheme=scheme, trials=len(col),
                           mean_snr_db=float(np.mean(col)),
                           std_snr_db=float(np.std(col, ddof=1)) if len(col) > 1 else math.nan)
            result.rows.append(row)
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(result.to_csv())
    return result


PROFILE_HEADER = "kind,scheme,position_m,gain_db"


def dump_profile(spec: ExperimentSpec, seed: int | None = None, step: float = 1e-3, out=None) -> str:
    """Gain-vs-position curve for one realization plus each scheme's antenna sites.

    Curve rows sample [0, L] every ``step`` metres; marker rows give the chosen
    positions of every scheme (MA schemes on the ``spec.num_points`` grid).
    """
    seed = spec.seed if seed is None else seed
    setup = point_setup(replace(spec, kind="profile"))
    cfg = setup.scenario
    paths = draw_path_set(cfg, trial_rng(seed, 0))
    count = int(round(cfg.length / step))
    xs = np.arange(count + 1) * cfg.length / count

    def gain_db(x):
        with np.errstate(divide="ignore"):
            return linear_to_db(np.abs(field_response(paths, x, cfg.wavelength)) ** 2)

    lines = [PROFILE_HEADER]
    for x, g in zip(xs, gain_db(xs)):
        lines.append(f"curve,channel,{fmt(x)},{fmt(g)}")

    outcome = evaluate_realization(paths, setup, spec.schemes)
    grid = make_grid(cfg.length, setup.num_points, cfg.d_min)
    markers = {}
    if outcome.optimal is not None:
        markers[MA_OPTIMAL] = [grid.position(i) for i in outcome.optimal.indices]
    if outcome.sequential is not None:
        markers[MA_SEQUENTIAL] = [grid.position(i) for i in outcome.sequential.indices]
    if FPA_AS in spec.schemes:
        try:
            markers[FPA_AS] = fpa_as_select(paths, cfg.length, cfg.d_min, setup.num_antennas,
                                            cfg.wavelength).positions
        except InfeasibleError:
            pass
    if FPA_NO_AS in spec.schemes:
        try:
            markers[FPA_NO_AS] = fpa_no_as_layout(paths, cfg.length, setup.num_antennas,
                                                  cfg.d_min, cfg.wavelength).positions
        except InfeasibleError:
            pass
    for scheme in spec.schemes:
        pos = np.asarray(markers.get(scheme, []), dtype=float)
        for x, g in zip(pos, gain_db(pos)):
            lines.append(f"marker,{scheme},{fmt(x)},{fmt(g)}")
    text = "\n".join(lines) + "\n"
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text
