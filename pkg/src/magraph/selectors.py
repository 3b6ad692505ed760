"""Sequential-update heuristic, fixed-position baselines and MRT evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import PathSet, SamplingGrid, field_response, near_integer
from .solver import InfeasibleError, Selection, is_feasible, selection_value

MA_GRID = "ma-grid"
FPA_FIXED = "fpa-fixed"
FPA_SELECTED = "fpa-selected"


@dataclass(frozen=True)
class AntennaLayout:
    """Antenna positions on the aperture and the channel seen at each."""

    positions: np.ndarray
    channel: np.ndarray
    kind: str

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.channel) ** 2


@dataclass(frozen=True)
class HeuristicState:
    """Snapshot of one sequential-update iteration (1-based ``iteration``)."""

    iteration: int
    indices: tuple
    candidates: np.ndarray
    chosen: int


def candidate_set(others, num_points: int, a_min: int) -> np.ndarray:
    """Points 1..M at index distance >= a_min from every index in ``others``."""
    blocked = np.zeros(num_points + 1, dtype=bool)
    blocked[0] = True
    for c in others:
        blocked[max(c - a_min + 1, 1):min(c + a_min, num_points + 1)] = True
    return np.flatnonzero(~blocked)


def sequential_update(power, a_min: int, num_antennas: int, init, trace: list | None = None) -> Selection:
    """Re-place each antenna in turn at the best point compatible with the others.

    Antenna n (in ascending order of the initial indices) moves to the largest
    gain among points spaced >= a_min from the already-updated antennas 1..n-1
    and the not-yet-updated initial antennas n+1..N. Ties go to the smallest
    index. ``evaluations`` on the result counts the gain lookups, i.e. the
    total size of the candidate sets.

    If ``trace`` is a list, one :class:`HeuristicState` per iteration is appended.
    """
    power = np.asarray(getattr(power, "power", power), dtype=float)
    m = len(power)
    current = sorted(int(i) for i in getattr(init, "indices", init))
    if len(current) != num_antennas:
        raise ValueError(f"init has {len(current)} indices, expected {num_antennas}")
    if not is_feasible(current, m, a_min):
        raise InfeasibleError(f"initial selection {tuple(current)} violates spacing {a_min}")
    lookups = 0
    for n in range(num_antennas):
        others = current[:n] + current[n + 1:]
        psi = candidate_set(others, m, a_min)
        lookups += len(psi)
        best = int(psi[np.argmax(power[psi - 1])])
        current[n] = best
        if trace is not None:
            trace.append(HeuristicState(n + 1, tuple(current), psi, best))
    indices = tuple(sorted(current))
    return Selection(indices, selection_value(power, indices), lookups)


def fpa_no_as_positions(length: float, num_antennas: int, d_min: float) -> np.ndarray:
    """N antennas at spacing d_min centred on the aperture midpoint."""
    if num_antennas < 1:
        raise ValueError(f"need at least one antenna, got {num_antennas}")
    if num_antennas * d_min > length * (1 + 1e-9):
        raise InfeasibleError(
            f"{num_antennas} antennas at spacing {d_min} do not fit in {length} m"
        )
    n = np.arange(1, num_antennas + 1)
    return length / 2 + (n - (num_antennas + 1) / 2) * d_min


def fpa_no_as_layout(paths: PathSet, length: float, num_antennas: int, d_min: float,
                     wavelength: float) -> AntennaLayout:
    x = fpa_no_as_positions(length, num_antennas, d_min)
    return AntennaLayout(x, field_response(paths, x, wavelength), FPA_FIXED)


def fpa_candidates(length: float, d_min: float) -> np.ndarray:
    """Fixed antenna sites k d_min, k = 1..floor(L / d_min).

    When L / d_min is an integer K the sites are computed as k L / K so that
    they coincide bit-for-bit with grid points m L / M for M = K.
    """
    k_exact = near_integer(length / d_min)
    if k_exact is not None:
        return np.arange(1, k_exact + 1) * length / k_exact
    count = int(np.floor(length / d_min))
    return np.arange(1, count + 1) * d_min


def fpa_as_select(paths: PathSet, length: float, d_min: float, num_antennas: int,
                  wavelength: float) -> AntennaLayout:
    """Activate the N fixed sites with the largest power gain."""
    sites = fpa_candidates(length, d_min)
    if num_antennas > len(sites):
        raise InfeasibleError(
            f"{num_antennas} antennas requested but only {len(sites)} fixed sites exist"
        )
    h = field_response(paths, sites, wavelength)
    g = np.abs(h) ** 2
    # stable sort on -g keeps the smaller position first among ties
    chosen = np.sort(np.argsort(-g, kind="stable")[:num_antennas])
    return AntennaLayout(sites[chosen], h[chosen], FPA_SELECTED)


def snap_to_grid(positions, grid: SamplingGrid) -> tuple:
    """Map positions to feasible grid indices.

    Exact multiples of the grid spacing map directly. Otherwise each position
    snaps to the nearest index, and spacing is repaired by shifting right and,
    if that runs off the end, shifting back left.
    """
    m, a = grid.num_points, grid.a_min
    idx = []
    for x in sorted(np.asarray(positions, dtype=float)):
        r = x / grid.spacing
        k = near_integer(r)
        idx.append(min(max(k if k is not None else int(round(r)), 1), m))
    for n in range(1, len(idx)):
        idx[n] = max(idx[n], idx[n - 1] + a)
    if idx and idx[-1] > m:
        idx[-1] = m
        for n in range(len(idx) - 2, -1, -1):
            idx[n] = min(idx[n], idx[n + 1] - a)
    if not is_feasible(idx, m, a):
        raise InfeasibleError(f"cannot place {len(idx)} antennas on the grid with spacing {a}")
    return tuple(idx)


def grid_as_init(power, a_min: int, num_antennas: int) -> tuple:
    """Antenna selection restricted to every a_min-th grid point.

    Sites are a_min, 2 a_min, ... (the fixed-site layout when M = K a_min);
    if fewer than N exist the sites start at 1 instead. The N strongest sites
    are returned sorted.
    """
    power = np.asarray(getattr(power, "power", power), dtype=float)
    m = len(power)
    sites = np.arange(a_min, m + 1, a_min)
    if len(sites) < num_antennas:
        sites = np.arange(1, m + 1, a_min)
    if len(sites) < num_antennas:
        raise InfeasibleError(f"{num_antennas} antennas do not fit on {m} points with spacing {a_min}")
    chosen = np.argsort(-power[sites - 1], kind="stable")[:num_antennas]
    return tuple(int(i) for i in np.sort(sites[chosen]))


class MrtResult(NamedTuple):
    power: float
    beamformer: np.ndarray | None
    degenerate: bool


def mrt_received_power(channel, tx_power: float) -> MrtResult:
    """Maximum-ratio transmission over the channel values ``channel``.

    Returns the received power P_t * sum |h_n|^2 and the unit-power-scaled
    beamformer sqrt(P_t) h / ||h||. An all-zero channel gives zero power, no
    beamformer and ``degenerate=True``.
    """
    h = np.asarray(channel, dtype=complex)
    if h.ndim != 1 or len(h) == 0:
        raise ValueError("channel must be a non-empty 1-D sequence")
    if not tx_power > 0:
        raise ValueError(f"tx_power must be positive, got {tx_power!r}")
    gain = float(np.sum(np.abs(h) ** 2))
    if gain == 0.0:
        return MrtResult(0.0, None, True)
    w = np.sqrt(tx_power) * h / np.sqrt(gain)
    return MrtResult(tx_power * gain, w, False)


def received_power_direct(beamformer, channel) -> float:
    """|w^H h|^2 evaluated literally."""
    return float(np.abs(np.vdot(beamformer, channel)) ** 2)
