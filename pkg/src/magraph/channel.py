"""Field-response multipath channel over a discretized linear aperture.

All quantities are linear (power ratios, metres, radians). Decibels only
appear at the I/O boundary through :func:`db_to_linear` / :func:`linear_to_db`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Relative slack when deciding whether d_min / delta_s is an integer.
_INTEGRALITY_RTOL = 1e-9


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def near_integer(x: float) -> int | None:
    """Return round(x) if x is an integer up to floating-point noise, else None."""
    r = round(x)
    if abs(x - r) <= _INTEGRALITY_RTOL * max(1.0, abs(r)):
        return int(r)
    return None


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical parameters of one link.

    Defaults follow the 5 GHz single-link setup: a 6-wavelength aperture,
    half-wavelength minimum spacing, 100 m link with exponent 2.8, -46 dB
    reference loss, 100 dB transmit SNR and 9 propagation paths.
    """

    wavelength: float = 0.06
    length: float = 0.36
    d_min: float = 0.03
    distance: float = 100.0
    alpha: float = 2.8
    beta: float = 10.0 ** -4.6
    tx_snr: float = 1e10
    num_paths: int = 9

    def __post_init__(self):
        for name in ("wavelength", "length", "d_min", "distance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not self.tx_snr > 0:
            raise ValueError(f"tx_snr must be positive, got {self.tx_snr!r}")
        if int(self.num_paths) != self.num_paths or self.num_paths < 1:
            raise ValueError(f"num_paths must be an integer >= 1, got {self.num_paths!r}")

    @property
    def large_scale_gain(self) -> float:
        """Average total path power beta * D**(-alpha)."""
        return self.beta * self.distance ** (-self.alpha)


@dataclass(frozen=True)
class SamplingGrid:
    """M uniformly spaced candidate points s_m = m L / M, m = 1..M."""

    length: float
    num_points: int
    a_min: int
    integral: bool = True

    @property
    def spacing(self) -> float:
        return self.length / self.num_points

    @property
    def positions(self) -> np.ndarray:
        # (m * L) / M in this order keeps s_{2m} on a 2M grid bit-identical to s_m.
        return np.arange(1, self.num_points + 1) * self.length / self.num_points

    def position(self, index: int) -> float:
        """Position of the 1-based sampling point ``index``."""
        return index * self.length / self.num_points


def make_grid(length: float, num_points: int, d_min: float) -> SamplingGrid:
    """Sample an aperture of ``length`` metres into ``num_points`` points.

    The minimum index separation is ``ceil(d_min / delta_s)``. When that ratio
    is not an integer a :class:`UserWarning` is emitted and the grid is marked
    non-integral; the ceiling still guarantees the physical spacing.
    """
    if not length > 0:
        raise ValueError(f"length must be positive, got {length!r}")
    if int(num_points) != num_points or num_points < 1:
        raise ValueError(f"num_points must be an integer >= 1, got {num_points!r}")
    if not d_min > 0:
        raise ValueError(f"d_min must be positive, got {d_min!r}")
    ratio = d_min * num_points / length
    a_min = near_integer(ratio)
    integral = a_min is not None
    if not integral:
        a_min = math.ceil(ratio)
        warnings.warn(
            f"d_min/delta_s = {ratio:.6g} is not an integer; using a_min = {a_min}",
            stacklevel=2,
        )
    return SamplingGrid(float(length), int(num_points), max(int(a_min), 1), integral)


@dataclass(frozen=True)
class PathSet:
    """One channel realization: complex gains, departure angles, power shares."""

    gains: np.ndarray
    angles: np.ndarray
    fractions: np.ndarray

    def __post_init__(self):
        if not (len(self.gains) == len(self.angles) == len(self.fractions)):
            raise ValueError("gains, angles and fractions must have equal length")
        if np.any(self.angles < 0) or np.any(self.angles > np.pi):
            raise ValueError("angles must lie in [0, pi]")

    @property
    def num_paths(self) -> int:
        return len(self.gains)


@dataclass(frozen=True)
class GainProfile:
    """Channel values h_m at every sampling point and the power gains |h_m|^2."""

    channel: np.ndarray
    power: np.ndarray

    @classmethod
    def from_power(cls, power) -> "GainProfile":
        """Profile with real, non-negative channel sqrt(g); used for gain files."""
        power = np.asarray(power, dtype=float)
        if power.ndim != 1 or len(power) == 0:
            raise ValueError("power must be a non-empty 1-D sequence")
        if np.any(power < 0) or not np.all(np.isfinite(power)):
            raise ValueError("power gains must be finite and non-negative")
        return cls(np.sqrt(power).astype(complex), power)

    def __len__(self):
        return len(self.power)


def draw_power_fractions(num_paths: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform(0, 1) shares normalized to sum to one."""
    if num_paths < 1:
        raise ValueError(f"num_paths must be >= 1, got {num_paths!r}")
    raw = rng.uniform(0.0, 1.0, size=num_paths)
    total = raw.sum()
    if total <= 0:  # all draws exactly zero; measure-zero event
        return np.full(num_paths, 1.0 / num_paths)
    return raw / total


def draw_path_set(cfg: ScenarioConfig, rng: np.random.Generator) -> PathSet:
    """Draw gamma_i ~ CN(0, beta D^-alpha l_i) and theta_i ~ U[0, pi]."""
    fractions = draw_power_fractions(cfg.num_paths, rng)
    var = cfg.large_scale_gain * fractions
    z = rng.standard_normal((cfg.num_paths, 2))
    gains = np.sqrt(var / 2.0) * (z[:, 0] + 1j * z[:, 1])
    angles = rng.uniform(0.0, np.pi, size=cfg.num_paths)
    return PathSet(gains, angles, fractions)


def field_response(paths: PathSet, x, wavelength: float):
    """h(x) = sum_i gamma_i exp(j 2 pi / lambda * x cos(theta_i)).

    ``x`` may be a scalar or an array of positions; the result has its shape.
    """
    x_arr = np.asarray(x, dtype=float)
    phase = (2.0 * np.pi / wavelength) * np.multiply.outer(x_arr, np.cos(paths.angles))
    return (np.exp(1j * phase) * paths.gains).sum(axis=-1)


def channel_gains(paths: PathSet, grid: SamplingGrid, wavelength: float) -> GainProfile:
    h = field_response(paths, grid.positions, wavelength)
    return GainProfile(h, np.abs(h) ** 2)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent PCG64 stream determined by (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))
