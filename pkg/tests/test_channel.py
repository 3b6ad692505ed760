import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from magraph.channel import (
    GainProfile,
    PathSet,
    ScenarioConfig,
    channel_gains,
    db_to_linear,
    draw_path_set,
    draw_power_fractions,
    field_response,
    linear_to_db,
    make_grid,
    trial_rng,
)


def random_paths(rng, num_paths):
    gains = rng.standard_normal(num_paths) + 1j * rng.standard_normal(num_paths)
    angles = rng.uniform(0, np.pi, num_paths)
    return PathSet(gains, angles, np.full(num_paths, 1.0 / num_paths))


# --- make_grid ---------------------------------------------------------------

def test_grid_coarse_matches_fixed_sites():
    grid = make_grid(0.36, 12, 0.03)
    assert grid.spacing == pytest.approx(0.03)
    assert grid.a_min == 1
    np.testing.assert_allclose(grid.positions, 0.03 * np.arange(1, 13))
    assert grid.positions[-1] == pytest.approx(0.36, rel=1e-15)


def test_grid_m48():
    grid = make_grid(0.36, 48, 0.03)
    assert grid.spacing == pytest.approx(0.0075)
    assert grid.a_min == 4
    assert grid.integral


def test_grid_single_point():
    with pytest.warns(UserWarning):
        grid = make_grid(0.36, 1, 0.03)
    np.testing.assert_array_equal(grid.positions, [0.36])


@pytest.mark.parametrize("length", [0.18, 0.36, 0.54])
def test_grid_integral_ratio_survives_rounding(length):
    # d_min * M / L evaluates to 3.0000000000000004 or 2.9999999999999996 here
    grid = make_grid(length, round(length / 0.01), 0.03)
    assert grid.a_min == 3
    assert grid.integral


def test_grid_non_integral_warns_and_ceils():
    with pytest.warns(UserWarning, match="not an integer"):
        grid = make_grid(0.36, 50, 0.03)
    assert grid.a_min == math.ceil(0.03 * 50 / 0.36)
    assert not grid.integral
    assert grid.a_min * grid.spacing >= 0.03


@pytest.mark.parametrize("args", [(0, 10, 0.03), (0.36, 0, 0.03), (0.36, 10, -1.0), (-1, 10, 0.03)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        make_grid(*args)


@given(st.floats(0.05, 2.0), st.integers(1, 400), st.floats(0.001, 0.2))
def test_grid_invariants(length, m, d_min):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        grid = make_grid(length, m, d_min)
    s = grid.positions
    assert np.all(np.diff(s) > 0)
    assert s[-1] == pytest.approx(length)
    assert grid.a_min >= 1
    assert grid.a_min * grid.spacing >= d_min * (1 - 1e-9)


def test_scenario_defaults_and_validation():
    cfg = ScenarioConfig()
    assert cfg.large_scale_gain == pytest.approx(10 ** -10.2)
    with pytest.raises(ValueError):
        ScenarioConfig(num_paths=0)
    with pytest.raises(ValueError):
        ScenarioConfig(beta=0)
    with pytest.raises(ValueError):
        ScenarioConfig(length=-1)


def test_db_roundtrip():
    assert db_to_linear(-46) == pytest.approx(10 ** -4.6)
    assert db_to_linear(100) == pytest.approx(1e10)
    assert linear_to_db(1e10) == pytest.approx(100)


# --- power fractions / path sets -------------------------------------------

def test_single_path_fraction_is_one():
    assert draw_power_fractions(1, np.random.default_rng(0)).tolist() == [1.0]


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_fractions_sum_to_one(p, seed):
    l = draw_power_fractions(p, np.random.default_rng(seed))
    assert np.all(l >= 0)
    assert abs(l.sum() - 1.0) <= 1e-12


def test_fraction_means_monte_carlo():
    rng = np.random.default_rng(7)
    draws = np.array([draw_power_fractions(9, rng) for _ in range(100_000)])
    mean = draws.mean(axis=0)
    se = draws.std(axis=0, ddof=1) / np.sqrt(len(draws))
    assert np.all(np.abs(mean - 1 / 9) <= 3 * se)


def test_total_variance_default():
    cfg = ScenarioConfig()
    assert cfg.large_scale_gain * 1.0 == pytest.approx(10 ** -10.2, rel=1e-12)
    one = ScenarioConfig(num_paths=1)
    paths = draw_path_set(one, np.random.default_rng(1))
    assert paths.fractions.tolist() == [1.0]


def test_path_set_statistics():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(11)
    n = 100_000
    ratio = np.empty((n, cfg.num_paths))
    angles = np.empty((n, cfg.num_paths))
    for t in range(n):
        ps = draw_path_set(cfg, rng)
        ratio[t] = np.abs(ps.gains) ** 2 / (cfg.large_scale_gain * ps.fractions)
        angles[t] = ps.angles
    # |gamma|^2 / (beta D^-alpha l) is Exp(1) for a CSCG gain
    assert np.all(np.abs(ratio.mean(axis=0) - 1.0) < 0.05)
    assert np.all((angles >= 0) & (angles <= np.pi))
    assert stats.kstest(angles.ravel(), stats.uniform(0, np.pi).cdf).pvalue > 1e-3


def test_path_set_rejects_bad_angles():
    with pytest.raises(ValueError):
        PathSet(np.ones(1, complex), np.array([4.0]), np.ones(1))


def test_trial_rng_is_deterministic_and_distinct():
    a = trial_rng(5, 3).standard_normal(4)
    b = trial_rng(5, 3).standard_normal(4)
    c = trial_rng(5, 4).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


# --- field response -----------------------------------------------------------

def test_field_response_at_origin_sums_gains():
    ps = random_paths(np.random.default_rng(0), 9)
    assert field_response(ps, 0.0, 0.06) == pytest.approx(ps.gains.sum())


def test_broadside_paths_are_position_independent():
    g = np.array([1 + 2j, -0.5j, 0.3])
    ps = PathSet(g, np.full(3, np.pi / 2), np.full(3, 1 / 3))
    h = field_response(ps, np.linspace(0, 0.36, 50), 0.06)
    np.testing.assert_allclose(h, g.sum(), atol=1e-14)


def test_field_response_worked_value():
    ps = PathSet(np.array([1, 1j]), np.array([0, np.pi / 3]), np.array([0.5, 0.5]))
    expected = sum(
        gi * cmath.exp(1j * 2 * math.pi / 0.06 * 0.03 * math.cos(th))
        for gi, th in zip([1, 1j], [0, math.pi / 3])
    )
    assert expected == pytest.approx(-2)
    assert field_response(ps, 0.03, 0.06) == pytest.approx(expected, abs=1e-12)


def test_field_response_is_linear_in_gains():
    rng = np.random.default_rng(3)
    a = random_paths(rng, 6)
    b = PathSet(rng.standard_normal(6) + 0j, a.angles, a.fractions)
    ab = PathSet(a.gains + b.gains, a.angles, a.fractions)
    x = np.linspace(0, 0.36, 37)
    np.testing.assert_allclose(
        field_response(ab, x, 0.06),
        field_response(a, x, 0.06) + field_response(b, x, 0.06),
        rtol=1e-12, atol=1e-12,
    )


def test_gains_invariant_to_path_order_and_phase_wrap():
    rng = np.random.default_rng(4)
    ps = random_paths(rng, 9)
    grid = make_grid(0.36, 48, 0.03)
    base = channel_gains(ps, grid, 0.06).power
    perm = rng.permutation(9)
    shuffled = PathSet(ps.gains[perm], ps.angles[perm], ps.fractions[perm])
    np.testing.assert_allclose(channel_gains(shuffled, grid, 0.06).power, base, rtol=1e-12)
    wrapped = PathSet(ps.gains * np.exp(2j * np.pi), ps.angles, ps.fractions)
    np.testing.assert_allclose(channel_gains(wrapped, grid, 0.06).power, base, rtol=1e-12)


# --- channel gains ------------------------------------------------------------

def test_profile_single_point():
    ps = random_paths(np.random.default_rng(5), 9)
    with pytest.warns(UserWarning):
        grid = make_grid(0.36, 1, 0.03)
    prof = channel_gains(ps, grid, 0.06)
    assert len(prof) == 1
    assert prof.channel[0] == field_response(ps, 0.36, 0.06)


def test_single_path_profile_is_flat():
    ps = PathSet(np.array([0.3 - 0.4j]), np.array([1.1]), np.array([1.0]))
    prof = channel_gains(ps, make_grid(0.36, 48, 0.03), 0.06)
    np.testing.assert_allclose(prof.power, 0.25, rtol=1e-14)
    assert prof.power.max() - prof.power.min() <= 1e-15


def test_profile_matches_pointwise_evaluation():
    cfg = ScenarioConfig()
    ps = draw_path_set(cfg, np.random.default_rng(9))
    grid = make_grid(cfg.length, 48, cfg.d_min)
    prof = channel_gains(ps, grid, cfg.wavelength)
    for m in range(1, 49):
        h = sum(g * cmath.exp(1j * 2 * math.pi / cfg.wavelength * (m * 0.36 / 48) * math.cos(t))
                for g, t in zip(ps.gains, ps.angles))
        assert prof.channel[m - 1] == pytest.approx(h, rel=1e-10)
    np.testing.assert_array_equal(prof.power, np.abs(prof.channel) ** 2)
    assert np.all(prof.power >= 0)


def test_gain_profile_from_power_validates():
    prof = GainProfile.from_power([1, 4, 0])
    np.testing.assert_array_equal(prof.power, [1, 4, 0])
    with pytest.raises(ValueError):
        GainProfile.from_power([1, -2])
    with pytest.raises(ValueError):
        GainProfile.from_power([])
