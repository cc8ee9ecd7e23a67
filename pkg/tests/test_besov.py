import numpy as np
import pytest

import heatbv as hb
from heatbv import batteries, besov
from heatbv.errors import ConfigError, NumericError
from heatbv.grids import resolved_radius_grid


def brute_heat_energy(S, D, f, p, t):
    """Direct double-sum oracle for E_p(t)^p."""
    K = hb.kernel_matrix(D, t)
    A = np.abs(f[:, None] - f[None, :]) ** p
    return float((K * A * S.mu[:, None] * S.mu[None, :]).sum())


def test_heat_energy_moments_match_double_sum(torus16, torus16_spec):
    S, D = torus16, torus16_spec
    rng = np.random.default_rng(0)
    f = rng.standard_normal(S.n)
    for p in (1.0, 2.0):
        prof = besov.heat_besov_profile(S, D, f, p, t_grid=np.array([0.01, 0.05]), alpha=0.5)
        for t, e in zip(prof.grid, prof.energies):
            assert e ** p == pytest.approx(brute_heat_energy(S, D, f, p, t), rel=1e-9)


def test_metric_profile_matches_double_sum(torus16):
    S = torus16
    rng = np.random.default_rng(1)
    f = rng.standard_normal(S.n)
    r = 3.5 * S.h
    prof = besov.metric_besov_profile(S, f, 1.0, r_grid=np.array([r]), alpha=1.0)
    acc = 0.0
    for x in range(S.n):
        near = S.dist[x] < r
        volB = float(S.mu[near].sum())
        acc += float((np.abs(f[x] - f[near]) * S.mu[near]).sum()) / volB * S.mu[x]
    assert prof.energies[0] == pytest.approx(acc, rel=1e-12)


def test_constant_function_zero_seminorms(torus16, torus16_spec):
    f = np.full(torus16.n, 2.0)
    h = besov.heat_besov_profile(torus16, torus16_spec, f, 1.0)
    m = besov.metric_besov_profile(torus16, f, 1.0)
    assert h.seminorm == pytest.approx(0.0, abs=1e-12)
    assert m.seminorm == pytest.approx(0.0, abs=1e-12)
    cmp = besov.compare_seminorms(torus16, torus16_spec, f, 1.0)
    assert cmp.ratio == 1.0


def test_seminorm_scale_homogeneous(torus16, torus16_spec):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(torus16.n)
    a = besov.heat_besov_profile(torus16, torus16_spec, f, 1.0).seminorm
    b = besov.heat_besov_profile(torus16, torus16_spec, 3.0 * f, 1.0).seminorm
    assert b == pytest.approx(3.0 * a, rel=1e-10)


def test_rejects_p_below_one(torus16, torus16_spec):
    with pytest.raises(ConfigError):
        besov.heat_besov_profile(torus16, torus16_spec, np.zeros(torus16.n), 0.5)
    with pytest.raises(ConfigError):
        besov.metric_besov_profile(torus16, np.zeros(torus16.n), 0.5)


def test_rejects_empty_grid(torus16, torus16_spec):
    with pytest.raises(ConfigError):
        besov.heat_besov_profile(torus16, torus16_spec, np.zeros(torus16.n), 1.0,
                                 t_grid=np.array([]))


def test_halfplane_slope_near_half():
    """Indicator of a half plane sits in the 1/2-smoothness class for p=1:
    the log-log slope of the heat energy is about 1/2."""
    S = hb.build_lattice(2, 33, h=1.0 / 32.0)
    D = hb.spectral_decompose(S)
    f = (S.coords[:, 0] <= 0.5).astype(float)
    t_grid = besov.smoothness_fit_grid(S)
    prof = besov.heat_besov_profile(S, D, f, 1.0, t_grid=t_grid, alpha=0.5)
    slope = besov.smoothness_exponent(prof)
    assert abs(slope - 0.5) < 0.1


def test_compare_seminorms_ratio_order_one(torus16, torus16_spec):
    f = batteries.halfspace_indicators(torus16, seed=0)[0][1]
    cmp = besov.compare_seminorms(torus16, torus16_spec, f, 1.0, alpha=1.0)
    assert 0.02 < cmp.ratio < 50.0


def test_critical_exponent_study_monotone_guard():
    def bad_builder(level):
        # levels that refine the wrong way violate the monotone-range contract
        return hb.build_lattice(2, level, h=1.0 / (level - 1))
    with pytest.raises(ConfigError):
        besov.critical_exponent_study(bad_builder, [33, 17, 9], 1.0,
                                      lambda S, D: batteries.lipschitz_battery(S, count=2, seed=0))


def test_critical_exponent_study_needs_three_levels():
    with pytest.raises(ConfigError):
        besov.critical_exponent_study(lambda lv: None, [17, 33], 1.0, lambda S, D: [])


def test_semigroup_continuity_check(torus16, torus16_spec):
    bat = batteries.lipschitz_battery(torus16, count=2, seed=0)
    out = besov.semigroup_besov_continuity_check(torus16, torus16_spec, 2.0, bat)
    assert out["constant"] > 0
    assert out["witness"] is not None
