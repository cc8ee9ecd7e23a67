import numpy as np
import pytest
import scipy.linalg as sla

import heatbv as hb
from heatbv.grids import resolved_time_grid
from heatbv.heat import apply_semigroup, generator_matrix, kernel_matrix, lp_norm


def semigroup_oracle(S, t):
    """Matrix-exponential oracle for P_t as an operator matrix."""
    return sla.expm(t * generator_matrix(S))


def test_two_point_closed_form(two_point, two_point_spec):
    D = two_point_spec
    assert np.allclose(D.eigenvalues, [0.0, 2.0], atol=1e-12)
    for t in (0.05, 0.25, 1.0, 3.0):
        K = kernel_matrix(D, t)
        assert K[0, 1] == pytest.approx((1.0 - np.exp(-2.0 * t)) / 2.0, abs=1e-12)
        assert K[0, 0] == pytest.approx((1.0 + np.exp(-2.0 * t)) / 2.0, abs=1e-12)


def test_kernel_matches_expm_oracle(two_point, two_point_spec, four_cycle, four_cycle_spec,
                                    lattice9, lattice9_spec):
    for S, D in ((two_point, two_point_spec), (four_cycle, four_cycle_spec),
                 (lattice9, lattice9_spec)):
        for t in (0.01, 0.1, 1.0):
            P_spec = kernel_matrix(D, t) * S.mu[None, :]
            P_expm = semigroup_oracle(S, t)
            assert np.abs(P_spec - P_expm).max() < 1e-10


def test_four_cycle_spectrum(four_cycle_spec):
    # circulant generator with conductance 1 and mu = 1: 2 - 2cos(2 pi k / 4)
    expected = np.sort([2.0 - 2.0 * np.cos(2.0 * np.pi * k / 4.0) for k in range(4)])
    assert np.allclose(four_cycle_spec.eigenvalues, expected, atol=1e-12)


def test_eigenvectors_mu_orthonormal(torus16, torus16_spec):
    D = torus16_spec
    G = D.eigenvectors.T @ (D.eigenvectors * torus16.mu[:, None])
    assert np.abs(G - np.eye(torus16.n)).max() < 1e-9


def test_heat_invariants_torus(torus16, torus16_spec):
    t_grid = resolved_time_grid(torus16.h, torus16.diameter, points_per_decade=4)
    res = hb.heat_invariant_residuals(torus16, torus16_spec, t_grid=t_grid, seed=0)
    for name, val in res.items():
        assert val < 1e-9, f"{name} residual {val}"


def test_semigroup_identity_at_zero(torus16, torus16_spec):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(torus16.n)
    assert np.allclose(apply_semigroup(torus16_spec, 0.0, f), f, atol=1e-10)


def test_semigroup_property(torus16, torus16_spec):
    rng = np.random.default_rng(1)
    f = rng.standard_normal(torus16.n)
    a, b = 0.013, 0.057
    g1 = apply_semigroup(torus16_spec, a, apply_semigroup(torus16_spec, b, f))
    g2 = apply_semigroup(torus16_spec, a + b, f)
    assert np.abs(g1 - g2).max() < 1e-10


def test_semigroup_conserves_mass_and_contracts(torus16, torus16_spec):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(torus16.n)
    g = apply_semigroup(torus16_spec, 0.05, f)
    assert float(g @ torus16.mu) == pytest.approx(float(f @ torus16.mu), abs=1e-12)
    for p in (1.0, 2.0, np.inf):
        assert lp_norm(g, torus16.mu, p) <= lp_norm(f, torus16.mu, p) + 1e-12


def test_sqrt_generator_consistency(torus16, torus16_spec):
    # || sqrt(-L) f ||_2^2 equals the Dirichlet energy
    rng = np.random.default_rng(3)
    f = rng.standard_normal(torus16.n)
    from heatbv.heat import sqrt_generator_apply
    g = sqrt_generator_apply(torus16_spec, f)
    assert float((g * g) @ torus16.mu) == pytest.approx(
        hb.dirichlet_energy(torus16, f), rel=1e-9)


def test_gaussian_fit_fields(torus16, torus16_spec):
    t_grid = resolved_time_grid(torus16.h, torus16.diameter, points_per_decade=4)
    fit = hb.gaussian_bound_fit(torus16, torus16_spec, t_grid=t_grid, seed=0)
    assert fit.Cg >= 1.0
    assert fit.c1 >= fit.c2 > 0
    assert fit.nonpositiveSamples == 0
    assert fit.sampleCount > 0


def test_gaussian_fit_two_sided_bound_holds(torus16, torus16_spec):
    """Spot check: the fitted envelope actually dominates the sampled kernel."""
    S, D = torus16, torus16_spec
    t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=4)
    fit = hb.gaussian_bound_fit(S, D, t_grid=t_grid, seed=0)
    rng = np.random.default_rng(9)
    for _ in range(50):
        t = float(rng.choice(t_grid))
        x, y = rng.integers(S.n, size=2)
        p = hb.heat_kernel(D, t, int(x), int(y))
        volx = S.mu[S.dist[x] <= np.sqrt(t) + 1e-12].sum()
        u = S.dist[x, y] ** 2 / t
        upper = fit.Cg * np.exp(-fit.c2 * u) / volx
        lower = np.exp(-fit.c1 * u) / (fit.Cg * volx)
        assert p <= upper * (1 + 1e-9)
        assert p >= lower * (1 - 1e-9) - 1e-15


def test_kernel_positive_in_resolved_range(torus16, torus16_spec):
    t_grid = resolved_time_grid(torus16.h, torus16.diameter, points_per_decade=4)
    for t in t_grid:
        assert kernel_matrix(torus16_spec, float(t)).min() > 0
