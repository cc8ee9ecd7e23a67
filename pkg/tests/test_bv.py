import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import heatbv as hb
from heatbv import batteries, bv
from heatbv.errors import ConfigError


def test_coarea_identity_on_indicators(torus16):
    S = torus16
    for name, members in batteries.random_sets(S, 40, seed=0):
        rep = bv.coarea_bv(S, members.astype(float))
        assert abs(rep.bvEnergy - bv.perimeter(S, members)) < 1e-12, name


def test_coarea_translation_invariance(torus16):
    S = torus16
    rng = np.random.default_rng(0)
    f = rng.standard_normal(S.n)
    assert bv.coarea_bv(S, f + 4.2).bvEnergy == pytest.approx(
        bv.coarea_bv(S, f).bvEnergy, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.05, max_value=20, allow_nan=False))
def test_coarea_scaling_invariance(scale):
    S = hb.build_lattice(2, 7, h=0.2)
    rng = np.random.default_rng(1)
    f = rng.standard_normal(S.n)
    base = bv.coarea_bv(S, f).bvEnergy
    assert bv.coarea_bv(S, scale * f).bvEnergy == pytest.approx(scale * base, rel=1e-9)


def test_zero_bv_implies_constant(torus16):
    S = torus16
    rng = np.random.default_rng(2)
    f = rng.standard_normal(S.n)
    assert bv.coarea_bv(S, f).bvEnergy > 0
    assert bv.coarea_bv(S, np.full(S.n, 1.0)).bvEnergy == 0.0


def test_perimeter_complement_symmetric(torus16):
    S = torus16
    _, members = batteries.random_sets(S, 1, seed=3)[0]
    assert bv.perimeter(S, members) == pytest.approx(bv.perimeter(S, ~members), rel=1e-12)


def test_perimeter_empty_and_full(torus16):
    n = torus16.n
    assert bv.perimeter(torus16, np.zeros(n, dtype=bool)) == 0.0
    assert bv.perimeter(torus16, np.ones(n, dtype=bool)) == 0.0


def test_sobolev_seminorm_p1_vs_coarea_ratio(torus16):
    """On sets the BV energy is exactly the L1 gradient norm of the indicator."""
    S = torus16
    _, members = batteries.random_sets(S, 1, seed=4)[0]
    rep = bv.coarea_bv(S, members.astype(float))
    assert rep.ratio == pytest.approx(1.0, rel=1e-12)


def test_relaxed_bv_at_most_direct(torus16):
    S = torus16
    rng = np.random.default_rng(5)
    f = rng.standard_normal(S.n)
    relaxed = bv.relaxed_bv(S, f, [2 * S.h, 4 * S.h])
    assert relaxed <= bv.sobolev_seminorm(S, f, 1.0) + 1e-12


def test_boundary_alpha_validation(torus16):
    members = np.zeros(torus16.n, dtype=bool)
    members[:10] = True
    for bad in (0.0, 0.6, -0.1):
        with pytest.raises(ConfigError):
            bv.measure_theoretic_boundary(torus16, members, bad)


def test_boundary_shrinks_with_alpha(torus16):
    S = torus16
    members = S.dist[0] <= S.diameter / 3.0
    sizes = [bv.measure_theoretic_boundary(S, members, a).sum()
             for a in (0.05, 0.2, 0.5)]
    assert sizes[0] >= sizes[1] >= sizes[2]


def test_boundary_of_halfspace_near_interface(torus16):
    S = torus16
    members = S.coords[:, 0] <= 0.5
    bnd = bv.measure_theoretic_boundary(S, members, 0.2)
    assert bnd.any()
    # the set {x <= 0.5} on the unit torus has interfaces at x = 0.5 and at
    # the wrap line x = 0; boundary vertices sit within one resolved radius
    x = S.coords[:, 0]
    iface = np.minimum(np.abs(x - 0.5), np.minimum(x, 1.0 - x))
    assert iface[bnd].max() <= S.diameter / 4.0 + S.h + 1e-9


def test_hausdorff_content_empty_zero(torus16):
    out = bv.hausdorff_content(torus16, np.zeros(torus16.n, dtype=bool), [2 * torus16.h])
    assert out["headline"] == 0.0


def test_hausdorff_content_of_circle_near_length(torus16):
    """The content of a geodesic circle of radius R should be within a small
    factor of its length 2 pi R."""
    S = torus16
    R = S.diameter / 4.0
    circ = np.abs(S.dist[0] - R) <= 0.6 * S.h
    out = bv.hausdorff_content(S, circ, [2 * S.h])
    length = 2.0 * np.pi * R
    assert 0.2 * length <= out["headline"] <= 5.0 * length


def test_minkowski_content_positive(torus16):
    S = torus16
    members = S.dist[0] <= 4 * S.h
    bnd = bv.measure_theoretic_boundary(S, members, 0.1)
    out = bv.minkowski_content(S, bnd)
    assert out["content"] > 0


def test_check_hausdorff_perimeter_battery(torus16):
    S = torus16
    members = S.dist[0] <= S.diameter / 4.0
    out = bv.check_hausdorff_perimeter(S, members, [0.05, 0.1, 0.2])
    assert out["perimeter"] > 0
    assert out["fittedC"] > 0
    assert len(out["rows"]) == 3
