import numpy as np
import pytest

import heatbv as hb
from heatbv.cover import (ball_averages, discrete_convolution, max_separated_covering,
                          partition_of_unity, relaxation_energy)
from heatbv.errors import ConfigError


def test_covering_separation_and_coverage(torus16):
    S = torus16
    cov = max_separated_covering(S, 4 * S.h)
    c = cov.centers
    pair = S.dist[np.ix_(c, c)]
    off = pair[~np.eye(len(c), dtype=bool)]
    assert off.min() >= 4 * S.h - 1e-12
    # every vertex within epsilon of a center
    assert (S.dist[:, c].min(axis=1) <= 4 * S.h + 1e-12).all()


def test_covering_rejects_sub_mesh_epsilon(torus16):
    with pytest.raises(ConfigError):
        max_separated_covering(torus16, 0.5 * torus16.h)


def test_partition_of_unity_properties(torus16):
    S = torus16
    pou = partition_of_unity(S, max_separated_covering(S, 4 * S.h))
    w = pou.weights
    assert np.abs(w.sum(axis=1) - 1.0).max() < 1e-12
    assert w.min() >= 0.0
    assert pou.lip_bound > 0


def test_ball_averages_constant_exact(torus16):
    S = torus16
    cov = max_separated_covering(S, 4 * S.h)
    avg = ball_averages(S, cov, np.full(S.n, 2.5))
    assert np.allclose(avg, 2.5)


def test_discrete_convolution_preserves_constants_and_range(torus16):
    S = torus16
    pou = partition_of_unity(S, max_separated_covering(S, 4 * S.h))
    assert np.allclose(discrete_convolution(S, pou, np.full(S.n, -1.3)), -1.3)
    rng = np.random.default_rng(0)
    f = rng.standard_normal(S.n)
    u = discrete_convolution(S, pou, f)
    assert u.min() >= f.min() - 1e-12
    assert u.max() <= f.max() + 1e-12


def test_convolution_smooths_energy(torus16):
    """Averaging over epsilon-balls should not inflate the L1 gradient energy
    of a rough (Rademacher) function."""
    S = torus16
    rng = np.random.default_rng(4)
    f = rng.choice([-1.0, 1.0], size=S.n)
    pou = partition_of_unity(S, max_separated_covering(S, 4 * S.h))
    u = discrete_convolution(S, pou, f)
    rough = float(hb.carre_du_champ(S, f) @ S.mu)
    smooth = float(hb.carre_du_champ(S, u) @ S.mu)
    assert smooth < rough


def test_relaxation_energy_shape(torus16):
    S = torus16
    rng = np.random.default_rng(5)
    f = rng.standard_normal(S.n)
    out = relaxation_energy(S, f, [2 * S.h, 4 * S.h])
    assert len(out["energies"]) == 2
    assert out["sup"] == max(out["energies"])


def test_overlap_multiplicity_bounded(torus16):
    S = torus16
    cov = max_separated_covering(S, 4 * S.h)
    m1 = cov.overlap_multiplicity(S, 1.0)
    m2 = cov.overlap_multiplicity(S, 2.0)
    assert 1 <= m1 <= m2
