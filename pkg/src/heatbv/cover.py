"""Maximally separated coverings, Lipschitz partitions of unity, discrete convolutions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvariantViolation
from .space import MetricMeasureSpace, carre_du_champ_sq


@dataclass
class Covering:
    """Greedy maximally separated epsilon-covering.

    Centers are pairwise >= epsilon apart (so the epsilon/2 balls are
    disjoint) and every vertex lies within epsilon of some center.
    """

    epsilon: float
    centers: np.ndarray
    member_of: list = field(repr=False)

    def overlap_multiplicity(self, S: MetricMeasureSpace, dilation: float) -> int:
        """Max number of dilated covering balls containing a single vertex."""
        counts = (S.dist[:, self.centers] <= dilation * self.epsilon).sum(axis=1)
        return int(counts.max())


@dataclass
class PartitionOfUnity:
    covering: Covering
    weights: np.ndarray  # (n, n_centers), rows sum to 1
    lip_bound: float     # measured Lipschitz constant times epsilon


def max_separated_covering(S: MetricMeasureSpace, epsilon: float) -> Covering:
    """Greedy scan in ascending vertex index; a vertex becomes a center iff it
    is >= epsilon from all admitted centers."""
    if epsilon < S.h:
        raise ConfigError(f"epsilon {epsilon:g} below mesh scale {S.h:g}: covering degenerates")
    centers: list[int] = []
    for x in range(S.n):
        if all(S.dist[x, c] >= epsilon for c in centers):
            centers.append(x)
    centers = np.array(centers, dtype=int)
    dmat = S.dist[:, centers]
    covered = dmat <= epsilon
    if not covered.any(axis=1).all():
        bad = int(np.flatnonzero(~covered.any(axis=1))[0])
        raise InvariantViolation(f"vertex {bad} not covered; greedy scan is broken")
    member_of = [np.flatnonzero(covered[x]) for x in range(S.n)]
    return Covering(epsilon=epsilon, centers=centers, member_of=member_of)


def partition_of_unity(S: MetricMeasureSpace, cov: Covering) -> PartitionOfUnity:
    """Tent bumps psi_i(x) = max(0, 1 - d(x, c_i)/(2 eps)), normalized to sum to 1.

    The covering property keeps the normalizing denominator >= 1/2.
    """
    eps = cov.epsilon
    psi = np.maximum(0.0, 1.0 - S.dist[:, cov.centers] / (2.0 * eps))
    denom = psi.sum(axis=1)
    if denom.min() <= 0.0:
        bad = int(np.argmin(denom))
        raise InvariantViolation(f"zero partition denominator at vertex {bad}: covering invalid")
    phi = psi / denom[:, None]
    # measured Lipschitz constant of the worst bump, scaled by epsilon
    i, j = S.cond.nonzero()
    edge_d = S.dist[i, j]
    lip = float(np.max(np.abs(phi[i] - phi[j]) / edge_d[:, None]))
    return PartitionOfUnity(covering=cov, weights=phi, lip_bound=lip * eps)


def ball_averages(S: MetricMeasureSpace, cov: Covering, f: np.ndarray) -> np.ndarray:
    """mu-average of f over each covering ball B(center, epsilon)."""
    f = np.asarray(f, dtype=float)
    member = S.dist[cov.centers] <= cov.epsilon
    return (member * (f * S.mu)[None, :]).sum(axis=1) / (member @ S.mu)


def discrete_convolution(S: MetricMeasureSpace, pou: PartitionOfUnity, f: np.ndarray) -> np.ndarray:
    """u_eps = sum_i f_{B_i} phi_i, a convex combination of ball averages."""
    avg = ball_averages(S, pou.covering, f)
    return pou.weights @ avg


def relaxation_energy(S: MetricMeasureSpace, f: np.ndarray, eps_list, p: float = 1.0) -> dict:
    """Per-epsilon smoothed gradient energies int |grad u_eps|^p dmu and their sup.

    Used by the BV relaxation estimator and the Besov lower-bound replay.
    """
    energies = []
    for eps in eps_list:
        cov = max_separated_covering(S, eps)
        pou = partition_of_unity(S, cov)
        u = discrete_convolution(S, pou, f)
        gsq = carre_du_champ_sq(S, u)
        energies.append(float((gsq ** (p / 2.0)) @ S.mu))
    return {"epsilons": [float(e) for e in eps_list], "energies": energies,
            "sup": max(energies) if energies else 0.0}
