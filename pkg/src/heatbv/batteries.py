"""Seeded function batteries shared by the estimator modules.

Batteries stand in for the L^p / L^inf suprema in the fitted functionals:
single-vertex indicators and Rademacher vectors are the classical
near-extremizers, half-space indicators probe perimeter-type quantities,
and semigroup-smoothed vectors represent the regular end.
"""
from __future__ import annotations

import numpy as np

from .heat import SpectralData, apply_semigroup
from .space import MetricMeasureSpace

MAX_INDICATORS = 512


def vertex_indicators(S: MetricMeasureSpace, seed: int = 0, cap: int = MAX_INDICATORS):
    rng = np.random.default_rng(seed)
    verts = np.arange(S.n) if S.n <= cap else np.sort(rng.choice(S.n, cap, replace=False))
    out = []
    for v in verts:
        f = np.zeros(S.n)
        f[v] = 1.0
        out.append((f"indicator[{v}]", f))
    return out


def rademacher_vectors(S: MetricMeasureSpace, count: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed + 1)
    return [(f"rademacher[{k}]", rng.choice([-1.0, 1.0], size=S.n)) for k in range(count)]


def smoothed_vectors(S: MetricMeasureSpace, D: SpectralData, count: int = 20, seed: int = 0,
                     t0: float | None = None):
    rng = np.random.default_rng(seed + 2)
    if t0 is None:
        t0 = 4.0 * S.h * S.h
    return [(f"smoothed[{k}]", apply_semigroup(D, t0, rng.standard_normal(S.n)))
            for k in range(count)]


def halfspace_indicators(S: MetricMeasureSpace, count: int = 6, seed: int = 0):
    """Geodesic half-space indicators.

    Coordinate half-spaces when an embedding is available, otherwise
    sub-level sets of the distance to seeded base vertices.
    """
    out = []
    if S.coords is not None:
        for ax in range(S.coords.shape[1]):
            med = np.median(S.coords[:, ax])
            out.append((f"halfspace[axis{ax}]", (S.coords[:, ax] <= med).astype(float)))
    rng = np.random.default_rng(seed + 3)
    need = max(0, count - len(out))
    for k in range(need):
        x0 = int(rng.integers(S.n))
        out.append((f"halfspace[ball{x0}]", (S.dist[x0] <= S.diameter / 2.0).astype(float)))
    return out[:count]


def lipschitz_battery(S: MetricMeasureSpace, count: int = 8, seed: int = 0):
    """1-Lipschitz-type probes: coordinate functions and distance functions."""
    out = []
    if S.coords is not None:
        for ax in range(S.coords.shape[1]):
            out.append((f"coord[{ax}]", S.coords[:, ax].astype(float).copy()))
    rng = np.random.default_rng(seed + 4)
    while len(out) < count:
        x0 = int(rng.integers(S.n))
        out.append((f"dist[{x0}]", S.dist[x0].copy()))
    return out[:count]


def extremizer_battery(S: MetricMeasureSpace, D: SpectralData, seed: int = 0):
    """The full battery used by the curvature-condition estimators."""
    return (vertex_indicators(S, seed) + rademacher_vectors(S, seed=seed)
            + smoothed_vectors(S, D, seed=seed) + halfspace_indicators(S, seed=seed))


def random_sets(S: MetricMeasureSpace, count: int, seed: int = 0):
    """Seeded random vertex sets: metric blobs of assorted radii plus Bernoulli sets."""
    rng = np.random.default_rng(seed + 5)
    out = []
    for k in range(count):
        if k % 2 == 0:
            x0 = int(rng.integers(S.n))
            r = float(rng.uniform(0.1, 0.45)) * S.diameter
            out.append((f"blob[{x0},{r:.3g}]", S.dist[x0] <= r))
        else:
            p = float(rng.uniform(0.2, 0.8))
            out.append((f"bernoulli[{k}]", rng.random(S.n) < p))
    return out
