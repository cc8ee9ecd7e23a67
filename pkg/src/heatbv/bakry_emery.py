"""Empirical constants for the gradient estimates tied to the heat semigroup:
weak and quasi curvature conditions, the Hamilton log-gradient bound, the
kernel gradient Gaussian bound, pseudo-Poincare inequalities, the kernel
cross-term estimate, and Riesz comparability.

All suprema are maxima over finite seeded batteries and geometric time grids;
every report carries its witness and a per-decade stability ratio, never a
verdict about the underlying space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grids import log_slope, resolved_time_grid
from .heat import (SpectralData, apply_semigroup, kernel_matrix, lp_norm,
                   sqrt_generator_apply)
from .space import MetricMeasureSpace, ball_measures, carre_du_champ, carre_du_champ_sq_columns

DENOM_GUARD = 1e-14


@dataclass
class BEReport:
    kind: str
    constant: float
    witness: dict
    grid: list
    stability: float
    skipped: int = 0
    flags: list = field(default_factory=list)
    p: float | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "constant": self.constant, "witness": self.witness,
                "grid": [float(t) for t in self.grid], "stability": self.stability,
                "skipped": self.skipped, "flags": self.flags, "p": self.p, "seed": self.seed}


def _stability(t_grid: np.ndarray, per_t: np.ndarray) -> float:
    """Ratio of per-sub-decade maxima of the constant over the two decades
    around the witness scale (one decade each side, clipped to the grid)."""
    pos = per_t > 0
    if pos.sum() < 2:
        return float("nan")
    center = np.log10(t_grid[int(np.argmax(per_t))])
    logt = np.log10(t_grid)
    window = pos & (np.abs(logt - center) <= 1.0)
    bins = np.floor(logt[window])
    maxima = [per_t[window][bins == b].max() for b in np.unique(bins)]
    if len(maxima) < 2:
        return 1.0
    return float(max(maxima) / min(maxima))


def _reduce(kind, t_grid, rows, p=None, skipped=0, flags=None, seed=0) -> BEReport:
    """rows: list of (quotient, witness dict) aligned with t_grid."""
    per_t = np.array([q for q, _ in rows])
    k = int(np.argmax(per_t)) if len(rows) else 0
    best, witness = (rows[k] if rows else (0.0, {}))
    return BEReport(kind=kind, constant=float(best), witness=witness,
                    grid=list(t_grid), stability=_stability(np.asarray(t_grid), per_t),
                    skipped=skipped, flags=flags or [], p=p, seed=seed)


def weak_be_constant(S: MetricMeasureSpace, D: SpectralData, t_grid=None,
                     battery=None, seed: int = 0) -> BEReport:
    """sup over grid and battery of t ||grad P_t f||_inf^2 / ||f||_inf^2."""
    from .batteries import extremizer_battery
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    if battery is None:
        battery = extremizer_battery(S, D, seed=seed)
    if not battery:
        raise ConfigError("battery must be nonempty")
    F = np.column_stack([f for _, f in battery])
    sup_f = np.abs(F).max(axis=0)
    rows = []
    for t in t_grid:
        Pt = D.eigenvectors @ (np.exp(-D.eigenvalues * t)[:, None]
                               * (D.eigenvectors.T @ (F * D.mu[:, None])))
        gsq = carre_du_champ_sq_columns(S, Pt)
        peak = gsq.max(axis=0)
        quot = np.where(sup_f > 0, t * peak / sup_f**2, 0.0)
        j = int(np.argmax(quot))
        x = int(np.argmax(gsq[:, j]))
        rows.append((float(quot[j]), {"t": float(t), "function": battery[j][0], "vertex": x}))
    return _reduce("weak", t_grid, rows, seed=seed)


def quasi_be_constant(S: MetricMeasureSpace, D: SpectralData, t_grid=None,
                      battery=None, seed: int = 0) -> BEReport:
    """sup over battery, grid, vertices of |grad P_t f|(x) / P_t |grad f|(x).

    Vanishing denominators are skipped and counted (they only occur for
    functions with grad f = 0, by irreducibility of P_t).
    """
    from .batteries import extremizer_battery
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    if battery is None:
        battery = extremizer_battery(S, D, seed=seed)
    F = np.column_stack([f for _, f in battery])
    G = np.sqrt(carre_du_champ_sq_columns(S, F))
    scale = G.max(axis=0)
    skipped = 0
    rows = []
    for t in t_grid:
        decay = np.exp(-D.eigenvalues * t)[:, None]
        Pt = D.eigenvectors @ (decay * (D.eigenvectors.T @ (F * D.mu[:, None])))
        PtG = D.eigenvectors @ (decay * (D.eigenvectors.T @ (G * D.mu[:, None])))
        num = np.sqrt(carre_du_champ_sq_columns(S, Pt))
        ok = PtG > DENOM_GUARD * np.maximum(scale, 1e-300)[None, :]
        skipped += int((~ok).sum())
        quot = np.where(ok, num / np.where(ok, PtG, 1.0), 0.0)
        x, j = np.unravel_index(int(np.argmax(quot)), quot.shape)
        rows.append((float(quot[x, j]), {"t": float(t), "function": battery[j][0], "vertex": int(x)}))
    flags = ["constant-functions-skipped"] if skipped else []
    return _reduce("quasi", t_grid, rows, skipped=skipped, flags=flags, seed=seed)


def hamilton_check(S: MetricMeasureSpace, D: SpectralData, t_grid=None, seed: int = 0) -> BEReport:
    """sup over (t, x, y) of t |grad_x ln p_t(x,y)|^2 / (1 + d(x,y)^2/t)."""
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    excluded = 0
    total = 0
    rows = []
    for t in t_grid:
        K = kernel_matrix(D, t)
        bad = K <= 0
        excluded += int(bad.sum())
        total += K.size
        lnK = np.log(np.clip(K, 1e-300, None))
        gsq = carre_du_champ_sq_columns(S, lnK)  # column y: |grad_x ln p_t(., y)|^2
        quot = t * gsq / (1.0 + S.dist**2 / t)
        quot[bad] = 0.0
        x, y = np.unravel_index(int(np.argmax(quot)), quot.shape)
        rows.append((float(quot[x, y]), {"t": float(t), "x": int(x), "y": int(y)}))
    flags = []
    if total and excluded / total > 0.01:
        flags.append(f"degraded-confidence: {excluded}/{total} nonpositive kernel samples")
    return _reduce("hamilton", t_grid, rows, skipped=excluded, flags=flags, seed=seed)


def kernel_gradient_bound(S: MetricMeasureSpace, D: SpectralData, t_grid=None,
                          max_samples: int = 20000, seed: int = 0) -> BEReport:
    """Fit of C, c in |grad_x p_t(x,y)| <= (C/sqrt(t)) e^(-c d^2/t) / sqrt(mu(B(x,rt)) mu(B(y,rt)))."""
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    rng = np.random.default_rng(seed)
    per_t = max(1, max_samples // len(t_grid))
    us, vs, meta = [], [], []
    for t in t_grid:
        K = kernel_matrix(D, t)
        grad = np.sqrt(carre_du_champ_sq_columns(S, K))
        volB = ball_measures(S, np.array([np.sqrt(t)]))[:, 0]
        if S.n * S.n <= per_t:
            xs, ys = np.meshgrid(np.arange(S.n), np.arange(S.n), indexing="ij")
            xs, ys = xs.ravel(), ys.ravel()
        else:
            xs = rng.integers(S.n, size=per_t)
            ys = rng.integers(S.n, size=per_t)
        g = grad[xs, ys]
        good = g > 0
        xs, ys, g = xs[good], ys[good], g[good]
        u = S.dist[xs, ys] ** 2 / t
        v = np.log(g) + 0.5 * np.log(t) + 0.5 * (np.log(volB[xs]) + np.log(volB[ys]))
        us.append(u)
        vs.append(v)
        meta.append((t, xs, ys))
    u = np.concatenate(us)
    v = np.concatenate(vs)
    A = np.column_stack([-u, np.ones_like(u)])
    coef, _, _, _ = np.linalg.lstsq(A, v, rcond=None)
    c = max(float(coef[0]) / 2.0, 1e-6)
    logC = max(float(np.max(v + c * u)), 0.0)
    # witness: the sample pinning the constant
    flat_idx = int(np.argmax(v + c * u))
    offset = 0
    witness = {}
    for t, xs, ys in meta:
        if flat_idx < offset + len(xs):
            k = flat_idx - offset
            witness = {"t": float(t), "x": int(xs[k]), "y": int(ys[k])}
            break
        offset += len(xs)
    per_decade = np.array([float(np.exp(np.max(vv + c * uu))) for uu, vv in zip(us, vs)])
    return BEReport(kind="kernelGradient", constant=float(np.exp(logC)), witness=witness,
                    grid=[float(t) for t in t_grid],
                    stability=_stability(np.asarray(t_grid), per_decade),
                    flags=[f"decayRate={c:.6g}"], seed=seed)


def pseudo_poincare_check(S: MetricMeasureSpace, D: SpectralData, p: float,
                          battery=None, t_grid=None, seed: int = 0) -> BEReport:
    """sup over battery and grid of ||P_t f - f||_p / (sqrt(t) || |grad f| ||_p)."""
    from .batteries import rademacher_vectors, smoothed_vectors, halfspace_indicators
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    if battery is None:
        battery = (rademacher_vectors(S, seed=seed) + smoothed_vectors(S, D, seed=seed)
                   + halfspace_indicators(S, seed=seed))
    rows = []
    skipped = 0
    grads = {name: lp_norm(carre_du_champ(S, f), S.mu, p) for name, f in battery}
    for t in t_grid:
        local, wit = 0.0, {}
        for name, f in battery:
            den = grads[name]
            if den < DENOM_GUARD:
                skipped += 1
                continue
            q = lp_norm(apply_semigroup(D, t, f) - f, S.mu, p) / (np.sqrt(t) * den)
            if q > local:
                local, wit = q, {"t": float(t), "function": name}
        rows.append((local, wit))
    return _reduce("pseudoPoincare", t_grid, rows, p=p, skipped=skipped, seed=seed)


def cross_term_check(S: MetricMeasureSpace, D: SpectralData, p: float,
                     battery=None, t_grid=None, seed: int = 0) -> BEReport:
    """sup of (iint |P_t u(x) - u(y)|^p p_t(x,y) dmu dmu)^(1/p) / (sqrt(t) || |grad u| ||_p)."""
    from .batteries import rademacher_vectors, smoothed_vectors, halfspace_indicators
    if p <= 1:
        raise ConfigError("cross-term check needs p > 1")
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    if battery is None:
        battery = (rademacher_vectors(S, seed=seed) + smoothed_vectors(S, D, seed=seed)
                   + halfspace_indicators(S, seed=seed))
    rows = []
    skipped = 0
    for t in t_grid:
        K = kernel_matrix(D, t)
        W = K * S.mu[None, :] * S.mu[:, None]
        local, wit = 0.0, {}
        for name, u in battery:
            den = lp_norm(carre_du_champ(S, u), S.mu, p)
            if den < DENOM_GUARD:
                skipped += 1
                continue
            Pu = apply_semigroup(D, t, u)
            diff = np.abs(Pu[:, None] - u[None, :]) ** p
            val = float(np.maximum((W * diff).sum(), 0.0)) ** (1.0 / p)
            q = val / (np.sqrt(t) * den)
            if q > local:
                local, wit = q, {"t": float(t), "function": name}
        rows.append((local, wit))
    return _reduce("crossTerm", t_grid, rows, p=p, skipped=skipped, seed=seed)


def riesz_check(S: MetricMeasureSpace, D: SpectralData, p: float, battery=None,
                seed: int = 0) -> BEReport:
    """Spread of ||sqrt(-L) f||_p / || |grad f| ||_p over a nonconstant battery."""
    from .batteries import rademacher_vectors, smoothed_vectors, halfspace_indicators
    if p <= 1:
        raise ConfigError("Riesz check needs p > 1")
    if battery is None:
        battery = (rademacher_vectors(S, seed=seed) + smoothed_vectors(S, D, seed=seed)
                   + halfspace_indicators(S, seed=seed))
    ratios, names = [], []
    skipped = 0
    for name, f in battery:
        den = lp_norm(carre_du_champ(S, f), S.mu, p)
        if den < DENOM_GUARD:
            skipped += 1
            continue
        ratios.append(lp_norm(sqrt_generator_apply(D, f), S.mu, p) / den)
        names.append(name)
    if not ratios:
        raise ConfigError("Riesz battery contained only constants")
    ratios = np.asarray(ratios)
    hi, lo = int(np.argmax(ratios)), int(np.argmin(ratios))
    spread = float(ratios[hi] / ratios[lo])
    return BEReport(kind="riesz", constant=spread,
                    witness={"max": {"function": names[hi], "ratio": float(ratios[hi])},
                             "min": {"function": names[lo], "ratio": float(ratios[lo])}},
                    grid=[], stability=spread, skipped=skipped, p=p, seed=seed)


CHECKS = {
    "weak": weak_be_constant,
    "quasi": quasi_be_constant,
    "hamilton": hamilton_check,
    "kernel-gradient": kernel_gradient_bound,
}


def reevaluate_witness(S: MetricMeasureSpace, D: SpectralData, report: BEReport,
                       battery=None) -> float:
    """Recompute the quotient at a report's witness (determinism check)."""
    w = report.witness
    if report.kind == "hamilton":
        t = w["t"]
        K = kernel_matrix(D, t)
        lnK = np.log(np.clip(K, 1e-300, None))
        g = carre_du_champ(S, lnK[:, w["y"]]) ** 2
        return float(t * g[w["x"]] / (1.0 + S.dist[w["x"], w["y"]] ** 2 / t))
    if report.kind == "weak":
        f = dict(battery)[w["function"]]
        t = w["t"]
        Pt = apply_semigroup(D, t, f)
        g = carre_du_champ(S, Pt)
        return float(t * g.max() ** 2 / np.abs(f).max() ** 2)
    if report.kind == "quasi":
        f = dict(battery)[w["function"]]
        t = w["t"]
        num = carre_du_champ(S, apply_semigroup(D, t, f))
        den = apply_semigroup(D, t, carre_du_champ(S, f))
        return float(num[w["vertex"]] / den[w["vertex"]])
    raise ConfigError(f"no witness replay for kind '{report.kind}'")
