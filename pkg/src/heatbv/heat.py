"""Spectral heat engine: generator, eigendecomposition, heat kernel, sqrt(-L).

Everything is derived from one dense eigendecomposition of the generator,
which makes the semigroup law exact up to roundoff and allows arbitrary-t
evaluation of sup-over-time functionals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError
from .grids import log_slope, resolved_time_grid
from .space import MetricMeasureSpace, ball_measures

EIGEN_ATOL = 1e-10


@dataclass
class SpectralData:
    """mu-orthonormal eigendecomposition of -L.

    eigenvalues are ascending with lambda_0 = 0; eigenvector columns phi_k
    satisfy sum_x phi_j(x) phi_k(x) mu(x) = delta_jk.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    mu: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """Spectral coefficients <f, phi_k>_mu."""
        return self.eigenvectors.T @ (np.asarray(f, dtype=float) * self.mu)


def generator_matrix(S: MetricMeasureSpace) -> np.ndarray:
    """Dense generator L with Lf(x) = (1/mu(x)) sum_y c(x,y) (f(y) - f(x))."""
    lap = S.cond.toarray() - np.diag(S.degree)
    return lap / S.mu[:, None]


def apply_generator(S: MetricMeasureSpace, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return (S.cond @ f - S.degree * f) / S.mu


def spectral_decompose(S: MetricMeasureSpace) -> SpectralData:
    """Solve the mu-symmetrized eigenproblem for -L.

    Conjugating with mu^(1/2) turns -L into a symmetric matrix; eigenvectors
    are mapped back and sign-fixed for determinism.
    """
    lap = np.diag(S.degree) - S.cond.toarray()
    isq = 1.0 / np.sqrt(S.mu)
    sym = isq[:, None] * lap * isq[None, :]
    sym = 0.5 * (sym + sym.T)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from None
    scale = max(vals[-1], 1.0)
    if abs(vals[0]) > EIGEN_ATOL * scale:
        raise NumericError(f"ground eigenvalue {vals[0]:.3e} is not zero within tolerance")
    vals = np.maximum(vals, 0.0)
    vals[0] = 0.0
    phi = isq[:, None] * vecs
    # deterministic sign: largest-magnitude component positive
    for k in range(phi.shape[1]):
        j = np.argmax(np.abs(phi[:, k]))
        if phi[j, k] < 0:
            phi[:, k] = -phi[:, k]
    return SpectralData(eigenvalues=vals, eigenvectors=phi, mu=S.mu.copy())


def kernel_matrix(D: SpectralData, t: float) -> np.ndarray:
    """Full heat kernel p_t(x, y) = sum_k e^(-lambda_k t) phi_k(x) phi_k(y)."""
    if t < 0:
        raise ConfigError("heat kernel time must be nonnegative")
    w = np.exp(-D.eigenvalues * t)
    return (D.eigenvectors * w) @ D.eigenvectors.T


def heat_kernel(D: SpectralData, t: float, x: int, y: int) -> float:
    if t < 0:
        raise ConfigError("heat kernel time must be nonnegative")
    w = np.exp(-D.eigenvalues * t)
    return float((D.eigenvectors[x] * w) @ D.eigenvectors[y])


def apply_semigroup(D: SpectralData, t: float, f: np.ndarray) -> np.ndarray:
    """P_t f = sum_k e^(-lambda_k t) <f, phi_k>_mu phi_k; P_0 is the identity."""
    if t < 0:
        raise ConfigError("semigroup time must be nonnegative")
    coef = D.coefficients(f)
    return D.eigenvectors @ (np.exp(-D.eigenvalues * t) * coef)


def apply_semigroup_columns(D: SpectralData, t: float, F: np.ndarray) -> np.ndarray:
    """P_t applied to each column of F."""
    coef = D.eigenvectors.T @ (F * D.mu[:, None])
    return D.eigenvectors @ (np.exp(-D.eigenvalues * t)[:, None] * coef)


def sqrt_generator_apply(D: SpectralData, f: np.ndarray) -> np.ndarray:
    """sqrt(-L) f; its squared L2(mu) norm equals the Dirichlet energy."""
    coef = D.coefficients(f)
    return D.eigenvectors @ (np.sqrt(D.eigenvalues) * coef)


# ---------------------------------------------------------------------------
# Gaussian bound fitting


@dataclass
class GaussianFit:
    c1: float
    c2: float
    Cg: float
    resolvedTimes: list
    worstLowerSlack: dict
    worstUpperSlack: dict
    nonpositiveSamples: int
    sampleCount: int
    seed: int
    onDiagonalSlope: float

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "Cg": self.Cg,
                "resolvedTimes": [float(t) for t in self.resolvedTimes],
                "worstLowerSlack": self.worstLowerSlack,
                "worstUpperSlack": self.worstUpperSlack,
                "nonpositiveSamples": self.nonpositiveSamples,
                "sampleCount": self.sampleCount, "seed": self.seed,
                "onDiagonalSlope": self.onDiagonalSlope}


def gaussian_bound_fit(S: MetricMeasureSpace, D: SpectralData, t_grid=None,
                       max_samples: int = 20000, seed: int = 0) -> GaussianFit:
    """Fit constants of the two-sided Gaussian kernel bound on sampled (t, x, y) triples.

    The bound tested is  (1/C) e^(-c1 d^2/t) <= p_t(x,y) mu(B(x, sqrt(t)))
    <= C e^(-c2 d^2/t).  The decay rate is anchored at the least-squares slope
    of log(p_t mu(B)) against -d^2/t; c2 (upper) and c1 (lower) are spread an
    octave around it and Cg is the smallest constant making both sides hold on
    every sample.  Nonpositive kernel samples are excluded and counted.
    """
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=8)
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) == 0:
        raise ConfigError("empty time grid")
    rng = np.random.default_rng(seed)

    per_t = max(1, max_samples // len(t_grid))
    rows_t, rows_x, rows_y, rows_u, rows_v = [], [], [], [], []
    nonpos = 0
    diag_vals = []
    for t in t_grid:
        K = kernel_matrix(D, t)
        volB = ball_measures(S, np.array([np.sqrt(t)]))[:, 0]
        if S.n * S.n <= per_t:
            xs, ys = np.meshgrid(np.arange(S.n), np.arange(S.n), indexing="ij")
            xs, ys = xs.ravel(), ys.ravel()
        else:
            xs = rng.integers(S.n, size=per_t)
            ys = rng.integers(S.n, size=per_t)
        pvals = K[xs, ys]
        good = pvals > 0
        nonpos += int((~good).sum())
        xs, ys, pvals = xs[good], ys[good], pvals[good]
        rows_t.append(np.full(len(xs), t))
        rows_x.append(xs)
        rows_y.append(ys)
        rows_u.append(S.dist[xs, ys] ** 2 / t)
        rows_v.append(np.log(pvals) + np.log(volB[xs]))
        diag_vals.append(float(np.median(K[np.arange(S.n), np.arange(S.n)])))

    ts = np.concatenate(rows_t)
    xs = np.concatenate(rows_x)
    ys = np.concatenate(rows_y)
    u = np.concatenate(rows_u)
    v = np.concatenate(rows_v)
    if len(u) == 0:
        raise NumericError("all kernel samples were nonpositive inside the resolved range")

    A = np.column_stack([-u, np.ones_like(u)])
    coef, _, _, _ = np.linalg.lstsq(A, v, rcond=None)
    rate = max(float(coef[0]), 1e-6)
    c2 = rate / 2.0
    c1 = 2.0 * rate
    logC = max(float(np.max(v + c2 * u)), float(np.max(-v - c1 * u)), 0.0)
    Cg = float(np.exp(logC))

    upper_slack = logC - (v + c2 * u)   # log of (C e^{-c2 u} / (p mu(B)))
    lower_slack = logC - (-v - c1 * u)
    iu = int(np.argmin(upper_slack))
    il = int(np.argmin(lower_slack))
    diag_slope, _ = log_slope(t_grid, np.array(diag_vals))
    return GaussianFit(
        c1=c1, c2=c2, Cg=Cg, resolvedTimes=list(t_grid),
        worstUpperSlack={"ratio": float(np.exp(upper_slack[iu])), "t": float(ts[iu]),
                         "x": int(xs[iu]), "y": int(ys[iu])},
        worstLowerSlack={"ratio": float(np.exp(lower_slack[il])), "t": float(ts[il]),
                         "x": int(xs[il]), "y": int(ys[il])},
        nonpositiveSamples=nonpos, sampleCount=len(u), seed=seed,
        onDiagonalSlope=diag_slope)


def heat_invariant_residuals(S: MetricMeasureSpace, D: SpectralData, t_grid=None,
                             seed: int = 0, battery_size: int = 8) -> dict:
    """Residuals of the semigroup identities used by the verification CLI.

    Covers positivity, conservativeness, kernel symmetry, Chapman-Kolmogorov,
    L^p contractivity on a random battery, and spectral Parseval.
    """
    if t_grid is None:
        t_grid = resolved_time_grid(S.h, S.diameter, points_per_decade=4)
    rng = np.random.default_rng(seed)
    fs = rng.standard_normal((S.n, battery_size))

    res = {"positivity": 0.0, "conservativeness": 0.0, "symmetry": 0.0,
           "chapman_kolmogorov": 0.0, "contractivity": 0.0, "parseval": 0.0}
    for t in t_grid:
        K = kernel_matrix(D, t)
        res["positivity"] = max(res["positivity"], float(-K.min() / max(K.max(), 1e-300)))
        res["conservativeness"] = max(res["conservativeness"], float(np.abs(K @ S.mu - 1.0).max()))
        res["symmetry"] = max(res["symmetry"], float(np.abs(K - K.T).max()))
        Pf = apply_semigroup_columns(D, t, fs)
        for p in (1.0, 2.0, np.inf):
            for k in range(battery_size):
                num = _lp_norm(Pf[:, k], S.mu, p)
                den = _lp_norm(fs[:, k], S.mu, p)
                res["contractivity"] = max(res["contractivity"], float(num - den))
    mid = float(np.sqrt(t_grid[0] * t_grid[-1]))
    Ka = kernel_matrix(D, mid / 3.0)
    Kb = kernel_matrix(D, 2.0 * mid / 3.0)
    comp = (Ka * S.mu[None, :]) @ Kb
    res["chapman_kolmogorov"] = float(np.abs(comp - kernel_matrix(D, mid)).max())
    for k in range(battery_size):
        coef = D.coefficients(fs[:, k])
        res["parseval"] = max(res["parseval"], float(
            abs((coef @ coef) - (fs[:, k] ** 2) @ S.mu) / max((fs[:, k] ** 2) @ S.mu, 1e-300)))
    return res


def _lp_norm(f: np.ndarray, mu: np.ndarray, p: float) -> float:
    if p == np.inf:
        return float(np.abs(f).max())
    return float((np.abs(f) ** p @ mu) ** (1.0 / p))


def lp_norm(f: np.ndarray, mu: np.ndarray, p: float) -> float:
    """L^p(mu) norm; p = inf gives the sup norm."""
    return _lp_norm(np.asarray(f, dtype=float), mu, p)
