"""Finite weighted-graph Dirichlet spaces.

A space bundles a strictly positive vertex measure mu, a sparse symmetric
conductance matrix, and a metric. The Dirichlet energy is

    E(f, f) = (1/2) sum_{x,y} c(x,y) (f(x) - f(y))^2,

and the carre du champ is normalized so that the energy identity
sum_x mu(x) |grad f|^2(x) = E(f, f) holds exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import CapacityError, ConfigError, InvariantViolation
from .grids import geometric_grid, log_slope, resolved_radius_grid, resolved_radius_range

DEFAULT_CAPACITY = 4096

METRIC_ATOL = 1e-10


@dataclass
class MetricMeasureSpace:
    """Finite metric measure space with graph Dirichlet form.

    Attributes
    ----------
    mu : (n,) strictly positive vertex measure.
    cond : (n, n) sparse symmetric nonnegative conductance matrix, zero diagonal.
    dist : (n, n) metric.
    coords : optional embedding coordinates, shape (n, d).
    name : builder tag carried into reports.
    """

    mu: np.ndarray
    cond: sp.csr_matrix
    dist: np.ndarray
    coords: Optional[np.ndarray] = None
    name: str = "space"
    _degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.dist = np.asarray(self.dist, dtype=float)
        self.cond = sp.csr_matrix(self.cond)
        self._degree = np.asarray(self.cond.sum(axis=1)).ravel()
        self.mu.setflags(write=False)
        self.dist.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def degree(self) -> np.ndarray:
        return self._degree

    @property
    def h(self) -> float:
        """Smallest positive inter-vertex distance (mesh scale)."""
        i, j = self.cond.nonzero()
        return float(self.dist[i, j].min())

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Undirected edge list (i, j, c) with i < j."""
        coo = sp.triu(self.cond, k=1).tocoo()
        return coo.row, coo.col, coo.data

    def fingerprint(self) -> dict:
        i, _, _ = self.edges()
        return {"n": self.n, "mu_sum": float(self.mu.sum()), "edge_count": int(len(i)), "name": self.name}


# ---------------------------------------------------------------------------
# Core operators


def dirichlet_energy(S: MetricMeasureSpace, f: np.ndarray) -> float:
    """E(f, f) = (1/2) sum_{x,y} c(x,y) (f(x)-f(y))^2."""
    f = np.asarray(f, dtype=float)
    return float(f @ (S.degree * f) - f @ (S.cond @ f))


def carre_du_champ(S: MetricMeasureSpace, f: np.ndarray) -> np.ndarray:
    """Pointwise gradient length |grad f|(x) = sqrt((1/(2 mu(x))) sum_y c(x,y)(f(x)-f(y))^2)."""
    return np.sqrt(carre_du_champ_sq(S, f))


def carre_du_champ_sq(S: MetricMeasureSpace, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] != S.n:
        raise ConfigError(f"function has {f.shape[0]} entries, space has {S.n} vertices")
    quad = S.degree * f * f - 2.0 * f * (S.cond @ f) + S.cond @ (f * f)
    return np.maximum(quad, 0.0) / (2.0 * S.mu)


def carre_du_champ_sq_columns(S: MetricMeasureSpace, F: np.ndarray) -> np.ndarray:
    """Column-wise |grad f|^2 for a matrix of functions, shape (n, k)."""
    quad = S.degree[:, None] * F * F - 2.0 * F * (S.cond @ F) + S.cond @ (F * F)
    return np.maximum(quad, 0.0) / (2.0 * S.mu[:, None])


def intrinsic_metric(S: MetricMeasureSpace) -> np.ndarray:
    """Shortest-path metric over edge lengths l(x,y) = sqrt(min(mu(x), mu(y)) / c(x,y)).

    This is the graph realization of the sup-based intrinsic distance; on the
    lattice builders it reproduces the mesh path metric exactly.
    """
    i, j, c = S.edges()
    lengths = np.sqrt(np.minimum(S.mu[i], S.mu[j]) / c)
    g = sp.csr_matrix((np.concatenate([lengths, lengths]),
                       (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(S.n, S.n))
    d = dijkstra(g, directed=False)
    if not np.all(np.isfinite(d)):
        raise InvariantViolation("graph is disconnected: intrinsic metric is infinite")
    return d


def ball(S: MetricMeasureSpace, x: int, r: float) -> np.ndarray:
    """Closed metric ball {y : dist(x, y) <= r} as a boolean membership vector."""
    if r < 0:
        raise ConfigError("ball radius must be nonnegative")
    return S.dist[x] <= r + METRIC_ATOL


def ball_measures(S: MetricMeasureSpace, radii: np.ndarray, centers: Optional[np.ndarray] = None) -> np.ndarray:
    """mu(B(x, r)) for every center and radius; shape (len(centers), len(radii))."""
    d = S.dist if centers is None else S.dist[np.asarray(centers)]
    radii = np.asarray(radii, dtype=float)
    # one pass per radius keeps memory at O(n_centers * n)
    out = np.empty((d.shape[0], len(radii)))
    for k, r in enumerate(radii):
        out[:, k] = (d <= r + METRIC_ATOL) @ S.mu
    return out


# ---------------------------------------------------------------------------
# Profiles


@dataclass
class DoublingProfile:
    Cdoubling: float
    Q: float
    resolvedRange: tuple[float, float]
    residual: float
    seed: int
    sampleCount: int

    def to_dict(self) -> dict:
        return {"Cdoubling": self.Cdoubling, "Q": self.Q,
                "resolvedRange": list(self.resolvedRange),
                "residual": self.residual, "seed": self.seed,
                "sampleCount": self.sampleCount}


@dataclass
class PoincareReport:
    C2: float
    lambdaDilation: float
    ballsSampled: int
    seed: int

    def to_dict(self) -> dict:
        return {"C2": self.C2, "lambdaDilation": self.lambdaDilation,
                "ballsSampled": self.ballsSampled, "seed": self.seed}


def doubling_profile(S: MetricMeasureSpace, sample_count: int = 64, seed: int = 0) -> DoublingProfile:
    """Fit the volume-growth exponent Q and the worst doubling ratio on [2h, diam/4].

    Q is the pooled log-log regression slope of mu(B(x, r)) against r over
    seeded sample centers; Cdoubling is the worst ratio mu(B(x, 2r))/mu(B(x, r))
    with both radii inside the resolved range.
    """
    if sample_count < 1:
        raise ConfigError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    centers = np.arange(S.n) if S.n <= sample_count else np.sort(rng.choice(S.n, sample_count, replace=False))
    lo, hi = resolved_radius_range(S.h, S.diameter)
    if lo >= hi:
        # very coarse space: the standard window is empty, fall back to the
        # widest window at which balls are still meaningful
        lo, hi = S.h, max(2.0 * S.h, S.diameter / 2.0)
    radii = geometric_grid(lo, hi, points_per_decade=16)
    vols = ball_measures(S, radii, centers)

    # Q certifies the upper growth exponent in mu(B(x,R))/mu(B(x,r)) <= C (R/r)^Q,
    # so it is a sup-type quantity: fit a slope per center (each center keeps
    # its own intercept, which absorbs boundary truncation) and take the max.
    lr = np.log(radii)
    lv = np.log(vols)
    lr_c = lr - lr.mean()
    lv_c = lv - lv.mean(axis=-1, keepdims=True)
    per_center = (lv_c @ lr_c) / (lr_c @ lr_c)
    k = int(np.argmax(per_center))
    slope = float(per_center[k])
    residual = float(np.sqrt(np.mean((lv_c[k] - slope * lr_c) ** 2)))

    # The doubled radius is allowed to run up to diam/2 so that a ratio
    # exists even when the resolved window is narrower than one octave.
    r_half = radii[2.0 * radii <= S.diameter / 2.0 + 1e-15]
    worst = 1.0
    if len(r_half):
        v_r = ball_measures(S, r_half, centers)
        v_2r = ball_measures(S, 2.0 * r_half, centers)
        worst = float(np.max(v_2r / v_r))
    return DoublingProfile(Cdoubling=max(worst, 1.0), Q=slope,
                           resolvedRange=(float(radii[0]), float(radii[-1])),
                           residual=residual, seed=seed, sampleCount=len(centers))


def _neumann_eigenfunctions(S: MetricMeasureSpace, members: np.ndarray, count: int = 8) -> np.ndarray:
    """Low eigenfunctions of the generator restricted to an induced subgraph."""
    idx = np.flatnonzero(members)
    sub = S.cond[np.ix_(idx, idx)].toarray()
    mu = S.mu[idx]
    lap = np.diag(sub.sum(axis=1)) - sub
    isq = 1.0 / np.sqrt(mu)
    sym = isq[:, None] * lap * isq[None, :]
    _, vecs = np.linalg.eigh(sym)
    k = min(count + 1, len(idx))
    return isq[:, None] * vecs[:, :k]


def poincare_constant(S: MetricMeasureSpace, sample_count: int = 32, seed: int = 0,
                      dilation: float = 2.0) -> PoincareReport:
    """Estimate the 2-Poincare constant over seeded balls.

    For each sampled ball B the variational quotient
    (mean_B |f - f_B| dmu) / (rad(B) * (mean_{lambda B} |grad f|^2 dmu)^(1/2))
    is maximized over the Neumann eigenfunction battery of the dilated ball.
    """
    if sample_count < 1:
        raise ConfigError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    radii = resolved_radius_grid(S.h, S.diameter, points_per_decade=4)
    best = 0.0
    balls = 0
    for _ in range(sample_count):
        x = int(rng.integers(S.n))
        r = float(rng.choice(radii))
        inner = ball(S, x, r)
        outer = ball(S, x, dilation * r)
        if inner.sum() < 2:
            continue
        balls += 1
        funcs = _neumann_eigenfunctions(S, outer)
        idx_out = np.flatnonzero(outer)
        inner_in_out = inner[idx_out]
        mu_out = S.mu[idx_out]
        mu_in = mu_out[inner_in_out]
        sub = S.cond[np.ix_(idx_out, idx_out)]
        deg = np.asarray(sub.sum(axis=1)).ravel()
        for k in range(funcs.shape[1]):
            f = funcs[:, k]
            quad = deg * f * f - 2.0 * f * (sub @ f) + sub @ (f * f)
            gradsq = np.maximum(quad, 0.0) / (2.0 * mu_out)
            mean_grad = float(gradsq @ mu_out) / float(mu_out.sum())
            fB = float(f[inner_in_out] @ mu_in) / float(mu_in.sum())
            mean_dev = float(np.abs(f[inner_in_out] - fB) @ mu_in) / float(mu_in.sum())
            denom = r * np.sqrt(mean_grad)
            if denom > 1e-14 * max(1.0, abs(mean_dev)):
                best = max(best, mean_dev / denom)
    if balls == 0:
        raise ConfigError("no usable balls sampled for the Poincare estimate")
    return PoincareReport(C2=best, lambdaDilation=dilation, ballsSampled=balls, seed=seed)


# ---------------------------------------------------------------------------
# Builders


def _check_capacity(n: int, cap: Optional[int]):
    cap = DEFAULT_CAPACITY if cap is None else cap
    if n > cap:
        raise CapacityError(f"requested space has {n} vertices, over the capacity cap {cap}")


def _lattice_points(dim: int, side: int) -> np.ndarray:
    axes = [np.arange(side)] * dim
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def _grid_edges(pts: np.ndarray, side: int, wrap: bool) -> tuple[np.ndarray, np.ndarray]:
    n, dim = pts.shape
    index = {tuple(p): k for k, p in enumerate(pts)}
    src, dst = [], []
    for k, p in enumerate(pts):
        for ax in range(dim):
            q = p.copy()
            q[ax] += 1
            if wrap:
                q[ax] %= side
            t = index.get(tuple(q))
            if t is not None and t != k:
                src.append(k)
                dst.append(t)
    return np.array(src), np.array(dst)


def _assemble(mu, src, dst, cond_vals, dist, coords, name) -> MetricMeasureSpace:
    n = len(mu)
    i = np.concatenate([src, dst])
    j = np.concatenate([dst, src])
    c = np.concatenate([cond_vals, cond_vals])
    cond = sp.csr_matrix((c, (i, j)), shape=(n, n))
    cond.sum_duplicates()
    ncomp, _ = connected_components(cond, directed=False)
    if ncomp != 1:
        raise InvariantViolation(f"builder produced {ncomp} connected components")
    return MetricMeasureSpace(mu=mu, cond=cond, dist=dist, coords=coords, name=name)


def build_lattice(dim: int, side: int, h: float, cap: Optional[int] = None) -> MetricMeasureSpace:
    """Grid graph on side^dim vertices: mu = h^dim, c = h^(dim-2), Euclidean metric."""
    if dim not in (1, 2, 3):
        raise ConfigError("lattice dim must be 1, 2 or 3")
    if side < 2 or h <= 0:
        raise ConfigError("lattice needs side >= 2 and h > 0")
    n = side**dim
    _check_capacity(n, cap)
    pts = _lattice_points(dim, side)
    coords = pts * h
    src, dst = _grid_edges(pts, side, wrap=False)
    mu = np.full(n, float(h) ** dim)
    cond_vals = np.full(len(src), float(h) ** (dim - 2))
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    return _assemble(mu, src, dst, cond_vals, dist, coords, f"lattice({dim},{side},{h:g})")


def build_torus(dim: int, side: int, h: float, cap: Optional[int] = None) -> MetricMeasureSpace:
    """Periodic lattice with geodesic torus metric; boundaryless, preferred for curvature checks."""
    if dim not in (1, 2, 3):
        raise ConfigError("torus dim must be 1, 2 or 3")
    if side < 3 or h <= 0:
        raise ConfigError("torus needs side >= 3 and h > 0")
    n = side**dim
    _check_capacity(n, cap)
    pts = _lattice_points(dim, side)
    coords = pts * h
    src, dst = _grid_edges(pts, side, wrap=True)
    mu = np.full(n, float(h) ** dim)
    cond_vals = np.full(len(src), float(h) ** (dim - 2))
    period = side * h
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    diff = np.minimum(diff, period - diff)
    dist = np.sqrt((diff**2).sum(axis=2))
    return _assemble(mu, src, dst, cond_vals, dist, coords, f"torus({dim},{side},{h:g})")


def build_sierpinski_gasket(level: int, cap: Optional[int] = None) -> MetricMeasureSpace:
    """Level-n gasket graph approximation with standard resistance renormalization.

    Conductances (5/3)^n, uniform mu = 3^(-n), shortest-path metric over edge
    length 2^(-n).
    """
    if not (1 <= level <= 8):
        raise ConfigError("gasket level must be in 1..8")
    tri = [np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])]
    for _ in range(level):
        nxt = []
        for t in tri:
            a, b, c = t
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            nxt += [np.array([a, ab, ca]), np.array([ab, b, bc]), np.array([ca, bc, c])]
        tri = nxt
    # dedupe corner coordinates; gasket coordinates are exact dyadic rationals
    scale = 2**level
    key_of = {}
    coords = []
    edges = set()
    for t in tri:
        ids = []
        for p in t:
            key = (round(p[0] * scale * 2), round(p[1] * scale * 2))
            if key not in key_of:
                key_of[key] = len(coords)
                coords.append(p)
            ids.append(key_of[key])
        for u, v in ((0, 1), (1, 2), (2, 0)):
            edges.add((min(ids[u], ids[v]), max(ids[u], ids[v])))
    n = len(coords)
    _check_capacity(n, cap)
    coords = np.array(coords)
    src = np.array([e[0] for e in sorted(edges)])
    dst = np.array([e[1] for e in sorted(edges)])
    mu = np.full(n, 3.0 ** (-level))
    cond_vals = np.full(len(src), (5.0 / 3.0) ** level)
    length = 2.0 ** (-level)
    g = sp.csr_matrix((np.full(2 * len(src), length),
                       (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(n, n))
    dist = dijkstra(g, directed=False)
    return _assemble(mu, src, dst, cond_vals, dist, coords, f"gasket({level})")


def build_metric_graph(legs: int, leg_length: float = 1.0, subdivision: int = 4,
                       cap: Optional[int] = None) -> MetricMeasureSpace:
    """Star / Walsh-spider metric graph: a center with `legs` subdivided intervals.

    Each leg is split into equal intervals of width dx = leg_length/subdivision
    with interval-graph weights c = 1/dx and mu = dx.
    """
    if legs < 3:
        raise ConfigError("spider needs at least 3 legs")
    if subdivision < 2:
        raise ConfigError("subdivision must be >= 2")
    n = 1 + legs * subdivision
    _check_capacity(n, cap)
    dx = leg_length / subdivision
    src, dst = [], []
    for leg in range(legs):
        base = 1 + leg * subdivision
        src.append(0)
        dst.append(base)
        for k in range(subdivision - 1):
            src.append(base + k)
            dst.append(base + k + 1)
    src, dst = np.array(src), np.array(dst)
    mu = np.full(n, dx)
    cond_vals = np.full(len(src), 1.0 / dx)
    angles = 2 * np.pi * np.arange(legs) / legs
    coords = np.zeros((n, 2))
    for leg in range(legs):
        base = 1 + leg * subdivision
        radial = dx * np.arange(1, subdivision + 1)
        coords[base:base + subdivision, 0] = radial * np.cos(angles[leg])
        coords[base:base + subdivision, 1] = radial * np.sin(angles[leg])
    g = sp.csr_matrix((np.full(2 * len(src), dx),
                       (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(n, n))
    dist = dijkstra(g, directed=False)
    return _assemble(mu, src, dst, cond_vals, dist, coords, f"spider({legs},{leg_length:g},{subdivision})")


BUILDERS = {
    "lattice": build_lattice,
    "torus": build_torus,
    "gasket": build_sierpinski_gasket,
    "spider": build_metric_graph,
}


def build_space(kind: str, cap: Optional[int] = None, **params) -> MetricMeasureSpace:
    if kind not in BUILDERS:
        raise ConfigError(f"unknown builder '{kind}', expected one of {sorted(BUILDERS)}")
    try:
        return BUILDERS[kind](cap=cap, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for builder '{kind}': {exc}")


# ---------------------------------------------------------------------------
# Validation and persistence


def validate_space(S: MetricMeasureSpace, pair_check_limit: int = 512, seed: int = 0):
    """Check the space invariants; raises InvariantViolation with vertex indices."""
    if np.any(S.mu <= 0):
        bad = int(np.argmin(S.mu))
        raise InvariantViolation(f"mu must be strictly positive (vertex {bad})")
    asym = abs(S.cond - S.cond.T)
    if asym.count_nonzero() and asym.max() > 1e-12:
        i, j = np.unravel_index(np.argmax(asym.toarray()), asym.shape)
        raise InvariantViolation(f"conductance not symmetric at ({i},{j})")
    if S.cond.diagonal().any():
        bad = int(np.flatnonzero(S.cond.diagonal())[0])
        raise InvariantViolation(f"conductance diagonal must vanish (vertex {bad})")
    if (S.cond.data < 0).any():
        raise InvariantViolation("conductances must be nonnegative")
    ncomp, _ = connected_components(S.cond, directed=False)
    if ncomp != 1:
        raise InvariantViolation(f"conductance graph has {ncomp} components")

    d = S.dist
    if d.shape != (S.n, S.n):
        raise InvariantViolation("dist has wrong shape")
    if np.abs(d - d.T).max() > METRIC_ATOL:
        i, j = np.unravel_index(np.argmax(np.abs(d - d.T)), d.shape)
        raise InvariantViolation(f"metric not symmetric at ({i},{j})")
    if np.abs(np.diag(d)).max() > METRIC_ATOL:
        bad = int(np.argmax(np.abs(np.diag(d))))
        raise InvariantViolation(f"dist(x,x) != 0 at vertex {bad}")
    off = d + np.diag(np.full(S.n, np.inf))
    if off.min() <= METRIC_ATOL:
        i, j = np.unravel_index(np.argmin(off), d.shape)
        raise InvariantViolation(f"distinct vertices at zero distance: ({i},{j})")
    if S.n <= pair_check_limit:
        mids = range(S.n)
    else:
        mids = np.random.default_rng(seed).choice(S.n, pair_check_limit, replace=False)
    for k in mids:
        slack = d[:, k, None] + d[None, k, :] - d
        if slack.min() < -1e-9:
            i, j = np.unravel_index(np.argmin(slack), d.shape)
            raise InvariantViolation(f"triangle inequality fails for ({i},{int(k)},{j})")


def save_space(S: MetricMeasureSpace, path: str):
    i, j, c = S.edges()
    payload = {
        "n": S.n,
        "mu": S.mu.tolist(),
        "edges": [[int(a), int(b), float(w)] for a, b, w in zip(i, j, c)],
        "dist": S.dist.tolist(),
    }
    if S.coords is not None:
        payload["coords"] = np.asarray(S.coords).tolist()
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_space(path: str, cap: Optional[int] = None) -> MetricMeasureSpace:
    """Load a space from JSON, validating all invariants; dist is recomputed when omitted."""
    with open(path) as fh:
        payload = json.load(fh)
    for key in ("n", "mu", "edges"):
        if key not in payload:
            raise ConfigError(f"space file missing key '{key}'")
    n = int(payload["n"])
    _check_capacity(n, cap)
    mu = np.asarray(payload["mu"], dtype=float)
    if len(mu) != n:
        raise ConfigError(f"mu has {len(mu)} entries, expected {n}")
    edges = payload["edges"]
    src = np.array([e[0] for e in edges], dtype=int)
    dst = np.array([e[1] for e in edges], dtype=int)
    c = np.array([e[2] for e in edges], dtype=float)
    coords = np.asarray(payload["coords"], dtype=float) if "coords" in payload else None
    if "dist" in payload:
        dist = np.asarray(payload["dist"], dtype=float)
    else:
        lengths = np.sqrt(np.minimum(mu[src], mu[dst]) / c)
        g = sp.csr_matrix((np.concatenate([lengths, lengths]),
                           (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(n, n))
        dist = dijkstra(g, directed=False)
    S = _assemble(mu, src, dst, c, dist, coords, payload.get("name", "loaded"))
    validate_space(S)
    return S
