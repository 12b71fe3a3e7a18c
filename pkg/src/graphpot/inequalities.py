"""Sobolev constants, Rayleigh quotients, volume growth and spectral bottoms.

Norms use the graph's own structure::

    ||phi||_q      = (sum_x mu(x) |phi(x)|**q) ** (1/q)
    ||grad phi||_p = (sum_e w_e ell_e**(1-p) |dphi_e|**p) ** (1/p)

"Compactly supported" means vanishing on the horizon of the truncation.
Sobolev constants are estimated from above: every reported value is the
quotient ``||grad phi||_p / ||phi||_q`` of an explicit function ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.sparse.linalg import eigsh

from .capacity import Condenser, capacity
from .energy import DirichletProblem, Potential, SolverConfig, solve_dirichlet
from .errors import ConfigError, DomainError, InconsistencyError, PreconditionError, SearchError
from .families import FamilySpec, generate
from .graph import Truncation, WeightedGraph, ball, distances, volume

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class SobolevParams:
    p: float
    q: float
    S: float = 0.0
    m: int | None = None

    def __post_init__(self):
        if not self.p >= 2:
            raise ConfigError("p must be >= 2")
        if not self.q > self.p:
            raise ConfigError("q must exceed p")
        if self.S < 0:
            raise ConfigError("S must be nonnegative")
        if self.m is not None and 1 / self.p - 1 / self.q > 1 / self.m + 1e-15:
            raise ConfigError(f"1/p - 1/q must not exceed 1/m (m = {self.m})")


# -- norms --------------------------------------------------------------------

def _dense(g: WeightedGraph, phi) -> np.ndarray:
    if isinstance(phi, np.ndarray):
        return phi
    vals = phi.values if isinstance(phi, Potential) else phi
    return np.array([vals.get(int(x), 0.0) for x in g.vertices], dtype=float)


def grad_norm(g: WeightedGraph, phi, p: float) -> float:
    """``||grad phi||_p``; ``phi`` is a mapping (missing vertices are 0) or a dense array."""
    f = _dense(g, phi)
    return float(np.sum(g.conductances(p) * np.abs(f[g.eu] - f[g.ev]) ** p)) ** (1.0 / p)


def lq_norm(g: WeightedGraph, phi, q: float, over: Iterable[int] | None = None) -> float:
    f = _dense(g, phi)
    m = g.mu_array
    if over is not None:
        mask = np.zeros(len(g), dtype=bool)
        mask[[g.index[x] for x in over]] = True
        f, m = f[mask], m[mask]
    return float(np.sum(m * np.abs(f) ** q)) ** (1.0 / q)


def sobolev_quotient(g: WeightedGraph, phi, p: float, q: float) -> float:
    return grad_norm(g, phi, p) / lq_norm(g, phi, q)


class _Quotient:
    """``(1/p) log E(u) - (1/r) log sum mu |u|**r`` over a fixed support, with gradient."""

    def __init__(self, g: WeightedGraph, support, p: float, r: float):
        self.g, self.p, self.r = g, p, r
        self.idx = np.array(sorted(g.index[x] for x in support), dtype=np.int64)
        self.c = g.conductances(p)
        self.mu = g.mu_array[self.idx]

    def full(self, u):
        f = np.zeros(len(self.g))
        f[self.idx] = u
        return f

    def __call__(self, u):
        g, p, r = self.g, self.p, self.r
        f = self.full(u)
        d = f[g.eu] - f[g.ev]
        E = float(np.sum(self.c * np.abs(d) ** p))
        N = float(np.sum(self.mu * np.abs(u) ** r))
        if E <= 0 or N <= 0:
            return np.inf, np.zeros_like(u)
        flux = p * self.c * np.abs(d) ** (p - 2.0) * d
        gE = np.bincount(g.eu, flux, minlength=len(f)) - np.bincount(g.ev, flux, minlength=len(f))
        gN = r * self.mu * np.abs(u) ** (r - 2.0) * u
        return np.log(E) / p - np.log(N) / r, gE[self.idx] / (p * E) - gN / (r * N)

    def refine(self, u0, maxiter=3000):
        res = minimize(self, u0, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": 1e-12, "ftol": 1e-15})
        u = res.x
        return u / np.max(np.abs(u)) if np.any(u) else u0


# -- Sobolev upper bound --------------------------------------------------------

@dataclass
class SobolevEstimate:
    value: float
    phi: dict[int, float]
    candidates: int
    best_kind: str = ""


def _dirichlet_eigvec(g: WeightedGraph, region):
    """Smallest eigenpair of the measure-weighted Dirichlet Laplacian on ``region``."""
    idx = np.array(sorted(g.index[x] for x in region), dtype=np.int64)
    A = _restricted_laplacian(g, idx)
    M = g.mu_array[idx]
    return _smallest_eig(A, M)


def _restricted_laplacian(g: WeightedGraph, idx: np.ndarray) -> sp.csr_matrix:
    n = len(idx)
    loc = np.full(len(g), -1, dtype=np.int64)
    loc[idx] = np.arange(n)
    c = g.w / g.ell
    a, b = loc[g.eu], loc[g.ev]
    rows, cols, vals = [], [], []
    for s in (a, b):
        m = s >= 0
        rows.append(s[m])
        cols.append(s[m])
        vals.append(c[m])
    both = (a >= 0) & (b >= 0)
    rows += [a[both], b[both]]
    cols += [b[both], a[both]]
    vals += [-c[both], -c[both]]
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def _smallest_eig(A: sp.spmatrix, M: np.ndarray, shift: float = 0.0):
    n = A.shape[0]
    if n <= DENSE_LIMIT:
        vals, vecs = scipy.linalg.eigh(A.toarray(), np.diag(M), subset_by_index=[0, 0])
        return float(vals[0]), vecs[:, 0]
    vals, vecs = eigsh(A.tocsc(), k=1, M=sp.diags(M).tocsc(), sigma=shift, which="LM")
    return float(vals[0]), vecs[:, 0]


def _bump(dist: Mapping[int, float], R: float, support) -> dict[int, float]:
    return {x: R - d for x, d in dist.items() if d < R and x in support}


def sobolev_search(t: Truncation, p: float, q: float, restarts: int = 4, seed: int = 0,
                   support=None, extra: Sequence[Mapping[int, float]] = (),
                   max_centers: int = 3) -> SobolevEstimate:
    """Smallest ``||grad phi||_p / ||phi||_q`` found over functions supported in ``support``.

    ``support`` defaults to the truncation minus its horizon.  Candidates:
    equilibrium potentials of points and balls, ball bumps ``(R - d)_+``,
    Dirichlet eigenvectors of balls, ``restarts`` random positive vectors and
    any ``extra`` functions (restricted to ``support``); the best few are
    then refined by L-BFGS on the log-quotient.
    """
    if not q > p >= 2:
        raise ConfigError("need q > p >= 2")
    g = t.graph
    if support is None:
        if not t.horizon:
            return SobolevEstimate(0.0, {x: 1.0 for x in g.mu}, 1, "constant")
        support = t.vertices - t.horizon
    support = frozenset(support)
    if not support:
        raise SearchError("empty support")
    if support == t.vertices:
        return SobolevEstimate(0.0, {x: 1.0 for x in g.mu}, 1, "constant")
    rng = np.random.default_rng(seed)
    Q = _Quotient(g, support, p, q)
    order = sorted(support)
    outside = t.vertices - support

    centers = []
    if t.origin is not None and t.origin in support:
        centers.append(t.origin)
    pool = [x for x in order if x not in centers]
    if pool:
        k = min(max_centers, len(pool))
        centers += [pool[i] for i in sorted(rng.choice(len(pool), size=k, replace=False))]

    cands: list[tuple[str, dict]] = []
    cfg = SolverConfig(p=p)
    for x0 in centers:
        dist = distances(g, [x0])
        far = max(d for x, d in dist.items() if x in support)
        radii = sorted({float(r) for r in np.unique(np.round(np.geomspace(1, far + 1, 6)))})
        for R in radii:
            bump = _bump(dist, R, support)
            if bump:
                cands.append(("bump", bump))
            inner = frozenset(x for x, d in dist.items() if d < R and x in support)
            if inner and outside:
                interior = support - inner
                bv = {x: 1.0 for x in inner}
                bv.update({x: 0.0 for x in outside})
                h = solve_dirichlet(g, DirichletProblem(interior, bv), cfg)
                cands.append(("equilibrium", {x: h[x] for x in support}))
                region = sorted(inner)
                _, vec = _dirichlet_eigvec(g, region)
                cands.append(("eigenvector", dict(zip(region, np.abs(vec)))))
    _, vec = _dirichlet_eigvec(g, order)
    cands.append(("eigenvector", dict(zip(order, np.abs(vec)))))
    for e in extra:
        cands.append(("extra", {x: float(v) for x, v in e.items() if x in support}))

    def dense(phi):
        return np.array([phi.get(x, 0.0) for x in order])

    scored = []
    for kind, phi in cands:
        u = dense(phi)
        if np.any(u):
            scored.append((Q(u)[0], kind, u))
    scored.sort(key=lambda s: s[0])
    best_val, best_kind, best_u = (scored[0] if scored else (np.inf, "", None))
    starts = [(kind, u) for _, kind, u in scored[:4]]
    starts += [("random", rng.random(len(order)) + 1e-3) for _ in range(restarts)]
    for kind, u0 in starts:
        u = Q.refine(u0)
        val = Q(u)[0]
        if val < best_val:
            best_val, best_kind, best_u = val, kind + "+lbfgs", u
    if best_u is None or not np.isfinite(best_val):
        raise SearchError("every Sobolev candidate degenerated")
    phi = dict(zip(order, (float(v) for v in best_u)))
    value = sobolev_quotient(g, phi, p, q)
    return SobolevEstimate(value, phi, len(scored) + len(starts), best_kind)


def sobolev_upper_bound(t: Truncation, p: float, q: float, restarts: int = 4,
                        seed: int = 0, extra=()) -> float:
    return sobolev_search(t, p, q, restarts, seed, extra=extra).value


def sobolev_trend(spec: FamilySpec, levels: Sequence[int], p: float, q: float,
                  restarts: int = 4, seed: int = 0) -> list[SobolevEstimate]:
    """Upper bounds over nested truncations, each seeded with the previous optimum.

    Zero extension keeps a shallower candidate admissible with the same
    quotient, so the returned values are non-increasing.
    """
    out = []
    carry: list[dict] = []
    for L in sorted(levels):
        est = sobolev_search(generate(spec, L), p, q, restarts, seed, extra=carry)
        out.append(est)
        carry = [est.phi]
    return out


# -- Rayleigh quotient ----------------------------------------------------------

def _region_checked(t: Truncation, region) -> list[int]:
    region = sorted(int(x) for x in region)
    if not region:
        raise DomainError("region must be nonempty")
    rs = set(region)
    for x in region:
        if x not in t.graph:
            raise DomainError(f"vertex {x} is not in the truncation")
    if not any(y not in rs for x in region for y in t.graph.neighbors(x)):
        raise DomainError("region has an empty frontier")
    return region


def rayleigh_minimizer(t: Truncation, region, p: float, restarts: int = 3,
                       seed: int = 0) -> tuple[float, dict[int, float]]:
    """``min E(phi) / sum mu |phi|**p`` over ``phi`` vanishing outside ``region``.

    Exact generalized eigensolve for p = 2; L-BFGS from the p = 2 eigenvector
    and random restarts otherwise.
    """
    if not p >= 2:
        raise ConfigError("p must be >= 2")
    g = t.graph
    order = _region_checked(t, region)
    lam2, vec = _dirichlet_eigvec(g, order)
    vec = np.abs(vec) / np.max(np.abs(vec))
    if p == 2:
        return lam2, dict(zip(order, vec))
    Q = _Quotient(g, order, p, p)
    rng = np.random.default_rng(seed)
    best_val, best_u = Q(vec)[0], vec
    for u0 in [vec] + [rng.random(len(order)) + 1e-3 for _ in range(restarts)]:
        u = Q.refine(u0)
        val = Q(u)[0]
        if val < best_val:
            best_val, best_u = val, u
    phi = dict(zip(order, best_u))
    return _rayleigh_value(g, phi, p), phi


def _rayleigh_value(g, phi, p) -> float:
    return grad_norm(g, phi, p) ** p / lq_norm(g, phi, p) ** p


def rayleigh_lambda(t: Truncation, region, p: float, restarts: int = 3, seed: int = 0) -> float:
    return rayleigh_minimizer(t, region, p, restarts, seed)[0]


@dataclass
class LambdaVolumeReport:
    region_volume: float
    lam: float
    lhs: float
    rhs: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs - self.tol

    def check(self) -> "LambdaVolumeReport":
        if not self.ok:
            raise InconsistencyError(
                f"vol^((q-p)/q) * lambda = {self.lhs:.6g} < S^p = {self.rhs:.6g}")
        return self


def check_lambda_volume_lower(t: Truncation, region, p: float, q: float, S: float,
                              tol: float = 1e-9) -> LambdaVolumeReport:
    """Compare ``vol(region)**((q-p)/q) * lambda(region)`` with ``S**p``."""
    if not q > p:
        raise ConfigError("q must exceed p")
    lam = rayleigh_lambda(t, region, p)
    vol = volume(t.graph, region)
    return LambdaVolumeReport(vol, lam, vol ** ((q - p) / q) * lam, S ** p, tol)


@dataclass
class LambdaBallReport:
    """Terms of the chain ``lambda <= test <= vol/int_R <= vol/int_{R/2} <= bound``.

    ``test_quotient`` is the Rayleigh quotient of ``R - d(x, x0)``.  The step
    ``test_quotient <= volume_quotient`` needs ``E(R - d) <= vol(B_R)``, which
    holds when every vertex has ``sum_e w_e ell_e <= mu``-comparable degree
    (paths, trees); it is reported, not asserted.
    """

    R: float
    lam: float
    test_quotient: float
    volume_quotient: float
    half_ball_quotient: float
    bound: float
    vol_ball: float
    vol_half_ball: float
    tol: float = 1e-9

    @property
    def gradient_step_holds(self) -> bool:
        return self.test_quotient <= self.volume_quotient + self.tol

    @property
    def pointwise_steps_hold(self) -> bool:
        return (self.volume_quotient <= self.half_ball_quotient + self.tol
                and self.half_ball_quotient <= self.bound + self.tol)

    @property
    def ok(self) -> bool:
        return self.lam <= self.bound + self.tol and self.lam <= self.test_quotient + self.tol

    def check(self) -> "LambdaBallReport":
        if not self.ok:
            raise InconsistencyError(f"lambda(B_{self.R}) = {self.lam:.6g} exceeds {self.bound:.6g}")
        return self


def lambda_ball_upper(t: Truncation, x0: int, R: float, p: float,
                      tol: float = 1e-9) -> LambdaBallReport:
    """Test ``phi = R - d(x, x0)`` on ``B_R`` against ``2**p vol(B_R) / (R**p vol(B_{R/2}))``.

    ``lambda(B_R)`` is computed over functions vanishing off ``B_R`` and on
    the horizon; ``phi`` belongs to that class since it vanishes at distance
    ``R``.
    """
    g = t.graph
    B = ball(t, x0, R)
    half = ball(t, x0, R / 2.0)
    dist = distances(g, [x0], cutoff=R)
    phi = {x: R - dist[x] for x in B if R - dist[x] > 0}
    lam = rayleigh_lambda(t, B - t.horizon, p)
    w_R = sum(g.mu[x] * phi.get(x, 0.0) ** p for x in B)
    w_half = sum(g.mu[x] * phi.get(x, 0.0) ** p for x in half)
    vol_R, vol_half = volume(g, B), volume(g, half)
    test = grad_norm(g, phi, p) ** p / w_R
    bound = 2.0 ** p * vol_R / (R ** p * vol_half)
    return LambdaBallReport(R, lam, test, vol_R / w_R, vol_R / w_half, bound, vol_R, vol_half, tol)


# -- volume growth ---------------------------------------------------------------

@dataclass(frozen=True)
class VolumeGrowthConstants:
    alpha: float
    alpha_bar: float
    C1: float
    C2: float
    p: float = 2.0
    q: float = 4.0
    S: float = 0.0


def volume_growth_constants(p: float, q: float, S: float) -> VolumeGrowthConstants:
    """Constants of ``vol(B_R) >= C1 * R**C2`` implied by an L^{q,p} Sobolev inequality.

    ``alpha = q / (2q - p)``, ``alpha_bar = sum_j j alpha**j = alpha / (1 - alpha)**2``,
    ``C2 = p * alpha / (1 - alpha) = pq / (q - p)`` and
    ``C1 = 2**(-p alpha_bar) * (2**-p S**p)**(alpha / (1 - alpha))``.
    """
    if not q > p:
        raise DomainError("volume growth constants need q > p")
    if S < 0:
        raise DomainError("S must be nonnegative")
    alpha = q / (2.0 * q - p)
    ratio = q / (q - p)
    alpha_bar = q * (2.0 * q - p) / (q - p) ** 2
    C1 = 2.0 ** (-p * alpha_bar) * (2.0 ** (-p) * S ** p) ** ratio
    return VolumeGrowthConstants(alpha, alpha_bar, C1, p * ratio, p, q, S)


@dataclass
class VolumeGrowthReport:
    consts: VolumeGrowthConstants
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["pass"] for r in self.rows)

    def check(self) -> "VolumeGrowthReport":
        for r in self.rows:
            if not r["pass"]:
                raise InconsistencyError(
                    f"vol(B_{r['R']}) = {r['volume']:.6g} is below C1 R^C2 = {r['bound']:.6g}")
        return self


def volume_growth_check(t: Truncation, x0: int, radii: Sequence[float],
                        consts: VolumeGrowthConstants) -> VolumeGrowthReport:
    """Per-radius rows ``(R, vol(B_R), C1 R^C2, pass)``.

    ``cutoff_bound`` is the cruder ``C R**p`` with
    ``C = (S vol(B_1)**(1/q) / 4)**p`` obtained by plugging a cut-off into the
    Sobolev inequality; it is listed for comparison only.
    """
    g = t.graph
    vol1 = volume(g, ball(t, x0, 1.0))
    C = (consts.S * vol1 ** (1.0 / consts.q) / 4.0) ** consts.p
    rows = []
    for R in radii:
        vol = volume(g, ball(t, x0, float(R)))
        bound = consts.C1 * float(R) ** consts.C2
        rows.append({"R": R, "volume": vol, "bound": bound,
                     "cutoff_bound": C * float(R) ** consts.p if R >= 1 else float("nan"),
                     "pass": bool(vol >= bound)})
    return VolumeGrowthReport(consts, rows)


# -- gluing -----------------------------------------------------------------------

@dataclass
class GlueReport:
    S_inner: float
    S_outer: float
    grad_rho: float
    degree_factor: float
    C1: float
    max_ratio: float
    capacity: float
    rows: list[dict] = field(default_factory=list, repr=False)
    vacuous: bool = False
    message: str = ""
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return self.vacuous or (self.max_ratio <= 1.0 + self.tol and self.capacity > 0)

    def check(self) -> "GlueReport":
        if not self.ok:
            raise InconsistencyError(f"glued Sobolev ratio {self.max_ratio:.6g} exceeds 1")
        return self


def cutoff(t: Truncation, core, collar_width: int) -> tuple[dict[int, float], dict[int, float]]:
    """Hop distance to ``core`` and the cut-off ``rho``.

    ``rho = 1`` within ``collar_width / 2`` of the core, ``0`` from
    ``collar_width`` on, linear in between.
    """
    delta = distances(t.graph, core, hops=True)
    w = float(collar_width)
    rho = {x: float(np.clip(2.0 * (w - d) / w, 0.0, 1.0)) for x, d in delta.items()}
    return delta, rho


def sobolev_glue_check(t: Truncation, core, collar_width: int, trials: int, p: float, q: float,
                       seed: int = 0, restarts: int = 4, tol: float = 1e-9) -> GlueReport:
    """Check ``||v||_q <= C1 (||grad v||_p + ||v||_{L^p(collar)})`` on random and structured ``v``.

    ``C1 = (1/S_inner + 1/S_outer) * (1 + max|grad rho| * D**(1/p))`` where
    ``D = max_y sum_{e ~ y} w_e ell_e / mu(y)`` over collar vertices is the
    graph product-rule factor, ``S_inner`` is estimated over functions
    supported in the collared core and ``S_outer`` over functions vanishing
    on the inner half of it.
    """
    if collar_width < 1:
        raise ConfigError("collar width must be >= 1")
    g = t.graph
    core = frozenset(core)
    delta, rho = cutoff(t, core, collar_width)
    omega = frozenset(x for x, d in delta.items() if d <= collar_width)
    omega_half = frozenset(x for x, d in delta.items() if d <= collar_width / 2.0)
    if omega & t.horizon:
        raise PreconditionError("core plus collar must stay strictly inside the truncation")
    free = t.vertices - t.horizon
    outer = free - omega_half

    r = np.array([rho[int(x)] for x in g.vertices])
    dr = np.abs(r[g.eu] - r[g.ev])
    C = float(np.max(dr / g.ell))
    touched = np.unique(np.concatenate([g.eu[dr > 0], g.ev[dr > 0]]))
    wl = np.bincount(g.eu, g.w * g.ell, minlength=len(g)) + np.bincount(g.ev, g.w * g.ell,
                                                                       minlength=len(g))
    D = float(np.max(wl[touched] / g.mu_array[touched])) if len(touched) else 0.0

    inner_est = sobolev_search(t, p, q, restarts, seed, support=omega)
    outer_est = sobolev_search(t, p, q, restarts, seed + 1, support=outer) if outer else None
    S_in = inner_est.value
    S_out = outer_est.value if outer_est else 0.0
    cap, h = capacity(Condenser(omega, t), cfg=SolverConfig(p=p))
    if S_in <= 0 or S_out <= 0:
        return GlueReport(S_in, S_out, C, D, float("inf"), float("nan"), cap, vacuous=True,
                          message="inequality vacuous at this depth", tol=tol)
    C1 = (1.0 / S_in + 1.0 / S_out) * (1.0 + C * D ** (1.0 / p))

    order = sorted(free)
    omega_idx = [x for x in order if x in omega]

    def ratio(v: dict) -> float:
        f = _dense(g, v)
        rhs = grad_norm(g, f, p) + lq_norm(g, f, p, over=omega_idx)
        return lq_norm(g, f, q) / (C1 * rhs) if rhs > 0 else 0.0

    structured = [("inner_optimum", inner_est.phi), ("outer_optimum", outer_est.phi),
                  ("equilibrium", {x: h[x] for x in free}),
                  ("cutoff", {x: rho[x] for x in free if rho[x] > 0})]
    glob = sobolev_search(t, p, q, restarts, seed + 2)
    structured.append(("global_optimum", glob.phi))
    rows = [{"trial": -1 - i, "kind": k, "ratio": ratio(v)} for i, (k, v) in enumerate(structured)]

    rng = np.random.default_rng(seed)
    n = len(order)
    for i in range(trials):
        kind = ("uniform", "gaussian", "bump")[i % 3]
        if kind == "uniform":
            vals = rng.random(n)
        elif kind == "gaussian":
            vals = rng.standard_normal(n)
        else:
            x0 = order[rng.integers(n)]
            R = float(rng.integers(1, 6))
            dist = distances(g, [x0], cutoff=R)
            vals = np.array([max(R - dist.get(x, R), 0.0) for x in order]) * (
                1.0 + 0.5 * rng.random(n))
            if not np.any(vals):
                vals = rng.random(n)
        rows.append({"trial": i, "kind": kind, "ratio": ratio(dict(zip(order, vals)))})
    max_ratio = max(row["ratio"] for row in rows)
    return GlueReport(S_in, S_out, C, D, C1, max_ratio, cap, rows, tol=tol)


# -- Schrödinger bottom -------------------------------------------------------------

@dataclass(frozen=True)
class SchrodingerSpec:
    """Vertex potential ``q(x) >= 0`` and coupling ``H``.

    ``potential`` may be a mapping (missing vertices are 0) or a constant.
    """

    potential: Mapping[int, float] | float
    H: float

    def __post_init__(self):
        if not self.H > 0:
            raise ConfigError("H must be positive")
        vals = self.potential.values() if isinstance(self.potential, Mapping) else [self.potential]
        if any(v < 0 for v in vals):
            raise ConfigError("the potential must be nonnegative")

    @staticmethod
    def critical_H(p: float) -> float:
        return p * p / (4.0 * (p - 1.0))

    def check_hypothesis(self, p: float) -> "SchrodingerSpec":
        if not self.H > self.critical_H(p):
            raise PreconditionError(
                f"H = {self.H} must exceed p^2/(4(p-1)) = {self.critical_H(p)} for p = {p}")
        return self

    @classmethod
    def gated(cls, potential, H: float, p: float) -> "SchrodingerSpec":
        """Build a spec and reject couplings at or below ``critical_H(p)``."""
        return cls(potential, H).check_hypothesis(p)

    def value(self, x: int) -> float:
        if isinstance(self.potential, Mapping):
            return float(self.potential.get(x, 0.0))
        return float(self.potential)


def schrodinger_bottom(t: Truncation, spec: SchrodingerSpec) -> float:
    """Smallest value of ``(E_2(phi) - H sum mu q phi^2) / sum mu phi^2`` over ``phi`` vanishing
    on the horizon (all functions when the horizon is empty)."""
    g = t.graph
    region = sorted(t.vertices - t.horizon)
    if not region:
        raise DomainError("no free vertices")
    idx = np.array([g.index[x] for x in region], dtype=np.int64)
    A = _restricted_laplacian(g, idx)
    qv = np.array([spec.value(x) for x in region])
    M = g.mu_array[idx]
    A = (A - sp.diags(spec.H * M * qv)).tocsr()
    shift = -spec.H * float(np.max(qv, initial=0.0)) - 1.0
    return _smallest_eig(A, M, shift=shift)[0]

