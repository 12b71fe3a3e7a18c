"""p-Dirichlet energy, discrete p-Laplacian and the Dirichlet solver.

The energy of ``phi`` is ``sum_e c_e |phi(u) - phi(v)|**p`` with
``c_e = w_e * ell_e**(1 - p)``, and the p-Laplacian at ``x`` is

    Delta_p phi(x) = (1 / mu(x)) * sum_{y ~ x} c_e |phi(y) - phi(x)|**(p-2) (phi(y) - phi(x)).

Dirichlet problems are solved by damped Newton on the energy, warm-started
from the p = 2 linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .errors import ConfigError, DomainError, IllPosedError, SolverError
from .graph import WeightedGraph

log = logging.getLogger(__name__)

POLISH_STEPS = 100
STEP_TOL = 1e-14
POLISH_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    p: float = 2.0
    grad_tol: float = 1e-10
    max_iter: int = 10000
    hessian_floor: float = 1e-12
    trace: bool = False

    def __post_init__(self):
        if not self.p >= 2:
            raise ConfigError(f"p must be >= 2, got {self.p}")
        if not (self.grad_tol > 0 and self.hessian_floor > 0 and self.max_iter >= 1):
            raise ConfigError("grad_tol, hessian_floor and max_iter must be positive")

    def with_p(self, p: float) -> "SolverConfig":
        return self if p == self.p else replace(self, p=float(p))


@dataclass(frozen=True)
class DirichletProblem:
    """Free vertices ``interior`` with prescribed ``boundary_values``."""

    interior: frozenset
    boundary_values: Mapping[int, float]

    def __init__(self, interior, boundary_values):
        object.__setattr__(self, "interior", frozenset(int(x) for x in interior))
        object.__setattr__(self, "boundary_values",
                           {int(k): float(v) for k, v in boundary_values.items()})
        if not self.boundary_values:
            raise DomainError("boundary must be nonempty")
        if self.interior & self.boundary_values.keys():
            raise DomainError("interior and boundary overlap")


@dataclass
class Potential:
    """Vertex function with its energy and p-Laplacian residual.

    ``energy`` is the p-energy over the edges joining vertices of ``values``;
    ``residual`` is the max of ``|Delta_p|`` over the free vertices.
    """

    values: dict[int, float]
    energy: float
    residual: float = 0.0
    p: float = 2.0
    iterations: int = 0
    trace: list = field(default_factory=list, repr=False)

    def __getitem__(self, x: int) -> float:
        return self.values[x]

    def __contains__(self, x) -> bool:
        return x in self.values

    def array(self, vertices) -> np.ndarray:
        return np.array([self.values[int(x)] for x in vertices])

    def min(self, over=None) -> float:
        keys = self.values if over is None else over
        return min(self.values[x] for x in keys)

    def max(self, over=None) -> float:
        keys = self.values if over is None else over
        return max(self.values[x] for x in keys)


def _as_mapping(phi) -> Mapping[int, float]:
    return phi.values if isinstance(phi, Potential) else phi


def _check_p(p: float) -> None:
    if not p >= 2:
        raise ConfigError(f"p must be >= 2, got {p}")


def p_energy(g: WeightedGraph, phi, p: float) -> float:
    """``sum_e w_e ell_e**(1-p) |dphi_e|**p`` over all edges of ``g``."""
    _check_p(p)
    vals = _as_mapping(phi)
    try:
        f = np.array([vals[int(x)] for x in g.vertices], dtype=float)
    except KeyError as exc:
        raise DomainError(f"phi is undefined at vertex {exc.args[0]}") from None
    d = f[g.eu] - f[g.ev]
    return float(np.sum(g.conductances(p) * np.abs(d) ** p))


def p_laplacian(g: WeightedGraph, phi, p: float, x: int) -> float:
    vals = _as_mapping(phi)
    fx = vals[x]
    total = 0.0
    for y in g.neighbors(x):
        w, ell = g.edge(x, y)
        d = vals[y] - fx
        total += w * ell ** (1.0 - p) * abs(d) ** (p - 2.0) * d
    return total / g.mu[x]


def verify_subharmonic(g: WeightedGraph, phi, p: float, region, tol: float = 1e-8) -> bool:
    """True iff ``Delta_p phi >= -tol`` at every vertex of ``region``."""
    return all(p_laplacian(g, phi, p, x) >= -tol for x in region)


class _Assembly:
    """Index bookkeeping for one Dirichlet problem."""

    def __init__(self, g: WeightedGraph, prob: DirichletProblem):
        interior = sorted(prob.interior)
        boundary = sorted(prob.boundary_values)
        for x in interior + boundary:
            if x not in g:
                raise DomainError(f"vertex {x} is not in the graph")
        domain = set(interior) | set(boundary)
        for x in interior:
            for y in g.neighbors(x):
                if y not in domain:
                    raise DomainError(f"interior vertex {x} has neighbour {y} outside the problem")
        self.order = interior + boundary
        self.n = len(interior)
        pos = {x: i for i, x in enumerate(self.order)}
        gi = np.array([g.index[x] for x in self.order], dtype=np.int64)
        loc = np.full(len(g), -1, dtype=np.int64)
        loc[gi] = np.arange(len(self.order))
        a, b = loc[g.eu], loc[g.ev]
        keep = (a >= 0) & (b >= 0)
        self.a, self.b = a[keep], b[keep]
        self.w, self.ell = g.w[keep], g.ell[keep]
        self.mu = g.mu_array[gi[: self.n]]
        self.boundary = np.array([prob.boundary_values[x] for x in boundary])
        self.free_edge = (self.a < self.n) | (self.b < self.n)
        self.pos = pos
        self._check_posed()

    def _check_posed(self):
        n = self.n
        if n == 0:
            return
        both = (self.a < n) & (self.b < n)
        m = sp.coo_matrix((np.ones(both.sum()), (self.a[both], self.b[both])), shape=(n, n))
        ncomp, labels = connected_components(m, directed=False)
        touched = np.zeros(ncomp, dtype=bool)
        one = (self.a < n) ^ (self.b < n)
        inner = np.where(self.a[one] < n, self.a[one], self.b[one])
        touched[labels[inner]] = True
        if not touched.all():
            raise IllPosedError("an interior component has no boundary contact")

    def full(self, u: np.ndarray) -> np.ndarray:
        return np.concatenate([u, self.boundary])

    def energy(self, u, c, p) -> float:
        f = self.full(u)
        return float(np.sum(c * np.abs(f[self.a] - f[self.b]) ** p))

    def gradient(self, u, c, p) -> np.ndarray:
        f = self.full(u)
        d = f[self.a] - f[self.b]
        flux = p * c * np.abs(d) ** (p - 2.0) * d
        g = np.bincount(self.a, flux, minlength=len(f)) - np.bincount(self.b, flux, minlength=len(f))
        return g[: self.n]

    def hessian(self, u, c, p, floor) -> sp.csc_matrix:
        n = self.n
        f = self.full(u)
        d = f[self.a] - f[self.b]
        h = np.maximum(p * (p - 1.0) * c * np.abs(d) ** (p - 2.0), floor)
        a, b = self.a, self.b
        rows, cols, vals = [], [], []
        ia, ib = a < n, b < n
        rows += [a[ia], b[ib]]
        cols += [a[ia], b[ib]]
        vals += [h[ia], h[ib]]
        both = ia & ib
        rows += [a[both], b[both]]
        cols += [b[both], a[both]]
        vals += [-h[both], -h[both]]
        return sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(n, n))

    def linear_solve(self) -> np.ndarray:
        """Exact p = 2 solution with conductances ``w / ell``."""
        c = self.w / self.ell
        H = self.hessian(np.zeros(self.n), c, 2.0, 0.0) / 2.0
        rhs = -self.gradient(np.zeros(self.n), c, 2.0) / 2.0
        if self.n == 1:
            return np.atleast_1d(rhs / H.toarray()[0, 0])
        return np.atleast_1d(spsolve(H, rhs))


def solve_dirichlet(g: WeightedGraph, prob: DirichletProblem, cfg: SolverConfig = SolverConfig(),
                    initial: Mapping[int, float] | None = None) -> Potential:
    """Minimise the p-energy subject to the boundary values of ``prob``.

    Raises :class:`SolverError` if the p-Laplacian residual does not drop
    below ``cfg.grad_tol`` within ``cfg.max_iter`` Newton iterations.
    """
    p = cfg.p
    asm = _Assembly(g, prob)
    n = asm.n
    c = asm.w * asm.ell ** (1.0 - p)
    trace = []
    if n == 0:
        u = np.zeros(0)
    elif initial is not None:
        u = np.array([initial[x] for x in asm.order[:n]], dtype=float)
    else:
        u = asm.linear_solve()

    it = 0
    polish = 0
    while n:
        grad = asm.gradient(u, c, p)
        residual = float(np.max(np.abs(grad) / (p * asm.mu)))
        energy = asm.energy(u, c, p)
        if cfg.trace:
            trace.append((it, energy, residual))
        converged = residual <= cfg.grad_tol
        if converged and polish >= POLISH_STEPS:
            break
        if not converged and it >= cfg.max_iter:
            raise SolverError(f"no convergence after {it} iterations (residual {residual:.3e})",
                              residual=residual, iterations=it)
        # once converged, drop the floor far below the degenerate edge weights so
        # the polishing steps stay Newton steps near flat edges
        floor = cfg.hessian_floor * (POLISH_FLOOR if converged else 1.0)
        H = asm.hessian(u, c, p, floor)
        step = np.atleast_1d(spsolve(H, -grad)) if n > 1 else -grad / H.toarray()[0]
        slope = float(grad @ step)
        if converged:
            # a small residual can hide a larger error when the Hessian is weak;
            # keep taking Newton steps until they stop moving the iterate
            polish += 1
            if (not np.all(np.isfinite(step)) or slope >= 0
                    or np.max(np.abs(step)) <= STEP_TOL * (1.0 + np.max(np.abs(u)))):
                break
            if asm.energy(u + step, c, p) > energy + 1e-12 * (1.0 + energy):
                break
            u = u + step
            it += 1
            continue
        it += 1
        if not np.all(np.isfinite(step)) or slope >= 0:
            step = -grad / (p * asm.mu)
            slope = float(grad @ step)
        if -slope <= 1e-14 * (1.0 + energy):
            # predicted decrease is below round-off in the energy: take the full step
            u = u + step
            continue
        t = 1.0
        while asm.energy(u + t * step, c, p) > energy + 1e-4 * t * slope:
            t *= 0.5
            if t < 1e-16:
                break
        u = u + t * step

    if n:
        residual = float(np.max(np.abs(asm.gradient(u, c, p)) / (p * asm.mu)))
    else:
        residual = 0.0
    f = asm.full(u)
    values = {x: float(f[i]) for i, x in enumerate(asm.order)}
    energy = asm.energy(u, c, p)
    log.debug("solve_dirichlet: n=%d p=%g iterations=%d residual=%.2e", n, p, it, residual)
    return Potential(values, energy, residual, p, it, trace)


def linear_dirichlet(g: WeightedGraph, prob: DirichletProblem) -> dict[int, float]:
    """Exact solution of the p = 2 problem by one sparse linear solve."""
    asm = _Assembly(g, prob)
    f = asm.full(asm.linear_solve() if asm.n else np.zeros(0))
    return {x: float(f[i]) for i, x in enumerate(asm.order)}
