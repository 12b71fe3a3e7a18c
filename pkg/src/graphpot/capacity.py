"""Capacities, parabolicity verdicts and special p-harmonic functions.

Everything here is built from equilibrium potentials: the minimiser of the
p-energy among functions equal to 1 on an inner set and 0 on a grounded set
(by default the horizon of a truncation).  Limits over an exhaustion are
estimated by fitting ``value(level) ~ L + a * level**(-b)`` to the tail of
a sequence of truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .energy import DirichletProblem, Potential, SolverConfig, solve_dirichlet
from .errors import InconsistencyError, PreconditionError
from .families import FamilySpec, generate
from .graph import (End, Truncation, double_truncation, end_containing, end_decomposition,
                    end_truncation, volume)

DEFAULT_THRESHOLD = 1e-3
MONOTONE_SLACK = 1e-9
FIT_RESIDUAL_LIMIT = 0.1

_B_GRID = np.logspace(-2, np.log10(60.0), 160)


@dataclass(frozen=True, eq=False)
class Condenser:
    inner: frozenset
    ambient: Truncation
    grounded: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "inner", frozenset(self.inner))
        g = self.ambient.horizon if self.grounded is None else frozenset(self.grounded)
        object.__setattr__(self, "grounded", g)
        if not self.inner:
            raise PreconditionError("condenser needs a nonempty inner set")
        if self.inner & self.grounded:
            raise PreconditionError("inner and grounded sets intersect")


def capacity(c: Condenser, p: float | None = None,
             cfg: SolverConfig = SolverConfig()) -> tuple[float, Potential]:
    """p-capacity of the condenser and its equilibrium potential.

    With an empty grounded set the constant 1 is admissible and the
    capacity is 0.
    """
    if p is not None:
        cfg = cfg.with_p(p)
    g = c.ambient.graph
    if not c.grounded:
        return 0.0, Potential({x: 1.0 for x in g.mu}, 0.0, 0.0, cfg.p)
    bv = {x: 1.0 for x in c.inner}
    bv.update({x: 0.0 for x in c.grounded})
    interior = c.ambient.vertices - c.inner - c.grounded
    h = solve_dirichlet(g, DirichletProblem(interior, bv), cfg)
    return h.energy, h


def fit_power_tail(levels: Sequence[float], values: Sequence[float]) -> tuple[float, float, float, float]:
    """Least-squares fit ``values ~ L + a * levels**(-b)`` with ``L >= 0``.

    Returns ``(L, a, b, relative_residual)``.  For each ``b`` the problem is
    linear in ``(L, a)``; ``b`` is located on a log grid and refined with a
    bounded scalar search.
    """
    x = np.asarray(levels, dtype=float)
    y = np.asarray(values, dtype=float)
    scale = max(float(np.linalg.norm(y)), 1e-300)

    def solve(b):
        z = x ** (-b)
        A = np.column_stack([np.ones_like(z), z])
        (L, a), *_ = np.linalg.lstsq(A, y, rcond=None)
        if L < 0:
            L = 0.0
            a = float(z @ y / (z @ z))
        r = float(np.linalg.norm(y - L - a * z))
        return r, float(L), float(a)

    res = [solve(b)[0] for b in _B_GRID]
    k = int(np.argmin(res))
    lo = _B_GRID[max(k - 1, 0)]
    hi = _B_GRID[min(k + 1, len(_B_GRID) - 1)]
    best_b = float(_B_GRID[k])
    if hi > lo:
        opt = minimize_scalar(lambda b: solve(b)[0], bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if opt.fun <= res[k]:
            best_b = float(opt.x)
    r, L, a = solve(best_b)
    return L, a, best_b, r / scale


@dataclass
class CapacitySequence:
    levels: list[int]
    values: list[float]
    fitted_limit: float
    fit_exponent: float
    fit_amplitude: float = 0.0
    fit_residual: float = 0.0

    def rows(self):
        return [{"level": L, "capacity": v} for L, v in zip(self.levels, self.values)]

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "values": list(self.values),
                "fitted_limit": self.fitted_limit, "fit_exponent": self.fit_exponent,
                "fit_amplitude": self.fit_amplitude, "fit_residual": self.fit_residual}


@dataclass
class Classification:
    verdict: str
    evidence: CapacitySequence
    threshold: float

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "threshold": self.threshold,
                "evidence": self.evidence.to_dict()}


def sequence_from(make: Callable[[int], Condenser], levels: Sequence[int], p: float,
                  cfg: SolverConfig = SolverConfig()) -> CapacitySequence:
    """Capacities of ``make(level)`` over ascending ``levels`` plus the tail fit."""
    levels = sorted(int(L) for L in levels)
    cfg = cfg.with_p(p)
    values = [capacity(make(L), cfg=cfg)[0] for L in levels]
    for i in range(1, len(values)):
        if values[i] > values[i - 1] + MONOTONE_SLACK:
            raise InconsistencyError(
                f"capacity increased from level {levels[i - 1]} ({values[i - 1]:.12g}) "
                f"to level {levels[i]} ({values[i]:.12g})")
    if len(levels) >= 2:
        L, a, b, r = fit_power_tail(levels, values)
    else:
        L, a, b, r = values[-1], 0.0, 0.0, 0.0
    return CapacitySequence(levels, values, L, b, a, r)


def capacity_sequence(spec: FamilySpec, K, p: float, levels: Sequence[int],
                      cfg: SolverConfig = SolverConfig()) -> CapacitySequence:
    """cap_p(K, D_level) over the truncations of ``spec``."""
    K = frozenset(K)
    return sequence_from(lambda L: Condenser(K, generate(spec, L)), levels, p, cfg)


def _end_at(spec: FamilySpec, K, label: int | None, level: int) -> End:
    t = generate(spec, level)
    if label is None:
        ends = end_decomposition(t, K)
        if not ends:
            raise PreconditionError(f"no ends with respect to K at level {level}")
        return ends[0]
    return end_containing(t, K, label)


def end_capacity_sequence(spec: FamilySpec, K, p: float, levels: Sequence[int],
                          label: int | None = None, double: bool = False,
                          cfg: SolverConfig = SolverConfig()) -> CapacitySequence:
    """Capacity of ``∂E`` inside the end (or inside its double) per level."""
    K = frozenset(K)

    def make(L):
        e = _end_at(spec, K, label, L)
        t = double_truncation(e) if double else end_truncation(e)
        return Condenser(e.boundary, t)

    return sequence_from(make, levels, p, cfg)


def classify(seq: CapacitySequence, threshold: float = DEFAULT_THRESHOLD) -> Classification:
    """Parabolic / hyperbolic / inconclusive verdict from a capacity sequence."""
    if len(seq.levels) < 3:
        raise PreconditionError("classification needs at least 3 levels")
    if not threshold > 0:
        raise PreconditionError("threshold must be positive")
    if seq.fit_residual > FIT_RESIDUAL_LIMIT:
        verdict = "inconclusive"
    elif seq.fitted_limit >= threshold:
        verdict = "hyperbolic"
    else:
        verdict = "parabolic"
    return Classification(verdict, seq, threshold)


@dataclass
class EndVerdict:
    label: int
    end: Classification
    double: Classification


def classify_ends(spec: FamilySpec, K, p: float, levels: Sequence[int],
                  threshold: float = DEFAULT_THRESHOLD,
                  cfg: SolverConfig = SolverConfig()) -> list[EndVerdict]:
    """Verdict for every end (and its double) found at the shallowest level."""
    K = frozenset(K)
    first = generate(spec, min(levels))
    out = []
    for e in end_decomposition(first, K):
        own = classify(end_capacity_sequence(spec, K, p, levels, e.label, cfg=cfg), threshold)
        dbl = classify(end_capacity_sequence(spec, K, p, levels, e.label, double=True, cfg=cfg),
                       threshold)
        out.append(EndVerdict(e.label, own, dbl))
    return out


def poincare_witness(spec: FamilySpec, K, p: float, C: float, levels: Sequence[int],
                     cfg: SolverConfig = SolverConfig()) -> Potential | None:
    """A compactly supported ``v`` with ``||v||_{L^p(K)} > C ||grad v||_p``, if found.

    Candidates are the equilibrium potentials of ``(K, D_level)``.  Convex
    combinations of them need not be searched: the deepest potential already
    minimises the energy over all of them.
    """
    K = frozenset(K)
    cfg = cfg.with_p(p)
    for L in sorted(levels):
        t = generate(spec, L)
        cap, h = capacity(Condenser(K, t), cfg=cfg)
        lhs = volume(t.graph, K) ** (1.0 / p)
        if lhs > C * cap ** (1.0 / p):
            return h
    return None


@dataclass
class EndPotential:
    """The end potential ``h`` and the per-level evidence of its construction.

    ``min_values[i]`` is the minimum of ``h_i`` over the end minus its
    horizon.  ``limit`` is the per-vertex extrapolated limit of ``h_i`` on
    the vertices of the shallowest end.  ``monotone_violation`` is the largest
    ``h_i(x) - h_{i+1}(x)`` seen; it should be at most solver noise.
    """

    potential: Potential
    label: int
    boundary: frozenset
    levels: list[int]
    min_values: list[float]
    energies: list[float]
    limit: dict[int, float]
    monotone_violation: float
    per_level: list[Potential] = field(repr=False, default_factory=list)

    def rows(self):
        return [{"level": L, "min_value": m, "energy": e}
                for L, m, e in zip(self.levels, self.min_values, self.energies)]


def _extrapolate(levels, per_level: list[Potential], vertices) -> dict[int, float]:
    limit = {}
    for x in sorted(vertices):
        ys = [h[x] for h in per_level]
        if max(ys) - min(ys) < 1e-15:
            limit[x] = ys[-1]
            continue
        limit[x] = fit_power_tail(levels, ys)[0]
    return limit


def end_potential(spec: FamilySpec, K, p: float, levels: Sequence[int], label: int | None = None,
                  cfg: SolverConfig = SolverConfig()) -> EndPotential:
    """Solve ``h_i = 1`` on ``∂E``, ``0`` on the end's horizon, over ``levels``."""
    K = frozenset(K)
    levels = sorted(int(L) for L in levels)
    cfg = cfg.with_p(p)
    hs, mins, energies, ends = [], [], [], []
    for L in levels:
        e = _end_at(spec, K, label, L)
        cap, h = capacity(Condenser(e.boundary, end_truncation(e)), cfg=cfg)
        inner = (e.component - e.horizon) or e.component
        hs.append(h)
        ends.append(e)
        mins.append(h.min(inner))
        energies.append(cap)
    viol = 0.0
    for h0, h1 in zip(hs, hs[1:]):
        viol = max(viol, max(h0[x] - h1[x] for x in h0.values))
    first = ends[0]
    limit = _extrapolate(levels, hs, first.vertices) if len(levels) >= 2 else dict(hs[0].values)
    return EndPotential(hs[-1], first.label, first.boundary, levels, mins, energies, limit,
                        viol, hs)


@dataclass
class MultiEndResult:
    """Output of the two-hyperbolic-ends construction.

    Gaps are signed: ``lower_gaps[i] = min over E1 of (u_t - (1 - h_{1,t}))``
    and ``upper_gaps[i] = min over E2 of (h_{2,t} - u_t)``; both must be
    nonnegative up to solver tolerance.  ``oscillation`` is ``sup u - inf u``
    for the deepest ``u`` on the vertices of the shallowest truncation.
    """

    potential: Potential
    end_labels: tuple[int, int]
    verdicts: dict[int, str]
    levels: list[int]
    energies: list[float]
    bound_energies: list[float]
    lower_gaps: list[float]
    upper_gaps: list[float]
    oscillation: float
    u_min: float
    u_max: float
    per_level: list[Potential] = field(repr=False, default_factory=list)

    def ok(self, tol: float = 1e-8) -> bool:
        return (self.u_min >= -tol and self.u_max <= 1 + tol
                and min(self.lower_gaps) >= -tol and min(self.upper_gaps) >= -tol
                and all(e <= b + tol for e, b in zip(self.energies, self.bound_energies)))

    def rows(self):
        return [{"level": L, "energy": e, "bound_energy": b, "lower_gap": lo, "upper_gap": up}
                for L, e, b, lo, up in zip(self.levels, self.energies, self.bound_energies,
                                           self.lower_gaps, self.upper_gaps)]


def default_core(t: Truncation) -> frozenset:
    """Hub of a glued family, otherwise the origin."""
    if "hub" in t.meta:
        return frozenset(t.meta["hub"])
    return frozenset([t.origin])


def multi_end_harmonic(spec: FamilySpec, p: float, levels: Sequence[int], K=None,
                       threshold: float = DEFAULT_THRESHOLD,
                       cfg: SolverConfig = SolverConfig()) -> MultiEndResult:
    """Bounded p-harmonic ``u`` equal to 1 at infinity of E1 and 0 on the other ends.

    Requires two ends classified hyperbolic over ``levels``; raises
    :class:`PreconditionError` otherwise.
    """
    levels = sorted(int(L) for L in levels)
    cfg = cfg.with_p(p)
    first = generate(spec, levels[0])
    K = default_core(first) if K is None else frozenset(K)
    labels = [e.label for e in end_decomposition(first, K)]
    if len(labels) < 2:
        raise PreconditionError(f"need at least 2 ends, found {len(labels)}")
    verdicts = {}
    for lab in labels:
        seq = end_capacity_sequence(spec, K, p, levels, lab, cfg=cfg)
        verdicts[lab] = classify(seq, threshold).verdict
    hyper = [lab for lab in labels if verdicts[lab] == "hyperbolic"]
    if len(hyper) < 2:
        raise PreconditionError(
            f"need two p-hyperbolic ends, verdicts were {verdicts}; the construction degenerates")
    l1, l2 = hyper[0], hyper[1]

    us, energies, bounds, lows, ups = [], [], [], [], []
    for L in levels:
        t = generate(spec, L)
        e1 = end_containing(t, K, l1)
        e2 = end_containing(t, K, l2)
        bv = {x: 0.0 for x in t.horizon}
        bv.update({x: 1.0 for x in e1.horizon})
        u = solve_dirichlet(t.graph, DirichletProblem(t.vertices - t.horizon, bv), cfg)
        c1, h1 = capacity(Condenser(e1.boundary, end_truncation(e1)), cfg=cfg)
        _, h2 = capacity(Condenser(e2.boundary, end_truncation(e2)), cfg=cfg)
        us.append(u)
        energies.append(u.energy)
        bounds.append(c1)
        lows.append(min(u[x] - (1.0 - h1[x]) for x in e1.vertices))
        ups.append(min(h2[x] - u[x] for x in e2.vertices))
    u = us[-1]
    core_vals = [u[x] for x in first.vertices]
    return MultiEndResult(u, (l1, l2), verdicts, levels, energies, bounds, lows, ups,
                          max(core_vals) - min(core_vals), u.min(), u.max(), us)
