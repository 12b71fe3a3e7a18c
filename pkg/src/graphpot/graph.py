"""Weighted graphs, truncations of infinite families, metric balls and ends.

A :class:`WeightedGraph` carries a positive measure on vertices and a
conductance ``w`` and length ``ell`` on every edge.  Infinite families are
observed through :class:`Truncation` objects produced by
:func:`graphpot.families.generate`; the ``horizon`` of a truncation is the
frontier where it was cut and stands in for infinity.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import BallEscapesError, DomainError

EdgeKey = tuple[int, int]


def _key(u: int, v: int) -> EdgeKey:
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Finite connected graph with vertex measures and edge conductances/lengths.

    Parameters
    ----------
    mu : mapping vertex -> positive measure
    edges : mapping ``(u, v) -> (w, ell)`` or iterable of ``(u, v, w, ell)``
    check_connected : verify connectivity (on by default)

    Instances are treated as immutable; all derived arrays are computed once.
    """

    def __init__(self, mu: Mapping[int, float], edges, check_connected: bool = True):
        mus = {int(x): float(m) for x, m in mu.items()}
        for x, m in mus.items():
            if not m > 0:
                raise DomainError(f"vertex {x} has non-positive measure {m}")
        table: dict[EdgeKey, tuple[float, float]] = {}
        items = edges.items() if isinstance(edges, Mapping) else (
            ((u, v), (w, ell)) for u, v, w, ell in edges)
        for (u, v), (w, ell) in items:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if u not in mus or v not in mus:
                raise DomainError(f"edge ({u}, {v}) references an unknown vertex")
            if not (w > 0 and ell > 0):
                raise DomainError(f"edge ({u}, {v}) needs w > 0 and ell > 0")
            k = _key(u, v)
            if k in table:
                raise DomainError(f"duplicate edge {k}")
            table[k] = (float(w), float(ell))

        self._mu = MappingProxyType(mus)
        self._edges = MappingProxyType(table)
        self.vertices = np.array(sorted(mus), dtype=np.int64)
        self.index = {int(x): i for i, x in enumerate(self.vertices)}
        keys = sorted(table)
        self.edge_keys = keys
        self.eu = np.array([self.index[u] for u, _ in keys], dtype=np.int64)
        self.ev = np.array([self.index[v] for _, v in keys], dtype=np.int64)
        self.w = np.array([table[k][0] for k in keys])
        self.ell = np.array([table[k][1] for k in keys])
        self.mu_array = np.array([mus[int(x)] for x in self.vertices])
        adj: dict[int, list[int]] = {x: [] for x in mus}
        for u, v in keys:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {x: tuple(sorted(n)) for x, n in adj.items()}
        if check_connected and mus and not self._connected():
            raise DomainError("graph is not connected")

    def _connected(self) -> bool:
        start = next(iter(self._mu))
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(self._mu)

    @property
    def mu(self) -> Mapping[int, float]:
        return self._mu

    @property
    def edges(self) -> Mapping[EdgeKey, tuple[float, float]]:
        return self._edges

    def __len__(self) -> int:
        return len(self._mu)

    def __contains__(self, x) -> bool:
        return x in self._mu

    def __repr__(self) -> str:
        return f"WeightedGraph(|V|={len(self)}, |E|={len(self._edges)})"

    def neighbors(self, x: int) -> tuple[int, ...]:
        return self._adj[x]

    def edge(self, u: int, v: int) -> tuple[float, float]:
        return self._edges[_key(u, v)]

    def conductances(self, p: float) -> np.ndarray:
        """Per-edge energy coefficients ``w * ell**(1 - p)``."""
        return self.w * self.ell ** (1.0 - p)

    def subgraph(self, vertices: Iterable[int], check_connected: bool = True) -> "WeightedGraph":
        keep = set(vertices)
        mu = {x: self._mu[x] for x in keep}
        edges = {k: a for k, a in self._edges.items() if k[0] in keep and k[1] in keep}
        return WeightedGraph(mu, edges, check_connected=check_connected)

    def edge_rows(self) -> list[tuple[int, int, float, float]]:
        """Edge list ``(u, v, w, ell)`` sorted by ``(u, v)``."""
        return [(u, v, *self._edges[(u, v)]) for u, v in self.edge_keys]


@dataclass(frozen=True, eq=False)
class Truncation:
    """The ``level``-th finite piece of an infinite family.

    ``origin`` is the family's natural base point (lattice origin, tree root,
    first hub vertex).  ``meta`` holds family-specific annotations such as hub
    vertices or coordinates.
    """

    graph: WeightedGraph
    level: int
    horizon: frozenset
    origin: int | None = None
    meta: Mapping = field(default_factory=dict)

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.graph.mu)


@dataclass(frozen=True, eq=False)
class End:
    """A connected component of ``V \\ compact`` that touches the horizon.

    ``label`` is the smallest vertex of the component adjacent to the compact
    set.  Those vertices exist at every level, so the label identifies the end
    consistently across nested truncations.
    """

    parent: Truncation
    compact: frozenset
    component: frozenset
    boundary: frozenset
    label: int

    @property
    def vertices(self) -> frozenset:
        return self.component | self.boundary

    @property
    def horizon(self) -> frozenset:
        return self.component & self.parent.horizon


def distances(g: WeightedGraph, sources: Iterable[int], cutoff: float = np.inf,
              hops: bool = False) -> dict[int, float]:
    """Shortest-path distances from ``sources`` (edge lengths, or hop counts)."""
    dist: dict[int, float] = {}
    heap = [(0.0, s) for s in sources]
    heapq.heapify(heap)
    while heap:
        d, x = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        for y in g.neighbors(x):
            if y in dist:
                continue
            nd = d + (1.0 if hops else g.edge(x, y)[1])
            if nd <= cutoff + 1e-12:
                heapq.heappush(heap, (nd, y))
    return dist


def ball(t: Truncation, x0: int, R: float) -> frozenset:
    """Vertices at distance at most ``R`` from ``x0``.

    Raises :class:`BallEscapesError` when a horizon vertex lies strictly
    closer than ``R``; horizon vertices at distance exactly ``R`` are allowed.
    """
    if x0 not in t.graph:
        raise DomainError(f"{x0} is not a vertex of the truncation")
    if R <= 0:
        raise DomainError("radius must be positive")
    dist = distances(t.graph, [x0], cutoff=R)
    for x in t.horizon:
        if x in dist and dist[x] < R - 1e-12:
            raise BallEscapesError(
                f"ball of radius {R} around {x0} escapes truncation level {t.level}")
    return frozenset(dist)


def volume(g: WeightedGraph, S: Iterable[int]) -> float:
    total = 0.0
    for x in S:
        if x not in g.mu:
            raise DomainError(f"{x} is not a vertex")
        total += g.mu[x]
    return total


def _components(g: WeightedGraph, removed: frozenset) -> list[frozenset]:
    seen: set[int] = set(removed)
    comps = []
    for s in sorted(g.mu):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(frozenset(comp))
    return comps


def _check_compact(t: Truncation, K) -> frozenset:
    K = frozenset(int(x) for x in K)
    if not K:
        raise DomainError("compact set must be nonempty")
    missing = [x for x in K if x not in t.graph]
    if missing:
        raise DomainError(f"vertices {sorted(missing)[:5]} not in truncation")
    if K & t.horizon:
        raise DomainError("compact set meets the horizon")
    return K


def end_decomposition(t: Truncation, K) -> list[End]:
    """Ends of ``t`` with respect to ``K``, sorted by label."""
    K = _check_compact(t, K)
    g = t.graph
    ends = []
    for comp in _components(g, K):
        if not comp & t.horizon:
            continue
        boundary = frozenset(x for x in K if any(y in comp for y in g.neighbors(x)))
        label = min(y for x in boundary for y in g.neighbors(x) if y in comp)
        ends.append(End(t, K, comp, boundary, label))
    return sorted(ends, key=lambda e: e.label)


def bounded_components(t: Truncation, K) -> list[frozenset]:
    """Components of ``V \\ K`` that never reach the horizon."""
    K = _check_compact(t, K)
    return [c for c in _components(t.graph, K) if not c & t.horizon]


def end_containing(t: Truncation, K, vertex: int) -> End:
    """The end of ``t`` (w.r.t. ``K``) whose component contains ``vertex``."""
    for e in end_decomposition(t, K):
        if vertex in e.component:
            return e
    raise DomainError(f"vertex {vertex} lies in no end at level {t.level}")


def end_truncation(e: End) -> Truncation:
    """The end ``component ∪ boundary`` viewed as a truncation on its own."""
    g = e.parent.graph.subgraph(e.vertices)
    return Truncation(g, e.parent.level, e.horizon, origin=min(e.boundary),
                      meta={"boundary": e.boundary})


def mirror_map(e: End) -> dict[int, int]:
    """Vertex map of the second copy in :func:`double_of_end`.

    Boundary vertices are fixed; a component vertex ``x`` goes to ``s - x``
    with ``s = 0`` when that keeps the copies apart (so a half-line doubles
    to a symmetric line), otherwise ``s = 2 min(V) - 1``.
    """
    verts = e.vertices
    shift = 0
    if any(-x in verts for x in e.component):
        shift = 2 * min(verts) - 1
    m = {x: shift - x for x in e.component}
    m.update({b: b for b in e.boundary})
    return m


def double_of_end(e: End) -> WeightedGraph:
    """Two copies of the end glued along its boundary.

    Identified boundary vertices carry twice their measure, and an edge
    between two boundary vertices carries twice its conductance (the two
    copies merge into one parallel pair).
    """
    g = e.parent.graph
    m = mirror_map(e)
    verts = e.vertices
    mu = {}
    for x in verts:
        if x in e.boundary:
            mu[x] = 2.0 * g.mu[x]
        else:
            mu[x] = g.mu[x]
            mu[m[x]] = g.mu[x]
    edges = {}
    for (u, v), (w, ell) in g.edges.items():
        if u not in verts or v not in verts:
            continue
        if u in e.boundary and v in e.boundary:
            edges[(u, v)] = (2.0 * w, ell)
            continue
        edges[(u, v)] = (w, ell)
        edges[_key(m[u], m[v])] = (w, ell)
    return WeightedGraph(mu, edges)


def double_truncation(e: End) -> Truncation:
    """The double as a truncation whose horizon is both copies of the end's."""
    m = mirror_map(e)
    horizon = e.horizon | frozenset(m[x] for x in e.horizon)
    return Truncation(double_of_end(e), e.parent.level, horizon, origin=min(e.boundary),
                      meta={"boundary": e.boundary, "mirror": m})
