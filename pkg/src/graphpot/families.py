"""Infinite graph families and their nested truncations.

Vertex ids are chosen so that a vertex keeps its id at every level:

* lattices and cylinders encode integer coordinates in a balanced base
  ``2**12`` (so the 1-d lattice uses the coordinate itself);
* rooted trees and model ends number vertices in level order;
* a glue of ``n`` ends puts the hub on ``0 .. n-1`` and sends local vertex
  ``v`` of end ``i`` to ``n + i + n * v``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .graph import Truncation, WeightedGraph

COORD_BASE = 2 ** 12
_MAX_COORD = COORD_BASE // 2 - 1

KINDS = ("lattice", "regular_tree", "cylinder", "model_end", "glue")
ROOTED_KINDS = ("regular_tree", "model_end")


def encode(coords) -> int:
    return sum(int(c) * COORD_BASE ** i for i, c in enumerate(coords))


def decode(vid: int, dim: int) -> tuple[int, ...]:
    out = []
    for _ in range(dim):
        r = vid % COORD_BASE
        if r > _MAX_COORD:
            r -= COORD_BASE
        out.append(r)
        vid = (vid - r) // COORD_BASE
    return tuple(out)


@dataclass(frozen=True)
class FamilySpec:
    """Description of an infinite weighted graph family.

    ``profile`` (model ends only) gives the number of vertices on each
    level: ``{"type": "geometric", "base": b}`` means ``round(b**k)``,
    ``{"type": "polynomial", "exponent": a}`` means ``round((k + 1)**a)``,
    ``{"type": "constant", "size": s}`` is constant, and an explicit list is
    used as-is (and must be long enough for the requested level).
    """

    kind: str
    dim: int | None = None
    degree: int | None = None
    rooted: bool = False
    circumference: int | None = None
    profile: Any = None
    ends: tuple["FamilySpec", ...] = ()
    mu: float = 1.0
    w: float = 1.0
    ell: float = 1.0

    def __post_init__(self):
        validate(self)

    @classmethod
    def lattice(cls, dim: int, **kw) -> "FamilySpec":
        return cls("lattice", dim=dim, **kw)

    @classmethod
    def regular_tree(cls, degree: int, rooted: bool = False, **kw) -> "FamilySpec":
        return cls("regular_tree", degree=degree, rooted=rooted, **kw)

    @classmethod
    def cylinder(cls, circumference: int, **kw) -> "FamilySpec":
        return cls("cylinder", circumference=circumference, **kw)

    @classmethod
    def model_end(cls, profile, **kw) -> "FamilySpec":
        if isinstance(profile, list):
            profile = tuple(profile)
        elif isinstance(profile, dict):
            profile = tuple(sorted(profile.items()))
        return cls("model_end", profile=profile, **kw)

    @classmethod
    def glue(cls, *ends: "FamilySpec") -> "FamilySpec":
        return cls("glue", ends=tuple(ends))

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "lattice":
            d["dim"] = self.dim
        elif self.kind == "regular_tree":
            d.update(degree=self.degree, rooted=self.rooted)
        elif self.kind == "cylinder":
            d["circumference"] = self.circumference
        elif self.kind == "model_end":
            prof = self.profile
            d["profile"] = list(prof) if _is_explicit(prof) else dict(prof)
        elif self.kind == "glue":
            d["ends"] = [e.to_dict() for e in self.ends]
        for name in ("mu", "w", "ell"):
            if getattr(self, name) != 1.0:
                d[name] = getattr(self, name)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError("family spec must be an object with a 'kind'")
        d = dict(d)
        kind = d.pop("kind")
        weights = {k: float(d.pop(k)) for k in ("mu", "w", "ell") if k in d}
        try:
            if kind == "lattice":
                return cls.lattice(int(d.pop("dim")), **weights)
            if kind == "regular_tree":
                return cls.regular_tree(int(d.pop("degree")), bool(d.pop("rooted", False)),
                                        **weights)
            if kind == "cylinder":
                return cls.cylinder(int(d.pop("circumference")), **weights)
            if kind == "model_end":
                return cls.model_end(d.pop("profile"), **weights)
            if kind == "glue":
                return cls.glue(*(cls.from_dict(e) for e in d.pop("ends")))
        except KeyError as exc:
            raise ConfigError(f"family '{kind}' is missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad family '{kind}': {exc}") from None
        raise ConfigError(f"unknown family kind {kind!r}")

    @classmethod
    def from_json(cls, path) -> "FamilySpec":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None


def _is_explicit(profile) -> bool:
    return isinstance(profile, tuple) and all(isinstance(x, (int, float)) for x in profile)


def validate(spec: FamilySpec) -> None:
    k = spec.kind
    if k not in KINDS:
        raise ConfigError(f"unknown family kind {k!r}")
    for name in ("mu", "w", "ell"):
        if not getattr(spec, name) > 0:
            raise ConfigError(f"{name} must be positive")
    if k == "lattice" and spec.dim not in (1, 2, 3, 4):
        raise ConfigError("lattice dimension must be 1, 2, 3 or 4")
    if k == "regular_tree" and (spec.degree is None or spec.degree < 3):
        raise ConfigError("tree degree must be at least 3")
    if k == "cylinder" and (spec.circumference is None or spec.circumference < 3):
        raise ConfigError("cylinder circumference must be at least 3")
    if k == "model_end":
        _profile_sizes(spec.profile, 0)
    if k == "glue":
        if not spec.ends:
            raise ConfigError("glue needs at least one end spec")
        for e in spec.ends:
            if e.kind not in ROOTED_KINDS:
                raise ConfigError(f"cannot glue a {e.kind!r} end; use a rooted family")


def _profile_sizes(profile, level: int) -> list[int]:
    if profile is None:
        raise ConfigError("model_end needs a profile")
    if _is_explicit(profile):
        sizes = [int(x) for x in profile]
        if len(sizes) < level + 1:
            raise ConfigError(f"explicit profile has {len(sizes)} levels, need {level + 1}")
        sizes = sizes[: level + 1]
    else:
        prof = dict(profile)
        kind = prof.get("type")
        if kind == "geometric":
            b = float(prof["base"])
            sizes = [max(1, round(b ** k)) for k in range(level + 1)]
        elif kind == "polynomial":
            a = float(prof["exponent"])
            sizes = [max(1, round((k + 1) ** a)) for k in range(level + 1)]
        elif kind == "constant":
            sizes = [1] + [int(prof.get("size", 1))] * level
        else:
            raise ConfigError(f"unknown profile type {kind!r}")
    if sizes and sizes[0] != 1:
        raise ConfigError("profile must have a single root vertex on level 0")
    if any(s < 1 for s in sizes):
        raise ConfigError("profile sizes must be positive")
    return sizes


def _layered(sizes: list[int]) -> tuple[list[int], list[tuple[int, int]], list[int]]:
    """Level-ordered vertices, parent edges and last-level vertices."""
    edges = []
    start = 0
    starts = []
    for s in sizes:
        starts.append(start)
        start += s
    for k in range(len(sizes) - 1):
        n0, n1 = sizes[k], sizes[k + 1]
        for i in range(n1):
            parent = starts[k] + (i * n0) // n1
            edges.append((parent, starts[k + 1] + i))
    last = list(range(starts[-1], starts[-1] + sizes[-1]))
    return list(range(start)), edges, last


def _tree_sizes(spec: FamilySpec, level: int) -> list[int]:
    if spec.kind == "model_end":
        return _profile_sizes(spec.profile, level)
    d = spec.degree
    first = d - 1 if spec.rooted else d
    sizes = [1]
    for k in range(level):
        sizes.append(first if k == 0 else sizes[-1] * (d - 1))
    return sizes


def _build(spec: FamilySpec, verts, edges, horizon, level, origin, meta=None) -> Truncation:
    mu = {x: spec.mu for x in verts}
    g = WeightedGraph(mu, {(u, v) if u < v else (v, u): (spec.w, spec.ell) for u, v in edges})
    return Truncation(g, level, frozenset(horizon), origin=origin, meta=meta or {})


def generate(spec: FamilySpec, level: int) -> Truncation:
    """The ``level``-th truncation of ``spec`` (``level >= 1``)."""
    if not isinstance(level, int) or level < 1:
        raise ConfigError("level must be an integer >= 1")
    k = spec.kind
    if k == "lattice":
        m = spec.dim
        if level > _MAX_COORD:
            raise ConfigError(f"lattice level must be <= {_MAX_COORD}")
        rng = range(-level, level + 1)
        verts, edges, horizon = [], [], []
        for c in itertools.product(rng, repeat=m):
            x = encode(c)
            verts.append(x)
            if max(abs(ci) for ci in c) == level:
                horizon.append(x)
            for i in range(m):
                if c[i] < level:
                    edges.append((x, x + COORD_BASE ** i))
        return _build(spec, verts, edges, horizon, level, 0, {"dim": m})
    if k == "cylinder":
        c = spec.circumference
        if level > _MAX_COORD:
            raise ConfigError(f"cylinder level must be <= {_MAX_COORD}")
        verts, edges, horizon = [], [], []
        for x in range(-level, level + 1):
            for j in range(c):
                v = encode((x, j))
                verts.append(v)
                if abs(x) == level:
                    horizon.append(v)
                if x < level:
                    edges.append((v, encode((x + 1, j))))
                edges.append((v, encode((x, (j + 1) % c))))
        return _build(spec, verts, edges, horizon, level, 0, {"dim": 2, "circumference": c})
    if k in ROOTED_KINDS:
        verts, edges, last = _layered(_tree_sizes(spec, level))
        return _build(spec, verts, edges, last, level, 0, {"root": 0})
    return _glue(spec, level)


def _glue(spec: FamilySpec, level: int) -> Truncation:
    n = len(spec.ends)
    mu: dict[int, float] = {h: 1.0 for h in range(n)}
    edges: dict[tuple[int, int], tuple[float, float]] = {}
    for a in range(n):
        for b in range(a + 1, n):
            edges[(a, b)] = (1.0, 1.0)
    horizon = set()
    roots = []
    members = []
    for i, end in enumerate(spec.ends):
        piece = generate(end, level)

        def gid(v, i=i):
            return n + i + n * v

        for v, m in piece.graph.mu.items():
            mu[gid(v)] = m
        for (u, v), attr in piece.graph.edges.items():
            edges[(gid(u), gid(v))] = attr
        root = gid(piece.origin)
        edges[(i, root)] = (1.0, 1.0)
        roots.append(root)
        horizon |= {gid(v) for v in piece.horizon}
        members.append(frozenset(gid(v) for v in piece.graph.mu))
    g = WeightedGraph(mu, edges)
    meta = {"hub": frozenset(range(n)), "roots": tuple(roots), "members": tuple(members)}
    return Truncation(g, level, frozenset(horizon), origin=0, meta=meta)


def glue_swap(t: Truncation, i: int = 0, j: int = 1) -> dict[int, int]:
    """Automorphism exchanging ends ``i`` and ``j`` of a glued truncation.

    Only meaningful when the two glued end specs are identical.
    """
    n = len(t.meta["hub"])
    m = {x: x for x in t.graph.mu}
    m[i], m[j] = j, i
    for x in t.meta["members"][i]:
        v = (x - n - i) // n
        y = n + j + n * v
        m[x], m[y] = y, x
    return m


__all__ = ["FamilySpec", "generate", "glue_swap", "encode", "decode", "validate"]
