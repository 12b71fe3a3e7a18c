import pytest
from hypothesis import given, settings, strategies as st

from graphpot.errors import BallEscapesError, ConfigError, DomainError
from graphpot.families import FamilySpec, decode, encode, generate, glue_swap
from graphpot.graph import (WeightedGraph, ball, bounded_components, double_of_end,
                            double_truncation, end_decomposition, mirror_map, volume)

BINARY = FamilySpec.regular_tree(3, rooted=True)
DUMBBELL = FamilySpec.glue(BINARY, BINARY)


def test_weighted_graph_validation():
    with pytest.raises(DomainError):
        WeightedGraph({0: 1, 1: 0}, [(0, 1, 1, 1)])
    with pytest.raises(DomainError):
        WeightedGraph({0: 1, 1: 1}, [(0, 0, 1, 1)])
    with pytest.raises(DomainError):
        WeightedGraph({0: 1, 1: 1}, [(0, 1, -1, 1)])
    with pytest.raises(DomainError):
        WeightedGraph({0: 1, 1: 1}, [(0, 1, 1, 1), (1, 0, 1, 1)])
    with pytest.raises(DomainError):
        WeightedGraph({0: 1, 1: 1, 2: 1}, [(0, 1, 1, 1)])


def test_conductances():
    g = WeightedGraph({0: 1, 1: 1}, [(0, 1, 3.0, 2.0)])
    assert g.conductances(2)[0] == pytest.approx(1.5)
    assert g.conductances(3)[0] == pytest.approx(0.75)


@pytest.mark.parametrize("coords", [(0,), (-5,), (3, -2), (-7, 7, 1), (2047, -2047)])
def test_encode_roundtrip(coords):
    assert decode(encode(coords), len(coords)) == coords


def test_line_truncation():
    t = generate(FamilySpec.lattice(1), 3)
    assert sorted(t.vertices) == list(range(-3, 4))
    assert t.horizon == {-3, 3}


def test_tree_and_cylinder_sizes():
    t = generate(FamilySpec.regular_tree(3), 2)
    assert len(t.graph) == 10 and len(t.horizon) == 6
    assert len(generate(BINARY, 5).graph) == 63
    c = generate(FamilySpec.cylinder(4), 2)
    assert len(c.graph) == 20 and len(c.horizon) == 8


def test_model_end_profiles():
    assert len(generate(FamilySpec.model_end({"type": "geometric", "base": 2}), 3).graph) == 15
    assert len(generate(FamilySpec.model_end({"type": "constant", "size": 3}), 2).graph) == 7
    with pytest.raises(ConfigError):
        generate(FamilySpec.model_end([1, 2]), 4)
    with pytest.raises(ConfigError):
        FamilySpec.model_end([2, 4])


def test_family_spec_roundtrip():
    for spec in (BINARY, DUMBBELL, FamilySpec.cylinder(5, w=2.0),
                 FamilySpec.model_end({"type": "polynomial", "exponent": 2})):
        assert FamilySpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("bad", [{"kind": "lattice", "dim": 7}, {"kind": "regular_tree", "degree": 2},
                                 {"kind": "nope"}, {"kind": "glue", "ends": [{"kind": "lattice", "dim": 1}]},
                                 {"kind": "cylinder"}, {"kind": "lattice", "dim": 1, "w": 0}])
def test_invalid_specs(bad):
    with pytest.raises(ConfigError):
        FamilySpec.from_dict(bad)


SPECS = [FamilySpec.lattice(1), FamilySpec.lattice(2), BINARY, FamilySpec.cylinder(3), DUMBBELL,
         FamilySpec.model_end({"type": "geometric", "base": 1.5})]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 5), st.integers(1, 3))
def test_truncations_are_nested(spec, level, extra):
    a, b = generate(spec, level), generate(spec, level + extra)
    assert a.vertices <= b.vertices
    for key, attr in a.graph.edges.items():
        assert b.graph.edges[key] == attr
    assert not (a.vertices - a.horizon) & b.horizon


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPECS), st.floats(0.5, 4.0), st.floats(0.0, 2.0))
def test_ball_monotone_in_radius(spec, r, dr):
    t = generate(spec, 8)
    assert ball(t, t.origin, r) <= ball(t, t.origin, r + dr)


def test_ball_escape():
    t = generate(FamilySpec.lattice(1), 3)
    assert ball(t, 0, 3) == frozenset(range(-3, 4))
    with pytest.raises(BallEscapesError):
        ball(t, 0, 4)


def test_volume():
    t = generate(BINARY, 4)
    assert volume(t.graph, ball(t, 0, 2)) == 7


def test_ends_of_line_and_dumbbell():
    t = generate(FamilySpec.lattice(1), 5)
    ends = end_decomposition(t, {0})
    assert [e.label for e in ends] == [-1, 1]
    assert ends[1].boundary == {0}
    d = generate(DUMBBELL, 3)
    assert len(end_decomposition(d, d.meta["hub"])) == 2


def test_bounded_components():
    t = generate(FamilySpec.lattice(1), 5)
    assert bounded_components(t, {-1, 1}) == [frozenset({0})]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SPECS), st.integers(2, 4), st.integers(1, 3))
def test_end_labels_stable_across_levels(spec, level, extra):
    t0, t1 = generate(spec, level), generate(spec, level + extra)
    K = t0.meta.get("hub", {t0.origin})
    e0, e1 = end_decomposition(t0, K), end_decomposition(t1, K)
    assert [e.label for e in e0] == [e.label for e in e1]
    for a, b in zip(e0, e1):
        assert a.component - a.horizon <= b.component


def test_end_rejects_horizon_core():
    t = generate(FamilySpec.lattice(1), 2)
    with pytest.raises(DomainError):
        end_decomposition(t, {2})
    with pytest.raises(DomainError):
        end_decomposition(t, set())


def test_double_of_half_line():
    t = generate(FamilySpec.lattice(1), 5)
    e = end_decomposition(t, {0})[1]
    d = double_of_end(e)
    assert sorted(d.mu) == list(range(-5, 6))
    assert d.mu[0] == 2.0 and d.mu[3] == 1.0
    dt = double_truncation(e)
    assert dt.horizon == {-5, 5}


@pytest.mark.parametrize("spec,level", [(BINARY, 4), (FamilySpec.cylinder(4), 4), (FamilySpec.lattice(2), 3)])
def test_double_is_symmetric(spec, level):
    t = generate(spec, level)
    for e in end_decomposition(t, {t.origin}):
        d = double_of_end(e)
        m = mirror_map(e)
        inv = {v: k for k, v in m.items()}
        full = {**m, **inv}
        for (u, v), attr in d.edges.items():
            assert d.edges[tuple(sorted((full[u], full[v])))] == attr
        for x, mu in d.mu.items():
            assert d.mu[full[x]] == mu
        assert len(d) == 2 * len(e.component) + len(e.boundary)


def test_glue_swap_is_automorphism():
    t = generate(DUMBBELL, 3)
    m = glue_swap(t)
    assert sorted(m.values()) == sorted(t.graph.mu)
    for (u, v), attr in t.graph.edges.items():
        assert t.graph.edges[tuple(sorted((m[u], m[v])))] == attr
    assert {m[x] for x in t.horizon} == t.horizon
