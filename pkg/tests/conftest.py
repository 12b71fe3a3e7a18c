import numpy as np
from hypothesis import strategies as st

from graphpot.graph import WeightedGraph


@st.composite
def dirichlet_instances(draw, max_interior=6, max_boundary=3):
    """Random connected graph with a nonempty boundary and explicit edge list."""
    ni = draw(st.integers(1, max_interior))
    nb = draw(st.integers(1, max_boundary))
    n = ni + nb
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    pairs = set()
    for k in range(1, n):
        a, b = int(perm[k]), int(perm[rng.integers(k)])
        pairs.add((min(a, b), max(a, b)))
    extra = draw(st.integers(0, n))
    for _ in range(extra):
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        pairs.add((min(a, b), max(a, b)))
    edges = [(u, v, float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 2.0)))
             for u, v in sorted(pairs)]
    mu = {x: float(rng.uniform(0.5, 2.0)) for x in range(n)}
    boundary_ids = sorted(int(x) for x in rng.choice(n, nb, replace=False))
    boundary = {x: float(rng.uniform(-1.0, 1.0)) for x in boundary_ids}
    interior = [x for x in range(n) if x not in boundary]
    return mu, edges, interior, boundary


def make_graph(mu, edges):
    return WeightedGraph(mu, edges)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
