"""Acceptance criteria 1-10.

Each criterion is a function returning ``(passed, detail)``.  Under pytest
every criterion is one test; the terminal summary prints one PASS/FAIL line
per criterion.  Run as a script to get the same lines without pytest.
"""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import coordinate_descent, dense_linear  # noqa: E402
from graphpot.capacity import (Condenser, capacity, capacity_sequence, classify,  # noqa: E402
                               end_capacity_sequence, end_potential, multi_end_harmonic)
from graphpot.energy import DirichletProblem, SolverConfig, solve_dirichlet  # noqa: E402
from graphpot.errors import PreconditionError  # noqa: E402
from graphpot.families import FamilySpec, encode, generate, glue_swap  # noqa: E402
from graphpot.graph import (Truncation, WeightedGraph, ball, end_containing,  # noqa: E402
                            end_truncation)
from graphpot.inequalities import (SchrodingerSpec, check_lambda_volume_lower,  # noqa: E402
                                   lambda_ball_upper, schrodinger_bottom, sobolev_glue_check,
                                   sobolev_upper_bound, volume_growth_check,
                                   volume_growth_constants)

LINE = FamilySpec.lattice(1)
BINARY = FamilySpec.regular_tree(3, rooted=True)
CYL = FamilySpec.cylinder(4)
DUMBBELL = FamilySpec.glue(BINARY, BINARY)

RESULTS: list[str] = []


def random_problem(rng, max_interior=6, max_boundary=3):
    ni = int(rng.integers(1, max_interior + 1))
    nb = int(rng.integers(1, max_boundary + 1))
    n = ni + nb
    perm = rng.permutation(n)
    pairs = set()
    for k in range(1, n):
        a, b = int(perm[k]), int(perm[rng.integers(k)])
        pairs.add((min(a, b), max(a, b)))
    for _ in range(int(rng.integers(0, n + 1))):
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        pairs.add((min(a, b), max(a, b)))
    edges = [(u, v, float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 2.0))) for u, v in sorted(pairs)]
    mu = {x: float(rng.uniform(0.5, 2.0)) for x in range(n)}
    bnd = sorted(int(x) for x in rng.choice(n, nb, replace=False))
    boundary = {x: float(rng.uniform(-1, 1)) for x in bnd}
    interior = [x for x in range(n) if x not in boundary]
    return mu, edges, interior, boundary


def _solve(mu, edges, interior, boundary, p):
    g = WeightedGraph(mu, edges)
    return solve_dirichlet(g, DirichletProblem(interior, boundary), SolverConfig(p=p))


# -- criteria -------------------------------------------------------------------------

def criterion_1():
    rng = np.random.default_rng(1)
    worst, worst_lin, count = 0.0, 0.0, 0
    for _ in range(30):
        mu, edges, interior, boundary = random_problem(rng)
        for p in (2.0, 3.0, 4.0):
            h = _solve(mu, edges, interior, boundary, p)
            ref = coordinate_descent(mu, edges, interior, boundary, p)
            worst = max(worst, max(abs(h[x] - ref[x]) for x in ref))
            if p == 2.0:
                lin = dense_linear(mu, edges, interior, boundary)
                worst_lin = max(worst_lin, max(abs(h[x] - lin[x]) for x in lin))
            count += 1
    ok = worst <= 1e-8 and worst_lin <= 1e-10
    return ok, f"{count} solves, brute-force gap {worst:.1e}, p=2 linear gap {worst_lin:.1e}"


def _path(n):
    g = WeightedGraph({x: 1.0 for x in range(n + 1)}, [(x, x + 1, 1.0, 1.0) for x in range(n)])
    return Truncation(g, n, frozenset({n}), origin=0)


def criterion_2():
    checks = {}
    t = _path(4)
    checks["path p=2"] = (capacity(Condenser({0}, t), 2)[0], 0.25, 1e-12)
    checks["path p=3"] = (capacity(Condenser({0}, t), 3)[0], 0.0625, 1e-12)
    for n in (5, 10, 20):
        checks[f"line n={n}"] = (capacity_sequence(LINE, {0}, 2, [n]).values[0], 2 / n, 1e-12)
    checks["binary depth 5"] = (capacity_sequence(BINARY, {0}, 2, [5]).values[0], 32 / 31, 1e-8)
    bad = [k for k, (got, want, tol) in checks.items() if abs(got - want) > tol]
    worst = max(abs(got - want) for got, want, _ in checks.values())
    return not bad, f"{len(checks)} closed forms, worst error {worst:.1e}" + (f", failed {bad}" if bad else "")


def criterion_3():
    cases = [
        ("lattice(1) p=2", LINE, {0}, 2, [8, 16, 32, 64], "parabolic"),
        ("cylinder(4) p=2", CYL, {0}, 2, [8, 16, 32, 64], "parabolic"),
        ("binary tree p=2", BINARY, {0}, 2, [4, 6, 8, 10], "hyperbolic"),
        ("lattice(3) p=2", FamilySpec.lattice(3), {0}, 2, [2, 4, 6, 8], "hyperbolic"),
        ("lattice(1) p=3", LINE, {0}, 3, [8, 16, 32, 64], "parabolic"),
    ]
    got = {}
    for name, spec, K, p, levels, want in cases:
        c = classify(capacity_sequence(spec, K, p, levels))
        got[name] = (c.verdict, want, c.evidence.fitted_limit)
    bad = [k for k, (v, w, _) in got.items() if v != w]
    detail = "; ".join(f"{k}: {v} (L={L:.3g})" for k, (v, _, L) in got.items())
    return not bad, detail


def criterion_4():
    ring = frozenset(encode((0, j)) for j in range(4))
    cases = [("half-line", LINE, {0}, 1, [8, 16, 32, 64]),
             ("binary-tree end", BINARY, {0}, 1, [4, 6, 8, 10]),
             ("half-cylinder", CYL, ring, encode((1, 0)), [8, 16, 32, 64])]
    lines, ok = [], True
    for name, spec, K, label, levels in cases:
        for p in (2, 3):
            own = classify(end_capacity_sequence(spec, K, p, levels, label)).verdict
            dbl = classify(end_capacity_sequence(spec, K, p, levels, label, double=True)).verdict
            ok &= own == dbl and own != "inconclusive"
            lines.append(f"{name} p={p}: {own}/{dbl}")
    return ok, "; ".join(lines)


def criterion_5():
    res = end_potential(BINARY, {0}, 2, [4, 6, 8, 10])
    ok = True
    for L, h in zip(res.levels, res.per_level):
        e = end_containing(generate(BINARY, L), {0}, res.label)
        inner = e.vertices - e.horizon
        ok &= all(0 < h[x] <= 1 for x in inner)
        ok &= all(h[x] == 1.0 for x in e.boundary)
    ok &= res.monotone_violation <= 1e-10
    ok &= all(b <= a + 1e-12 for a, b in zip(res.energies, res.energies[1:]))
    ok &= all(b < a for a, b in zip(res.min_values, res.min_values[1:]))
    ok &= res.min_values[-1] < 0.01
    line = end_potential(LINE, {0}, 2, [50, 100, 200, 400], label=1)
    line_gap = max(abs(v - 1) for v in line.limit.values())
    ok &= line_gap <= 1e-6
    return ok, (f"tree min h {[round(m, 4) for m in res.min_values]}, energies "
                f"{[round(e, 4) for e in res.energies]}, monotone violation "
                f"{res.monotone_violation:.1e}; half-line |h-1| {line_gap:.1e}")


def criterion_6():
    levels = [4, 5, 6, 7, 8]
    res = multi_end_harmonic(DUMBBELL, 2, levels)
    tol = 1e-8
    ok = res.u_min >= -tol and res.u_max <= 1 + tol and res.oscillation >= 0.5
    ok &= min(res.lower_gaps) >= -tol and min(res.upper_gaps) >= -tol
    ok &= all(e <= b + tol for e, b in zip(res.energies, res.bound_energies))
    swap = 0.0
    for L, u in zip(levels, res.per_level):
        m = glue_swap(generate(DUMBBELL, L))
        swap = max(swap, max(abs(u[m[x]] - (1 - u[x])) for x in u.values))
    ok &= swap <= 1e-8
    return ok, (f"oscillation {res.oscillation:.4f}, min gaps {min(res.lower_gaps):.1e}/"
                f"{min(res.upper_gaps):.1e}, max E(u)-E(k1) "
                f"{max(e - b for e, b in zip(res.energies, res.bound_energies)):.3g}, swap {swap:.1e}")


def criterion_7():
    t = generate(BINARY, 8)
    S = sobolev_upper_bound(t, 2, 4)
    low = [check_lambda_volume_lower(t, ball(t, 0, R), 2, 4, S) for R in (1, 2, 3, 4, 5, 6)]
    low.append(check_lambda_volume_lower(t, t.vertices - t.horizon, 2, 4, S))
    up = [lambda_ball_upper(t, 0, R, 2) for R in (2, 3, 4, 5, 6)]
    consts = volume_growth_constants(2, 4, S)
    vol = volume_growth_check(t, 0, [2, 3, 4, 5, 6], consts)
    exact = consts.alpha == 2 / 3 and consts.C2 == 4 and consts.alpha_bar == 6
    ok = all(r.ok for r in low) and all(r.ok for r in up) and vol.ok and exact
    return ok, (f"S <= {S:.4f}; lambda-volume lower {sum(r.ok for r in low)}/{len(low)}, "
                f"lambda-ball upper {sum(r.ok for r in up)}/{len(up)}, volume rows "
                f"{sum(r['pass'] for r in vol.rows)}/{len(vol.rows)}, constants exact {exact}")


def criterion_8():
    t = generate(BINARY, 8)
    rep = sobolev_glue_check(t, ball(t, 0, 2), 2, 1000, 2, 4, seed=0)
    ok = not rep.vacuous and rep.max_ratio <= 1 + 1e-9 and rep.capacity > 0
    return ok, (f"{len(rep.rows)} test functions, max ratio {rep.max_ratio:.4f}, C1 {rep.C1:.4f}, "
                f"cap_p(collared core) {rep.capacity:.4f}")


def criterion_9():
    rng = np.random.default_rng(9)
    tol = 1e-8
    fails = 0
    for i in range(200):
        p = (2.0, 3.0)[i % 2]
        mu, edges, interior, boundary = random_problem(rng, max_interior=10)
        v = _solve(mu, edges, interior, boundary, p)
        lo, hi = min(boundary.values()), max(boundary.values())
        ok = all(lo - tol <= v[x] <= hi + tol for x in interior)
        upper = {x: b + float(rng.uniform(0, 0.5)) for x, b in boundary.items()}
        u = _solve(mu, edges, interior, upper, p)
        ok &= all(u[x] >= v[x] - tol for x in interior)
        fails += not ok
    return fails == 0, f"200 problems, {fails} violations"


def criterion_10():
    g = WeightedGraph({x: 1.0 for x in range(5)}, [(x, x + 1, 1.0, 1.0) for x in range(4)])
    t = Truncation(g, 3, frozenset({0, 4}), origin=2)
    base = schrodinger_bottom(t, SchrodingerSpec(0.0, 1.0))
    err = abs(base - (2 - math.sqrt(2)))
    shift_err = max(abs(schrodinger_bottom(t, SchrodingerSpec(c, 1.0)) - (base - c))
                    for c in (0.1, 0.5, 2.0))
    tree = generate(BINARY, 5)
    tb = schrodinger_bottom(tree, SchrodingerSpec(0.0, 1.0))
    shift_err = max(shift_err, abs(schrodinger_bottom(tree, SchrodingerSpec(0.7, 1.0)) - (tb - 0.7)))
    try:
        SchrodingerSpec.gated(0.0, 1.0, 2)
        rejects = False
    except PreconditionError:
        rejects = True
    accepts = SchrodingerSpec.gated(0.0, 1.01, 2).H == 1.01
    ok = err <= 1e-10 and shift_err <= 1e-10 and rejects and accepts
    return ok, (f"path |bottom-(2-sqrt2)| {err:.1e}, shift error {shift_err:.1e}, "
                f"H=1 rejected {rejects}, H=1.01 accepted {accepts}")


CRITERIA = {
    1: ("solver oracle equivalence", criterion_1, 60),
    2: ("capacity closed forms", criterion_2, 60),
    3: ("classification suite", criterion_3, 600),
    4: ("double consistency", criterion_4, 300),
    5: ("end potential properties", criterion_5, 300),
    6: ("two-end construction", criterion_6, 300),
    7: ("inequality chain", criterion_7, 600),
    8: ("gluing", criterion_8, 300),
    9: ("max/comparison fuzz", criterion_9, 300),
    10: ("Schrodinger bottom", criterion_10, None),
}


def evaluate(n: int) -> tuple[bool, str]:
    name, fn, budget = CRITERIA[n]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = budget is None or elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    limit = f"/{budget}s" if budget else ""
    line = f"criterion {n:>2} [{status}] {name}: {detail} ({elapsed:.1f}s{limit})"
    RESULTS.append(line)
    print(line)
    return ok and in_time, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = evaluate(n)
    assert ok, line


if __name__ == "__main__":
    outcomes = [evaluate(n)[0] for n in sorted(CRITERIA)]
    sys.exit(0 if all(outcomes) else 1)
