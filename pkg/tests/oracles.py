"""Independent reference computations used only by the tests.

Nothing here calls the graphpot solver: the Dirichlet oracle is nonlinear
Gauss-Seidel where every vertex update is an exact 1-d root solve of the
local flux balance, and the linear oracle is a dense numpy solve.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


def local_flux(x, nbr_vals, cond, p):
    d = nbr_vals - x
    return float(np.sum(cond * np.abs(d) ** (p - 2) * d))


def coordinate_descent(mu, edges, interior, boundary, p, tol=1e-14, max_sweeps=200000):
    """Minimise sum c |df|^p with c = w ell^(1-p) by exact coordinate minimisation.

    ``edges`` is a list of ``(u, v, w, ell)``.  Each coordinate problem is
    strictly convex in one variable, so its minimiser is the unique root of
    the (monotone) local flux, bracketed by the neighbour values.
    """
    vals = {x: 0.0 for x in interior}
    vals.update(boundary)
    nbrs = {x: [] for x in vals}
    for u, v, w, ell in edges:
        c = w * ell ** (1 - p)
        nbrs[u].append((v, c))
        nbrs[v].append((u, c))
    order = sorted(interior)
    for _ in range(max_sweeps):
        change = 0.0
        for x in order:
            ys = np.array([vals[y] for y, _ in nbrs[x]])
            cs = np.array([c for _, c in nbrs[x]])
            lo, hi = ys.min(), ys.max()
            if hi - lo < 1e-300:
                new = lo
            else:
                new = brentq(local_flux, lo, hi, args=(ys, cs, p), xtol=1e-16, rtol=1e-15)
            change = max(change, abs(new - vals[x]))
            vals[x] = new
        if change < tol:
            return vals
    raise RuntimeError("coordinate descent did not converge")


def dense_linear(mu, edges, interior, boundary):
    """Exact p = 2 solution via a dense weighted Laplacian with conductances w / ell."""
    order = sorted(interior)
    pos = {x: i for i, x in enumerate(order)}
    n = len(order)
    A = np.zeros((n, n))
    b = np.zeros(n)
    for u, v, w, ell in edges:
        c = w / ell
        for a, o in ((u, v), (v, u)):
            if a in pos:
                A[pos[a], pos[a]] += c
                if o in pos:
                    A[pos[a], pos[o]] -= c
                else:
                    b[pos[a]] += c * boundary[o]
    sol = np.linalg.solve(A, b) if n else np.zeros(0)
    out = dict(boundary)
    out.update({x: float(sol[pos[x]]) for x in order})
    return out


def energy(edges, vals, p):
    return sum(w * ell ** (1 - p) * abs(vals[u] - vals[v]) ** p for u, v, w, ell in edges)


def geometric_series_alpha_bar(alpha, terms=4000):
    """``sum_{j >= 1} j alpha^j`` summed term by term."""
    j = np.arange(1, terms + 1, dtype=float)
    return float(np.sum(j * alpha ** j))


def dense_path_dirichlet_eig(n):
    """Smallest eigenvalue of the unit path Laplacian on n interior vertices, zero ends."""
    A = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return float(np.linalg.eigvalsh(A)[0])
