"""Brute-force LP optimum by enumerating basic feasible solutions.

For ``max c.x  s.t.  A x <= b, x >= 0`` every vertex is the solution of
``k`` linearly independent tight constraints drawn from the rows of ``A``
and the coordinate hyperplanes. Enumerate them all, keep the feasible ones.
"""

from __future__ import annotations

import itertools

import numpy as np


def vertex_optimum(c, A, b, tol: float = 1e-9) -> float:
    c, A, b = (np.asarray(v, dtype=float) for v in (c, A, b))
    m, k = A.shape
    G = np.vstack([A, -np.eye(k)])
    h = np.concatenate([b, np.zeros(k)])
    best = -np.inf
    for rows in itertools.combinations(range(m + k), k):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x <= h + tol):
            best = max(best, float(c @ x))
    return best
