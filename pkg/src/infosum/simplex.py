"""Dense tableau simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

Bland's rule picks both the entering and the leaving variable, so the method
terminates without cycling. The origin is feasible because ``b >= 0``, so no
phase one is needed.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-12


class UnboundedError(ArithmeticError):
    pass


def simplex_max(c, A, b, eps: float = EPS, max_iter: int = 10_000) -> tuple[np.ndarray, float]:
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")

    # rows 0..m-1 constraints, row m the objective (reduced costs, negated)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))

    for _ in range(max_iter):
        entering = next((j for j in range(n + m) if T[m, j] < -eps), None)
        if entering is None:
            break
        col = T[:m, entering]
        rows = [i for i in range(m) if col[i] > eps]
        if not rows:
            raise UnboundedError("objective is unbounded")
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        leaving = min(
            (i for i, r in zip(rows, ratios) if r <= best + eps * max(1.0, abs(best))),
            key=lambda i: basis[i],
        )
        T[leaving] /= T[leaving, entering]
        for i in range(m + 1):
            if i != leaving and T[i, entering] != 0.0:
                T[i] -= T[i, entering] * T[leaving]
        basis[leaving] = entering
    else:
        raise RuntimeError("simplex did not terminate")

    x = np.zeros(n + m)
    for i, var in enumerate(basis):
        x[var] = T[i, -1]
    x = np.clip(x[:n], 0.0, None)
    return x, float(c @ x)
