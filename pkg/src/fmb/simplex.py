"""Dense revised simplex for small-row linear programs.

Solves ``max c^T y  s.t.  A y <= b, y >= 0`` with ``b >= 0``, starting from
the slack basis.  The problems handled here have a handful of rows (one per
polynomial coefficient) and a few hundred columns (one per grid point), so
the basis matrix is refactorised from scratch at every pivot.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    y: np.ndarray  # primal solution of the max problem
    multipliers: np.ndarray  # optimal duals = solution of min b^T x, A^T x >= c, x >= 0
    value: float
    iterations: int


def solve_max(A, b, c, tol: float = 1e-11, max_iter: int = 20000) -> LPResult:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise LPError("slack basis infeasible: right-hand side must be non-negative")
    Aext = np.hstack([A, np.eye(m)])
    cext = np.concatenate([c, np.zeros(m)])
    basis = list(range(n, n + m))
    scale = max(1.0, float(np.abs(cext).max()))
    bland = False
    stall = 0
    last_obj = -np.inf
    for it in range(max_iter):
        B = Aext[:, basis]
        xB = np.linalg.solve(B, b)
        pi = np.linalg.solve(B.T, cext[basis])
        reduced = cext - pi @ Aext
        reduced[basis] = 0.0
        candidates = np.nonzero(reduced > tol * scale)[0]
        if candidates.size == 0:
            y = np.zeros(n + m)
            y[basis] = xB
            return LPResult(y[:n], pi, float(cext[basis] @ xB), it)
        j = int(candidates[0]) if bland else int(candidates[np.argmax(reduced[candidates])])
        d = np.linalg.solve(B, Aext[:, j])
        pos = d > tol
        if not np.any(pos):
            raise LPError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xB[pos], 0.0) / d[pos]
        rmin = ratios.min()
        ties = np.nonzero(ratios <= rmin + 1e-14)[0]
        leave = int(min(ties, key=lambda i: basis[i])) if bland else int(ties[np.argmax(d[ties])])
        basis[leave] = j
        obj = float(cext[basis] @ np.linalg.solve(Aext[:, basis], b))
        if obj <= last_obj + 1e-15:
            stall += 1
            if stall > 50:
                bland = True
        else:
            stall = 0
        last_obj = obj
    raise LPError("simplex iteration limit reached")
