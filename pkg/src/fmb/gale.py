"""Isotropic Gale duals of rank-deficient unit-diagonal matrices.

For ``A`` of size ``N`` and rank ``d`` the right kernel ``{v : A v = 0}`` has
dimension ``N - d``.  The rows of a kernel basis, whitened so that they form
a tight frame with constant ``N / (N - d)``, give the dual vectors ``y_i``.
The Gram matrix of the dual is then ``N / (N - d)`` times the projector onto
the kernel, so it does not depend on the basis chosen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_RANK_TOL, KMatrix, cholesky_hpd, gram, kernel_basis, solve
from .errors import DimensionError, NotPositiveDefiniteError, ParameterError, RankError
from .frames import TightFrame, _check_unit_diag, p_frame_energy, q_energy


@dataclass
class GaleDualResult:
    dual_frame: TightFrame
    residual: float  # max-abs entry of A times the dual Gram
    kernel: KMatrix
    holder_product: float | None = None

    @property
    def vectors(self) -> KMatrix:
        return self.dual_frame.vectors

    def dual_gram(self) -> KMatrix:
        return gram(self.dual_frame.vectors)

    def to_json(self) -> dict:
        return {
            "dual_frame": self.dual_frame.to_json(),
            "frame_constant": self.dual_frame.frame_constant,
            "residual": self.residual,
            "holder_product": self.holder_product,
        }


def gale_dual_isotropic(A: KMatrix, d: int, rank_tol: float = DEFAULT_RANK_TOL,
                        kernel: KMatrix | None = None, diag_tol: float = 1e-9) -> GaleDualResult:
    """Tight frame ``y_1, ..., y_N`` in ``K^{N-d}`` dual to the rank-``d`` matrix ``A``.

    ``kernel`` may supply any basis (as columns) of the right kernel; by
    default an orthonormal one is computed.
    """
    _check_unit_diag(A, diag_tol)
    N = A.rows
    k = N - d
    if k < 1:
        raise RankError(f"rank {d} leaves no kernel in size {N}")
    if kernel is None:
        B = kernel_basis(A, rank_tol)
        if B.cols != k:
            raise RankError(f"numerical rank is {N - B.cols}, expected {d}")
    else:
        B = kernel
        if B.field is not A.field or B.shape != (N, k):
            raise DimensionError(f"kernel basis must be {N}x{k} over {A.field.value}")
        if (A @ B).max_abs() > rank_tol * max(1.0, A.max_abs()) * N:
            raise RankError("supplied kernel basis is not annihilated by A")
    Z = B.ct()  # columns z_i
    S = Z @ Z.ct()
    try:
        L = cholesky_hpd(S * (k / N))
    except NotPositiveDefiniteError:
        raise RankError("kernel basis is singular") from None
    Y = solve(L, Z)
    frame = TightFrame(A.field, k, Y, name="gale_dual")
    resid = (A @ gram(Y)).max_abs()
    return GaleDualResult(frame, float(resid), B)


def dual_exponent(p: float) -> float:
    """``q`` with ``1/p + 1/q = 1``; ``inf`` pairs with ``1``."""
    p = float(p)
    if p < 1:
        raise ParameterError("p must be at least 1")
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1)


@dataclass(frozen=True)
class DualityReport:
    p: float
    q: float
    p_energy: float
    q_energy_root: float
    product: float
    slack: float
    row_residual: float
    N: int
    slack_tol: float = 1e-9
    residual_tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.slack >= -self.slack_tol and self.row_residual <= self.residual_tol * self.N

    def to_json(self) -> dict:
        return {
            "p": _num(self.p), "q": _num(self.q), "p_energy": self.p_energy,
            "q_energy_root": self.q_energy_root, "product": self.product,
            "slack": self.slack, "row_residual": self.row_residual, "passed": self.passed,
        }


def _num(x: float):
    return "inf" if math.isinf(x) else x


def duality_check(A: KMatrix, result: GaleDualResult, p: float) -> DualityReport:
    """Hoelder product ``||A||_p * ||G_Y||_q`` over off-diagonal entries, compared with ``N``."""
    Y = result.dual_frame.vectors
    N = A.rows
    if Y.cols != N:
        raise DimensionError("dual frame and matrix sizes differ")
    q = dual_exponent(p)
    pe = p_frame_energy(A, p)
    qe = q_energy(Y, q)
    root = qe if math.isinf(q) else qe ** (1.0 / q)
    prod = pe * root
    G = gram(Y)
    AG = A @ G
    rows = max(AG[i, i].max_abs() for i in range(N))
    result.holder_product = prod
    return DualityReport(float(p), q, pe, root, prod, prod - N, float(rows), N)
