"""Gram families built from copies of a tight frame, and the sharp codes they contain.

For a unit-diagonal Hermitian ``C`` with top eigenvalue ``lambda`` of
multiplicity ``k`` and an integer ``b >= 1`` the matrices

    alpha I + beta I (x) J_b + gamma C (x) J_b

with ``beta, gamma`` fixed by ``alpha`` are Gram matrices of ``bn`` unit
vectors in ``K^{bn-k}``.  Indices run as ``i*b + a`` for block ``i`` and copy ``a``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import Field, KMatrix, hermitian_defect, herm_eigvals, numerical_rank
from .bounds import p_frame_energy_lower_bound
from .errors import ParameterError, VerificationError
from .frames import TIGHT_SIMPLICES, TightFrame, catalog, p_frame_energy, welch_deviation

CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class FamilySpec:
    base_gram: KMatrix
    b: int
    lam: float
    k: int
    alpha: float

    @property
    def n(self) -> int:
        return self.base_gram.rows

    @property
    def beta_coef(self) -> float:
        b, lam, a = self.b, self.lam, self.alpha
        return (-b * lam + (b * lam - 1) * a) / (b * (1 - lam))

    @property
    def gamma_coef(self) -> float:
        b, lam, a = self.b, self.lam, self.alpha
        return (b + (1 - b) * a) / (b * (1 - lam))

    @property
    def alpha_max(self) -> float:
        return math.inf if self.b == 1 else self.b / (self.b - 1)


def top_eigen(C: KMatrix, tol: float = CLUSTER_TOL) -> tuple[float, int]:
    """Largest eigenvalue of ``C`` and its multiplicity (clustered at ``tol * lambda``)."""
    ev = herm_eigvals(C)
    lam = float(ev[-1])
    k = int(np.sum(ev >= lam - tol * max(1.0, abs(lam))))
    return lam, k


def family_spec(C: KMatrix, b: int, alpha: float | None = None) -> FamilySpec:
    """Spec for ``C`` and ``b``; for ``b = 1`` the matrix does not depend on ``alpha``."""
    if b < 1 or int(b) != b:
        raise ParameterError("b must be a positive integer")
    lam, k = top_eigen(C)
    if lam <= 1 + CLUSTER_TOL:
        raise ParameterError("base Gram must differ from the identity")
    if b == 1:
        alpha = lam / (lam - 1)
    elif alpha is None:
        raise ParameterError("alpha is required when b > 1")
    return FamilySpec(C, int(b), lam, k, float(alpha))


def family_matrix(spec: FamilySpec) -> KMatrix:
    """``alpha I + beta I (x) J_b + gamma C (x) J_b``."""
    C, b, n = spec.base_gram, spec.b, spec.n
    if spec.lam <= 1 + CLUSTER_TOL:
        raise ParameterError("base Gram must differ from the identity")
    if b > 1 and not (-1e-12 <= spec.alpha <= spec.alpha_max + 1e-12):
        raise ParameterError(f"alpha must lie in [0, {spec.alpha_max}]")
    J = np.ones((b, b))
    fld = C.field
    out = KMatrix.identity(fld, n * b) * spec.alpha
    out = out + KMatrix.identity(fld, n).kron_real(J) * spec.beta_coef
    return out + C.kron_real(J) * spec.gamma_coef


def predicted_spectrum(spec: FamilySpec) -> np.ndarray:
    """Eigenvalues ``alpha + (beta + gamma lambda_i) b`` and ``alpha`` with multiplicity ``bn - n``."""
    ev = herm_eigvals(spec.base_gram)
    top = spec.alpha + (spec.beta_coef + spec.gamma_coef * ev) * spec.b
    rest = np.full(spec.n * spec.b - spec.n, spec.alpha)
    return np.sort(np.concatenate([top, rest]))


@dataclass(frozen=True)
class FamilyReport:
    unit_diag: float
    hermitian: float
    min_eig: float
    rank: int
    expected_rank: int
    annihilation: float
    spectrum_error: float
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return (
            self.unit_diag <= self.tol
            and self.hermitian <= self.tol
            and self.min_eig >= -self.tol
            and self.rank == self.expected_rank
            and self.annihilation <= self.tol
            and self.spectrum_error <= self.tol
        )

    def to_json(self) -> dict:
        return {**self.__dict__, "passed": self.passed}


def family_checks(spec: FamilySpec, A: KMatrix | None = None, tol: float = 1e-9) -> FamilyReport:
    A = family_matrix(spec) if A is None else A
    ev = herm_eigvals(A)
    ann = (A @ spec.base_gram.kron_real(np.ones((spec.b, spec.b)))).max_abs()
    return FamilyReport(
        unit_diag=float(np.abs(A.real_diag() - 1).max()),
        hermitian=hermitian_defect(A),
        min_eig=float(ev[0]),
        rank=numerical_rank(A),
        expected_rank=spec.n * spec.b - spec.k,
        annihilation=float(ann),
        spectrum_error=float(np.abs(ev - predicted_spectrum(spec)).max()),
        tol=tol,
    )


# ---------------------------------------------------------------------- sharp codes


def _exponents(p: float) -> tuple[float, float]:
    """``(q, (q - p)/p)``; the second is ``-1`` in the limit ``p = inf``."""
    p = float(p)
    if math.isinf(p):
        return 1.0, -1.0
    if p <= 1:
        raise ParameterError("p must exceed 1")
    q = p / (p - 1)
    return q, (q - p) / p


def sharp_alpha(beta: float, M: int, k: int, b: int, p: float) -> float:
    """``1 + 1/(b - 1 + beta^{(q-p)/p} b (M/k - 1))``."""
    _, e = _exponents(p)
    return 1.0 + 1.0 / (b - 1 + beta ** e * b * (M / k - 1))


def sharp_energy_formula(beta: float, M: int, b: int, p: float) -> float:
    """``bM / ((bM)^2 (beta^q + (1 - beta^q)/M) - bM)^{1 - 1/p}``."""
    q, _ = _exponents(p)
    n = b * M
    expo = 1.0 if math.isinf(p) else 1.0 - 1.0 / p
    return n / (n * n * (beta ** q + (1 - beta ** q) / M) - n) ** expo


@dataclass(frozen=True)
class SharpReport:
    name: str
    field: Field
    b: int
    p: float
    M: int
    k: int
    beta: float
    alpha: float
    rank: int
    expected_rank: int
    energy: float
    bound: float
    lower_bound: float | None
    family: FamilyReport
    tol: float = 1e-10

    @property
    def slack(self) -> float:
        return self.energy - self.bound

    @property
    def passed(self) -> bool:
        ok = abs(self.slack) <= self.tol * max(1.0, abs(self.bound))
        if self.lower_bound is not None:
            ok = ok and abs(self.energy - self.lower_bound) <= self.tol * max(1.0, abs(self.bound))
        return ok and self.rank == self.expected_rank and self.family.passed

    def to_json(self) -> dict:
        return {
            "name": self.name, "field": self.field.value, "b": self.b,
            "p": "inf" if math.isinf(self.p) else self.p, "M": self.M, "k": self.k,
            "beta": self.beta, "alpha": self.alpha, "rank": self.rank,
            "expected_rank": self.expected_rank, "energy": self.energy, "bound": self.bound,
            "lower_bound": self.lower_bound, "slack": self.slack, "passed": self.passed,
            "family": self.family.to_json(),
        }


def _base_simplex(simplex: str | TightFrame) -> TightFrame:
    if isinstance(simplex, TightFrame):
        return simplex
    if simplex not in TIGHT_SIMPLICES:
        raise ParameterError(f"unknown tight simplex {simplex!r}; choose from {list(TIGHT_SIMPLICES)}")
    return catalog(simplex)


def sharp_code(simplex: str | TightFrame, b: int, p: float) -> tuple[KMatrix, SharpReport]:
    """Gram matrix attaining the ``p``-frame-energy value of ``b`` copies of a tight simplex."""
    base = _base_simplex(simplex)
    M, k = base.size, base.dim
    C = base.gram()
    off = C.abs()[~np.eye(M, dtype=bool)]
    beta = float(off.mean())
    if welch_deviation(base, beta) > 1e-10:
        raise ParameterError("base configuration is not equiangular")
    lam, mult = top_eigen(C)
    if abs(lam - M / k) > 1e-9 or mult != k:
        raise VerificationError(f"tight-frame spectrum check failed: lambda={lam}, k={mult}")
    alpha = sharp_alpha(beta, M, k, b, p)
    spec = FamilySpec(C, int(b), M / k, k, alpha if b > 1 else (M / k) / (M / k - 1))
    A = family_matrix(spec)
    fam = family_checks(spec, A)
    energy = p_frame_energy(A, p)
    bound = sharp_energy_formula(beta, M, b, p)
    lower = None
    if float(p) >= 2 and _is_maximal(base):
        lower = p_frame_energy_lower_bound(base.field, b * M, b * M - k, p).moment
    rep = SharpReport(base.name or "custom", base.field, int(b), float(p), M, k, beta,
                      spec.alpha, fam.rank, b * M - k, energy, bound, lower, fam)
    return A, rep


def _is_maximal(frame: TightFrame) -> bool:
    d, kappa = frame.dim, frame.field.real_dim
    return d >= 2 and frame.size == d + (d * d - d) * kappa // 2


def sign_class_count(A: KMatrix, max_size: int = 16) -> int:
    """Number of distinct matrices ``D A D`` over diagonal sign matrices ``D`` (real case)."""
    if A.field is not Field.R:
        raise ParameterError("sign classes are only enumerated for real matrices")
    N = A.rows
    if N > max_size:
        raise ParameterError(f"enumeration limited to N <= {max_size}")
    X = A.raw
    seen = set()
    for signs in itertools.product((1.0, -1.0), repeat=N):
        s = np.array(signs)
        seen.add((np.round(s[:, None] * X * s[None, :], 12) + 0.0).tobytes())
    return len(seen)
