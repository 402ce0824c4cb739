"""Zonal spherical functions of real, complex and quaternionic projective spaces.

For ``K P^{d-1}`` the zonal function of degree ``k`` is a Jacobi polynomial
``P_k^{(a, b)}`` with ``a = (d - 1) kappa / 2 - 1`` and ``b = kappa / 2 - 1``
(``kappa = dim_R K``), evaluated at ``2 t^2 - 1`` where ``t = |<x, y>|``.
Polynomials are normalised so that ``Q(1) = 1`` and are stored in the
monomial basis of ``s = t^2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gamma

import numpy as np
from numpy.polynomial import Polynomial

from .algebra import Field, KMatrix, gram
from .errors import DimensionError, ParameterError


def jacobi_params(field: Field | str, d: int) -> tuple[float, float]:
    kappa = Field.parse(field).real_dim
    return (d - 1) * kappa / 2 - 1, kappa / 2 - 1


def jacobi_eval(k: int, a: float, b: float, x):
    """``P_k^{(a, b)}(x)`` by the three-term recurrence (vectorised in ``x``)."""
    if k < 0 or int(k) != k:
        raise ParameterError("degree must be a non-negative integer")
    if not (a > -1 and b > -1):
        raise ParameterError("Jacobi parameters must exceed -1")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a - b) / 2 + (a + b + 2) * x / 2
    for n in range(2, k + 1):
        c = 2 * n + a + b
        lead = 2 * n * (n + a + b) * (c - 2)
        mid = (c - 1) * (c * (c - 2) * x + a * a - b * b)
        tail = 2 * (n + a - 1) * (n + b - 1) * c
        p_prev, p = p, (mid * p - tail * p_prev) / lead
    return p if p.ndim else float(p)


def jacobi_poly(k: int, a: float, b: float) -> Polynomial:
    """``P_k^{(a, b)}`` as a monomial-basis polynomial in ``x``."""
    if not (a > -1 and b > -1):
        raise ParameterError("Jacobi parameters must exceed -1")
    x = Polynomial([0.0, 1.0])
    p_prev = Polynomial([1.0])
    if k == 0:
        return p_prev
    p = (a - b) / 2 + (a + b + 2) / 2 * x
    for n in range(2, k + 1):
        c = 2 * n + a + b
        lead = 2 * n * (n + a + b) * (c - 2)
        mid = (c - 1) * (c * (c - 2) * x + a * a - b * b)
        tail = 2 * (n + a - 1) * (n + b - 1) * c
        p_prev, p = p, (mid * p - tail * p_prev) / lead
    return p


def jacobi_at_one(k: int, a: float) -> float:
    """``P_k^{(a, b)}(1) = binom(k + a, k)`` for real ``a``."""
    if float(a).is_integer() and a >= 0:
        return float(comb(int(a) + k, k))
    return gamma(k + a + 1) / (gamma(k + 1) * gamma(a + 1))


@dataclass(frozen=True)
class ZonalPolynomial:
    field: Field
    dim: int
    degree_index: int
    coeffs_s: tuple[float, ...]  # ascending powers of s = t^2

    def in_s(self) -> Polynomial:
        return Polynomial(self.coeffs_s)

    def in_t(self) -> Polynomial:
        """Even polynomial of degree ``2k`` in ``t``."""
        c = np.zeros(2 * len(self.coeffs_s) - 1)
        c[::2] = self.coeffs_s
        return Polynomial(c)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = jacobi_params(self.field, self.dim)
        val = jacobi_eval(self.degree_index, a, b, 2 * t * t - 1) / jacobi_at_one(self.degree_index, a)
        return val


def zonal_poly(field: Field | str, d: int, k: int) -> ZonalPolynomial:
    """Normalised zonal polynomial ``Q_{K,d}^{(k)}`` with ``Q(1) = 1``."""
    field = Field.parse(field)
    if d < 2:
        raise DimensionError("projective zonal functions need d >= 2")
    if k < 0:
        raise ParameterError("k must be non-negative")
    a, b = jacobi_params(field, d)
    p = jacobi_poly(k, a, b) / jacobi_at_one(k, a)
    q = p(Polynomial([-1.0, 2.0]))
    coeffs = np.zeros(k + 1)
    coeffs[: len(q.coef)] = q.coef
    if k == 1:
        # exact form (d s - 1)/(d - 1)
        coeffs = np.array([-1.0 / (d - 1), d / (d - 1)])
    return ZonalPolynomial(field, d, k, tuple(float(c) for c in coeffs))


def zonal_values(field: Field | str, d: int, k: int, t) -> np.ndarray:
    """Stable evaluation of the normalised ``Q^{(k)}`` at ``t`` (recurrence, no monomials)."""
    field = Field.parse(field)
    a, b = jacobi_params(field, d)
    t = np.asarray(t, dtype=float)
    return jacobi_eval(k, a, b, 2 * t * t - 1) / jacobi_at_one(k, a)


def zonal_q2_special(field: Field | str, d: int) -> Polynomial:
    """Degree-2 zonal function in the scaling used by the maximal-simplex interpolant.

    Normalised so that its value at ``beta`` is ``-beta^2`` and its slope there
    is ``-4 beta``, where ``beta^2 = 1 / (d + 2 / kappa)``.
    """
    field = Field.parse(field)
    if d < 2:
        raise DimensionError("projective zonal functions need d >= 2")
    kappa = field.real_dim
    b2 = 1.0 / (d + 2.0 / kappa)
    u = Polynomial([-1.0, 0.0, 1.0])  # t^2 - 1
    lead = (kappa / (2 * b2) + 1) / (1 - b2)
    return (kappa / (2 * b2) - kappa / 2 - 1) + (kappa / b2) * u + lead * u * u


def kernel_matrix(points: KMatrix, k: int, tol: float = 1e-9) -> np.ndarray:
    """``(Q^{(k)}(|<x_i, x_j>|))_{ij}`` for unit columns ``x_i`` of ``points``."""
    G = gram(points)
    diag = G.real_diag()
    if np.any(np.abs(diag - 1) > tol):
        raise DimensionError("kernel_matrix needs unit-norm points")
    t = np.clip(G.abs(), 0.0, 1.0)
    return zonal_values(points.field, points.rows, k, t)
