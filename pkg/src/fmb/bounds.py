"""Upper bounds on moments of isotropic measures and energies of tight frames,
and the lower bounds on p-frame energies they imply.

An auxiliary function is written ``h(t) = a_0 + a_1 t^2 + sum_{k>=2} a_k Q_k(t)``
with ``a_0, a_1 >= 0`` and ``a_k <= 0``; if ``h(t) >= t^q`` on ``[0, 1]`` then
every isotropic measure on ``K^d`` has ``q``-th moment at most
``a_0 + a_1 / d`` and every tight frame of ``N`` vectors with frame constant
``N / d`` has ``q``-energy at most ``N^2 (a_0 + a_1 / d) - N h(1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from . import poly as _poly
from .algebra import Field
from .errors import DimensionError, ParameterError
from .poly import NonnegCertificate, certify_ladder, chebyshev_nodes01, transformed
from .simplex import LPError, solve_max
from .zonal import zonal_poly, zonal_q2_special, zonal_values

SIGN_TOL = 1e-12
EQUAL_TOL = 1e-10


@dataclass(frozen=True)
class SimplexParams:
    beta: float
    M: int
    beta_sq: Fraction


@dataclass
class BoundResult:
    value: float
    coefficients: np.ndarray
    certificate: NonnegCertificate | None
    sign_report: dict
    rigorous: bool
    basis: str = "zonal"
    meta: dict = field(default_factory=dict)

    @property
    def certified_value(self) -> float:
        """Value after accounting for the certificate's constant inflation."""
        if self.certificate is None or not self.certificate.inflation:
            return self.value
        return self.value + self.meta.get("inflation_weight", 1.0) * self.certificate.inflation

    def to_json(self) -> dict:
        return {
            "value": float(self.value),
            "certified_value": float(self.certified_value),
            "coefficients": [float(c) for c in self.coefficients],
            "basis": self.basis,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "sign_report": self.sign_report,
            "rigorous": bool(self.rigorous),
            **{k: v for k, v in self.meta.items() if k != "inflation_weight"},
        }


def _check_q(q: float) -> float:
    q = float(q)
    if not 1.0 <= q <= 2.0:
        raise ParameterError(f"q must lie in [1, 2], got {q}")
    return q


def sign_report(coeffs: Sequence[float], tol: float = SIGN_TOL) -> dict:
    c = list(coeffs)
    rep = {
        "a0_nonneg": bool(c[0] >= -tol),
        "a1_nonneg": bool(len(c) < 2 or c[1] >= -tol),
        "higher_nonpos": bool(all(x <= tol for x in c[2:])),
    }
    rep["ok"] = all(rep.values())
    return rep


# ---------------------------------------------------------------------- simplex constants


def _simplex_constants(field: Field | str, dim: int) -> SimplexParams:
    field = Field.parse(field)
    if dim < 1:
        raise DimensionError("dimension must be positive")
    kappa = field.real_dim
    beta_sq = Fraction(1) / (dim + Fraction(2, kappa))
    M = dim + (dim * dim - dim) * kappa // 2
    return SimplexParams(math.sqrt(beta_sq), int(M), beta_sq)


def max_simplex_params(field: Field | str, d: int) -> SimplexParams:
    """Common modulus ``beta`` and size ``M`` of a maximal simplex in ``K P^{d-1}``."""
    if d < 2:
        raise DimensionError("maximal simplex parameters need d >= 2")
    return _simplex_constants(field, d)


def welch_bound(field: Field | str, d: int, N: int) -> float:
    """Smallest possible maximal modulus ``sqrt((N - d) / (d (N - 1)))`` for ``N`` lines."""
    if N < 2:
        raise ParameterError("welch_bound needs N >= 2")
    if d < 1:
        raise DimensionError("d must be positive")
    return math.sqrt(max(0.0, (N - d) / (d * (N - 1))))


# ---------------------------------------------------------------------- auxiliary polynomials


def h_polynomial(field: Field | str, d: int, coeffs: Sequence[float]) -> Polynomial:
    """``a_0 + a_1 t^2 + sum_{k>=2} a_k Q_k(t)`` with normalised zonal ``Q_k``."""
    c = list(coeffs)
    out = Polynomial([c[0]])
    if len(c) > 1:
        out = out + Polynomial([0.0, 0.0, c[1]])
    for k, a in enumerate(c[2:], start=2):
        if a:
            out = out + a * zonal_poly(field, d, k).in_t()
    return _poly.trim(out)


def _yudin_frame_value(N: int, d: int, a_mean: float, h1: float) -> float:
    return N * N * a_mean - N * h1


def etf_energy_bound(field: Field | str, d: int, N: int, q: float) -> BoundResult:
    """Upper bound ``(N^2 - N) welch^q`` on the ``q``-energy of a tight frame.

    The auxiliary function is the tangent ``a_0 + a_1 t^2`` to ``t^q`` (as a
    function of ``t^2``) at the Welch modulus.
    """
    field = Field.parse(field)
    q = _check_q(q)
    if N < d:
        raise ParameterError("a tight frame with frame constant N/d needs N >= d")
    if N == d:
        return BoundResult(0.0, np.zeros(2), None, sign_report([0.0, 0.0]), True,
                           basis="monomial", meta={"kind": "etf", "N": N, "d": d, "q": q})
    alpha = welch_bound(field, d, N)
    a1 = q / 2 * alpha ** (q - 2)
    a0 = (2 - q) / 2 * alpha ** q
    h = Polynomial([a0, 0.0, a1])
    cert = certify_ladder(h, q)
    value = (N * N - N) * alpha ** q
    via_coeffs = _yudin_frame_value(N, d, a0 + a1 / d, a0 + a1)
    rep = sign_report([a0, a1])
    return BoundResult(
        value,
        np.array([a0, a1]),
        cert,
        rep,
        bool(rep["ok"] and cert.certified),
        basis="monomial",
        meta={"kind": "etf", "N": N, "d": d, "q": q, "welch": alpha,
              "value_from_coefficients": via_coeffs, "inflation_weight": N * N - N},
    )


def moment_closed_form(field: Field | str, d: int, q: float) -> float:
    """``beta^q + (1 - beta^q) / M``; exactly ``1/d`` at ``q = 2``."""
    sp = max_simplex_params(field, d)
    if q == 2:
        return float(sp.beta_sq + (1 - sp.beta_sq) / sp.M)
    bq = sp.beta ** q
    return bq + (1 - bq) / sp.M


def moment_coefficients(field: Field | str, d: int, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients ``(a_0, a_1, a_2)`` of the maximal-simplex interpolant.

    Returns the solution of the 3x3 interpolation system and the explicit
    closed-form expressions, computed independently.  ``a_2`` multiplies
    :func:`zonal_q2_special`.
    """
    field = Field.parse(field)
    kappa = field.real_dim
    sp = max_simplex_params(field, d)
    b, b2 = sp.beta, float(sp.beta_sq)
    c = kappa / (2 * b2)
    A = np.array([[1.0, 1.0, c - kappa / 2 - 1], [1.0, b2, -b2], [0.0, 2 * b, -4 * b]])
    rhs = np.array([1.0, b ** q, q * b ** (q - 1)])
    solved = np.linalg.solve(A, rhs)
    r = (1 - b ** q) / (1 - b2)
    g = q * b ** (q - 2) / 2
    a2 = (r - g) / (c + 1)
    a1 = (2 * r + (c - 1) * g) / (c + 1)
    a0 = b ** q - b2 * (r + c * g) / (c + 1)
    return solved, np.array([a0, a1, a2])


def moment_bound(field: Field | str, d: int, q: float) -> BoundResult:
    """Upper bound on the ``q``-th moment of any isotropic measure on ``K^d``."""
    field = Field.parse(field)
    q = _check_q(q)
    if d < 2:
        raise DimensionError("moment_bound needs d >= 2")
    solved, closed = moment_coefficients(field, d, q)
    h = Polynomial([solved[0], 0.0, solved[1]]) + solved[2] * zonal_q2_special(field, d)
    cert = certify_ladder(_poly.trim(h), q)
    rep = sign_report(solved)
    sp = max_simplex_params(field, d)
    return BoundResult(
        moment_closed_form(field, d, q),
        solved,
        cert,
        rep,
        bool(rep["ok"] and cert.certified),
        basis="1, t^2, Q2(special)",
        meta={"kind": "measure", "d": d, "q": q, "beta": sp.beta, "M": sp.M,
              "closed_form_coefficients": [float(x) for x in closed],
              "value_from_coefficients": float(solved[0] + solved[1] / d)},
    )


def measure_frame_energy_bound(field: Field | str, d: int, N: int, q: float) -> float:
    """``N^2 * moment_bound - N``: a ``q``-energy bound for any tight frame of size ``N``."""
    if N < 1:
        raise ParameterError("N must be positive")
    return N * N * moment_closed_form(field, d, _check_q(q)) - N


def best_frame_energy_bound(field: Field | str, d: int, N: int, q: float) -> tuple[float, str]:
    """The smaller of the two frame bounds, tagged ``etf``, ``max_simplex`` or ``equal``.

    Raises ``AssertionError`` if the two bounds are not ordered as ``N`` is
    to the maximal-simplex size ``M``.
    """
    q = _check_q(q)
    e = etf_energy_bound(field, d, N, q).value
    m = measure_frame_energy_bound(field, d, N, q)
    M = max_simplex_params(field, d).M
    tol = EQUAL_TOL * max(1.0, abs(e))
    if abs(m - e) <= tol:
        tag = "equal"
    elif e < m:
        tag = "etf"
    else:
        tag = "max_simplex"
    expected = "equal" if (q == 2 or N == M) else ("etf" if N < M else "max_simplex")
    if tag != expected:
        raise AssertionError(f"bound ordering violated: got {tag}, expected {expected} (N={N}, M={M})")
    return min(e, m), tag


def infinity_moment_bound(N: int, d: int) -> float:
    """``N / (2d)``: largest possible off-diagonal modulus in a tight frame with constant ``N/d``."""
    if N < 2 or d < 1:
        raise ParameterError("need N >= 2 and d >= 1")
    return N / (2 * d)


def yudin_lower_bound(field: Field | str, d: int, N: int, h_coeffs: Sequence[float]) -> float:
    """``N^2 a_0 - N h(1)`` for ``h = sum a_k Q_k`` with all ``a_k >= 0`` (normalised zonal basis).

    If ``f >= h`` on ``[0, 1]`` this bounds ``sum_{i != j} f(|<y_i, y_j>|)`` from
    below for any ``N`` unit vectors in ``K^d``.
    """
    c = [float(x) for x in h_coeffs]
    if any(x < 0 for x in c):
        raise ParameterError("all zonal coefficients must be non-negative")
    return N * N * c[0] - N * sum(c)  # Q_k(1) = 1


def monomial_to_zonal(field: Field | str, d: int, h: Polynomial) -> np.ndarray:
    """Expand an even polynomial in ``t`` over the normalised zonal basis."""
    c = np.asarray(h.coef, dtype=float)
    if np.any(np.abs(c[1::2]) > 1e-14):
        raise ParameterError("polynomial must be even in t")
    s = c[::2]
    K = len(s) - 1
    cols = np.zeros((K + 1, K + 1))
    for k in range(K + 1):
        zk = zonal_poly(field, d, k).coeffs_s
        cols[: len(zk), k] = zk
    return np.linalg.solve(cols, s)


@dataclass(frozen=True)
class PFrameBound:
    moment: float
    welch: float
    value: float
    q: float
    dual_dim: int


def p_frame_energy_lower_bound(field: Field | str, N: int, d: int, p: float) -> PFrameBound:
    """Lower bounds on ``(sum_{i != j} |A_ij|^p)^{1/p}`` for rank-``d`` unit-diagonal ``A``.

    ``moment`` uses the isotropic-measure bound in the dual dimension
    ``N - d``; ``welch`` is the tight-simplex bound; ``value`` is the larger.
    ``p = inf`` is handled through ``q = 1``.
    """
    if N <= d:
        raise ParameterError("need N > d")
    p = float(p)
    if p < 2:
        raise ParameterError("p must be at least 2")
    k = N - d
    sp = _simplex_constants(field, k)
    if math.isinf(p):
        q, expo = 1.0, 1.0
    else:
        q, expo = p / (p - 1), 1 - 1 / p
    if q == 2:
        mom = float(sp.beta_sq + (1 - sp.beta_sq) / sp.M)
    else:
        bq = sp.beta ** q
        mom = bq + (1 - bq) / sp.M
    moment = N / (N * N * mom - N) ** expo
    welch_side = (1.0 if math.isinf(p) else (N * (N - 1)) ** (1 / p)) * math.sqrt((N - d) / (d * (N - 1)))
    return PFrameBound(moment, welch_side, max(moment, welch_side), q, k)


# ---------------------------------------------------------------------- LP bound


def lp_bound(
    field: Field | str,
    d: int,
    q_rational: tuple[int, int],
    degree: int,
    grid: int = 400,
    mode: str = "measure",
    N: int | None = None,
    max_rounds: int = 3,
) -> BoundResult:
    """Discretised LP for the best auxiliary function of a given even degree.

    The constraint ``h(t_i) >= t_i^q`` is imposed on Chebyshev-Lobatto nodes
    of ``[0, 1]``.  The optimum is then certified on the whole interval; if
    certification fails ``a_0`` is raised by the computed worst violation,
    at most ``max_rounds`` times.
    """
    field = Field.parse(field)
    m_, n_ = q_rational
    q = m_ / n_
    _check_q(q)
    if degree < 2 or degree % 2:
        raise ParameterError("degree must be even and at least 2")
    if grid < 10 * degree:
        raise ParameterError("grid must have at least 10 * degree points")
    if d < 2:
        raise DimensionError("lp_bound needs d >= 2")
    K = degree // 2
    t = chebyshev_nodes01(grid)
    cols = [np.ones_like(t), t * t] + [zonal_values(field, d, k, t) for k in range(2, K + 1)]
    Phi = np.array(cols).T  # grid x (K+1)
    flip = np.array([1.0, 1.0] + [-1.0] * (K - 1))  # a_k = -b_k for k >= 2
    if mode == "measure":
        cost = np.array([1.0, 1.0 / d] + [0.0] * (K - 1))
        const = 0.0
    elif mode == "frame":
        if N is None or N < 2:
            raise ParameterError("frame mode needs N >= 2")
        if N < d:
            raise ParameterError("frame mode needs N >= d")
        cost = np.array([N * N - N, N * N / d - N] + [-float(N)] * (K - 1))
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    cb = cost * flip  # cost on the sign-normalised variables, all >= 0
    assert np.all(cb >= -1e-15), "slack basis must be dual feasible"
    try:
        res = solve_max((Phi * flip).T, cb, t ** q)
    except LPError as exc:
        raise AssertionError(f"LP unexpectedly failed: {exc}") from None
    coeffs = res.multipliers * flip
    coeffs[np.abs(coeffs) < 1e-15] = 0.0

    def objective(c):
        if mode == "measure":
            return float(c[0] + c[1] / d)
        return float(N * N * (c[0] + c[1] / d) - N * c.sum())

    lp_value = objective(coeffs)
    total_shift = 0.0
    cert = None
    h = h_polynomial(field, d, coeffs)
    for _ in range(max_rounds + 1):
        cert = certify_ladder(h, q)
        if cert.certified:
            break
        worst = _poly.min_on_unit_interval(transformed(h, (m_, n_)))
        shift = max(0.0, -worst) * (1 + 1e-9) + 1e-14
        coeffs = coeffs.copy()
        coeffs[0] += shift
        total_shift += shift
        h = h_polynomial(field, d, coeffs)
    rep = sign_report(coeffs)
    rigorous = bool(cert.certified and rep["ok"])
    weight = 1.0 if mode == "measure" else float(N * N - N)
    return BoundResult(
        objective(coeffs),
        coeffs,
        cert,
        rep,
        rigorous,
        basis="1, t^2, Q_k (Q_k(1)=1)",
        meta={"kind": f"lp-{mode}", "d": d, "N": N, "q": q, "degree": degree, "grid": grid,
              "lp_value": lp_value, "a0_shift": total_shift, "lp_iterations": res.iterations,
              "inflation_weight": weight},
    )
