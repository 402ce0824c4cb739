"""Real polynomials, Hermite interpolation, and exact nonnegativity certificates.

Polynomials are :class:`numpy.polynomial.Polynomial` objects (ascending
coefficients).  Certification converts the floating-point coefficients to
exact rationals (every double is one) and decides the sign pattern on
``[0, 1]`` with Sturm sequences over the integers, so a ``certified``
verdict is a statement about the polynomial actually stored, not about a
rounded model of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ParameterError

CERTIFIED = "certified"
SAMPLED_ONLY = "sampled-only"
FAILED = "failed"

EXACT_MAX_DEGREE = 64
SAMPLE_COUNT = 4096

# ---------------------------------------------------------------------- helpers


def trim(p: Polynomial, tol: float = 0.0) -> Polynomial:
    c = np.array(p.coef, dtype=float)
    while len(c) > 1 and abs(c[-1]) <= tol:
        c = c[:-1]
    return Polynomial(c)


def rational_exponent(q: float, max_den: int = 64) -> tuple[int, int] | None:
    """``(m, n)`` with ``m / n == q`` exactly as doubles, else None."""
    fr = Fraction(q).limit_denominator(max_den)
    if fr > 0 and float(fr) == float(q):
        return fr.numerator, fr.denominator
    return None


def substitute_power(h: Polynomial, n: int) -> Polynomial:
    """``h(w^n)`` as a polynomial in ``w``."""
    c = np.zeros((len(h.coef) - 1) * n + 1)
    c[::n] = h.coef
    return Polynomial(c)


def transformed(h: Polynomial, q_rational: tuple[int, int], direction: str = "h_minus_f") -> Polynomial:
    """``h(w^n) - w^m`` (or its negative) for ``q = m / n``."""
    m, n = q_rational
    p = substitute_power(h, n) - Polynomial([0.0] * m + [1.0])
    if direction == "f_minus_h":
        p = -p
    elif direction != "h_minus_f":
        raise ParameterError(f"unknown direction {direction!r}")
    return trim(p)


# ---------------------------------------------------------------------- exact integer polynomials
# Ascending lists of Python ints; the zero polynomial is [].


def _to_fractions(coeffs: Iterable) -> list[Fraction]:
    return [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]


def _to_int_poly(coeffs: Iterable) -> list[int]:
    fr = _to_fractions(coeffs)
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    out = [int(c * den) for c in fr]
    return _strip(_primitive(out))


def _strip(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _primitive(p: list) -> list:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    if g > 1:
        p = [c // g for c in p]
    return p


def _deriv_int(p: list[int]) -> list[int]:
    return _strip([i * c for i, c in enumerate(p)][1:])


def _neg_rem(a: list[int], b: list[int]) -> list[int]:
    """``-rem(a, b)`` up to a positive factor, made primitive."""
    r = a[:]
    db = len(b) - 1
    lb = b[-1]
    steps = 0
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for i, bi in enumerate(b):
            r[i + shift] -= lr * bi
        r.pop()
        _strip(r)
        steps += 1
    if lb < 0 and steps % 2 == 1:
        r = [-x for x in r]
    return _primitive([-x for x in r])


def _sign_at(p: list[int], x: Fraction) -> int:
    if not p:
        return 0
    num, den = x.numerator, x.denominator
    deg = len(p) - 1
    total = 0
    for i, c in enumerate(p):
        total += c * num ** i * den ** (deg - i)
    return (total > 0) - (total < 0)


def _sturm_chain(p: list[int]) -> list[list[int]]:
    chain = [p, _primitive(_deriv_int(p))]
    while chain[-1] and len(chain[-1]) > 1:
        r = _neg_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(r)
    return [c for c in chain if c]


def _variations(chain: Sequence[list[int]], x: Fraction) -> int:
    signs = [s for s in (_sign_at(c, x) for c in chain) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


# Fraction polynomial arithmetic for the rare square-free decomposition path.


def _fr_strip(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _fr_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = a[:]
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lb = b[-1]
    while a and len(a) >= len(b):
        coef = a[-1] / lb
        shift = len(a) - len(b)
        q[shift] = coef
        for i, bi in enumerate(b):
            a[i + shift] -= coef * bi
        a.pop()
        _fr_strip(a)
    return _fr_strip(q), a


def _fr_monic(p: list[Fraction]) -> list[Fraction]:
    return [c / p[-1] for c in p]


def _fr_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b:
        _, r = _fr_divmod(a, b)
        a, b = b, r
    return _fr_monic(a) if a else a


def _fr_deriv(p: list[Fraction]) -> list[Fraction]:
    return _fr_strip([i * c for i, c in enumerate(p)][1:])


def _fr_sub(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _fr_strip([x - y for x, y in zip(a, b)])


def squarefree_factors(coeffs: Iterable) -> list[list[Fraction]]:
    """Yun's decomposition ``p = c * prod_i f_i^i`` (``f_i`` monic, square-free, coprime).

    Returns ``[f_1, f_2, ...]``; constant factors appear as ``[1]``.
    """
    f = _fr_strip(_to_fractions(coeffs))
    if len(f) <= 1:
        return []
    df = _fr_deriv(f)
    a = _fr_gcd(f, df)
    b, _ = _fr_divmod(f, a)
    c, _ = _fr_divmod(df, a)
    d = _fr_sub(c, _fr_deriv(b))
    out = []
    while len(b) > 1:
        a = _fr_gcd(b, d) if d else _fr_monic(b)
        out.append(a)
        b, _ = _fr_divmod(b, a)
        c, _ = _fr_divmod(d, a) if d else ([], [])
        d = _fr_sub(c, _fr_deriv(b))
    return out


# ---------------------------------------------------------------------- Sturm counting


def _as_coeffs(p) -> list:
    if isinstance(p, Polynomial):
        return [float(c) for c in p.coef]
    return list(p)


def _count_exact(int_p: list[int], a: Fraction, b: Fraction) -> int:
    g_chain = _sturm_chain(int_p)
    g = g_chain[-1]
    if len(g) > 1 and (_sign_at(g, a) == 0 or _sign_at(g, b) == 0):
        q, _ = _fr_divmod(_to_fractions(int_p), _to_fractions(g))
        g_chain = _sturm_chain(_to_int_poly(q))
    return _variations(g_chain, a) - _variations(g_chain, b)


def _count_float(p: Sequence[float], a: float, b: float, rel_tol: float = 1e-12) -> int:
    def norm(c):
        c = np.asarray(c, dtype=float)
        m = np.abs(c).max() if c.size else 0.0
        if m == 0:
            return c[:0]
        c = c / m
        c[np.abs(c) < rel_tol] = 0.0
        nz = np.nonzero(c)[0]
        return c[: nz[-1] + 1] if nz.size else c[:0]

    chain = [norm(p)]
    chain.append(norm(Polynomial(chain[0]).deriv().coef))
    while chain[-1].size > 1:
        _, r = divmod(Polynomial(chain[-2]), Polynomial(chain[-1]))
        r = norm(-r.coef)
        if r.size == 0:
            break
        chain.append(r)

    def var(x):
        vals = [Polynomial(c)(x) for c in chain if c.size]
        s = [np.sign(v) for v in vals if v != 0]
        return sum(1 for u, v in zip(s, s[1:]) if u != v)

    return var(a) - var(b)


def sturm_roots(p, a: float, b: float, exact: bool = True) -> int:
    """Number of distinct real roots of ``p`` in ``(a, b]``.

    ``p`` is a :class:`Polynomial` or a sequence of ascending coefficients
    (floats, ints or :class:`fractions.Fraction`).  The exact mode works on
    the rational values of the coefficients; the float mode normalises each
    remainder by its largest coefficient.
    """
    if not a < b:
        raise ParameterError("degenerate interval: need a < b")
    coeffs = _as_coeffs(p)
    if exact:
        ip = _to_int_poly(coeffs)
        if not ip:
            raise ParameterError("sturm_roots of the zero polynomial")
        return _count_exact(ip, Fraction(a), Fraction(b))
    if not np.any(np.asarray(coeffs, dtype=float)):
        raise ParameterError("sturm_roots of the zero polynomial")
    return _count_float(np.asarray(coeffs, dtype=float), a, b)


# ---------------------------------------------------------------------- certificates


@dataclass
class NonnegCertificate:
    transformed_poly: Polynomial
    sturm_root_count: int
    sample_sign: int
    q_rational: tuple[int, int] | None
    status: str
    min_sample: float = float("nan")
    inflation: float = 0.0
    odd_roots: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "roots_in_01": int(self.sturm_root_count),
            "transform": list(self.q_rational) if self.q_rational else None,
            "poly": [float(c) for c in self.transformed_poly.coef],
            "inflation": float(self.inflation),
            "min_sample": float(self.min_sample),
        }


def chebyshev_nodes01(n: int) -> np.ndarray:
    """Chebyshev-Lobatto points on ``[0, 1]`` including both endpoints."""
    return (1 - np.cos(np.pi * np.arange(n) / (n - 1))) / 2


def _sample_points_for_sign() -> list[Fraction]:
    return [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 7), Fraction(5, 7), Fraction(3, 11)]


def certify_nonneg(
    h: Polynomial,
    q_rational: tuple[int, int] | None,
    direction: str = "h_minus_f",
    exponent: float | None = None,
) -> NonnegCertificate:
    """Certify ``h(t) >= t^q`` on ``[0, 1]`` (``direction='h_minus_f'``).

    With ``q_rational = (m, n)`` the polynomial ``P(w) = h(w^n) - w^m`` is
    checked exactly: endpoint signs, the number of distinct roots in
    ``(0, 1)``, and, when roots exist, that every root has even multiplicity.
    Without a rational exponent only dense Chebyshev sampling of
    ``h(t) - t^exponent`` is possible and the status is ``sampled-only``.
    """
    if q_rational is not None:
        m, n = q_rational
        if m <= 0 or n <= 0 or math.gcd(m, n) != 1:
            raise ParameterError("q_rational must be a coprime pair of positive integers")
        return _certify_rational(h, (int(m), int(n)), direction)
    if exponent is None:
        raise ParameterError("either q_rational or exponent is required")
    return _certify_sampled(h, float(exponent), direction)


def _certify_rational(h: Polynomial, qr: tuple[int, int], direction: str) -> NonnegCertificate:
    P = transformed(h, qr, direction)
    w = chebyshev_nodes01(2049)
    min_sample = float(P(w).min())
    ip = _to_int_poly(P.coef)
    if not ip:
        return NonnegCertificate(P, 0, 0, qr, CERTIFIED, min_sample, notes=["identically zero"])
    zero, one = Fraction(0), Fraction(1)
    s0, s1 = _sign_at(ip, zero), _sign_at(ip, one)
    chain_roots = _count_exact(ip, zero, one) - (1 if s1 == 0 else 0)
    notes = []
    if s0 < 0 or s1 < 0:
        notes.append("negative at an endpoint")
    odd = 0
    if chain_roots > 0:
        factors = squarefree_factors(P.coef)
        for mult, f in enumerate(factors, start=1):
            if mult % 2 == 1 and len(f) > 1:
                c = _count_exact(_to_int_poly(f), zero, one) - (1 if _sign_at(_to_int_poly(f), one) == 0 else 0)
                odd += c
    sample_sign = 0
    for x in _sample_points_for_sign():
        sample_sign = _sign_at(ip, x)
        if sample_sign != 0:
            break
    ok = s0 >= 0 and s1 >= 0 and odd == 0 and sample_sign >= 0 and min_sample >= -1e-12
    if odd:
        notes.append(f"{odd} sign change(s) in (0, 1)")
    return NonnegCertificate(
        P, chain_roots, sample_sign, qr, CERTIFIED if ok else FAILED, min_sample, odd_roots=odd, notes=notes
    )


def _certify_sampled(h: Polynomial, q: float, direction: str) -> NonnegCertificate:
    t = chebyshev_nodes01(SAMPLE_COUNT)
    vals = h(t) - t ** q
    if direction == "f_minus_h":
        vals = -vals
    dh = h.deriv()
    lipschitz = float(np.abs(dh(t)).max()) + q
    gap = float(np.diff(t).max()) / 2
    lower = float(vals.min()) - lipschitz * gap
    sign = int(np.sign(vals[len(vals) // 2]))
    notes = [f"Lipschitz lower estimate {lower:.3e}"]
    status = SAMPLED_ONLY if vals.min() >= -1e-12 else FAILED
    return NonnegCertificate(trim(h), -1, sign, None, status, float(vals.min()), notes=notes)


def certify_ladder(
    h: Polynomial,
    q: float,
    ladder: Sequence[float] = (0.0, 1e-12, 1e-10),
) -> NonnegCertificate:
    """Certify ``h + eps >= t^q`` for the first ``eps`` in ``ladder`` that works.

    The returned certificate records ``eps`` in ``inflation``.  For
    irrational ``q`` a sampled-only certificate is returned.
    """
    qr = rational_exponent(q)
    if qr is None:
        return certify_nonneg(h, None, exponent=q)
    cert = None
    for eps in ladder:
        cert = certify_nonneg(h + eps, qr)
        cert.inflation = float(eps)
        if cert.certified:
            return cert
    return cert


def min_on_unit_interval(p: Polynomial) -> float:
    """Minimum of ``p`` on ``[0, 1]`` from its critical points and endpoints."""
    cands = [0.0, 1.0]
    dp = p.deriv()
    if dp.degree() >= 1:
        for r in dp.roots():
            if abs(r.imag) < 1e-9 and -1e-12 <= r.real <= 1 + 1e-12:
                cands.append(min(max(r.real, 0.0), 1.0))
    return float(min(p(np.array(cands))))


# ---------------------------------------------------------------------- interpolation


def hermite_interpolant(
    nodes: Sequence[tuple],
    extra_point: tuple[float, float] | None = None,
    basis: Sequence[Polynomial] | None = None,
) -> Polynomial:
    """Polynomial matching values (and optional derivatives) at the nodes.

    ``nodes`` holds ``(x, value)`` or ``(x, value, derivative)`` triples;
    ``extra_point`` adds one more value condition (typically ``(1, f(1))``).
    The interpolant is sought in ``basis`` (default: monomials of the degree
    fixed by the number of conditions).
    """
    xs = [float(n[0]) for n in nodes]
    if extra_point is not None:
        xs.append(float(extra_point[0]))
    if len(set(xs)) != len(xs):
        raise ParameterError("duplicated interpolation nodes")
    rows_fn: list[tuple[float, int, float]] = []
    for nd in nodes:
        x, v = float(nd[0]), float(nd[1])
        rows_fn.append((x, 0, v))
        if len(nd) > 2 and nd[2] is not None:
            rows_fn.append((x, 1, float(nd[2])))
    if extra_point is not None:
        rows_fn.append((float(extra_point[0]), 0, float(extra_point[1])))
    n = len(rows_fn)
    if basis is None:
        basis = [Polynomial([0.0] * k + [1.0]) for k in range(n)]
    if len(basis) != n:
        raise ParameterError(f"{n} conditions but {len(basis)} basis functions")
    V = np.array([[(b.deriv(o) if o else b)(x) for b in basis] for x, o, _ in rows_fn])
    rhs = np.array([v for _, _, v in rows_fn])
    if np.linalg.cond(V) > 1e13:
        raise ParameterError("singular interpolation system")
    coef = np.linalg.solve(V, rhs)
    out = Polynomial([0.0])
    for c, b in zip(coef, basis):
        out = out + c * b
    return trim(out)
