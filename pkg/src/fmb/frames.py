"""Discrete isotropic measures and tight frames over ``R``, ``C`` and ``H``.

Point sets store their vectors as the columns of a ``d x N`` :class:`KMatrix`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .algebra import Field, KMatrix, gram, herm_eigh, kernel_basis
from .errors import DimensionError, ParameterError

WEIGHT_TOL = 1e-12
JSON_WEIGHT_TOL = 1e-9


def _scale_cols(X: KMatrix, s: np.ndarray) -> KMatrix:
    return KMatrix(X.field, X.raw * np.asarray(s, dtype=float))


def _frame_operator(X: KMatrix, w: np.ndarray | None = None) -> KMatrix:
    """``sum_i w_i x_i x_i^*``."""
    Y = X if w is None else _scale_cols(X, w)
    return Y @ X.ct()


@dataclass(frozen=True)
class WeightedPointSet:
    """Discrete probability measure on ``K^d``."""

    field: Field
    dim: int
    points: KMatrix
    weights: np.ndarray
    allow_zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "field", Field.parse(self.field))
        w = np.asarray(self.weights, dtype=float).copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.points.field is not self.field or self.points.rows != self.dim:
            raise DimensionError("points do not live in K^dim")
        if w.shape != (self.points.cols,):
            raise DimensionError("one weight per point is required")
        if np.any(w <= 0):
            raise ParameterError("weights must be positive")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise ParameterError(f"weights sum to {math.fsum(w)!r}, not 1")
        if not self.allow_zero and np.any(self.norms() == 0):
            raise ParameterError("zero vector in support")

    @property
    def size(self) -> int:
        return self.points.cols

    def norms(self) -> np.ndarray:
        return np.sqrt((self.points.abs() ** 2).sum(axis=0))

    def to_json(self) -> dict:
        comps = self.points.components()
        pts = []
        for j in range(self.size):
            col = comps[:, j, :]
            v = [float(x) for x in col[:, 0]] if self.field is Field.R else [[float(c) for c in e] for e in col]
            pts.append({"v": v, "w": float(self.weights[j])})
        return {"field": self.field.value, "dim": self.dim, "points": pts}

    @classmethod
    def from_json(cls, obj: dict) -> "WeightedPointSet":
        X, w, fld, d = _points_from_json(obj, need_weights=True)
        # serialised weights are rounded, so accept a looser sum and renormalise
        total = math.fsum(w)
        if np.any(w <= 0) or abs(total - 1.0) > JSON_WEIGHT_TOL:
            raise ParameterError(f"weights must be positive and sum to 1, got sum {total!r}")
        return cls(fld, d, X, w / total)


@dataclass(frozen=True)
class TightFrame:
    """Vectors ``v_i`` with ``sum_i Pi(v_i) = A I``; ``A`` is derived from the norms."""

    field: Field
    dim: int
    vectors: KMatrix
    name: str = ""
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "field", Field.parse(self.field))
        if self.vectors.field is not self.field or self.vectors.rows != self.dim:
            raise DimensionError("vectors do not live in K^dim")

    @property
    def size(self) -> int:
        return self.vectors.cols

    @property
    def frame_constant(self) -> float:
        return float((self.vectors.abs() ** 2).sum() / self.dim)

    def deviation(self) -> float:
        """Max-abs entry of ``sum Pi(v_i) - A I``."""
        S = _frame_operator(self.vectors)
        return (S - KMatrix.identity(self.field, self.dim) * self.frame_constant).max_abs()

    def is_tight(self, tol: float = 1e-9) -> bool:
        return self.deviation() <= tol

    def gram(self) -> KMatrix:
        return gram(self.vectors)

    def as_measure(self) -> WeightedPointSet:
        """Uniform measure on the normalised vectors."""
        n = np.sqrt((self.vectors.abs() ** 2).sum(axis=0))
        if np.any(n == 0):
            raise ParameterError("cannot normalise a zero vector")
        X = _scale_cols(self.vectors, 1.0 / n)
        return WeightedPointSet(self.field, self.dim, X, np.full(self.size, 1.0 / self.size))

    def to_json(self) -> dict:
        out = WeightedPointSet(self.field, self.dim, self.vectors, np.full(self.size, 1.0 / self.size),
                               allow_zero=True).to_json()
        for p in out["points"]:
            p.pop("w")
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "TightFrame":
        X, _, fld, d = _points_from_json(obj, need_weights=False)
        return cls(fld, d, X, name=str(obj.get("name", "")))


def _points_from_json(obj: dict, need_weights: bool):
    try:
        fld = Field.parse(obj["field"])
        d = int(obj["dim"])
        pts = obj["points"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed point-set JSON: {exc}") from None
    if not pts:
        raise DimensionError("point set is empty")
    comps = np.zeros((d, len(pts), fld.real_dim))
    w = np.zeros(len(pts))
    for j, p in enumerate(pts):
        v = p["v"]
        if len(v) != d:
            raise DimensionError(f"point {j} has {len(v)} coordinates, expected {d}")
        for i, e in enumerate(v):
            vals = [e] if isinstance(e, (int, float)) else list(e)
            if len(vals) > fld.real_dim:
                raise DimensionError(f"point {j} coordinate {i} has too many components")
            comps[i, j, : len(vals)] = vals
        if need_weights:
            if "w" not in p:
                raise DimensionError(f"point {j} has no weight")
            w[j] = float(p["w"])
    return KMatrix.from_components(fld, comps), w, fld, d


# ---------------------------------------------------------------------- checks and energies


@dataclass(frozen=True)
class IsotropyReport:
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol


def isotropy_check(ps: WeightedPointSet, tol: float = 1e-12) -> IsotropyReport:
    """Max-abs deviation of ``sum_i w_i Pi(x_i)`` from ``I/d``."""
    S = _frame_operator(ps.points, ps.weights)
    dev = (S - KMatrix.identity(ps.field, ps.dim) * (1.0 / ps.dim)).max_abs()
    return IsotropyReport(float(dev), float(tol))


def _moduli(X: KMatrix) -> np.ndarray:
    return gram(X).abs()


def q_moment(ps: WeightedPointSet, q: float) -> float:
    """``sum_{i,j} w_i w_j |<x_i, x_j>|^q``, diagonal included."""
    if q < 1:
        raise ParameterError("q must be at least 1")
    T = _moduli(ps.points) ** q
    return float(ps.weights @ T @ ps.weights)


def _vectors_of(obj) -> KMatrix:
    if isinstance(obj, TightFrame):
        return obj.vectors
    if isinstance(obj, WeightedPointSet):
        return obj.points
    if isinstance(obj, KMatrix):
        return obj
    raise TypeError("expected a TightFrame, WeightedPointSet or KMatrix of column vectors")


def q_energy(frame, q: float) -> float:
    """``sum_{i != j} |<y_i, y_j>|^q``."""
    T = _moduli(_vectors_of(frame))
    np.fill_diagonal(T, 0.0)
    if math.isinf(q):
        return float(T.max()) if T.size > 1 else 0.0
    return float(np.sum(T ** q))


def _check_unit_diag(A: KMatrix, tol: float) -> None:
    if A.rows != A.cols:
        raise DimensionError("Gram matrix must be square")
    diag = np.array([A[i, i].components().ravel() for i in range(A.rows)])
    want = np.zeros_like(diag)
    want[:, 0] = 1.0
    if diag.size and np.abs(diag - want).max() > tol:
        raise ParameterError("matrix does not have unit diagonal")


def p_frame_energy(A: KMatrix, p: float, tol: float = 1e-9) -> float:
    """``(sum_{i != j} |A_ij|^p)^{1/p}``; the largest off-diagonal modulus for ``p = inf``."""
    _check_unit_diag(A, tol)
    T = A.abs()
    np.fill_diagonal(T, 0.0)
    if math.isinf(p):
        return float(T.max()) if T.size > 1 else 0.0
    if p <= 0:
        raise ParameterError("p must be positive")
    return float(np.sum(T ** p) ** (1.0 / p))


def welch_deviation(frame: TightFrame, alpha: float) -> float:
    """Largest deviation of an off-diagonal modulus from ``alpha``."""
    T = _moduli(frame.vectors)
    off = T[~np.eye(T.shape[0], dtype=bool)]
    return float(np.abs(off - alpha).max()) if off.size else 0.0


# ---------------------------------------------------------------------- catalog


def orthonormal(d: int, field: Field | str = Field.R) -> TightFrame:
    if d < 1:
        raise DimensionError("d must be positive")
    return TightFrame(field, d, KMatrix.identity(field, d), name=f"orthonormal({d})",
                      meta={"moduli": [0.0]})


def regular_simplex_coords(d: int) -> np.ndarray:
    """``(d, d+1)`` real array: unit vectors with pairwise inner products ``-1/d``.

    The first vector is ``e_1``.
    """
    if d < 1:
        raise DimensionError("d must be positive")
    n = d + 1
    S = np.eye(n) - 1.0 / n
    S /= np.linalg.norm(S, axis=0)
    Q, R = np.linalg.qr(S[:, :d])
    Q = Q * np.sign(np.diag(R))
    C = Q.T @ S
    C[:, 0] = np.eye(d)[:, 0]
    return C


def simplex(d: int) -> TightFrame:
    """``d + 1`` unit vectors in ``R^d`` with Gram off-diagonal ``-1/d``."""
    return TightFrame(Field.R, d, KMatrix(Field.R, regular_simplex_coords(d)), name=f"simplex({d})",
                      meta={"moduli": [1.0 / d], "tight_simplex": True})


def polygon_diagonals(m: int) -> TightFrame:
    """``m`` lines through the origin in ``R^2`` at angles ``k pi / m``."""
    if m < 2:
        raise ParameterError("need at least two diagonals")
    ang = np.pi * np.arange(m) / m
    X = np.vstack([np.cos(ang), np.sin(ang)])
    moduli = sorted({round(abs(math.cos(math.pi * k / m)), 15) for k in range(1, m)})
    return TightFrame(Field.R, 2, KMatrix(Field.R, X), name=f"polygon_diagonals({m})",
                      meta={"moduli": moduli, "tight_simplex": m == 3})


def hexagon() -> TightFrame:
    """Three diagonals of a regular hexagon: the maximal simplex in ``R P^1``.

    Representatives are chosen at angles 0, 120 and 240 degrees so that every
    off-diagonal Gram entry equals ``-1/2``.
    """
    ang = 2 * np.pi * np.arange(3) / 3
    X = np.vstack([np.cos(ang), np.sin(ang)])
    return TightFrame(Field.R, 2, KMatrix(Field.R, X), name="hexagon",
                      meta={"moduli": [0.5], "tight_simplex": True})


def icosahedron6() -> TightFrame:
    """Six diagonals of the icosahedron, ``(0, +-1, phi)`` and cyclic shifts."""
    phi = (1 + math.sqrt(5)) / 2
    base = [(0.0, 1.0, phi), (0.0, -1.0, phi)]
    vecs = []
    for shift in range(3):
        for v in base:
            vecs.append(v[-shift:] + v[:-shift] if shift else v)
    X = np.array(vecs).T / math.sqrt(1 + phi * phi)
    return TightFrame(Field.R, 3, KMatrix(Field.R, X), name="icosahedron6",
                      meta={"moduli": [1 / math.sqrt(5)], "tight_simplex": True})


def sic_c2() -> TightFrame:
    """Four vectors in ``C^2`` with pairwise moduli ``1/sqrt(3)`` (a tetrahedron on the Bloch sphere)."""
    w = np.exp(2j * np.pi / 3)
    a, b = 1 / math.sqrt(3), math.sqrt(2.0 / 3.0)
    X = np.array([[1.0, a, a, a], [0.0, b, b * w, b * w * w]], dtype=complex)
    return TightFrame(Field.C, 2, KMatrix(Field.C, X), name="sic_c2",
                      meta={"moduli": [1 / math.sqrt(3)], "tight_simplex": True})


def copies(base: TightFrame, b: int) -> TightFrame:
    """Each vector of ``base`` repeated ``b`` times consecutively (index ``i*b + a``)."""
    if b < 1:
        raise ParameterError("b must be positive")
    idx = np.repeat(np.arange(base.size), b)
    X = base.vectors.take_cols(idx)
    moduli = sorted(set(base.meta.get("moduli", [])) | ({1.0} if b > 1 else set()))
    return TightFrame(base.field, base.dim, X, name=f"copies({base.name},{b})", meta={"moduli": moduli})


def doubled(base: TightFrame) -> TightFrame:
    return copies(base, 2)


def random_tight_frame(field: Field | str, d: int, N: int, rng: np.random.Generator) -> TightFrame:
    """Random Gaussian vectors whitened to frame constant ``N/d``."""
    field = Field.parse(field)
    if N < d:
        raise DimensionError("a tight frame needs N >= d")
    comps = rng.standard_normal((d, N, field.real_dim))
    X = KMatrix.from_components(field, comps)
    S = _frame_operator(X)
    vals, V = herm_eigh(S)
    W = _scale_cols(V, np.sqrt(N / d) / np.sqrt(vals)) @ V.ct()
    return TightFrame(field, d, W @ X, name="random")


CATALOG: dict[str, Callable[..., TightFrame]] = {
    "orthonormal": orthonormal,
    "simplex": simplex,
    "polygon_diagonals": polygon_diagonals,
    "hexagon": hexagon,
    "icosahedron6": icosahedron6,
    "sic_c2": sic_c2,
    "doubled": doubled,
    "copies": copies,
}

# Tight simplices usable as the base of the sharp-code construction.
TIGHT_SIMPLICES = ("hexagon", "icosahedron6", "sic_c2")


def catalog(name: str, *args, **kwargs) -> TightFrame:
    """Look up a catalog configuration by name (see :data:`CATALOG`)."""
    try:
        make = CATALOG[name]
    except KeyError:
        raise ParameterError(f"unknown catalog entry {name!r}; choose from {sorted(CATALOG)}") from None
    if name in ("doubled", "copies") and args and isinstance(args[0], str):
        args = (catalog(args[0]),) + args[1:]
    return make(*args, **kwargs)


# ---------------------------------------------------------------------- perturbation


def _perp_basis(u: KMatrix, u1: KMatrix) -> KMatrix:
    """Orthonormal basis of the orthogonal complement of ``u``, starting with ``u1/|u1|``."""
    d = u.rows
    first = u1 * (1.0 / u1.frobenius())
    if d == 2:
        return first
    rest = kernel_basis(u.hstack(u1).ct(), count=d - 2)
    return first.hstack(rest)


def perturb_orthogonal(ps: WeightedPointSet, u_index: int, u1_index: int, delta: float,
                       orth_tol: float = 1e-10) -> WeightedPointSet:
    """Split the point ``u`` into ``d`` nearby points and shrink the others, keeping isotropy.

    ``u`` is replaced by ``alpha u + delta v_i`` with ``v_i`` a unit regular
    simplex in the complement of ``u`` (``v_1`` along ``u_1``), each of weight
    ``p/d``; every other point is multiplied by ``beta`` where
    ``alpha^2 = 1 + delta^2 (1/|u|^2 - p d)/(d - 1)`` and
    ``beta^2 = 1 - p d delta^2 / (d - 1)``.
    """
    d = ps.dim
    if d < 2:
        raise DimensionError("perturbation needs d >= 2")
    if delta == 0:
        return ps
    if u_index == u1_index:
        raise ParameterError("u and u1 must be different points")
    u = ps.points.col(u_index)
    u1 = ps.points.col(u1_index)
    if (u.ct() @ u1).max_abs() > orth_tol:
        raise ParameterError("the chosen pair is not orthogonal")
    p = float(ps.weights[u_index])
    nu2 = u.frobenius() ** 2
    a2 = 1 + delta * delta * (1 / nu2 - p * d) / (d - 1)
    b2 = 1 - p * d * delta * delta / (d - 1)
    if b2 <= 0 or a2 <= 0:
        raise ParameterError("delta too large: scaling constants are not real")
    alpha, beta = math.sqrt(a2), math.sqrt(b2)
    E = _perp_basis(u, u1)
    V = E @ KMatrix.from_components(ps.field, regular_simplex_coords(d - 1))
    ones = KMatrix.from_components(ps.field, np.ones((1, d)))
    newv = (u @ ones) * alpha + V * delta
    others = [j for j in range(ps.size) if j != u_index]
    X = newv.hstack(ps.points.take_cols(others) * beta)
    w = np.concatenate([np.full(d, p / d), ps.weights[others]])
    return WeightedPointSet(ps.field, d, X, w / math.fsum(w))
