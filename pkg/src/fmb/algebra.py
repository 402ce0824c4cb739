"""Matrices over the real, complex and quaternion division algebras.

Quaternion matrices are held as a pair ``(Z1, Z2)`` of complex matrices with
``Q = Z1 + Z2 j``.  Component order for I/O is ``(1, i, j, k)`` so that
``a + b i + c j + d k`` corresponds to ``Z1 = a + b i`` and ``Z2 = c + d i``.
Products of quaternion matrices use the Cayley-Dickson rule and agree with
the complex adjoint embedding ``chi(Q) = [[Z1, Z2], [-conj(Z2), conj(Z1)]]``.

Vectors are column matrices.  Quaternion scalars act on vectors from the
right, so ``x -> x e`` is the projective equivalence.
"""
from __future__ import annotations

import enum
from typing import Any, Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPositiveDefiniteError

DEFAULT_RANK_TOL = 1e-9


class Field(str, enum.Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def real_dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @classmethod
    def parse(cls, tag: "Field | str") -> "Field":
        if isinstance(tag, Field):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise DimensionError(f"unknown field tag {tag!r}; expected R, C or H") from None


class KMatrix:
    """Immutable dense matrix over ``R``, ``C`` or ``H``."""

    __slots__ = ("field", "_data")

    def __init__(self, field: Field | str, data: np.ndarray):
        field = Field.parse(field)
        if field is Field.R:
            data = np.asarray(data, dtype=float)
            if np.iscomplexobj(data):
                raise DimensionError("complex data given for a real matrix")
            ndim = 2
        elif field is Field.C:
            data = np.asarray(data, dtype=complex)
            ndim = 2
        else:
            data = np.asarray(data, dtype=complex)
            ndim = 3
            if data.ndim != 3 or data.shape[0] != 2:
                raise DimensionError("quaternion data must have shape (2, rows, cols)")
        if data.ndim != ndim:
            raise DimensionError(f"expected a {ndim}-d array, got shape {data.shape}")
        data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("KMatrix is immutable")

    # ------------------------------------------------------------------ construction

    @classmethod
    def from_components(cls, field: Field | str, comps: Any) -> "KMatrix":
        """Build from an array of real components.

        Shapes: ``(n, m)`` for real numbers (also accepted for every field),
        ``(n, m, 2)`` for complex, ``(n, m, 4)`` for quaternions.  Complex
        numpy input is accepted for ``C`` and ``H``.
        """
        field = Field.parse(field)
        arr = np.asarray(comps)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim == 2:
            if field is Field.R:
                return cls(field, arr)
            if field is Field.C:
                return cls(field, arr.astype(complex))
            z1 = arr.astype(complex)
            return cls(field, np.stack([z1, np.zeros_like(z1)]))
        if arr.ndim != 3 or arr.shape[2] != field.real_dim:
            raise DimensionError(
                f"component array of shape {arr.shape} does not match field {field.value}"
            )
        arr = arr.astype(float)
        if field is Field.R:
            return cls(field, arr[..., 0])
        if field is Field.C:
            return cls(field, arr[..., 0] + 1j * arr[..., 1])
        return cls(field, np.stack([arr[..., 0] + 1j * arr[..., 1], arr[..., 2] + 1j * arr[..., 3]]))

    @classmethod
    def identity(cls, field: Field | str, n: int) -> "KMatrix":
        return cls.from_components(field, np.eye(n))

    @classmethod
    def zeros(cls, field: Field | str, rows: int, cols: int) -> "KMatrix":
        return cls.from_components(field, np.zeros((rows, cols)))

    @classmethod
    def from_adjoint(cls, big: np.ndarray, rows: int, cols: int) -> "KMatrix":
        """Recover a quaternion matrix from its complex adjoint ``chi``."""
        big = np.asarray(big, dtype=complex)
        if big.shape != (2 * rows, 2 * cols):
            raise DimensionError("adjoint block has the wrong shape")
        return cls(Field.H, np.stack([big[:rows, :cols], big[:rows, cols:]]))

    # ------------------------------------------------------------------ basic views

    @property
    def shape(self) -> tuple[int, int]:
        s = self._data.shape
        return (s[-2], s[-1])

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def raw(self) -> np.ndarray:
        """Internal storage (read-only): real, complex, or stacked ``(Z1, Z2)``."""
        return self._data

    def components(self) -> np.ndarray:
        """Real components, shape ``(rows, cols, real_dim)``."""
        d = self._data
        if self.field is Field.R:
            return d[..., None].copy()
        if self.field is Field.C:
            return np.stack([d.real, d.imag], axis=-1)
        return np.stack([d[0].real, d[0].imag, d[1].real, d[1].imag], axis=-1)

    def complex_adjoint(self) -> np.ndarray:
        """Complex matrix representing ``self``; ``(2n, 2m)`` for quaternions."""
        if self.field is not Field.H:
            return self._data.astype(complex)
        z1, z2 = self._data
        return np.block([[z1, z2], [-z2.conj(), z1.conj()]])

    def ct(self) -> "KMatrix":
        """Conjugate transpose."""
        if self.field is Field.R:
            return KMatrix(self.field, self._data.T)
        if self.field is Field.C:
            return KMatrix(self.field, self._data.conj().T)
        z1, z2 = self._data
        return KMatrix(self.field, np.stack([z1.conj().T, -z2.T]))

    def abs(self) -> np.ndarray:
        """Entrywise modulus."""
        if self.field is Field.H:
            return np.sqrt(np.abs(self._data[0]) ** 2 + np.abs(self._data[1]) ** 2)
        return np.abs(self._data)

    def real_part(self) -> np.ndarray:
        if self.field is Field.H:
            return self._data[0].real.copy()
        return np.real(self._data).copy()

    def real_diag(self) -> np.ndarray:
        return np.diag(self.real_part())

    def trace_real(self) -> float:
        """``Re Tr``; the matrix must be square."""
        if self.rows != self.cols:
            raise DimensionError("trace of a non-square matrix")
        return float(np.trace(self.real_part()))

    def max_abs(self) -> float:
        return float(self.abs().max()) if self.abs().size else 0.0

    def frobenius(self) -> float:
        return float(np.sqrt((self.abs() ** 2).sum()))

    def __getitem__(self, key) -> "KMatrix":
        if not (isinstance(key, tuple) and len(key) == 2):
            raise TypeError("KMatrix indexing needs (rows, cols)")
        r, c = key
        if isinstance(r, (int, np.integer)):
            r = slice(r, r + 1)
        if isinstance(c, (int, np.integer)):
            c = slice(c, c + 1)
        if self.field is Field.H:
            return KMatrix(self.field, self._data[:, r, :][:, :, c])
        return KMatrix(self.field, self._data[r, :][:, c])

    def col(self, j: int) -> "KMatrix":
        return self[:, j]

    def take_cols(self, idx: Sequence[int]) -> "KMatrix":
        return self[:, list(idx)]

    def hstack(self, other: "KMatrix") -> "KMatrix":
        _same_field(self, other)
        axis = -1
        return KMatrix(self.field, np.concatenate([self._data, other._data], axis=axis))

    def kron_real(self, J: np.ndarray) -> "KMatrix":
        """Kronecker product ``self (x) J`` with a real matrix ``J``."""
        J = np.asarray(J, dtype=float)
        if self.field is Field.H:
            return KMatrix(self.field, np.stack([np.kron(self._data[0], J), np.kron(self._data[1], J)]))
        return KMatrix(self.field, np.kron(self._data, J))

    def scale_right(self, s: "KMatrix") -> "KMatrix":
        """Multiply the whole matrix on the right by the ``1x1`` scalar ``s``."""
        if s.shape != (1, 1):
            raise DimensionError("scale_right expects a 1x1 scalar")
        if self.field is Field.H:
            return self @ KMatrix(self.field, s.raw)
        return KMatrix(self.field, self._data * s.raw[0, 0])

    # ------------------------------------------------------------------ arithmetic

    def __matmul__(self, other: "KMatrix") -> "KMatrix":
        _same_field(self, other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.field is not Field.H:
            return KMatrix(self.field, self._data @ other._data)
        a1, a2 = self._data
        b1, b2 = other._data
        return KMatrix(self.field, np.stack([a1 @ b1 - a2 @ b2.conj(), a1 @ b2 + a2 @ b1.conj()]))

    def __add__(self, other: "KMatrix") -> "KMatrix":
        _same_field(self, other)
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return KMatrix(self.field, self._data + other._data)

    def __sub__(self, other: "KMatrix") -> "KMatrix":
        return self + (-other)

    def __neg__(self) -> "KMatrix":
        return KMatrix(self.field, -self._data)

    def __mul__(self, s: float) -> "KMatrix":
        s = float(s)
        return KMatrix(self.field, self._data * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "KMatrix":
        return self * (1.0 / float(s))

    def allclose(self, other: "KMatrix", atol: float = 1e-12) -> bool:
        _same_field(self, other)
        return self.shape == other.shape and (self - other).max_abs() <= atol

    def __repr__(self) -> str:
        return f"KMatrix(field={self.field.value}, shape={self.shape})"

    # ------------------------------------------------------------------ JSON

    def to_json(self) -> dict:
        comps = self.components()
        if self.field is Field.R:
            data = [[float(x) for x in row[:, 0]] for row in comps]
        else:
            data = [[[float(v) for v in entry] for entry in row] for row in comps]
        return {"field": self.field.value, "rows": self.rows, "cols": self.cols, "data": data}

    @classmethod
    def from_json(cls, obj: dict) -> "KMatrix":
        try:
            field = Field.parse(obj["field"])
            rows, cols = int(obj["rows"]), int(obj["cols"])
            data = obj["data"]
        except (KeyError, TypeError) as exc:
            raise DimensionError(f"malformed matrix JSON: {exc}") from None
        comps = np.zeros((rows, cols, field.real_dim))
        if len(data) != rows:
            raise DimensionError("row count does not match 'rows'")
        for i, row in enumerate(data):
            if len(row) != cols:
                raise DimensionError("column count does not match 'cols'")
            for j, entry in enumerate(row):
                vals = [entry] if isinstance(entry, (int, float)) else list(entry)
                if len(vals) > field.real_dim:
                    raise DimensionError(f"entry ({i},{j}) has too many components")
                comps[i, j, : len(vals)] = vals
        return cls.from_components(field, comps)


def _same_field(a: KMatrix, b: KMatrix) -> None:
    if a.field is not b.field:
        raise DimensionError(f"field mismatch: {a.field.value} vs {b.field.value}")


# ---------------------------------------------------------------------- vectors


def as_vector(field: Field | str, x: Any) -> KMatrix:
    """Column vector from real components (``(d,)``, ``(d, real_dim)`` or complex)."""
    if isinstance(x, KMatrix):
        return x
    arr = np.asarray(x)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim == 2 and Field.parse(field).real_dim > 1 and not np.iscomplexobj(arr):
        arr = arr.reshape(arr.shape[0], 1, arr.shape[1])
    return KMatrix.from_components(field, arr)


def inner(x: KMatrix, y: KMatrix) -> KMatrix:
    """Hermitian product ``x* y`` as a ``1x1`` matrix."""
    return x.ct() @ y


def norm(x: KMatrix) -> float:
    return x.frobenius()


def gram(X: KMatrix) -> KMatrix:
    """Gram matrix ``X* X`` of the columns of ``X``."""
    return X.ct() @ X


def projector(x: KMatrix) -> KMatrix:
    """``Pi(x) = x x*`` for a column vector ``x``."""
    if x.rows < 1 or x.cols != 1:
        raise DimensionError("projector needs a non-empty column vector")
    return x @ x.ct()


def hs_inner(A: KMatrix, B: KMatrix) -> float:
    """``Re Tr(AB)``."""
    if A.rows != A.cols or A.shape != B.shape:
        raise DimensionError("hs_inner needs square matrices of equal size")
    return (A @ B).trace_real()


def hermitian_defect(A: KMatrix) -> float:
    return (A - A.ct()).max_abs()


def _check_hermitian(A: KMatrix, tol: float) -> None:
    if A.rows != A.cols:
        raise DimensionError("Hermitian matrix must be square")
    scale = max(1.0, A.max_abs())
    if hermitian_defect(A) > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (defect {hermitian_defect(A):.3e})")


def herm_eigvals(A: KMatrix, tol: float = 1e-9) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Quaternionic eigenvalues are read from the complex adjoint, where each
    appears twice; every second sorted value is kept.
    """
    _check_hermitian(A, tol)
    big = A.complex_adjoint()
    big = 0.5 * (big + big.conj().T)
    ev = np.linalg.eigvalsh(big)
    if A.field is Field.H:
        ev = ev[::2]
    return ev


def herm_eigh(A: KMatrix, tol: float = 1e-9) -> tuple[np.ndarray, KMatrix]:
    """Ascending eigenvalues and an orthonormal eigenbasis (columns)."""
    _check_hermitian(A, tol)
    if A.field is not Field.H:
        h = 0.5 * (A.raw + A.raw.conj().T)
        ev, V = np.linalg.eigh(h)
        return ev, KMatrix(A.field, V.real if A.field is Field.R else V)
    ev = herm_eigvals(A, tol)
    n = A.rows
    vecs = None
    for lo, hi in _cluster(ev, 1e-8 * max(1.0, float(np.abs(ev).max()))):
        lam = float(ev[lo:hi].mean())
        K = kernel_basis(A - KMatrix.identity(A.field, n) * lam, count=hi - lo)
        vecs = K if vecs is None else vecs.hstack(K)
    return ev, vecs


def _cluster(sorted_vals: np.ndarray, tol: float) -> list[tuple[int, int]]:
    out = []
    start = 0
    for i in range(1, len(sorted_vals) + 1):
        if i == len(sorted_vals) or sorted_vals[i] - sorted_vals[i - 1] > tol:
            out.append((start, i))
            start = i
    return out


def _right_null_complex(big: np.ndarray, rank_tol: float, count: int | None) -> np.ndarray:
    _, s, vh = np.linalg.svd(big)  # real input keeps a real basis
    n = big.shape[1]
    if count is None:
        smax = s[0] if s.size else 0.0
        rank = int(np.sum(s > rank_tol * max(smax, np.finfo(float).tiny)))
    else:
        rank = n - count
    return vh[rank:].conj().T


def kernel_basis(A: KMatrix, rank_tol: float = DEFAULT_RANK_TOL, count: int | None = None) -> KMatrix:
    """Orthonormal basis (columns) of the right null space ``{v : A v = 0}``.

    ``rank_tol`` is relative to the largest singular value.  ``count`` forces
    the kernel dimension instead of thresholding.
    """
    n = A.cols
    if A.field is not Field.H:
        null = _right_null_complex(A.raw, rank_tol, count)
        return KMatrix(A.field, null.real if A.field is Field.R else null)
    big = A.complex_adjoint()
    null = _right_null_complex(big, rank_tol, None if count is None else 2 * count)
    target = null.shape[1] // 2
    basis: list[KMatrix] = []
    for x in null.T:
        v = KMatrix(Field.H, np.stack([x[:n].reshape(-1, 1), -x[n:].conj().reshape(-1, 1)]))
        for b in basis:
            v = v - b @ inner(b, v)
        nv = norm(v)
        if nv < 1e-6:
            continue
        v = v / nv
        for b in basis:  # second pass for numerical orthogonality
            v = v - b @ inner(b, v)
        v = v / norm(v)
        basis.append(v)
        if len(basis) == target:
            break
    if not basis:
        return KMatrix.zeros(Field.H, n, 0)
    out = basis[0]
    for b in basis[1:]:
        out = out.hstack(b)
    return out


def numerical_rank(A: KMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    return A.cols - kernel_basis(A, rank_tol).cols


def cholesky_hpd(S: KMatrix, tol: float = 1e-9) -> KMatrix:
    """Lower-triangular ``L`` with ``L L* = S`` and positive real diagonal."""
    _check_hermitian(S, tol)
    n = S.rows
    field = S.field
    L = [[None] * n for _ in range(n)]
    zero = KMatrix.zeros(field, 1, 1)

    def entry(i, j):
        return S[i, j]

    for j in range(n):
        acc = entry(j, j)
        for k in range(j):
            acc = acc - L[j][k] @ L[j][k].ct()
        pivot = acc.real_part()[0, 0]
        if not pivot > 0:
            raise NotPositiveDefiniteError(f"non-positive pivot {pivot:.3e} at index {j}")
        ljj = np.sqrt(pivot)
        L[j][j] = KMatrix.from_components(field, [[ljj]])
        for i in range(j + 1, n):
            acc = entry(i, j)
            for k in range(j):
                acc = acc - L[i][k] @ L[j][k].ct()
            L[i][j] = acc / ljj
        for i in range(j):
            L[i][j] = zero
    return _assemble(field, L)


def _assemble(field: Field, blocks: list[list[KMatrix]]) -> KMatrix:
    n = len(blocks)
    if field is Field.H:
        data = np.zeros((2, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                data[:, i, j] = blocks[i][j].raw[:, 0, 0]
        return KMatrix(field, data)
    dtype = float if field is Field.R else complex
    data = np.zeros((n, n), dtype=dtype)
    for i in range(n):
        for j in range(n):
            data[i, j] = blocks[i][j].raw[0, 0]
    return KMatrix(field, data)


def solve(A: KMatrix, B: KMatrix) -> KMatrix:
    """Solve ``A X = B`` for square invertible ``A``."""
    _same_field(A, B)
    if A.rows != A.cols or A.rows != B.rows:
        raise DimensionError("solve needs square A with matching rows of B")
    if A.field is not Field.H:
        X = np.linalg.solve(A.raw, B.raw)
        return KMatrix(A.field, X.real if A.field is Field.R else X)
    Xbig = np.linalg.solve(A.complex_adjoint(), B.complex_adjoint())
    return KMatrix.from_adjoint(Xbig, A.cols, B.cols)


def random_unit_vectors(field: Field | str, d: int, n: int, rng: np.random.Generator) -> KMatrix:
    """``n`` independent uniformly random unit vectors in ``K^d`` as columns."""
    field = Field.parse(field)
    comps = rng.standard_normal((d, n, field.real_dim))
    comps /= np.sqrt((comps ** 2).sum(axis=(0, 2), keepdims=True))
    return KMatrix.from_components(field, comps)
