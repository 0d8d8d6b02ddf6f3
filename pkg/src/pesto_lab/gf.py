"""Prime-field arithmetic and dense linear algebra over GF(q).

Matrices are plain ``numpy`` integer arrays whose entries are kept in
``[0, q)``.  Every routine takes the modulus explicitly; nothing here holds
global state.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

import numpy as np

MAX_MODULUS = 1 << 16


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def check_modulus(q: int) -> int:
    """Validate ``q`` as a supported field size and return it as an int."""
    q = int(q)
    if not (3 <= q < MAX_MODULUS) or not is_prime(q):
        raise ValueError(f"modulus must be an odd prime below 2^16, got {q}")
    return q


def inv(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(q)")
    return pow(a, -1, q)


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(q), always stored fully reduced."""

    value: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.q)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def _binop(self, other, fn):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(fn(self.value, b), self.q)

    def __add__(self, other):
        return self._binop(other, operator.add)

    def __sub__(self, other):
        return self._binop(other, operator.sub)

    def __mul__(self, other):
        return self._binop(other, operator.mul)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * inv(b, self.q), self.q)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __neg__(self):
        return FieldElement(-self.value, self.q)

    def inverse(self) -> FieldElement:
        return FieldElement(inv(self.value, self.q), self.q)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.q})"


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


def field_arith(a: int, b: int, op: str, q: int) -> int:
    """Apply ``op`` in {add, sub, mul, div} to residues ``a`` and ``b``.

    Raises ZeroDivisionError for division by zero.
    """
    if op == "div":
        return a * inv(b, q) % q
    try:
        return _OPS[op](a, b) % q
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None


def as_field_array(M, q: int) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) % q


def matmul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """Matrix product mod q.

    Uses a float64 BLAS product when every partial sum is exactly
    representable, falling back to int64 otherwise.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[-1]
    if inner * (q - 1) ** 2 < 2**53:
        prod = A.astype(np.float64) @ B.astype(np.float64)
        return np.rint(prod).astype(np.int64) % q
    return (A @ B) % q


def rref(M, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` over GF(q).

    Pivots are chosen as the first nonzero entry top-to-bottom, scanning
    columns left-to-right.  Zero rows are kept at the bottom so the shape
    is unchanged.  Returns ``(R, pivot_columns)``.
    """
    A = as_field_array(M, q).copy()
    if A.ndim != 2:
        raise ValueError("rref expects a 2-D matrix")
    nrows, ncols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        a = int(A[r, c])
        if a != 1:
            A[r, c:] = A[r, c:] * inv(a, q) % q
        col = A[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            A[others, c:] = (A[others, c:] - np.outer(col[others], A[r, c:])) % q
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M, q: int) -> int:
    return len(rref(M, q)[1])


def nullspace(M, q: int) -> np.ndarray:
    """Basis of ``{v : M v = 0}`` as the rows of a ``(k, cols)`` array.

    One basis vector per free column, with a 1 in that column.
    """
    R, pivots = rref(M, q)
    ncols = R.shape[1]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = -R[i, f] % q
    return basis


def solve(A, b, q: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Solve ``A x = b``.

    Returns ``(particular, kernel_basis)`` or ``None`` if the system is
    inconsistent.
    """
    A = as_field_array(A, q)
    b = as_field_array(b, q).reshape(-1, 1)
    R, pivots = rref(np.hstack([A, b]), q)
    ncols = A.shape[1]
    if pivots and pivots[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, p in enumerate(pivots):
        x[p] = R[i, ncols]
    return x, nullspace(A, q)


def inverse(M, q: int) -> np.ndarray:
    """Inverse of a square matrix; raises ValueError if singular."""
    A = as_field_array(M, q)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    R, pivots = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), q)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return R[:, n:].copy()


def random_invertible(n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL(n, q) by rejection sampling."""
    while True:
        M = rng.integers(0, q, size=(n, n), dtype=np.int64)
        if rank(M, q) == n:
            return M


class EchelonBasis:
    """Incrementally maintained reduced row echelon basis of a row space.

    Rows are kept sorted by pivot column.  New rows are reduced against the
    current basis with a single matrix product, echelonized among
    themselves, and then used to clear their pivot columns in the old rows.
    The resulting matrix is exactly ``rref`` of everything added so far.
    """

    def __init__(self, ncols: int, q: int):
        self.q = q
        self.ncols = ncols
        self.rows = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list[int] = []

    def __len__(self):
        return len(self.pivots)

    def reduce(self, R) -> np.ndarray:
        """Remainder of the rows of ``R`` modulo the current span."""
        R = as_field_array(R, self.q)
        if R.ndim == 1:
            R = R.reshape(1, -1)
        if not self.pivots or R.shape[0] == 0:
            return R.copy()
        return (R - matmul(R[:, self.pivots], self.rows, self.q)) % self.q

    def contains(self, R) -> np.ndarray:
        """Boolean membership of each row of ``R`` in the span."""
        return ~self.reduce(R).any(axis=1)

    def add(self, R) -> list[int]:
        """Add rows to the span; returns the newly created pivot columns."""
        q = self.q
        rem = self.reduce(R)
        rem = rem[rem.any(axis=1)]
        if rem.shape[0] == 0:
            return []
        E, new_piv = rref(rem, q)
        E = E[: len(new_piv)]
        if self.pivots:
            self.rows = (self.rows - matmul(self.rows[:, new_piv], E, q)) % q
        rows = np.vstack([self.rows, E])
        pivots = self.pivots + new_piv
        order = np.argsort(pivots, kind="stable")
        self.rows = rows[order]
        self.pivots = [pivots[i] for i in order]
        return new_piv
