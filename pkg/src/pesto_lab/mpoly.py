"""Sparse multivariate polynomials over GF(q).

A :class:`Polynomial` stores its terms as a pair of arrays: an integer
exponent matrix (one row per term) and the matching coefficients.  Terms are
kept combined, nonzero, and sorted in decreasing degree-reverse-lexicographic
order with ``x_1 > x_2 > ... > x_n``.  Polynomials are not reduced modulo the
field equations ``x^q - x``.

Variable names are not part of a polynomial; :func:`render_poly` and
:func:`parse_poly` take the name list explicitly.
"""

from __future__ import annotations

import itertools
import re
from math import comb

import numpy as np

from . import gf

NEG_INF = float("-inf")
TERM_ORDERS = ("grevlex", "deglex")


def order_permutation(exps: np.ndarray, order: str = "grevlex") -> np.ndarray:
    """Indices that sort the rows of ``exps`` into decreasing term order."""
    exps = np.asarray(exps, dtype=np.int64)
    if exps.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    deg = exps.sum(axis=1)
    n = exps.shape[1]
    if order == "grevlex":
        keys = [exps[:, i] for i in range(n)] + [-deg]
    elif order == "deglex":
        keys = [-exps[:, i] for i in reversed(range(n))] + [-deg]
    else:
        raise ValueError(f"unknown term order {order!r}")
    return np.lexsort(keys)


def _row_keys(exps: np.ndarray) -> np.ndarray:
    """Injective int64 (or structured) key per exponent row."""
    n = exps.shape[1]
    base = int(exps.max()) + 1 if exps.size else 1
    if n == 0:
        return np.zeros(exps.shape[0], dtype=np.int64)
    if base ** n < 2**62:
        weights = base ** np.arange(n, dtype=np.int64)
        return exps @ weights
    return np.ascontiguousarray(exps).view(np.dtype((np.void, exps.dtype.itemsize * n))).ravel()


def _combine(exps: np.ndarray, coeffs: np.ndarray, q: int):
    """Merge equal monomials, drop zeros, sort decreasing (grevlex)."""
    coeffs = np.asarray(coeffs, dtype=np.int64) % q
    keep = coeffs != 0
    exps, coeffs = exps[keep], coeffs[keep]
    if exps.shape[0] == 0:
        return exps.reshape(0, exps.shape[1]), coeffs
    _, first, inverse = np.unique(_row_keys(exps), return_index=True, return_inverse=True)
    sums = np.zeros(first.size, dtype=np.int64)
    np.add.at(sums, inverse.ravel(), coeffs)
    sums %= q
    exps = exps[first]
    keep = sums != 0
    exps, sums = exps[keep], sums[keep]
    perm = order_permutation(exps)
    return exps[perm], sums[perm]


class Polynomial:
    """Immutable polynomial in ``nvars`` variables over GF(q)."""

    __slots__ = ("nvars", "q", "exps", "coeffs")

    def __init__(self, nvars: int, q: int, terms: dict | None = None):
        exps = np.zeros((0, nvars), dtype=np.int64)
        coeffs = np.zeros(0, dtype=np.int64)
        if terms:
            exps = np.array([tuple(m) for m in terms], dtype=np.int64).reshape(-1, nvars)
            coeffs = np.array([int(c) for c in terms.values()], dtype=np.int64)
            if (exps < 0).any():
                raise ValueError("negative exponent")
        self._set(nvars, q, *_combine(exps, coeffs, q))

    def _set(self, nvars, q, exps, coeffs):
        self.nvars = nvars
        self.q = q
        self.exps = exps
        self.coeffs = coeffs
        self.exps.flags.writeable = False
        self.coeffs.flags.writeable = False

    @classmethod
    def from_arrays(cls, nvars: int, q: int, exps, coeffs) -> Polynomial:
        p = cls.__new__(cls)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars)
        p._set(nvars, q, *_combine(exps, coeffs, q))
        return p

    @classmethod
    def zero(cls, nvars: int, q: int) -> Polynomial:
        return cls(nvars, q)

    @classmethod
    def constant(cls, nvars: int, q: int, c: int) -> Polynomial:
        return cls(nvars, q, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, q: int, i: int) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, q, {tuple(e): 1})

    @classmethod
    def monomial(cls, mono, q: int, c: int = 1) -> Polynomial:
        mono = tuple(mono)
        return cls(len(mono), q, {mono: c})

    # -- inspection --------------------------------------------------------

    def __len__(self):
        return self.coeffs.size

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def degree(self):
        if self.is_zero():
            return NEG_INF
        return int(self.exps.sum(axis=1).max())

    @property
    def terms(self) -> dict:
        return {tuple(int(v) for v in e): int(c) for e, c in zip(self.exps, self.coeffs)}

    def coefficient(self, mono) -> int:
        return self.terms.get(tuple(mono), 0)

    def leading_monomial(self) -> tuple | None:
        return None if self.is_zero() else tuple(int(v) for v in self.exps[0])

    def variables(self) -> set[int]:
        return set(np.flatnonzero(self.exps.any(axis=0)).tolist())

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: Polynomial):
        if self.nvars != other.nvars or self.q != other.q:
            raise ValueError("polynomials live in different rings")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return Polynomial.constant(self.nvars, self.q, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Polynomial.from_arrays(
            self.nvars, self.q,
            np.vstack([self.exps, other.exps]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    __radd__ = __add__

    def __neg__(self):
        return Polynomial.from_arrays(self.nvars, self.q, self.exps, -self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return Polynomial.from_arrays(self.nvars, self.q, self.exps, self.coeffs * (int(other) % self.q))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.nvars, self.q)
        exps = (self.exps[:, None, :] + other.exps[None, :, :]).reshape(-1, self.nvars)
        coeffs = np.outer(self.coeffs, other.coeffs).ravel() % self.q
        return Polynomial.from_arrays(self.nvars, self.q, exps, coeffs)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, self.q, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = Polynomial.constant(self.nvars, self.q, int(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.q == other.q
            and np.array_equal(self.exps, other.exps)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.nvars, self.q, self.exps.tobytes(), self.coeffs.tobytes()))

    def __repr__(self):
        names = [f"z{i + 1}" for i in range(self.nvars)]
        return f"Polynomial({render_poly(self, names)!r}, q={self.q})"

    # -- evaluation and structure -------------------------------------------

    def evaluate(self, point) -> int:
        """Value at a single point of GF(q)^nvars."""
        point = np.asarray(point, dtype=np.int64).reshape(1, -1)
        return int(self.evaluate_many(point)[0])

    def evaluate_many(self, points) -> np.ndarray:
        """Values at each row of an ``(N, nvars)`` array of points."""
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.nvars:
            raise ValueError(f"expected points with {self.nvars} coordinates, got shape {points.shape}")
        vals = monomial_values(self.exps, points, self.q)
        return gf.matmul(vals, self.coeffs.reshape(-1, 1), self.q).ravel()

    def homogeneous_component(self, d: int) -> Polynomial:
        if d < 0:
            raise ValueError("degree must be non-negative")
        keep = self.exps.sum(axis=1) == d
        return Polynomial.from_arrays(self.nvars, self.q, self.exps[keep], self.coeffs[keep])

    def substitute(self, images) -> Polynomial:
        """Compose with a polynomial map: replace variable i by ``images[i]``."""
        return substitute_many([self], images)[0]

    def specialize(self, fixed: dict) -> Polynomial:
        """Fix some variables to field values and drop them from the ring.

        ``fixed`` maps variable index to value; the remaining variables keep
        their relative order.
        """
        idx = sorted(fixed)
        rest = [i for i in range(self.nvars) if i not in fixed]
        vals = np.array([fixed[i] for i in idx], dtype=np.int64).reshape(1, -1)
        scale = monomial_values(self.exps[:, idx], vals, self.q)[0]
        return Polynomial.from_arrays(len(rest), self.q, self.exps[:, rest], self.coeffs * scale)

    def embed(self, nvars: int, positions) -> Polynomial:
        """Same polynomial viewed in a larger ring; variable i goes to ``positions[i]``."""
        exps = np.zeros((self.exps.shape[0], nvars), dtype=np.int64)
        exps[:, list(positions)] = self.exps
        return Polynomial.from_arrays(nvars, self.q, exps, self.coeffs)


def monomial_values(exps: np.ndarray, points: np.ndarray, q: int) -> np.ndarray:
    """``(N, k)`` array of the k monomials evaluated at the N points.

    Each monomial is a product of at most ``deg`` variable powers, looked up
    in a per-point table of powers; products are reduced only when they
    could overflow int64.
    """
    exps = np.asarray(exps, dtype=np.int64)
    points = np.asarray(points, dtype=np.int64) % q
    N, n = points.shape[0], exps.shape[1]
    k = exps.shape[0]
    if k == 0:
        return np.zeros((N, 0), dtype=np.int64)
    top = int(exps.max()) if exps.size else 0
    slots = int((exps > 0).sum(axis=1).max()) if n else 0
    if slots == 0:
        return np.ones((N, k), dtype=np.int64)
    # table column v * (top + 1) + e holds points[:, v] ** e
    table = np.ones((N, n, top + 1), dtype=np.int64)
    for e in range(1, top + 1):
        table[:, :, e] = table[:, :, e - 1] * points % q
    table = table.reshape(N, n * (top + 1))
    mask = exps > 0
    order = np.argsort(~mask, axis=1, kind="stable")[:, :slots]
    rows = np.arange(k)[:, None]
    live = mask[rows, order]
    cols = np.where(live, order * (top + 1) + exps[rows, order], 0)
    vals = table[:, cols[:, 0]]
    bound = q
    for s in range(1, slots):
        bound *= q
        if bound >= 2**62:
            vals %= q
            bound = q * q
        vals = vals * table[:, cols[:, s]]
    return vals % q


def evaluate_system(polys, points) -> np.ndarray:
    """``(N, len(polys))`` values of every polynomial at every point."""
    points = np.asarray(points, dtype=np.int64)
    if not polys:
        return np.zeros((points.shape[0], 0), dtype=np.int64)
    q, nvars = polys[0].q, polys[0].nvars
    if points.ndim != 2 or points.shape[1] != nvars:
        raise ValueError(f"expected points with {nvars} coordinates, got shape {points.shape}")
    exps = np.vstack([p.exps for p in polys])
    if exps.shape[0] == 0:
        return np.zeros((points.shape[0], len(polys)), dtype=np.int64)
    keys = _row_keys(exps)
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    C = np.zeros((first.size, len(polys)), dtype=np.int64)
    owner = np.repeat(np.arange(len(polys)), [len(p) for p in polys])
    C[inverse.ravel(), owner] = np.concatenate([p.coeffs for p in polys])
    vals = monomial_values(exps[first], points, q)
    return gf.matmul(vals, C, q)


def substitute_many(polys, images) -> list[Polynomial]:
    """Compose every polynomial in ``polys`` with the same substitution.

    Images of monomials are built incrementally (``image(e) = image(e - u_i) *
    images[i]``) and cached across the whole batch.
    """
    images = list(images)
    if not images:
        raise ValueError("empty substitution")
    out_n, q = images[0].nvars, images[0].q
    for p in polys:
        if p.nvars != len(images):
            raise ValueError(f"substitution has {len(images)} images for {p.nvars} variables")
    cache: dict[tuple, Polynomial] = {(0,) * len(images): Polynomial.constant(out_n, q, 1)}

    def image(mono: tuple) -> Polynomial:
        hit = cache.get(mono)
        if hit is not None:
            return hit
        i = max(k for k, e in enumerate(mono) if e)
        lower = list(mono)
        lower[i] -= 1
        result = image(tuple(lower)) * images[i]
        cache[mono] = result
        return result

    out = []
    for p in polys:
        exps, coeffs = [], []
        for mono, c in sorted(p.terms.items(), key=lambda t: sum(t[0])):
            img = image(mono)
            exps.append(img.exps)
            coeffs.append(img.coeffs * c)
        if exps:
            out.append(Polynomial.from_arrays(out_n, q, np.vstack(exps), np.concatenate(coeffs)))
        else:
            out.append(Polynomial.zero(out_n, q))
    return out


def linear_combination(polys, weights) -> Polynomial:
    """``sum(w * p)`` for matching sequences of polynomials and residues."""
    polys = list(polys)
    q, nvars = polys[0].q, polys[0].nvars
    exps = np.vstack([p.exps for p in polys])
    coeffs = np.concatenate([p.coeffs * int(w) for p, w in zip(polys, weights)])
    return Polynomial.from_arrays(nvars, q, exps, coeffs)


class AffineMap:
    """``v -> L v + c`` on GF(q)^dim with an invertible linear part."""

    def __init__(self, matrix, translation, q: int):
        self.q = q
        self.matrix = gf.as_field_array(matrix, q)
        self.translation = gf.as_field_array(translation, q).ravel()
        d = self.matrix.shape[0]
        if self.matrix.shape != (d, d) or self.translation.shape != (d,):
            raise ValueError("affine map needs a square matrix and a matching translation")
        if gf.rank(self.matrix, q) != d:
            raise ValueError("linear part of an affine map must be invertible")

    @classmethod
    def identity(cls, dim: int, q: int) -> AffineMap:
        return cls(np.eye(dim, dtype=np.int64), np.zeros(dim, dtype=np.int64), q)

    @classmethod
    def random(cls, dim: int, q: int, rng: np.random.Generator) -> AffineMap:
        L = gf.random_invertible(dim, q, rng)
        return cls(L, rng.integers(0, q, size=dim, dtype=np.int64), q)

    @property
    def dim(self) -> int:
        return self.translation.size

    def __call__(self, v) -> np.ndarray:
        v = gf.as_field_array(v, self.q)
        if v.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}")
        return (gf.matmul(v, self.matrix.T, self.q) + self.translation) % self.q

    def inverse(self) -> AffineMap:
        Li = gf.inverse(self.matrix, self.q)
        return AffineMap(Li, -gf.matmul(Li, self.translation.reshape(-1, 1), self.q).ravel(), self.q)

    def components(self) -> list[Polynomial]:
        """The map's coordinates as degree-1 polynomials in ``dim`` variables."""
        d, q = self.dim, self.q
        eye = np.eye(d, dtype=np.int64)
        out = []
        for i in range(d):
            exps = np.vstack([eye, np.zeros((1, d), dtype=np.int64)])
            coeffs = np.concatenate([self.matrix[i], [self.translation[i]]])
            out.append(Polynomial.from_arrays(d, q, exps, coeffs))
        return out

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return (self.q == other.q and np.array_equal(self.matrix, other.matrix)
                and np.array_equal(self.translation, other.translation))

    def __repr__(self):
        return f"AffineMap(matrix={self.matrix.tolist()}, translation={self.translation.tolist()}, q={self.q})"


def compose_affine(p: Polynomial, A: AffineMap) -> Polynomial:
    """``p o A``, i.e. the polynomial ``z -> p(A(z))``."""
    if p.nvars != A.dim:
        raise ValueError(f"affine map acts on GF(q)^{A.dim}, polynomial has {p.nvars} variables")
    if p.q != A.q:
        raise ValueError("field mismatch")
    return p.substitute(A.components())


def apply_affine_to_system(A: AffineMap, polys) -> list[Polynomial]:
    """``A o F`` for a list of polynomials ``F`` of length ``A.dim``."""
    polys = list(polys)
    if len(polys) != A.dim:
        raise ValueError(f"affine map acts on GF(q)^{A.dim}, system has {len(polys)} components")
    const = [Polynomial.constant(polys[0].nvars, A.q, 1)]
    return [
        linear_combination(polys + const, list(A.matrix[i]) + [A.translation[i]])
        for i in range(A.dim)
    ]


# -- monomials -----------------------------------------------------------------


def monomials_up_to(n: int, d: int, order: str = "grevlex") -> list[tuple]:
    """All monomials of degree <= d in n variables, strictly decreasing."""
    return [tuple(int(v) for v in e) for e in monomial_array(n, d, order)]


def monomial_array(n: int, d: int, order: str = "grevlex", min_degree: int = 0) -> np.ndarray:
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    rows = []
    for deg in range(min_degree, d + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for v in combo:
                e[v] += 1
            rows.append(e)
    exps = np.array(rows, dtype=np.int64).reshape(-1, n)
    return exps[order_permutation(exps, order)]


class MonomialIndex:
    """Ordered monomial basis of polynomials of degree <= d.

    Column ``j`` holds the j-th largest monomial in the chosen order.  Used as
    the column index of coefficient and Macaulay matrices.
    """

    def __init__(self, n: int, d: int, order: str = "grevlex"):
        self.n, self.d, self.order = n, d, order
        self.exps = monomial_array(n, d, order)
        self.exps.flags.writeable = False
        self.degrees = self.exps.sum(axis=1)
        self._weights = (d + 1) ** np.arange(n, dtype=np.int64)
        keys = self.exps @ self._weights
        self._sorter = np.argsort(keys)
        self._sorted_keys = keys[self._sorter]

    def __len__(self):
        return self.exps.shape[0]

    def positions(self, exps) -> np.ndarray:
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, self.n)
        if exps.size and exps.sum(axis=1).max() > self.d:
            raise ValueError(f"monomial of degree above {self.d}")
        keys = exps @ self._weights
        return self._sorter[np.searchsorted(self._sorted_keys, keys)]

    def position(self, mono) -> int:
        return int(self.positions([mono])[0])

    def to_matrix(self, polys) -> np.ndarray:
        """Coefficient matrix with one row per polynomial."""
        polys = list(polys)
        M = np.zeros((len(polys), len(self)), dtype=np.int64)
        for i, p in enumerate(polys):
            if p.nvars != self.n:
                raise ValueError("variable count mismatch")
            M[i, self.positions(p.exps)] = p.coeffs
        return M

    def to_polys(self, M, q: int) -> list[Polynomial]:
        M = np.asarray(M, dtype=np.int64).reshape(-1, len(self))
        out = []
        for row in M:
            nz = np.flatnonzero(row)
            out.append(Polynomial.from_arrays(self.n, q, self.exps[nz], row[nz]))
        return out

    def row_degrees(self, M) -> list:
        """Degree of each row polynomial (its leading column's degree)."""
        out = []
        for row in np.asarray(M):
            nz = np.flatnonzero(row)
            out.append(int(self.degrees[nz].max()) if nz.size else NEG_INF)
        return out


def count_monomials(n: int, d: int) -> int:
    return comb(n + d, d)


# -- text format ------------------------------------------------------------------


def variable_names(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(count)]


def scheme_names(n: int, t: int) -> list[str]:
    """x1..xt, y1..y(n-t): the secret-side variables."""
    return variable_names("x", t) + variable_names("y", n - t)


def render_poly(p: Polynomial, names) -> str:
    if len(names) != p.nvars:
        raise ValueError(f"{len(names)} names for {p.nvars} variables")
    if p.is_zero():
        return "0"
    parts = []
    for e, c in zip(p.exps, p.coeffs):
        factors = []
        for v in np.flatnonzero(e):
            factors.append(names[v] if e[v] == 1 else f"{names[v]}^{int(e[v])}")
        if c != 1 or not factors:
            factors.insert(0, str(int(c)))
        parts.append("*".join(factors))
    return " + ".join(parts)


class PolySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_poly(text: str, names, q: int) -> Polynomial:
    """Parse ``term (('+'|'-') term)*`` with ``term := factor ('*' factor)*``.

    A factor is an integer or a variable with an optional ``^exponent``.
    """
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind, value=None):
        nonlocal pos
        tok = tokens[pos]
        if tok[0] != kind or (value is not None and tok[1] != value):
            what = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise PolySyntaxError(f"unexpected {what}", tok[2])
        pos += 1
        return tok

    def factor(exp, coeff):
        tok = peek()
        if tok[0] == "int":
            take("int")
            return exp, coeff * tok[1]
        if tok[0] == "name":
            take("name")
            if tok[1] not in index:
                raise PolySyntaxError(f"unknown variable {tok[1]!r}", tok[2])
            power = 1
            if peek()[0] == "op" and peek()[1] == "^":
                take("op", "^")
                power = take("int")[1]
            exp[index[tok[1]]] += power
            return exp, coeff
        what = repr(tok[1]) if tok[0] != "end" else "end of input"
        raise PolySyntaxError(f"unexpected {what}", tok[2])

    def term(sign):
        exp, coeff = [0] * n, sign
        exp, coeff = factor(exp, coeff)
        while peek()[0] == "op" and peek()[1] == "*":
            take("op", "*")
            exp, coeff = factor(exp, coeff)
        return tuple(exp), coeff

    if peek()[0] == "end":
        raise PolySyntaxError("empty polynomial", 0)
    exps, coeffs = [], []
    sign = 1
    if peek()[0] == "op" and peek()[1] == "-":
        take("op", "-")
        sign = -1
    while True:
        e, c = term(sign)
        exps.append(e)
        coeffs.append(c % q)
        tok = peek()
        if tok[0] == "end":
            break
        if tok[0] == "op" and tok[1] in "+-":
            take("op")
            sign = 1 if tok[1] == "+" else -1
            continue
        raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2])
    return Polynomial.from_arrays(n, q, np.array(exps, dtype=np.int64).reshape(-1, n), coeffs)
