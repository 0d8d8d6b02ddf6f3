"""Reduction of the quartic public key to quadrics by Macaulay elimination.

The degree-4 Macaulay matrix of ``G_pub - c`` is put in reduced row echelon
form under a degree-compatible column order.  Whenever a row of degree
below 4 shows up, all of its monomial multiples of degree at most 4 are
appended (the mutant step) and elimination continues.  For Pesto keys the
degree <= 2 rows of the converged matrix generate the same ideal as
``G_pub - c``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import gf
from .mpoly import MonomialIndex, Polynomial, monomial_array

log = logging.getLogger(__name__)

CLOSURE_DEGREE = 4


@dataclass
class MacaulayMatrix:
    """Rows ``mu * g`` indexed by the monomials of degree <= D.

    ``provenance[i]`` is ``(generator_index, multiplier_exponents)``.
    """

    columns: MonomialIndex
    rows: np.ndarray
    provenance: list

    @property
    def shape(self):
        return self.rows.shape

    def row_polynomial(self, i: int, q: int) -> Polynomial:
        return self.columns.to_polys(self.rows[i], q)[0]


@dataclass
class Reduction:
    """Result of a reduction to quadrics.

    ``system`` holds the degree <= 2 equations.  ``residual`` is empty when
    the reduction succeeded; otherwise it holds equations (degree >= 3) of
    the input that the quadratic part does not account for, so that
    ``system + residual`` still has the input's solution set.
    """

    system: list
    residual: list = field(default_factory=list)
    passes: list = field(default_factory=list)
    columns: int = 0
    rows: int = 0

    @property
    def ok(self) -> bool:
        return not self.residual

    @property
    def equations(self) -> list:
        return self.system + self.residual


def _multiples(poly_rows: np.ndarray, index: MonomialIndex, D: int, include_one: bool):
    """All rows ``mu * f`` with ``deg(mu f) <= D`` for each row ``f``.

    Returns ``(matrix, provenance)`` where provenance is ``(row, mu)``.
    """
    out, prov = [], []
    n = index.n
    for r, row in enumerate(np.atleast_2d(poly_rows)):
        nz = np.flatnonzero(row)
        if nz.size == 0:
            continue
        deg = int(index.degrees[nz].max())
        if deg > D:
            raise ValueError(f"polynomial of degree {deg} exceeds closure degree {D}")
        mults = monomial_array(n, D - deg, index.order)
        if not include_one:
            mults = mults[mults.sum(axis=1) > 0]
        if mults.shape[0] == 0:
            continue
        support = index.exps[nz]
        cols = index.positions((support[None, :, :] + mults[:, None, :]).reshape(-1, n))
        M = np.zeros((mults.shape[0], len(index)), dtype=np.int64)
        M[np.repeat(np.arange(mults.shape[0]), nz.size), cols] = np.tile(row[nz], mults.shape[0])
        out.append(M)
        prov.extend((r, tuple(int(v) for v in mu)) for mu in mults)
    if not out:
        return np.zeros((0, len(index)), dtype=np.int64), []
    return np.vstack(out), prov


def build_degree_matrix(system, D: int = CLOSURE_DEGREE, order: str = "grevlex") -> MacaulayMatrix:
    """Macaulay matrix of degree ``D``: every ``mu * g`` with ``deg(mu g) <= D``."""
    system = list(system)
    if not system:
        raise ValueError("empty system")
    n = system[0].nvars
    index = MonomialIndex(n, D, order)
    rows, prov = _multiples(index.to_matrix(system), index, D, include_one=True)
    return MacaulayMatrix(index, rows, prov)


def _split_by_degree(basis: gf.EchelonBasis, index: MonomialIndex, max_degree: int) -> np.ndarray:
    keep = [i for i, p in enumerate(basis.pivots) if index.degrees[p] <= max_degree]
    return basis.rows[keep]


def extract_quadratic_subspace(polys, order: str = "grevlex") -> list[Polynomial]:
    """Degree <= 2 part of the span of ``polys`` (a public key or a list).

    The coefficient matrix over the monomials of degree <= 4 is reduced; the
    rows whose leading monomial has degree <= 2 form a basis of the subspace.
    """
    polys = getattr(polys, "gpub", polys)
    q = polys[0].q
    index = MonomialIndex(polys[0].nvars, CLOSURE_DEGREE, order)
    R, piv = gf.rref(index.to_matrix(polys), q)
    low = [i for i, p in enumerate(piv) if index.degrees[p] <= 2]
    return index.to_polys(R[low], q)


def _mutant_closure(rows: np.ndarray, index: MonomialIndex, q: int, D: int):
    """Echelon basis of the span of ``rows`` closed under the mutant step.

    A pivot is expanded at most once: the rows of a reduced echelon basis
    with pivots of degree < D are multiplied by every monomial that keeps
    the degree <= D.  Pivot columns never disappear as the span grows, so
    tracking expanded pivots is enough to reach the closure.
    """
    basis = gf.EchelonBasis(len(index), q)
    basis.add(rows)
    expanded: set[int] = set()
    passes = [{"pass": 0, "appended": int(rows.shape[0]), "rank": len(basis), "new_low": 0}]
    total_rows = int(rows.shape[0])
    while True:
        todo = [i for i, p in enumerate(basis.pivots) if index.degrees[p] < D and p not in expanded]
        if not todo:
            break
        expanded.update(basis.pivots[i] for i in todo)
        new, _ = _multiples(basis.rows[todo], index, D, include_one=False)
        before = len(basis)
        basis.add(new)
        total_rows += new.shape[0]
        passes.append({
            "pass": len(passes),
            "appended": int(new.shape[0]),
            "rank": len(basis),
            "new_low": len(todo),
            "gained": len(basis) - before,
        })
        log.debug("mutant pass %d: expanded %d rows, rank %d", len(passes) - 1, len(todo), len(basis))
    return basis, passes, total_rows


def _echelon(rows: np.ndarray, q: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    R, piv = gf.rref(rows, q)
    return R[: len(piv)]


def _shift_target(polys, c) -> list[Polynomial]:
    c = np.asarray(c, dtype=np.int64).ravel()
    if c.size != len(polys):
        raise ValueError(f"target must have length {len(polys)}")
    return [g - int(ci) for g, ci in zip(polys, c)]


def _residual(originals: np.ndarray, quad: np.ndarray, index: MonomialIndex, q: int, D: int):
    """Rows of ``originals`` not in the degree-D multiples of ``quad``."""
    span = gf.EchelonBasis(len(index), q)
    if quad.shape[0]:
        span.add(_multiples(quad, index, D, include_one=True)[0])
    rem = span.reduce(originals)
    return _echelon(rem[rem.any(axis=1)], q)


def mutant_elimination(pk, c, D: int = CLOSURE_DEGREE, order: str = "grevlex") -> Reduction:
    """Quadratic system with the same solutions as ``G_pub(z) = c``.

    ``pk`` may be a :class:`~pesto_lab.scheme.PublicKey` or a list of
    polynomials.  The returned ``system`` is the set of degree <= 2 rows of
    the converged, reduced Macaulay matrix.  If some input equation is not
    in the span of the degree-``D`` multiples of those rows, its remainder is
    reported in ``residual``.
    """
    polys = _shift_target(list(getattr(pk, "gpub", pk)), c)
    q, n = polys[0].q, polys[0].nvars
    mac = build_degree_matrix(polys, D, order)
    index = mac.columns
    basis, passes, total = _mutant_closure(mac.rows, index, q, D)
    quad = _split_by_degree(basis, index, 2)
    residual = _residual(index.to_matrix(polys), quad, index, q, D)
    if residual.shape[0]:
        log.warning("reduction left %d equations of degree >= 3", residual.shape[0])
    return Reduction(
        system=index.to_polys(quad, q),
        residual=index.to_polys(residual, q),
        passes=passes,
        columns=len(index),
        rows=total,
    )


def reduce_with_known_quadrics(pk, c, D: int = CLOSURE_DEGREE, order: str = "grevlex") -> Reduction:
    """Two-stage variant: find the quadrics first, then reduce the rest.

    The degree <= 2 subspace ``W`` of ``span(G_pub - c)`` is closed under
    multiplication up to degree ``D``; every remaining basis element of the
    span is reduced modulo that closure.  For Pesto keys each remainder has
    degree <= 2.
    """
    polys = _shift_target(list(getattr(pk, "gpub", pk)), c)
    q = polys[0].q
    index = MonomialIndex(polys[0].nvars, D, order)
    R, piv = gf.rref(index.to_matrix(polys), q)
    R = R[: len(piv)]
    low = np.array([index.degrees[p] <= 2 for p in piv], dtype=bool)
    W, rest = R[low], R[~low]
    if W.shape[0]:
        seed, _ = _multiples(W, index, D, include_one=True)
        closure, passes, total = _mutant_closure(seed, index, q, D)
    else:
        closure, passes, total = gf.EchelonBasis(len(index), q), [], 0
    reduced = closure.reduce(rest)
    reduced = reduced[reduced.any(axis=1)]
    low = np.array([d <= 2 for d in index.row_degrees(reduced)], dtype=bool)
    system = _echelon(np.vstack([W, reduced[low]]), q)
    residual = _echelon(reduced[~low], q)
    if residual.shape[0]:
        log.warning("known-quadrics reduction left %d equations of degree >= 3", residual.shape[0])
    return Reduction(
        system=index.to_polys(system, q),
        residual=index.to_polys(residual, q),
        passes=passes,
        columns=len(index),
        rows=int(R.shape[0]) + total,
    )
