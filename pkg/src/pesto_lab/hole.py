"""Reduction to quadrics through quadratic input/output relations.

Every degree <= 2 polynomial ``R(z, w)`` vanishing on all valid pairs
``(z, G_pub(z))`` is found from sampled pairs as the nullspace of an
evaluation matrix.  Substituting a target output for ``w`` leaves a
quadratic system in ``z``.

Relation polynomials live in ``m + n`` variables ordered ``w1..wm, z1..zn``.
The evaluation matrix uses the column layout ``w*w, w*z, z*z, w, z, 1``, so
after row reduction the relations free of ``w*w`` and ``w*z`` terms are the
trailing rows.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from math import comb

import numpy as np

from . import gf
from .mpoly import Polynomial, evaluate_system

log = logging.getLogger(__name__)

SAMPLE_MARGIN = 20


class UndersampledWarning(RuntimeWarning):
    """Fewer samples than relation monomials: spurious relations are likely."""


class NoShortRelationsWarning(RuntimeWarning):
    """No relation avoided the w*w and w*z monomials."""


def relation_monomial_count(n: int, m: int) -> int:
    return comb(n + m + 2, 2)


def default_sample_count(n: int, m: int) -> int:
    return relation_monomial_count(n, m) + SAMPLE_MARGIN


def relation_columns(n: int, m: int) -> tuple[np.ndarray, int]:
    """Exponent rows (over ``w..., z...``) of the evaluation-matrix columns.

    Returns the ``(C(n+m+2, 2), m+n)`` exponent array and the index of the
    first ``z*z`` column.
    """
    N = m + n
    rows = []

    def mono(*vars_):
        e = [0] * N
        for v in vars_:
            e[v] += 1
        rows.append(e)

    for i in range(m):
        for j in range(i, m):
            mono(i, j)
    for i in range(m):
        for j in range(n):
            mono(i, m + j)
    zz_start = len(rows)
    for i in range(n):
        for j in range(i, n):
            mono(m + i, m + j)
    for i in range(m):
        mono(i)
    for j in range(n):
        mono(m + j)
    mono()
    return np.array(rows, dtype=np.int64), zz_start


@dataclass
class RelationSpace:
    """Basis of the quadratic relations, stored as coefficient rows.

    ``matrix`` rows are in the column layout of :func:`relation_columns`.
    """

    n: int
    m: int
    q: int
    matrix: np.ndarray
    samples: int = 0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def basis(self) -> list[Polynomial]:
        exps, _ = relation_columns(self.n, self.m)
        return [_row_to_poly(row, exps, self.n + self.m, self.q) for row in self.matrix]

    def vanishes_on(self, Z, W) -> np.ndarray:
        """Boolean per relation: zero at every pair (Z[k], W[k])."""
        vals = _evaluation_matrix(Z, W, self.q)
        return ~gf.matmul(vals, self.matrix.T, self.q).any(axis=0)


def _row_to_poly(row, exps, nvars, q) -> Polynomial:
    nz = np.flatnonzero(row)
    return Polynomial.from_arrays(nvars, q, exps[nz], row[nz])


def _evaluation_matrix(Z, W, q) -> np.ndarray:
    Z = np.asarray(Z, dtype=np.int64) % q
    W = np.asarray(W, dtype=np.int64) % q
    m, n = W.shape[1], Z.shape[1]
    iu_w = np.triu_indices(m)
    iu_z = np.triu_indices(n)
    ww = (W[:, iu_w[0]] * W[:, iu_w[1]]) % q
    wz = (W[:, :, None] * Z[:, None, :]).reshape(W.shape[0], m * n) % q
    zz = (Z[:, iu_z[0]] * Z[:, iu_z[1]]) % q
    one = np.ones((Z.shape[0], 1), dtype=np.int64)
    return np.hstack([ww, wz, zz, W, Z, one])


def collect_samples(pk, count: int | None = None, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random inputs and their public outputs, as ``(Z, W)`` arrays."""
    p = pk.params
    count = default_sample_count(p.n, p.m) if count is None else count
    if count < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    Z = rng.integers(0, p.q, size=(count, p.n), dtype=np.int64)
    W = evaluate_system(pk.gpub, Z)
    return Z, W


def find_quadratic_relations(samples, n: int, m: int, q: int) -> RelationSpace:
    Z, W = samples
    Z = np.asarray(Z, dtype=np.int64)
    W = np.asarray(W, dtype=np.int64)
    if Z.shape[1] != n or W.shape[1] != m or Z.shape[0] != W.shape[0]:
        raise ValueError("sample shapes do not match (n, m)")
    needed = relation_monomial_count(n, m)
    if Z.shape[0] < needed:
        warnings.warn(
            f"{Z.shape[0]} samples for {needed} relation monomials; "
            "the recovered space may contain spurious relations",
            UndersampledWarning,
            stacklevel=2,
        )
    E = _evaluation_matrix(Z, W, q)
    basis = gf.nullspace(E, q)
    log.info("relation matrix %dx%d, nullspace dimension %d", E.shape[0], E.shape[1], basis.shape[0])
    return RelationSpace(n, m, q, basis, samples=Z.shape[0])


def short_relation_rows(rs: RelationSpace) -> np.ndarray:
    _, zz_start = relation_columns(rs.n, rs.m)
    if rs.dim == 0:
        return rs.matrix
    R, piv = gf.rref(rs.matrix, rs.q)
    keep = [i for i, p in enumerate(piv) if p >= zz_start]
    return R[keep]


def isolate_short_relations(rs: RelationSpace) -> list[Polynomial]:
    """Relations with no ``w*w`` or ``w*z`` monomial (trailing echelon rows)."""
    rows = short_relation_rows(rs)
    if rows.shape[0] == 0:
        warnings.warn("no short relations found", NoShortRelationsWarning, stacklevel=2)
        return []
    exps, _ = relation_columns(rs.n, rs.m)
    return [_row_to_poly(row, exps, rs.n + rs.m, rs.q) for row in rows]


def specialize_at_output(relations, w) -> list[Polynomial]:
    """Substitute ``w`` into relations over ``w1..wm, z1..zn``.

    ``relations`` is a :class:`RelationSpace` or a list of relation
    polynomials; the result is a list of polynomials in ``z1..zn``.
    """
    polys = relations.basis if isinstance(relations, RelationSpace) else list(relations)
    w = np.asarray(w, dtype=np.int64).ravel()
    fixed = {i: int(v) for i, v in enumerate(w)}
    out = [r.specialize(fixed) for r in polys]
    return out


@dataclass
class HoleAttack:
    relations: RelationSpace
    short: list
    system: list
    samples: int
    matrix_shape: tuple

    @property
    def ok(self) -> bool:
        return bool(self.short)


def hole_attack(pk, target, samples: int | None = None, seed=None) -> HoleAttack:
    """Full pipeline: sample, recover relations, specialize at ``target``."""
    p = pk.params
    target = np.asarray(target, dtype=np.int64).ravel()
    if target.size != p.m:
        raise ValueError(f"target must have length {p.m}")
    Z, W = collect_samples(pk, samples, seed)
    rs = find_quadratic_relations((Z, W), p.n, p.m, p.q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoShortRelationsWarning)
        short = isolate_short_relations(rs)
    system = specialize_at_output(rs, target)
    return HoleAttack(rs, short, system, Z.shape[0], (Z.shape[0], relation_monomial_count(p.n, p.m)))
