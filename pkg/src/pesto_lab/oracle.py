"""Ground truth by exhaustive search, plus structural audits."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import gf
from .mpoly import NEG_INF, MonomialIndex, substitute_many

DEFAULT_SCALE_GUARD = 10**7
_CHUNK = 1 << 16


class ScaleGuardExceeded(RuntimeError):
    """The exhaustive search space is larger than the configured bound."""

    def __init__(self, size: int, bound: int):
        super().__init__(
            f"exhaustive search over {size} points refused; bound is {bound} "
            "(set PESTO_LAB_SCALE_GUARD to raise it)"
        )
        self.size = size
        self.bound = bound


def scale_guard() -> int:
    """Current oracle bound, honouring ``PESTO_LAB_SCALE_GUARD``."""
    value = os.environ.get("PESTO_LAB_SCALE_GUARD")
    return int(value) if value else DEFAULT_SCALE_GUARD


@dataclass(frozen=True)
class SolutionSet:
    q: int
    n: int
    solutions: tuple  # sorted tuples

    def __len__(self):
        return len(self.solutions)

    def __contains__(self, z):
        return tuple(int(v) for v in z) in set(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def to_text(self) -> str:
        """One comma-separated vector per line."""
        return "".join(",".join(map(str, s)) + "\n" for s in self.solutions)


def enumerate_points(q: int, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Points of GF(q)^n in lexicographic order, ``[start, stop)`` slice."""
    stop = q**n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.size, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        digits[:, j] = idx % q
        idx //= q
    return digits


def brute_force_solutions(system, q: int, n: int, bound: int | None = None) -> SolutionSet:
    """Every common zero in GF(q)^n of the polynomials in ``system``."""
    bound = scale_guard() if bound is None else bound
    size = q**n
    if size > bound:
        raise ScaleGuardExceeded(size, bound)
    system = list(system)
    for p in system:
        if p.nvars != n or p.q != q:
            raise ValueError("system does not live in GF(q)[z1..zn]")
    found = []
    for start in range(0, size, _CHUNK):
        pts = enumerate_points(q, n, start, min(size, start + _CHUNK))
        for poly in system:
            if pts.shape[0] == 0:
                break
            pts = pts[poly.evaluate_many(pts) == 0]
        found.extend(tuple(int(v) for v in row) for row in pts)
    return SolutionSet(q, n, tuple(found))


def solution_set_equal(a: SolutionSet, b: SolutionSet) -> bool:
    if (a.q, a.n) != (b.q, b.n):
        raise ValueError("solution sets live in different spaces")
    return a.solutions == b.solutions


def first_difference(a: SolutionSet, b: SolutionSet):
    """Smallest point in exactly one of the two sets, or None."""
    diff = set(a.solutions) ^ set(b.solutions)
    return min(diff) if diff else None


def max_degree(system) -> int:
    system = list(system)
    if not system:
        raise ValueError("empty system")
    d = max(p.degree for p in system)
    return 0 if d == NEG_INF else d


def ov_shape_check(system, oil) -> bool:
    """True iff no polynomial has a quadratic monomial with both variables oil."""
    oil = sorted(set(oil))
    for p in system:
        if oil and any(i >= p.nvars for i in oil):
            raise ValueError("oil index out of range")
        quad = p.exps[p.exps.sum(axis=1) == 2]
        if oil and (quad[:, oil].sum(axis=1) == 2).any():
            return False
    return True


def secret_coordinates(system, A2) -> list:
    """Rewrite a system in the secret variables ``(x, y) = A2(z)``."""
    return substitute_many(list(system), A2.inverse().components())


def x_free_part(system, t: int) -> list:
    """Basis of the polynomials in ``span(system)`` that avoid ``x1..xt``.

    ``system`` must already be in secret coordinates.  Monomials touching an
    x-variable are eliminated first, so the trailing echelon rows are exactly
    the x-free subspace.
    """
    system = list(system)
    if not system:
        return []
    q, n = system[0].q, system[0].nvars
    d = max(max_degree(system), 0)
    index = MonomialIndex(n, d)
    touches_x = index.exps[:, :t].any(axis=1)
    perm = np.concatenate([np.flatnonzero(touches_x), np.flatnonzero(~touches_x)])
    M = index.to_matrix(system)[:, perm]
    R, piv = gf.rref(M, q)
    first_free = int(touches_x.sum())
    rows = []
    for i, p in enumerate(piv):
        if p >= first_free:
            back = np.zeros(len(index), dtype=np.int64)
            back[perm] = R[i]
            rows.append(back)
    return index.to_polys(np.array(rows).reshape(-1, len(index)), q) if rows else []
