import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pesto_lab import gf
from pesto_lab.gf import EchelonBasis, FieldElement, field_arith


def brute_rank(M, q):
    """log_q of the number of distinct vectors in the row space."""
    M = np.asarray(M) % q
    span = {tuple(np.asarray(c) @ M % q) for c in itertools.product(range(q), repeat=M.shape[0])}
    r = 0
    while q**r < len(span):
        r += 1
    assert q**r == len(span)
    return r


def in_rowspace(v, M, q):
    return gf.rank(np.vstack([M, v]), q) == gf.rank(M, q)


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.sampled_from([3, 5, 7]).flatmap(
            lambda q: st.tuples(
                st.just(q),
                st.lists(st.lists(st.integers(0, q - 1), min_size=c, max_size=c), min_size=r, max_size=r),
            )
        )
    )
)


@pytest.mark.parametrize("a, b, op, q, expected", [
    (2, 2, "add", 3, 1),
    (3, 5, "mul", 7, 1),
    (1, 2, "sub", 3, 2),
    (1, 2, "div", 3, 2),
])
def test_field_arith(a, b, op, q, expected):
    assert field_arith(a, b, op, q) == expected


def test_inverse_of_two_mod_three():
    assert FieldElement(2, 3).inverse() == FieldElement(2, 3)
    assert gf.inv(2, 3) == 2


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        field_arith(1, 0, "div", 5)
    with pytest.raises(ZeroDivisionError):
        FieldElement(1, 5) / 0


def test_field_element_reduced_and_exact():
    a = FieldElement(-4, 7)
    assert a.value == 3
    for v in range(1, 7):
        x = FieldElement(v, 7)
        assert x * x.inverse() == FieldElement(1, 7)
    assert (a + 5) + 6 == a + (5 + 6)


@pytest.mark.parametrize("q", [2, 9, 1, 65537])
def test_bad_moduli(q):
    with pytest.raises(ValueError):
        gf.check_modulus(q)


def test_rref_identity_and_zero():
    eye = np.eye(4, dtype=np.int64)
    R, piv = gf.rref(eye, 5)
    assert np.array_equal(R, eye) and piv == [0, 1, 2, 3]
    Z = np.zeros((3, 4), dtype=np.int64)
    R, piv = gf.rref(Z, 3)
    assert np.array_equal(R, Z) and piv == []


def test_rref_singular_two_by_two():
    # det = 2*2 - 1*1 = 3 = 0 mod 3, so the rank is 1, not 2
    M = [[2, 1], [1, 2]]
    assert brute_rank(M, 3) == 1
    R, piv = gf.rref(M, 3)
    assert R.tolist() == [[1, 2], [0, 0]]
    assert piv == [0]


def test_nullspace_examples():
    assert gf.nullspace(np.eye(3, dtype=np.int64), 5).shape == (0, 3)
    assert np.array_equal(gf.nullspace(np.zeros((2, 3), dtype=np.int64), 3), np.eye(3, dtype=np.int64))
    kernel = [v for v in itertools.product(range(3), repeat=2) if (v[0] + 2 * v[1]) % 3 == 0]
    assert kernel == [(0, 0), (1, 1), (2, 2)]
    assert gf.nullspace([[1, 2]], 3).tolist() == [[1, 1]]


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rref_properties(data):
    q, rows = data
    M = np.array(rows, dtype=np.int64)
    R, piv = gf.rref(M, q)
    # rowspace equality, both ways
    for row in M:
        assert in_rowspace(row, R, q)
    for row in R:
        assert in_rowspace(row, M, q)
    # shape of a reduced echelon form
    for i, p in enumerate(piv):
        assert R[i, p] == 1
        assert np.count_nonzero(R[:, p]) == 1
        assert not R[i, :p].any()
    assert not R[len(piv):].any()
    assert piv == sorted(piv)
    R2, piv2 = gf.rref(R, q)
    assert np.array_equal(R, R2) and piv == piv2
    assert len(piv) == brute_rank(M, q)


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rank_nullity(data):
    q, rows = data
    M = np.array(rows, dtype=np.int64)
    K = gf.nullspace(M, q)
    assert gf.rank(M, q) + K.shape[0] == M.shape[1]
    assert not (M @ K.T % q).any()
    if K.shape[0]:
        assert gf.rank(K, q) == K.shape[0]


@given(matrices, st.data())
@settings(max_examples=40, deadline=None)
def test_echelon_basis_matches_rref(data, draw):
    q, rows = data
    M = np.array(rows, dtype=np.int64)
    split = draw.draw(st.integers(0, M.shape[0]))
    B = EchelonBasis(M.shape[1], q)
    B.add(M[:split])
    B.add(M[split:])
    R, piv = gf.rref(M, q)
    assert B.pivots == piv
    assert np.array_equal(B.rows, R[: len(piv)])
    assert B.contains(M).all()


def test_inverse_and_solve():
    rng = np.random.default_rng(3)
    for q in (3, 5, 11):
        A = gf.random_invertible(5, q, rng)
        Ai = gf.inverse(A, q)
        assert np.array_equal(A @ Ai % q, np.eye(5, dtype=np.int64))
        b = rng.integers(0, q, size=5)
        x, K = gf.solve(A, b, q)
        assert np.array_equal(A @ x % q, b) and K.shape[0] == 0
    with pytest.raises(ValueError):
        gf.inverse([[1, 2], [2, 4]], 3)
    assert gf.solve([[1, 1], [1, 1]], [0, 1], 3) is None


def test_matmul_large_modulus_exact():
    q = 65521
    rng = np.random.default_rng(0)
    A = rng.integers(0, q, size=(4, 300))
    B = rng.integers(0, q, size=(300, 3))
    expected = [[sum(int(a) * int(b) for a, b in zip(A[i], B[:, j])) % q for j in range(3)] for i in range(4)]
    assert gf.matmul(A, B, q).tolist() == expected
