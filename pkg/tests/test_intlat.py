import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups.cardinals import INFINITE
from coarsegroups.errors import DomainError
from coarsegroups.intlat import (
    IntMatrix,
    hermite_normal_form,
    lattice_index,
    lattice_membership,
    left_kernel,
    rank,
    right_kernel,
    smith_normal_form,
)
from oracles import coset_count, in_row_lattice, invariant_factors, is_row_hnf, leibniz_det, matmul

matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-10, 10), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def test_hnf_examples():
    H, U = hermite_normal_form([[2, 0], [0, 3]])
    assert H.tolist() == [[2, 0], [0, 3]] and U == IntMatrix.identity(2)
    H, U = hermite_normal_form([[0, 0], [0, 0]])
    assert H.is_zero() and U == IntMatrix.identity(2)
    H, _ = hermite_normal_form([[4, 6], [2, 2]])
    assert H[0, 0] == 2


def test_hnf_row_lattice_matches_by_mutual_membership():
    A = [[4, 6], [2, 2]]
    H, _ = hermite_normal_form(A)
    assert all(in_row_lattice(r, A) for r in H.tolist())
    assert all(in_row_lattice(r, H.tolist()) for r in A)


def test_snf_examples():
    assert smith_normal_form(IntMatrix.identity(3)).D == IntMatrix.identity(3)
    assert smith_normal_form([[2, 4], [6, 8]]).invariant_factors == (2, 4)
    assert smith_normal_form([[6, 0], [0, 4]]).invariant_factors == (2, 12)


def test_membership_examples():
    assert lattice_membership((2, 0), [[1, 0], [0, 1]]) == (2, 0)
    assert lattice_membership((1, 0), [[2, 0]]) is None
    assert lattice_membership((3, 3), [[1, 2], [0, 3]]) == (3, -1)


def test_index_examples():
    assert lattice_index([[2, 0], [0, 2]], 2) == 4
    assert lattice_index([[1, 0], [0, 1]], 2) == 1
    assert lattice_index([[1, 0]], 2) is INFINITE


def test_width_mismatch_is_domain_error():
    with pytest.raises(DomainError):
        lattice_membership((1, 2, 3), [[1, 0]])


@given(matrices)
def test_hnf_properties(A):
    H, U = hermite_normal_form(A)
    assert matmul(U.tolist(), A) == H.tolist()
    assert abs(leibniz_det(U.tolist())) == 1
    assert is_row_hnf(H.tolist())


@given(matrices)
def test_hnf_is_canonical_under_unimodular_row_ops(A):
    B = [list(r) for r in A]
    if len(B) > 1:
        B[0] = [a + 3 * b for a, b in zip(B[0], B[1])]
        B[0], B[-1] = B[-1], B[0]
    assert hermite_normal_form(A)[0] == hermite_normal_form(B)[0]


@given(matrices)
def test_snf_properties(A):
    s = smith_normal_form(A)
    assert (s.U @ s.D @ s.V).tolist() == A
    assert abs(leibniz_det(s.U.tolist())) == 1 and abs(leibniz_det(s.V.tolist())) == 1
    assert (s.U @ s.U_inv) == IntMatrix.identity(len(A))
    assert (s.V @ s.V_inv) == IntMatrix.identity(len(A[0]))
    assert list(s.invariant_factors) == invariant_factors(A)
    m, n = s.D.shape
    assert all(s.D[i, j] == 0 for i in range(m) for j in range(n) if i != j)


@given(matrices)
def test_kernels(A):
    for row in left_kernel(A).tolist():
        assert matmul([row], A) == [[0] * len(A[0])]
    for row in right_kernel(A).tolist():
        assert all(sum(a * x for a, x in zip(r, row)) == 0 for r in A)
    assert left_kernel(A).nrows == len(A) - rank(A)
    assert right_kernel(A).nrows == len(A[0]) - rank(A)


@given(matrices, st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_membership_roundtrip(A, coeffs):
    v = matmul([coeffs[: len(A)]], A)[0]
    c = lattice_membership(v, A)
    assert c is not None and matmul([list(c)], A)[0] == v


@given(matrices)
def test_index_matches_coset_count(A):
    n = len(A[0])
    idx = lattice_index(A, n)
    count = coset_count(A, n)
    if count is None:
        assert idx is INFINITE
    elif count <= 64:
        assert idx == count
    else:
        assert idx > 64
