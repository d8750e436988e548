import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivertilt import _fpkernel_py
from quivertilt.linalg import KERNEL_NAME, Matrix, column_span_basis

try:
    from quivertilt import _fpkernel

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def test_identity_rank():
    assert Matrix.identity(2, 3).rank() == 3


def test_zero_rank():
    assert Matrix.zeros(5, 2, 5).rank() == 0


def test_equal_rows_f2():
    assert Matrix(2, [[1, 1], [1, 1]]).rank() == 1


def test_nullspace_identity_empty():
    assert Matrix.identity(3, 4).nullspace().cols == 0


def test_nullspace_forced_f2():
    ns = Matrix(2, [[1, 1]]).nullspace()
    assert ns.cols == 1
    assert list(ns.a[:, 0]) == [1, 1]


def test_nullspace_zero_square():
    ns = Matrix.zeros(2, 3, 3).nullspace()
    assert ns.cols == 3
    assert (ns.a == np.eye(3, dtype=np.int64)).all()


def test_solve_identity():
    m = Matrix.identity(7, 3)
    assert list(m.solve([1, 5, 6])) == [1, 5, 6]


def test_solve_inconsistent():
    assert Matrix.zeros(3, 2, 2).solve([1, 0]) is None


def test_solve_redundant_rows_f2():
    x = Matrix(2, [[1, 0], [1, 0]]).solve([1, 1])
    assert list(x) == [1, 0]


def test_zero_shaped_matrices_act_as_zero_maps():
    m = Matrix.zeros(2, 0, 3)
    n = Matrix.zeros(2, 3, 0)
    assert (m @ n.transpose().transpose()).shape == (0, 0)
    assert m.rank() == 0
    assert m.nullspace().cols == 3


def test_nonprime_modulus_rejected():
    with pytest.raises(ValueError):
        Matrix(4, [[1]])


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(0, 6), min_size=c, max_size=c), min_size=r, max_size=r
        )
    )
)


@given(matrices, st.sampled_from([2, 3, 7]))
@settings(max_examples=120, deadline=None)
def test_rank_nullity(data, p):
    m = Matrix(p, data)
    assert m.rank() + m.nullspace().cols == m.cols


@given(matrices, st.sampled_from([2, 3, 7]))
@settings(max_examples=120, deadline=None)
def test_nullspace_vectors_are_solutions(data, p):
    m = Matrix(p, data)
    ns = m.nullspace()
    assert (m @ ns).is_zero()


@given(matrices, st.sampled_from([2, 5]), st.data())
@settings(max_examples=100, deadline=None)
def test_solve_round_trip(data, p, draw):
    m = Matrix(p, data)
    x = draw.draw(st.lists(st.integers(0, p - 1), min_size=m.cols, max_size=m.cols))
    b = (m.a @ np.array(x, dtype=np.int64)) % p
    sol = m.solve(b)
    assert sol is not None
    assert ((m.a @ sol) % p == b).all()


@given(matrices, st.sampled_from([2, 3]))
@settings(max_examples=60, deadline=None)
def test_absent_solution_means_rank_jump(data, p):
    m = Matrix(p, data)
    for b in ([1] + [0] * (m.rows - 1), [p - 1] * m.rows):
        bm = Matrix(p, np.array(b, dtype=np.int64).reshape(-1, 1))
        if m.solve(b) is None:
            assert Matrix.hstack([m, bm]).rank() == m.rank() + 1
        else:
            assert Matrix.hstack([m, bm]).rank() == m.rank()


@given(matrices, st.sampled_from([2, 3, 7]))
@settings(max_examples=80, deadline=None)
def test_kernels_agree(data, p):
    """Compiled and pure kernels produce identical reductions."""
    a1 = (np.array(data, dtype=np.int64) % p).copy()
    a2 = a1.copy()
    piv_py = _fpkernel_py.rref_mod(a2, p)
    if HAVE_COMPILED:
        piv_c = _fpkernel.rref_mod(a1, p)
        assert piv_c == piv_py
        assert (a1 == a2).all()


def test_column_span_basis_spans():
    m = Matrix(3, [[1, 2, 0], [2, 4, 0]])
    b = column_span_basis(m)
    assert b.cols == m.rank()


def test_inverse():
    m = Matrix(5, [[1, 2], [3, 4]])
    inv = m.inverse()
    assert inv is not None
    assert m @ inv == Matrix.identity(5, 2)
    assert Matrix(2, [[1, 1], [1, 1]]).inverse() is None


def test_kernel_name_reported():
    assert KERNEL_NAME in ("compiled", "python")
