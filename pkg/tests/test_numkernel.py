import numpy as np
import pytest

from polyhardy.errors import DomainError, GridMismatch, NumericError
from polyhardy.grid import TruncationGrid
from polyhardy.numkernel import (
    OperatorMatrix,
    commutator_norms,
    hermitian_sqrt,
    operator_norm,
    orthonormalize,
)


def shiftmat(n):
    m = np.zeros((n, n), dtype=np.complex128)
    m[1:, :-1] = np.eye(n - 1)
    return m


def test_operator_matrix_validates_grids():
    g = TruncationGrid((2,))
    m = OperatorMatrix(np.eye(3), src_grid=g, dst_grid=g)
    assert m.rows == 3 and m.cols == 3
    with pytest.raises(GridMismatch):
        OperatorMatrix(np.eye(4), src_grid=g)
    with pytest.raises(NumericError):
        OperatorMatrix(np.array([[np.nan]]))


def test_adjoint_and_apply():
    a = np.array([[1.0, 2j], [0.0, 1.0]])
    m = OperatorMatrix(a)
    np.testing.assert_array_equal(m.adjoint().entries, a.conj().T)
    x = np.array([1.0, 1j])
    np.testing.assert_allclose(m.apply(x), a @ x)


def test_orthonormalize_duplicate_column():
    e1 = np.array([1.0, 0.0, 0.0])
    basis, dec = orthonormalize(np.column_stack([e1, e1]))
    assert dec.rank == 1
    assert basis.shape == (3, 1)
    assert abs(abs(basis[0, 0]) - 1.0) <= 1e-14


def test_orthonormalize_zero_matrix():
    basis, dec = orthonormalize(np.zeros((4, 3)))
    assert dec.rank == 0
    assert basis.shape == (4, 0)


def test_orthonormalize_empty_input():
    basis, dec = orthonormalize(np.zeros((4, 0)))
    assert dec.rank == 0 and basis.shape == (4, 0)


def test_orthonormalize_projector_reproduces_columns():
    rng = np.random.default_rng(5)
    cols = rng.standard_normal((10, 4)) + 1j * rng.standard_normal((10, 4))
    basis, dec = orthonormalize(cols)
    assert dec.rank == 4
    p = basis @ basis.conj().T
    for c in cols.T:
        assert np.linalg.norm(p @ c - c) <= 1e-10
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(4))) <= 1e-12
    # idempotent projector
    assert operator_norm(p @ p - p) <= 1e-12


def test_rank_decision_scale_equivariance():
    rng = np.random.default_rng(9)
    cols = rng.standard_normal((8, 3))
    _, dec = orthonormalize(cols)
    for c in (1e-3, 1e3):
        _, scaled = orthonormalize(c * cols)
        assert scaled.rank == dec.rank


def test_rank_decision_records_spectrum():
    cols = np.diag([3.0, 1e-12])
    _, dec = orthonormalize(cols, rank_epsilon=1e-8)
    assert dec.rank == 1
    assert len(dec.singular_values) == 2
    assert dec.cutoff == pytest.approx(1e-8 * 3.0)


def test_hermitian_sqrt_identity():
    np.testing.assert_allclose(hermitian_sqrt(np.eye(4)), np.eye(4), atol=1e-14)


def test_hermitian_sqrt_diagonal():
    root = hermitian_sqrt(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(root, np.diag([2.0, 3.0]), atol=1e-14)


def test_hermitian_sqrt_defect_of_contraction():
    rng = np.random.default_rng(2)
    t = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    t *= 0.9 / operator_norm(t)
    a = np.eye(6) - t @ t.conj().T
    b = hermitian_sqrt(a)
    assert operator_norm(b @ b - a) <= 1e-8
    # the root of an exact square comes back
    np.testing.assert_allclose(hermitian_sqrt(b @ b), b, atol=1e-10)


def test_hermitian_sqrt_rejects_bad_input():
    with pytest.raises(DomainError):
        hermitian_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        hermitian_sqrt(np.diag([1.0, -0.5]))
    with pytest.raises(GridMismatch):
        hermitian_sqrt(np.zeros((2, 3)))


def test_commutator_norms_self():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    plain, star = commutator_norms(a, a)
    assert plain <= 1e-14
    assert star == pytest.approx(operator_norm(a.conj().T @ a - a @ a.conj().T))


def test_commutator_norms_diagonal():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([4.0, 5.0, 6.0])
    assert commutator_norms(a, b) == (0.0, 0.0)


def test_truncated_shift_self_commutator():
    # for the truncated shift A*A - AA* = diag(1, 0, ..., 0, -1), norm 1
    a = shiftmat(4)
    plain, star = commutator_norms(a, a)
    assert plain <= 1e-15
    assert star == pytest.approx(1.0, abs=1e-12)


def test_commutator_norms_shape_check():
    with pytest.raises(GridMismatch):
        commutator_norms(np.eye(2), np.eye(3))


def test_operator_norm_basics():
    assert operator_norm(np.zeros((3, 0))) == 0.0
    assert operator_norm(np.diag([3.0, -7.0])) == pytest.approx(7.0)
    with pytest.raises(NumericError):
        operator_norm(np.array([[np.inf]]))


def test_operator_norm_tall_matches_svd():
    # the tall/wide gram path must agree with the plain 2-norm
    rng = np.random.default_rng(4)
    for shape in ((240, 6), (6, 240), (1000, 12)):
        a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        assert operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-12)
