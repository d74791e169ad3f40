import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscavg.errors import DimensionMismatch, NotSkewHermitian
from oscavg.linear import (SkewHermitianOperator, block_rotation_operator,
                           flow, make_operator, pinv_apply)


def test_rejects_non_skew_matrix():
    with pytest.raises(NotSkewHermitian):
        make_operator(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        make_operator(np.zeros((2, 3)))


def test_rotation_flow_matches_analytic():
    w = 1.7
    op = block_rotation_operator([w])
    for t in (0.0, 0.3, 2.0, -5.1):
        got = op.flow(t, np.array([1.0, 0.0]))
        assert np.allclose(got, [np.cos(w * t), np.sin(w * t)], atol=1e-14)


def test_flow_matrix_group_property():
    op = block_rotation_operator([2.0, 0.5])
    a, b = 0.7, -1.9
    assert np.allclose(op.flow_matrix(a) @ op.flow_matrix(b),
                       op.flow_matrix(a + b), atol=1e-13)
    assert np.allclose(op.flow_matrix(a) @ op.flow_matrix(-a),
                       np.eye(4), atol=1e-13)


def test_flow_derivative_is_operator():
    op = block_rotation_operator([3.0, 1.0])
    h = 1e-6
    approx = (op.flow_matrix(h) - op.flow_matrix(-h)) / (2 * h)
    assert np.allclose(approx, op.matrix(), atol=1e-7)


def test_eigenphases_sorted_descending_by_magnitude():
    op = block_rotation_operator([1.0, 4.0, 2.5])
    mags = np.abs(op.eigenphases)
    assert np.all(np.diff(mags) <= 1e-12)
    assert np.allclose(sorted(mags), [1, 1, 2.5, 2.5, 4, 4])


def test_pinv_inverts_off_kernel_and_zeroes_kernel():
    op = block_rotation_operator([2.0, 0.0])   # second block is a 2D kernel
    c = np.array([1.0, -2.0, 3.0, 4.0])
    p = op.pinv_apply(c)
    # Omega P recovers the non-kernel part of c and the kernel part of P is 0
    assert np.allclose(op.apply(p)[:2], c[:2], atol=1e-12)
    assert np.allclose(p[2:], 0.0, atol=1e-14)


def test_kernel_modes_have_zero_frequency():
    op = block_rotation_operator([2.0, 0.0])
    assert np.sum(op.frequencies <= op.zero_tolerance * 2.0) == 2


def test_dimension_mismatch_on_bad_vector():
    op = block_rotation_operator([1.0])
    with pytest.raises(DimensionMismatch):
        op.flow(0.1, np.zeros(3))


def test_complex_skew_hermitian_supported():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = 0.5 * (a - a.conj().T)
    op = make_operator(m)
    assert not op.real
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    # unitary flow preserves the Hermitian norm
    assert np.isclose(np.linalg.norm(op.flow(2.3, x)), np.linalg.norm(x))
    assert np.allclose(op.matrix(), m, atol=1e-12)


def test_module_level_wrappers():
    op = block_rotation_operator([1.0])
    x = np.array([0.5, 0.5])
    assert np.allclose(flow(op, 1.0, x), op.flow(1.0, x))
    assert np.allclose(pinv_apply(op, x), op.pinv_apply(x))


@st.composite
def skew_matrices(draw):
    d = draw(st.integers(min_value=1, max_value=6))
    seed = draw(st.integers(min_value=0, max_value=2 ** 31))
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    return a - a.T


@settings(max_examples=40, deadline=None)
@given(skew_matrices(), st.floats(min_value=-20, max_value=20))
def test_real_skew_flow_is_orthogonal(m, t):
    op = make_operator(m)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(m.shape[0])
    assert np.isclose(np.linalg.norm(op.flow(t, x)), np.linalg.norm(x),
                      rtol=1e-9, atol=1e-12)
