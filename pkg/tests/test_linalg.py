import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import jacobi_svd, naive_frobenius, naive_matmul, projector
from rsp.errors import ParameterError, ShapeError
from rsp.linalg import (
    frobenius_norm, matmul, operator_norm, orthonormal_completion, orthonormality_error,
    principal_angles, shrink, truncated_svd,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def small_matrices(max_side=8):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


class TestMatmul:
    def test_identity(self, rng):
        a = rng.standard_normal((3, 4))
        assert np.array_equal(matmul(np.eye(3), a), a)

    def test_hand_checked(self):
        assert matmul([[1, 2], [3, 4]], [[0], [1]]).tolist() == [[2.0], [4.0]]

    def test_against_triple_loop(self, rng):
        a = rng.standard_normal((7, 5))
        b = rng.standard_normal((5, 3))
        np.testing.assert_allclose(matmul(a, b), naive_matmul(a, b), rtol=0, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(ParameterError):
            matmul(np.array([[np.nan]]), np.ones((1, 1)))


class TestTruncatedSvd:
    def test_diagonal(self):
        t = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
        np.testing.assert_allclose(t.singular_values, [3.0, 2.0])

    def test_rank_one(self, rng):
        u = rng.standard_normal(6)
        v = rng.standard_normal(4)
        t = truncated_svd(np.outer(u, v), 1)
        assert t.singular_values[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-12)
        vn = v / np.linalg.norm(v)
        assert min(np.linalg.norm(t.right_vectors[:, 0] - vn),
                   np.linalg.norm(t.right_vectors[:, 0] + vn)) < 1e-12

    def test_against_jacobi(self, rng):
        a = rng.standard_normal((20, 15))
        _, s, _ = jacobi_svd(a)
        t = truncated_svd(a, 5)
        np.testing.assert_allclose(t.singular_values, s[:5], rtol=1e-8)

    @pytest.mark.parametrize("shape,r", [((150, 120), 5), ((90, 300), 3)])
    def test_randomized_path_on_low_rank(self, rng, shape, r):
        a = rng.standard_normal((shape[0], r)) @ rng.standard_normal((r, shape[1]))
        a += 1e-9 * rng.standard_normal(shape)
        t = truncated_svd(a, r, method="randomized", seed=3)
        _, s, v = jacobi_svd(a) if min(shape) <= 120 else (None, *np.linalg.svd(a)[1:])
        if v.shape[0] != a.shape[1]:
            v = v.T
        np.testing.assert_allclose(t.singular_values, s[:r], rtol=1e-8)
        assert np.linalg.norm(projector(t.right_vectors) - projector(v[:, :r])) < 1e-8

    def test_auto_is_dense_for_small(self, rng):
        a = rng.standard_normal((50, 200))
        assert np.array_equal(truncated_svd(a, 3).singular_values,
                              truncated_svd(a, 3, method="dense").singular_values)

    @pytest.mark.parametrize("r", [0, 4])
    def test_rank_out_of_range(self, r):
        with pytest.raises(ParameterError):
            truncated_svd(np.ones((3, 5)), r)

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            truncated_svd(np.eye(3), 1, method="lanczos")

    @given(small_matrices())
    def test_full_rank_reconstruction(self, a):
        t = truncated_svd(a, min(a.shape))
        scale = max(np.linalg.norm(a), 1.0)
        assert np.linalg.norm(t.reconstruct() - a) <= 1e-8 * scale
        assert orthonormality_error(t.right_vectors) < 1e-10
        assert orthonormality_error(t.left_vectors) < 1e-10
        assert np.all(np.diff(t.singular_values) <= 0)
        assert np.all(t.singular_values >= 0)


class TestOperatorNorm:
    def test_diagonal(self):
        assert operator_norm(np.diag([3.0, 2.0, 1.0])) == pytest.approx(3.0, rel=1e-8)

    def test_zero(self):
        assert operator_norm(np.zeros((4, 3))) == 0.0

    def test_against_jacobi(self, rng):
        a = rng.standard_normal((30, 20))
        _, s, _ = jacobi_svd(a)
        assert operator_norm(a) == pytest.approx(s[0], rel=1e-8)

    @given(small_matrices())
    def test_matches_top_singular_value(self, a):
        top = truncated_svd(a, 1).singular_values[0]
        assert operator_norm(a) == pytest.approx(top, rel=1e-8, abs=1e-300)


class TestShrink:
    def test_scalars(self):
        np.testing.assert_allclose(shrink(np.array([[1.2, -0.3]]), 0.5), [[0.7, 0.0]], atol=1e-15)

    def test_zero_threshold_is_identity(self, rng):
        a = rng.standard_normal((5, 5))
        np.testing.assert_array_equal(shrink(a, 0.0), a)

    def test_full_threshold(self, rng):
        a = rng.standard_normal((10, 10))
        assert not np.any(shrink(a, np.max(np.abs(a))))

    def test_tie_maps_to_zero(self):
        assert shrink(np.array([[0.5, -0.5]]), 0.5).tolist() == [[0.0, 0.0]]

    def test_negative_threshold(self):
        with pytest.raises(ParameterError):
            shrink(np.ones((2, 2)), -0.1)

    @given(small_matrices(), st.floats(0, 100), st.floats(0, 100))
    def test_properties(self, a, t1, t2):
        once = shrink(a, t1)
        assert np.all(np.abs(once) <= np.abs(a))
        assert np.all((np.sign(once) == np.sign(a)) | (once == 0))
        np.testing.assert_allclose(shrink(once, t2), shrink(a, t1 + t2), rtol=0, atol=1e-12)


class TestFrobenius:
    def test_345(self):
        assert frobenius_norm([[3.0, 4.0]]) == 5.0

    def test_zero(self):
        assert frobenius_norm(np.zeros((3, 3))) == 0.0

    def test_against_loop(self, rng):
        a = rng.standard_normal((6, 6))
        assert abs(frobenius_norm(a) - naive_frobenius(a)) < 1e-12


def test_principal_angles_and_completion(rng):
    v, _ = np.linalg.qr(rng.standard_normal((10, 3)))
    full = orthonormal_completion(v, 7)
    np.testing.assert_array_equal(full[:, :3], v)
    assert orthonormality_error(full) < 1e-12
    assert np.max(principal_angles(v, full[:, :3])) < 1e-7
    assert np.min(principal_angles(v, full[:, 3:])) == pytest.approx(np.pi / 2)
