import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import naive_matmul
from rsp.errors import ParameterError, ShapeError
from rsp.sensing import SensingMatrix, compress, make_sensing


def test_single_entry():
    r = make_sensing(1, 1, seed=5, allow_square=True)
    assert abs(r.matrix[0, 0]) == 1.0


@given(st.integers(1, 30), st.integers(2, 60), st.integers(0, 2**64 - 1))
def test_unit_columns(p, m, seed):
    r = make_sensing(p, m, seed, allow_square=True)
    assert r.shape == (p, m)
    np.testing.assert_allclose(np.linalg.norm(r.matrix, axis=0), 1.0, atol=1e-12)


def test_determinism():
    a = make_sensing(50, 200, 9)
    b = make_sensing(50, 200, 9)
    c = make_sensing(50, 200, 10)
    assert a.matrix.tobytes() == b.matrix.tobytes()
    assert np.linalg.norm(a.matrix - c.matrix) > 0


def test_pinned_bits():
    # freezes the Philox + ziggurat definition; changing the RNG breaks this
    r = make_sensing(2, 3, 2024)
    expected = np.random.Generator(np.random.Philox(2024)).standard_normal((2, 3))
    expected /= np.linalg.norm(expected, axis=0)
    assert r.matrix.tobytes() == expected.tobytes()


@pytest.mark.parametrize("p,m", [(0, 5), (3, 0)])
def test_bad_sizes(p, m):
    with pytest.raises(ParameterError):
        make_sensing(p, m, 0)


def test_compression_regime_enforced():
    with pytest.raises(ParameterError):
        make_sensing(10, 10, 0)
    assert make_sensing(10, 10, 0, allow_square=True).shape == (10, 10)


def test_compress_zero(rng):
    r = make_sensing(5, 20, 1)
    assert not np.any(compress(r, np.zeros((20, 7))))


def test_compress_identity(rng):
    x = rng.standard_normal((6, 4))
    assert np.array_equal(compress(SensingMatrix(np.eye(6)), x), x)


def test_compress_matches_loop(rng):
    r = make_sensing(5, 12, 3)
    x = rng.standard_normal((12, 8))
    np.testing.assert_allclose(compress(r, x), naive_matmul(r.matrix, x), rtol=0, atol=1e-12)


def test_compress_shape_error():
    with pytest.raises(ShapeError):
        compress(make_sensing(5, 12, 3), np.ones((11, 3)))


@pytest.mark.parametrize("seed", range(5))
def test_rank_preserved(rng, seed):
    m, n, r0, p = 100, 60, 4, 10
    local = np.random.default_rng(seed)
    l0 = local.standard_normal((m, r0)) @ local.standard_normal((r0, n))
    rl = compress(make_sensing(p, m, seed), l0)
    s = np.linalg.svd(rl, compute_uv=False)
    assert np.count_nonzero(s > 1e-8 * s[0]) == r0
    v0 = np.linalg.svd(l0)[2][:r0].T
    v = np.linalg.svd(rl)[2][:r0].T
    assert np.linalg.norm(v0 @ v0.T - v @ v.T) < 1e-8
