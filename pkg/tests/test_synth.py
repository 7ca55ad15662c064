import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsp.errors import ParameterError
from rsp.synth import SynConfig, generate


def check_instance(inst):
    cfg = inst.config
    assert np.array_equal(inst.observed, inst.clean + inst.corruption)
    assert np.max(np.abs(inst.clean)) == 1.0
    s = np.linalg.svd(inst.clean, compute_uv=False)
    r0 = inst.true_rank
    assert s[r0 - 1] > 1e-8 * s[0]
    if r0 < len(s):
        assert s[r0] < 1e-8 * s[0]
    nz = inst.corruption[inst.corruption != 0]
    assert set(np.unique(nz)) <= {-1.0, 1.0}
    assert nz.size == inst.corruption_count == cfg.corruption_count
    assert inst.labels.shape == (cfg.n,)
    for j in range(cfg.n):
        u = inst.bases[inst.labels[j]]
        col = inst.clean[:, j]
        assert np.linalg.norm(col - u @ (u.T @ col)) < 1e-10


def test_no_corruption():
    inst = generate(SynConfig(m=40, n_per_class=10, k=2, subspace_dim=2, seed=1))
    assert not np.any(inst.corruption)
    assert np.array_equal(inst.observed, inst.clean)


def test_full_scale_instance():
    inst = generate(SynConfig(m=200, n_per_class=100, k=2, subspace_dim=1, corruption_size=0.4))
    assert inst.true_rank == 2
    assert inst.clean.shape == (200, 200)
    assert np.max(np.abs(inst.clean)) == 1.0
    check_instance(inst)


def test_corruption_recount():
    inst = generate(SynConfig(corruption_size=0.4, seed=3))
    assert inst.config.corruption_count == 80
    assert np.count_nonzero(inst.corruption) == 80
    assert np.all(np.abs(inst.corruption[inst.corruption != 0]) == 1.0)


def test_determinism():
    a = generate(SynConfig(m=30, n_per_class=8, k=3, subspace_dim=2, corruption_size=1.0, seed=4))
    b = generate(SynConfig(m=30, n_per_class=8, k=3, subspace_dim=2, corruption_size=1.0, seed=4))
    assert a.observed.tobytes() == b.observed.tobytes()


@pytest.mark.parametrize("kwargs", [
    dict(subspace_dim=0),
    dict(m=10, k=2, subspace_dim=6),
    dict(corruption_size=-1.0),
    dict(m=5, n_per_class=2, k=1, corruption_size=6.0),
    dict(n_per_class=3, subspace_dim=4, m=50),
])
def test_invalid_configs(kwargs):
    with pytest.raises(ParameterError):
        generate(SynConfig(**kwargs))


configs = st.builds(
    lambda m, npc, k, d, frac, seed: SynConfig(m, npc, k, d, frac * m, seed),
    st.integers(10, 40), st.integers(4, 12), st.integers(1, 3), st.integers(1, 3),
    st.floats(0, 1), st.integers(0, 2**32),
).filter(lambda c: c.true_rank <= min(c.m, c.n) and c.subspace_dim <= c.n_per_class)


@settings(max_examples=100)
@given(configs)
def test_invariants_hold_for_random_configs(cfg):
    check_instance(generate(cfg))
