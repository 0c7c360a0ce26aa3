import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from simoe.linalg import truncated_svd, low_rank, frobenius_norm


@settings(max_examples=30, deadline=None)
@given(
    rows=st.integers(1, 16),
    cols=st.integers(1, 16),
    seed=st.integers(0, 2**32 - 1),
    data=st.data(),
)
def test_truncated_svd_matches_lapack(rows: int, cols: int, seed: int, data) -> None:
    a = np.random.default_rng(seed).normal(size=(rows, cols))
    r = data.draw(st.integers(1, min(rows, cols)))
    u, s, v = truncated_svd(a, r)
    _, s_ref, _ = truncated_svd(a, r, method="lapack")
    assert u.shape == (rows, r) and s.shape == (r,) and v.shape == (cols, r)
    assert np.abs(s - s_ref).max() <= 1e-10 * max(s_ref[0], 1.0)
    assert np.allclose(u.T @ u, np.eye(r), atol=1e-10)
    assert np.allclose(v.T @ v, np.eye(r), atol=1e-10)
    err = frobenius_norm(a - low_rank(u, s, v))
    _, s_all, _ = np.linalg.svd(a)
    assert abs(err - np.sqrt(np.sum(s_all[r:] ** 2))) <= 1e-9 * max(frobenius_norm(a), 1.0)


def test_truncated_svd_rank_out_of_range() -> None:
    with pytest.raises(ValueError):
        truncated_svd(np.ones((3, 4)), 0)
    with pytest.raises(ValueError):
        truncated_svd(np.ones((3, 4)), 4)


def test_truncated_svd_unknown_method() -> None:
    with pytest.raises(ValueError):
        truncated_svd(np.ones((3, 3)), 1, method="qr")
