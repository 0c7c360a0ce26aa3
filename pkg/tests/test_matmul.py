import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from simoe.errors import ShapeError
from simoe.linalg import matmul, matvec, count_macs


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(1, 12),
    k=st.integers(1, 12),
    m=st.integers(1, 12),
    seed=st.integers(0, 2**32 - 1),
)
def test_matmul_matches_triple_loop(n: int, k: int, m: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (n, k))
    b = rng.uniform(-1, 1, (k, m))
    expected = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            for p in range(k):
                expected[i, j] += a[i, p] * b[p, j]
    assert np.abs(matmul(a, b) - expected).max() <= 1e-12 * k


def test_matmul_shape_error() -> None:
    with pytest.raises(ShapeError) as error:
        matmul(np.ones((2, 3)), np.ones((4, 2)))
    assert error.value.op == "matmul"
    assert error.value.shapes == ((2, 3), (4, 2))


def test_matvec() -> None:
    a = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    assert np.array_equal(matvec(a, [1.0, -1.0]), [-1.0, -1.0, -1.0])
    with pytest.raises(ShapeError):
        matvec(a, [1.0, 2.0, 3.0])


def test_matmul_counts_macs() -> None:
    with count_macs() as outer:
        matmul(np.ones((2, 3)), np.ones((3, 4)))
        with count_macs() as inner:
            matvec(np.ones((5, 6)), np.ones(6))
    assert inner.macs == 30
    assert outer.macs == 24 + 30


@settings(max_examples=50, deadline=None)
@given(
    dims=st.lists(st.integers(1, 10), min_size=4, max_size=4),
    seed=st.integers(0, 2**32 - 1),
)
def test_matmul_associative(dims: list[int], seed: int) -> None:
    n, k, p, m = dims
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (n, k))
    b = rng.uniform(-1, 1, (k, p))
    c = rng.uniform(-1, 1, (p, m))
    left = matmul(matmul(a, b), c)
    right = matmul(a, matmul(b, c))
    assert np.abs(left - right).max() <= 1e-9 * max(1.0, float(np.abs(left).max()))
