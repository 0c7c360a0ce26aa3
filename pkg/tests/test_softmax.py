import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from simoe.linalg import softmax


@given(st.lists(st.floats(-500, 500), min_size=1, max_size=64))
def test_softmax_is_distribution(logits: list[float]) -> None:
    probs = softmax(logits)
    assert np.all(probs >= 0.0)
    assert abs(probs.sum() - 1.0) <= 1e-12
    assert probs[np.argmax(logits)] == probs.max()


def test_softmax_large_logits() -> None:
    probs = softmax([1000.0, 1000.0])
    assert np.allclose(probs, [0.5, 0.5])


def test_softmax_empty() -> None:
    with pytest.raises(ValueError):
        softmax([])


@given(st.lists(st.floats(-500, 500), min_size=1, max_size=32), st.integers(0, 2**32 - 1))
def test_softmax_permutation_equivariant(logits: list[float], seed: int) -> None:
    order = np.random.default_rng(seed).permutation(len(logits))
    probs = softmax(logits)
    shuffled = softmax([logits[i] for i in order])
    assert np.abs(shuffled - probs[order]).max() <= 1e-12
