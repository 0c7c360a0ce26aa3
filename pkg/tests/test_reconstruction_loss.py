import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from simoe.codec import FeatureBlock, reconstruction_loss, synthetic_task_loss
from simoe.errors import ShapeError
from simoe.moe import seeded_model


def test_reconstruction_loss() -> None:
    block = FeatureBlock(np.zeros((2, 3, 3)))
    block_hat = FeatureBlock(np.ones((2, 3, 3)))
    assert reconstruction_loss(block, block) == 0.0
    assert reconstruction_loss(block, block_hat) == pytest.approx(18.0)
    assert reconstruction_loss(block, block_hat, lam=0.5, task_loss=4.0) == pytest.approx(20.0)


def test_reconstruction_loss_errors() -> None:
    block = FeatureBlock(np.zeros((1, 3, 3)))
    with pytest.raises(ShapeError):
        reconstruction_loss(block, FeatureBlock(np.zeros((1, 3, 4))))
    with pytest.raises(ValueError):
        reconstruction_loss(block, block, lam=-1.0)


def test_synthetic_task_loss() -> None:
    model = seeded_model(1, 4, input_dim=6, hidden_dim=8, num_groups=2)
    rng = np.random.default_rng(1)
    block = FeatureBlock(rng.normal(size=(2, 3, 6)))
    noisy = FeatureBlock(block.data + rng.normal(scale=0.5, size=block.data.shape))
    assert synthetic_task_loss(block, block, model) == 0.0
    assert synthetic_task_loss(block, noisy, model) > 0.0


@given(
    low=st.floats(0.0, 100.0),
    high=st.floats(0.0, 100.0),
    task_loss=st.floats(1e-6, 1e3),
)
def test_reconstruction_loss_monotone_in_lam(low: float, high: float, task_loss: float) -> None:
    low, high = sorted((low, high))
    block = FeatureBlock(np.zeros((1, 2, 2)))
    block_hat = FeatureBlock(np.full((1, 2, 2), 0.5))
    assert reconstruction_loss(block, block_hat, low, task_loss) <= reconstruction_loss(
        block, block_hat, high, task_loss
    )
