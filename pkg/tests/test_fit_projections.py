import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from simoe.codec import (
    FeatureBlock,
    LowRankCodec,
    fit_projections,
    encode,
    decode,
    reconstruction_loss,
    save_codec,
    load_codec,
)
from simoe.errors import ShapeError


def low_rank_blocks(seed: int, h: int, w: int, r: int, c: int, n: int) -> list[FeatureBlock]:
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(h, r))
    q = rng.normal(size=(w, r))
    return [
        FeatureBlock(np.stack([p @ rng.normal(size=(r, r)) @ q.T for _ in range(c)]))
        for _ in range(n)
    ]


def test_fit_projections_exact_on_low_rank() -> None:
    blocks = low_rank_blocks(1, 12, 10, 3, 2, 4)
    codec = fit_projections(blocks, 3)
    assert codec.rank == 3
    assert np.allclose(codec.u.T @ codec.u, np.eye(3), atol=1e-10)
    for block in blocks:
        block_hat = decode(encode(block, codec), codec)
        scale = np.sum(block.data**2)
        assert reconstruction_loss(block, block_hat) <= 1e-18 * scale + 1e-20


def test_fit_projections_beats_random_projection() -> None:
    rng = np.random.default_rng(2)
    blocks = [FeatureBlock(rng.normal(size=(3, 16, 12))) for _ in range(5)]
    codec = fit_projections(blocks, 4)
    u_rand, _ = np.linalg.qr(rng.normal(size=(16, 4)))
    v_rand, _ = np.linalg.qr(rng.normal(size=(12, 4)))
    random_codec = LowRankCodec(u_rand, v_rand, u_rand, v_rand)
    fitted = sum(reconstruction_loss(b, decode(encode(b, codec), codec)) for b in blocks)
    baseline = sum(
        reconstruction_loss(b, decode(encode(b, random_codec), random_codec)) for b in blocks
    )
    assert fitted <= baseline


def test_fit_projections_lapack_agrees() -> None:
    blocks = low_rank_blocks(3, 8, 8, 2, 1, 3)
    jacobi = fit_projections(blocks, 2)
    lapack = fit_projections(blocks, 2, method="lapack")
    # subspaces agree up to sign and rotation
    assert np.allclose(jacobi.u @ jacobi.u.T, lapack.u @ lapack.u.T, atol=1e-8)


def test_fit_projections_errors() -> None:
    with pytest.raises(ValueError):
        fit_projections([], 2)
    blocks = [FeatureBlock(np.ones((1, 4, 4))), FeatureBlock(np.ones((1, 4, 5)))]
    with pytest.raises(ShapeError):
        fit_projections(blocks, 2)
    with pytest.raises(ValueError):
        fit_projections(blocks[:1], 5)


def test_save_codec(tmp_path) -> None:
    codec = fit_projections(low_rank_blocks(4, 6, 5, 2, 1, 2), 2)
    fixture = str(tmp_path / "codec.npz")
    save_codec(codec, fixture)
    loaded = load_codec(fixture)
    assert np.array_equal(loaded.u, codec.u) and np.array_equal(loaded.v_hat, codec.v_hat)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fit_projections_error_non_increasing_in_rank(seed: int) -> None:
    rng = np.random.default_rng(seed)
    blocks = [FeatureBlock(rng.normal(size=(2, 8, 6))) for _ in range(3)]
    errors = []
    for rank in range(1, 7):
        codec = fit_projections(blocks, rank)
        errors.append(sum(reconstruction_loss(b, decode(encode(b, codec), codec)) for b in blocks))
    total = sum(float(np.sum(b.data**2)) for b in blocks)
    assert all(later <= earlier + 1e-9 * total for earlier, later in zip(errors, errors[1:]))
