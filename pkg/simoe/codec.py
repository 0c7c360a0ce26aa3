# simoe/codec.py
"""Low-rank codec for features sent from the end to the cloud.

Each h x w channel slice X is encoded as Z = U^T X V and decoded as
X_hat = U_hat Z V_hat^T. U and V span the dominant row and column
subspaces of a calibration set.

It contains the following functions:
    - `fit_projections(calibration, rank, method)` - Returns: codec fitted on calibration blocks.
    - `encode(block, codec)` - Returns: compressed block.
    - `decode(compressed, codec)` - Returns: reconstructed block.
    - `reconstruction_loss(block, block_hat, lam, task_loss)` - Returns: squared error plus weighted task loss.
    - `synthetic_task_loss(block, block_hat, model)` - Returns: squared error of Top-1 model outputs.
    - `compression_ratio(h, w, r)` - Returns: payload ratio h w / r^2.
    - `feature_wire_size(h, w, c)` - Returns: bytes of a raw feature frame.
    - `compressed_wire_size(c, r)` - Returns: bytes of a compressed frame.
    - `encode_flops(h, w, r, c)` - Returns: FLOPs of `encode`.
    - `decode_flops(h, w, r, c)` - Returns: FLOPs of `decode`.
    - `save_codec(codec, npz_path)` - Returns: None, writes a fixture.
    - `load_codec(npz_path)` - Returns: codec from a fixture.
"""

import dataclasses
import numpy as np
import simoe.linalg as la
import simoe.moe as moe
from simoe.errors import ShapeError

FIXTURE_VERSION = 1
HEADER_DTYPE = np.dtype("<u4")
PAYLOAD_DTYPE = np.dtype("<f8")
HEADER_BYTES = 4 * HEADER_DTYPE.itemsize


@dataclasses.dataclass(frozen=True, eq=False)
class LowRankCodec:
    """Projection pair and its decoder inverse.

    Attributes:
        u: Row projection (h x r).
        v: Column projection (w x r).
        u_hat: Row inverse projection (h x r).
        v_hat: Column inverse projection (w x r).
    """

    u: la.Matrix
    v: la.Matrix
    u_hat: la.Matrix
    v_hat: la.Matrix

    def __post_init__(self):
        if self.u.shape[1] != self.v.shape[1] or not 1 <= self.rank <= min(
            self.u.shape[0], self.v.shape[0]
        ):
            raise ShapeError("LowRankCodec", self.u.shape, self.v.shape)

    @property
    def rank(self) -> int:
        return self.u.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class FeatureBlock:
    """Feature tensor as c slices of h x w.

    Attributes:
        data: Array of shape (c, h, w).
    """

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[0] < 1:
            raise ShapeError("FeatureBlock", self.data.shape)

    @property
    def c(self) -> int:
        return self.data.shape[0]

    @property
    def h(self) -> int:
        return self.data.shape[1]

    @property
    def w(self) -> int:
        return self.data.shape[2]

    @property
    def nbytes(self) -> int:
        return feature_wire_size(self.h, self.w, self.c)


@dataclasses.dataclass(frozen=True, eq=False)
class CompressedBlock:
    """Encoded feature tensor.

    Attributes:
        z: Array of shape (c, r, r).
        original_shape: (h, w, c) of the encoded block.
    """

    z: np.ndarray
    original_shape: tuple[int, int, int]

    @property
    def rank(self) -> int:
        return self.z.shape[1]

    @property
    def nbytes(self) -> int:
        return compressed_wire_size(self.z.shape[0], self.rank)

    def to_bytes(self) -> bytes:
        """Wire frame: (h, w, c, r) as little-endian uint32, then c r^2 float64."""
        header = np.array(self.original_shape + (self.rank,), dtype=HEADER_DTYPE)
        return header.tobytes() + self.z.astype(PAYLOAD_DTYPE).tobytes()

    @classmethod
    def from_bytes(cls, frame: bytes) -> "CompressedBlock":
        """Parse a frame written by `to_bytes`."""
        if len(frame) < HEADER_BYTES:
            raise ValueError("frame shorter than its header")
        h, w, c, r = (int(v) for v in np.frombuffer(frame[:HEADER_BYTES], HEADER_DTYPE))
        if len(frame) != compressed_wire_size(c, r):
            raise ValueError(f"frame of {len(frame)} bytes does not match header")
        z = np.frombuffer(frame[HEADER_BYTES:], PAYLOAD_DTYPE).reshape(c, r, r)
        return cls(z=z.astype(np.float64), original_shape=(h, w, c))


def fit_projections(
    calibration: list[FeatureBlock], rank: int, method: str = "jacobi"
) -> LowRankCodec:
    """Fit U and V on calibration blocks.

    U holds the top-rank eigenvectors of sum X X^T and V those of
    sum X^T X, over every channel of every block.

    Args:
        calibration: Blocks sharing h and w.
        rank: r.
        method: SVD method passed to `linalg.truncated_svd`.

    Returns:
        Codec with U_hat = U and V_hat = V.
    """
    if not calibration:
        raise ValueError("calibration set is empty")
    h, w = calibration[0].h, calibration[0].w
    if any((block.h, block.w) != (h, w) for block in calibration):
        raise ShapeError("fit_projections", *(b.data.shape for b in calibration))
    if not 1 <= rank <= min(h, w):
        raise ValueError(f"rank {rank} out of range for {h} x {w} blocks")
    stacked = np.concatenate([block.data for block in calibration])
    row_moment = np.einsum("nhw,ngw->hg", stacked, stacked)
    col_moment = np.einsum("nhw,nhv->wv", stacked, stacked)
    u, _, _ = la.truncated_svd(row_moment, rank, method)
    v, _, _ = la.truncated_svd(col_moment, rank, method)
    return LowRankCodec(u=u, v=v, u_hat=u.copy(), v_hat=v.copy())


def encode(block: FeatureBlock, codec: LowRankCodec) -> CompressedBlock:
    """Compress every channel with Z = U^T X V."""
    if (block.h, block.w) != (codec.u.shape[0], codec.v.shape[0]):
        raise ShapeError("encode", block.data.shape[1:], (codec.u.shape[0], codec.v.shape[0]))
    z = np.stack([la.matmul(la.matmul(codec.u.T, x), codec.v) for x in block.data])
    return CompressedBlock(z=z, original_shape=(block.h, block.w, block.c))


def decode(compressed: CompressedBlock, codec: LowRankCodec) -> FeatureBlock:
    """Rebuild every channel with X_hat = U_hat Z V_hat^T."""
    if compressed.rank != codec.rank:
        raise ShapeError("decode", compressed.z.shape, codec.u.shape)
    data = np.stack(
        [la.matmul(codec.u_hat, la.matmul(z, codec.v_hat.T)) for z in compressed.z]
    )
    h, w, c = compressed.original_shape
    if data.shape != (c, h, w):
        raise ShapeError("decode", data.shape, (c, h, w))
    return FeatureBlock(data)


def reconstruction_loss(
    block: FeatureBlock,
    block_hat: FeatureBlock,
    lam: float = 0.0,
    task_loss: float | None = None,
) -> float:
    """Reconstruction error plus weighted task loss.

    Args:
        block: Original block.
        block_hat: Reconstructed block.
        lam: Weight of the task loss, non-negative.
        task_loss: Task loss, 0 when absent.

    Returns:
        sum_c ||X_c - X_hat_c||_F^2 + lam * task_loss.
    """
    if block.data.shape != block_hat.data.shape:
        raise ShapeError("reconstruction_loss", block.data.shape, block_hat.data.shape)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    error = sum(
        la.frobenius_norm(x - x_hat) ** 2 for x, x_hat in zip(block.data, block_hat.data)
    )
    return float(error + lam * (task_loss or 0.0))


def synthetic_task_loss(
    block: FeatureBlock, block_hat: FeatureBlock, model: moe.MoeModel
) -> float:
    """Squared error between Top-1 model outputs on original and reconstructed tokens.

    Each row of each channel is a token of dimension w = model.input_dim.
    """
    if block.data.shape != block_hat.data.shape:
        raise ShapeError("synthetic_task_loss", block.data.shape, block_hat.data.shape)
    loss = 0.0
    for token, token_hat in zip(
        block.data.reshape(-1, block.w), block_hat.data.reshape(-1, block.w)
    ):
        diff = moe.top1_forward(model, token) - moe.top1_forward(model, token_hat)
        loss += float(diff @ diff)
    return loss


def compression_ratio(h: int, w: int, r: int) -> float:
    """Payload ratio per channel, projections excluded."""
    return h * w / r**2


def feature_wire_size(h: int, w: int, c: int) -> int:
    """Raw frame: 16-byte header plus h w c float64."""
    return HEADER_BYTES + PAYLOAD_DTYPE.itemsize * h * w * c


def compressed_wire_size(c: int, r: int) -> int:
    """Compressed frame: 16-byte header plus c r^2 float64."""
    return HEADER_BYTES + PAYLOAD_DTYPE.itemsize * c * r * r


def encode_flops(h: int, w: int, r: int, c: int) -> int:
    # U^T X is r*h*w MACs, (U^T X) V is r*w*r MACs
    return 2 * c * (r * h * w + r * w * r)


def decode_flops(h: int, w: int, r: int, c: int) -> int:
    # Z V^T is r*r*w MACs, U (Z V^T) is h*r*w MACs
    return 2 * c * (r * r * w + h * r * w)


def save_codec(codec: LowRankCodec, npz_path: str) -> None:
    """Write the projections as a versioned npz fixture."""
    np.savez(
        npz_path,
        format_version=FIXTURE_VERSION,
        u=codec.u,
        v=codec.v,
        u_hat=codec.u_hat,
        v_hat=codec.v_hat,
    )


def load_codec(npz_path: str) -> LowRankCodec:
    """Read a codec written by `save_codec`."""
    with np.load(npz_path) as fixture:
        if int(fixture["format_version"]) != FIXTURE_VERSION:
            raise ValueError(f"unsupported fixture version in {npz_path}")
        return LowRankCodec(
            u=fixture["u"], v=fixture["v"], u_hat=fixture["u_hat"], v_hat=fixture["v_hat"]
        )
