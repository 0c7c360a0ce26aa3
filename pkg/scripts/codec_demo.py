"""
This is an example on how to use simoe
to fit the low-rank codec and measure its error and payload
"""

import numpy as np
import simoe.codec as codec
import simoe.moe as moe


def create_sample_features(seed: int, num_blocks: int) -> list[codec.FeatureBlock]:
    rng = np.random.default_rng(seed)
    basis = rng.normal(size=(64, 8))
    return [
        codec.FeatureBlock(
            np.stack([basis @ rng.normal(size=(8, 32)) + 0.05 * rng.normal(size=(64, 32))
                      for _ in range(4)])
        )
        for _ in range(num_blocks)
    ]


if __name__ == "__main__":
    calibration = create_sample_features(0, 16)
    held_out = create_sample_features(1, 4)
    model = moe.seeded_model(0, 8, input_dim=32, hidden_dim=64, num_groups=2)

    for rank in (2, 4, 8, 16):
        fitted = codec.fit_projections(calibration, rank)
        loss = task = 0.0
        for block in held_out:
            block_hat = codec.decode(codec.encode(block, fitted), fitted)
            loss += codec.reconstruction_loss(block, block_hat)
            task += codec.synthetic_task_loss(block, block_hat, model)
        print(
            f"r={rank:2d} ratio={codec.compression_ratio(64, 32, rank):6.1f} "
            f"bytes={codec.compressed_wire_size(4, rank):6d} "
            f"reconstruction={loss:10.3f} task={task:10.3f}"
        )
