# simoe/user.py
"""Functions for user output.

It contains the following functions:
    - `check_create_savedir(save_path)` - Create saving directory if does not exists.
    - `content_hash(mapping)` - Returns: sha256 of the canonical json of a mapping.
    - `build_manifest(cfg_dict, seed, cfg_hash, outputs)` - Returns: manifest mapping.
    - `write_manifest(manifest, json_path)` - Returns: None, writes the manifest as json.
"""

import hashlib
import json
import logging
import os
import simoe

logger = logging.getLogger(__name__)


def check_create_savedir(save_path: str) -> None:
    """Create a directory to save if not exists.

    Args:
        save_path: Directory to save output.

    Returns:
        Create a new directory to save.
    """
    if not os.path.isdir(save_path):
        logger.info("Missing directory, creating directory")
        os.makedirs(save_path)
    logger.info(f"Saving in {save_path}")
    return None


def content_hash(mapping: dict) -> str:
    canonical = json.dumps(mapping, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_manifest(cfg_dict: dict, seed: int | list[int], cfg_hash: str, outputs: list[str]) -> dict:
    """Describe an output so it can be reproduced.

    Args:
        cfg_dict: Configuration (or experiment matrix) that produced it.
        seed: Seed, or seeds of a matrix.
        cfg_hash: sha256 of the configuration.
        outputs: File names written next to the manifest.

    Returns:
        Manifest mapping.
    """
    return {
        "artifact": "simoe",
        "version": simoe.__version__,
        "seed": seed,
        "config_hash": cfg_hash,
        "config": cfg_dict,
        "outputs": sorted(outputs),
    }


def write_manifest(manifest: dict, json_path: str) -> None:
    with open(json_path, "w") as json_file:
        json.dump(manifest, json_file, indent=2, sort_keys=True)
        json_file.write("\n")
