"""
JSON checkpoint codec

Document layout:
    {format_version, network_config, parameters, optimizer, rng_state, metadata}
Parameters are nested lists of floats; Python's float repr makes the
save -> load -> save cycle byte-identical.
"""

import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from core.errors import CheckpointVersionError, ConfigurationError
from neural.network import NetworkConfig, QNetwork
from neural.optimizers import optimizer_from_state

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    network: QNetwork
    optimizer: Optional[Any] = None
    rng_state: Optional[dict] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


def to_document(checkpoint: Checkpoint) -> dict:
    net = checkpoint.network
    return {
        "format_version": FORMAT_VERSION,
        "network_config": asdict(net.config),
        "parameters": {name: p.tolist() for name, p in net.params.items()},
        "optimizer": checkpoint.optimizer.state_dict() if checkpoint.optimizer is not None else None,
        "rng_state": checkpoint.rng_state,
        "metadata": checkpoint.metadata,
    }


def from_document(doc: dict) -> Checkpoint:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(FORMAT_VERSION, version)
    try:
        config = NetworkConfig(**doc["network_config"])
        params = {name: np.array(values, dtype=np.float64) for name, values in doc["parameters"].items()}
    except (KeyError, TypeError) as e:
        raise ConfigurationError(f"malformed checkpoint: {e}")
    optimizer = optimizer_from_state(doc["optimizer"]) if doc.get("optimizer") else None
    return Checkpoint(
        network=QNetwork(config, params),
        optimizer=optimizer,
        rng_state=doc.get("rng_state"),
        metadata=doc.get("metadata") or {},
    )


def dumps(checkpoint: Checkpoint) -> str:
    return json.dumps(to_document(checkpoint), indent=1)


def atomic_write_text(path: str, text: str) -> None:
    """Write to a temporary file in the same directory, then rename over path"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def save_checkpoint(path: str, checkpoint: Checkpoint) -> str:
    atomic_write_text(path, dumps(checkpoint))
    logger.info(f"Checkpoint saved to: {path}")
    return path


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"checkpoint {path} is not valid JSON: {e}")
    return from_document(doc)
