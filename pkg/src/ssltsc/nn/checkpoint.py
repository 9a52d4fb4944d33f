"""Network checkpoints: versioned JSON, bit-exact round trip."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .layers import AsChannels, Conv1d, Dense, GlobalAvgPool, Layer, Network, ReLU

FORMAT_VERSION = 1


def _layer_to_dict(layer: Layer) -> dict:
    d = layer.spec()
    for name, arr in layer.params():
        d[name] = arr.tolist()
    return d


def _layer_from_dict(d: dict) -> Layer:
    kind = d["type"]
    if kind == "dense":
        return Dense(np.array(d["w"], dtype=np.float64), np.array(d["b"], dtype=np.float64))
    if kind == "relu":
        return ReLU()
    if kind == "as_channels":
        return AsChannels()
    if kind == "conv1d":
        return Conv1d(np.array(d["w"], dtype=np.float64),
                      np.array(d["b"], dtype=np.float64), d["stride"])
    if kind == "global_avg_pool":
        return GlobalAvgPool()
    raise ValueError(f"unknown layer type {kind!r}")


def network_to_dict(net: Network) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": net.kind,
        "input_width": net.input_width,
        "output_width": net.output_width,
        "layers": [_layer_to_dict(layer) for layer in net.layers],
    }


def network_from_dict(d: dict) -> Network:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version {version!r}")
    layers = [_layer_from_dict(ld) for ld in d["layers"]]
    return Network(layers, d["kind"], d["input_width"], d["output_width"])


def save_network(net: Network, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(network_to_dict(net), sort_keys=True), encoding="utf-8")
    os.replace(tmp, path)


def load_network(path: str | Path) -> Network:
    return network_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def params_hash(net: Network) -> str:
    """SHA-256 over parameter names and raw float64 bytes."""
    h = hashlib.sha256()
    for name, arr in net.param_items():
        h.update(name.encode("utf-8"))
        h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    return h.hexdigest()


def copy_network(net: Network) -> Network:
    return network_from_dict(network_to_dict(net))
