"""Model files: JSON documents with parameters stored as decimal strings.

``repr(float)`` gives the shortest string that round-trips, so save/load
is bit-exact.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import FormatError
from ..linalg import Matrix, Vector
from ..network import ActivationSpec, Layer, Network
from ..training import TrainingConfig

FORMAT = "dionet-model"
VERSION = 1


def _dec(v: float) -> str:
    # integral values are written without a fractional part; -0.0 keeps its sign
    if v.is_integer() and math.copysign(1.0, v) > 0 or (v.is_integer() and v != 0.0):
        return str(int(v))
    return repr(v)


def model_to_dict(net: Network, t_cfg: TrainingConfig) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "mode": t_cfg.mode,
        "seed": t_cfg.seed,
        "training": t_cfg.as_dict(),
        "dims": [net.input_dim] + [l.fan_out for l in net.layers],
        "layers": [
            {
                "activation": l.activation.as_dict(),
                "weights": [_dec(v) for v in l.weights._data],
                "bias": [_dec(v) for v in l.bias._data],
            }
            for l in net.layers
        ],
    }


def save_model(net: Network, t_cfg: TrainingConfig, path) -> None:
    text = json.dumps(model_to_dict(net, t_cfg), indent=2) + "\n"
    Path(path).write_text(text)


def _parse_num(s, where: str) -> float:
    if not isinstance(s, str):
        raise FormatError(f"{where}: expected a decimal string, got {type(s).__name__}")
    try:
        v = float(s)
    except ValueError:
        raise FormatError(f"{where}: {s!r} is not a number") from None
    if not math.isfinite(v):
        raise FormatError(f"{where}: non-finite value {s!r}")
    return v


def model_from_dict(doc) -> tuple[Network, TrainingConfig]:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise FormatError("not a dionet model file")
    if doc.get("version") != VERSION:
        raise FormatError(f"unsupported model version {doc.get('version')!r} (expected {VERSION})")
    try:
        dims = [int(d) for d in doc["dims"]]
        layers_doc = doc["layers"]
        t_cfg = TrainingConfig(**doc["training"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model file: {exc}") from None
    if len(dims) != len(layers_doc) + 1:
        raise FormatError("dims and layers disagree")
    layers = []
    for i, ld in enumerate(layers_doc):
        fan_in, fan_out = dims[i], dims[i + 1]
        try:
            act = ActivationSpec.from_dict(ld["activation"])
            w = [_parse_num(s, f"layer {i} weights") for s in ld["weights"]]
            b = [_parse_num(s, f"layer {i} bias") for s in ld["bias"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"layer {i}: {exc}") from None
        if len(w) != fan_in * fan_out or len(b) != fan_out:
            raise FormatError(f"layer {i}: parameter count does not match dims")
        layers.append(Layer(Matrix(fan_out, fan_in, w), Vector(b), act))
    return Network(layers), t_cfg


def load_model(path) -> tuple[Network, TrainingConfig]:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return model_from_dict(doc)
