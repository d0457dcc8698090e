"""Versioned model container: JSON header + base64 array blobs.

Round-tripping a model reproduces bit-identical predictions: arrays are
serialized as raw little-endian bytes, and files carry no timestamps so
reruns are byte-identical.
"""

import json

from ..errors import FormatError
from ..serialize import FORMAT_VERSION, dumps, make_header
from .base import ClassifierSpec

MODEL_ARTIFACT = "model"


def save_model(model, path, command=None, inputs=None):
    header = make_header(MODEL_ARTIFACT, command=command,
                         seeds={"seed": model.spec.seed}, inputs=inputs)
    payload = {
        **header,
        "kind": model.kind,
        "spec": model.spec.to_dict(),
        "label_vocab": list(model.label_vocab),
        "dim": model.dim,
        "converged": model.converged,
        "state": model.state_to_json(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(payload) + "\n")


def load_model(path):
    from . import MODEL_CLASSES

    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != FORMAT_VERSION:
        raise FormatError(
            f"{path}: format_version {payload.get('format_version')} unsupported"
        )
    if payload.get("artifact") != MODEL_ARTIFACT:
        raise FormatError(f"{path}: not a model file")
    kind = payload["kind"]
    if kind not in MODEL_CLASSES:
        raise FormatError(f"{path}: unknown model kind {kind!r}")
    spec = ClassifierSpec.from_dict(payload["spec"])
    return MODEL_CLASSES[kind].from_state(
        spec,
        tuple(payload["label_vocab"]),
        payload["dim"],
        payload["converged"],
        payload["state"],
    )
