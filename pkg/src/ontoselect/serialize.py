"""Deterministic artifact serialization helpers.

Every persisted artifact starts with a self-describing header object
{format_version, artifact, command, seeds, inputs}; inputs carry sha256
digests of the files the producing command read, so `ontoselect verify`
can re-check them.  Arrays are encoded as base64 little-endian blobs
(np.savez would embed zip timestamps and break byte-identical reruns).
"""

import base64
import hashlib
import json
import sys

import numpy as np

from .errors import FormatError

FORMAT_VERSION = 1


def content_id(text: str) -> str:
    """Stable 16-byte hex id for a piece of text."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


def record_id(*parts: str) -> str:
    """Stable 16-byte hex id for a tuple of strings (length-prefixed)."""
    h = hashlib.blake2b(digest_size=16)
    for part in parts:
        raw = part.encode("utf-8")
        h.update(len(raw).to_bytes(8, "little"))
        h.update(raw)
    return h.hexdigest()


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def make_header(artifact: str, command=None, seeds=None, inputs=None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "artifact": artifact,
        "command": command,
        "seeds": seeds,
        "inputs": [
            {"path": str(p), "sha256": file_digest(p)} for p in (inputs or [])
        ],
    }


def check_header(header: dict, artifact: str) -> dict:
    if not isinstance(header, dict) or "format_version" not in header:
        raise FormatError(f"missing artifact header (expected {artifact})")
    if header["format_version"] != FORMAT_VERSION:
        raise FormatError(
            f"format_version {header['format_version']} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    if header.get("artifact") != artifact:
        raise FormatError(
            f"artifact kind {header.get('artifact')!r}, expected {artifact!r}"
        )
    return header


def dumps(obj) -> str:
    """Canonical one-line JSON: sorted keys, no whitespace padding."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_ndjson(path, artifact: str, records, command=None, seeds=None, inputs=None):
    header = make_header(artifact, command=command, seeds=seeds, inputs=inputs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(header) + "\n")
        for rec in records:
            fh.write(dumps(rec) + "\n")


def read_ndjson(path, artifact: str):
    """Yields records; validates the header first."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise FormatError(f"{path}: empty file, expected {artifact} artifact")
        check_header(json.loads(first), artifact)
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        first = fh.readline().decode("utf-8")
    try:
        header = json.loads(first)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: no JSON header line") from exc
    if not isinstance(header, dict):
        raise FormatError(f"{path}: no JSON header object")
    return header


def array_to_json(arr) -> dict:
    arr = np.asarray(arr)
    return {
        "dtype": str(arr.dtype),
        "shape": list(arr.shape),
        "data": base64.b64encode(_to_le(arr).tobytes(order="C")).decode("ascii"),
    }


def array_from_json(obj) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    arr = np.frombuffer(raw, dtype=np.dtype(obj["dtype"]).newbyteorder("<"))
    return arr.reshape(obj["shape"]).astype(obj["dtype"], copy=True)


def _to_le(arr):
    dt = arr.dtype.newbyteorder("<")
    return arr.astype(dt, copy=False)


def fail(message: str, code: int = 1):
    """CLI error exit: one machine-parsable line on stderr."""
    sys.stderr.write(dumps({"error": message}) + "\n")
    raise SystemExit(code)
