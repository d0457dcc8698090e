"""Persisted embedding vectors keyed by sample id.

Binary layout: one JSON header line {..., dim, count, encoding}, then one
record per vector: uint16-LE id length, the UTF-8 id, and dim little-
endian float32 values.  An NDJSON variant exists for interchange; both
round-trip bitwise at float32 precision.
"""

import json
import struct

import numpy as np

from .errors import FormatError, StoreLookupError
from .serialize import check_header, dumps, make_header

VECTORSTORE_ARTIFACT = "vector-store"


class VectorStore:
    def __init__(self, ids, vectors):
        self.ids = list(ids)
        self.vectors = np.asarray(vectors, dtype=np.float32)
        if self.vectors.ndim != 2 or len(self.ids) != self.vectors.shape[0]:
            raise FormatError("ids and vectors must align")
        self._index = {sid: i for i, sid in enumerate(self.ids)}
        if len(self._index) != len(self.ids):
            raise FormatError("duplicate sample ids in store")

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.ids)

    def __contains__(self, sample_id):
        return sample_id in self._index

    def lookup(self, sample_ids):
        """Stored vectors in request order; missing ids raise."""
        rows = []
        for sid in sample_ids:
            try:
                rows.append(self._index[sid])
            except KeyError:
                raise StoreLookupError(sid) from None
        return self.vectors[rows] if rows else np.zeros((0, self.dim), dtype=np.float32)


def vector_store_lookup(sample_ids, store):
    return store.lookup(sample_ids)


def write_store(path, ids, vectors, encoding="binary", command=None, seeds=None, inputs=None):
    ids = list(ids)
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim != 2 or vectors.shape[0] != len(ids):
        raise FormatError("ids and vectors must align")
    header = make_header(VECTORSTORE_ARTIFACT, command=command, seeds=seeds, inputs=inputs)
    header.update({"dim": int(vectors.shape[1]), "count": len(ids), "encoding": encoding})
    if encoding == "binary":
        with open(path, "wb") as fh:
            fh.write(dumps(header).encode("utf-8") + b"\n")
            for sid, vec in zip(ids, vectors):
                raw = sid.encode("utf-8")
                if len(raw) > 0xFFFF:
                    raise FormatError(f"sample id too long: {sid[:40]}...")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
                fh.write(np.ascontiguousarray(vec, dtype="<f4").tobytes())
    elif encoding == "ndjson":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(header) + "\n")
            for sid, vec in zip(ids, vectors):
                fh.write(dumps({"sample_id": sid, "vector": [float(v) for v in vec]}) + "\n")
    else:
        raise FormatError(f"unknown store encoding {encoding!r}")


def read_store(path):
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: missing store header") from exc
        check_header(header, VECTORSTORE_ARTIFACT)
        dim, count = header["dim"], header["count"]
        encoding = header.get("encoding", "binary")
        ids = []
        vectors = np.empty((count, dim), dtype=np.float32)
        if encoding == "binary":
            vec_bytes = dim * 4
            for row in range(count):
                (id_len,) = struct.unpack("<H", fh.read(2))
                ids.append(fh.read(id_len).decode("utf-8"))
                vectors[row] = np.frombuffer(fh.read(vec_bytes), dtype="<f4")
        elif encoding == "ndjson":
            for row in range(count):
                obj = json.loads(fh.readline().decode("utf-8"))
                ids.append(obj["sample_id"])
                vectors[row] = np.asarray(obj["vector"], dtype=np.float32)
        else:
            raise FormatError(f"{path}: unknown store encoding {encoding!r}")
    store = VectorStore(ids, vectors)
    store.header = header
    return store
