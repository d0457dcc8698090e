"""Text-to-vector backends behind one batch interface.

Backends are immutable after construction and safe for concurrent batch
calls.  The hashing backend is a deterministic, dependency-free signed
feature hash (unigrams + bigrams, L2-normalized) used for tests and
offline runs; the remote backend speaks the embedding sidecar's HTTP
protocol; precomputed vectors come from a vector store (vectorstore.py).
"""

import os
import re
import threading
import time
from hashlib import blake2b

import numpy as np
import requests

from .errors import DimensionMismatchError, NoFeaturesError, TransportError

DEFAULT_DIM = 768
SIDECAR_URL_ENV = "ONTOSELECT_EMBED_URL"
SIDECAR_BATCH_LIMIT = 64

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def hashing_embed(text, dim):
    """Signed feature-hash embedding: unit-norm, deterministic.

    Lowercases, splits on non-alphanumerics, hashes unigrams and bigrams
    into dim signed buckets, then L2-normalizes.  Raises NoFeaturesError
    when the text has no tokens (or, degenerately, when all hash signs
    cancel).
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    tokens = [t for t in _TOKEN_SPLIT.split(text.lower()) if t]
    if not tokens:
        raise NoFeaturesError(f"no features: no tokens in {text!r}")
    acc = np.zeros(dim)
    for feature in tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]:
        h = int.from_bytes(blake2b(feature.encode("utf-8"), digest_size=8).digest(), "little")
        acc[h % dim] += 1.0 if h >> 63 == 0 else -1.0
    norm = float(np.sqrt((acc * acc).sum()))
    if norm == 0.0:
        raise NoFeaturesError("no features: hashed features cancelled out")
    return acc / norm


class HashingBackend:
    name = "hashing"

    def __init__(self, dim=32):
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self.dim = dim

    def embed(self, texts):
        return [hashing_embed(t, self.dim) for t in texts]


class RemoteBackend:
    """Client for the embedding sidecar.

    Bounds in-flight requests, retries transport failures with backoff,
    and enforces the declared vector dimension on every response.
    """

    name = "remote"

    def __init__(self, url=None, dim=DEFAULT_DIM, timeout=30.0, retries=2,
                 max_in_flight=4, session=None):
        url = url or os.environ.get(SIDECAR_URL_ENV)
        if not url:
            raise ValueError(f"no sidecar url: pass url= or set {SIDECAR_URL_ENV}")
        self.url = url.rstrip("/")
        self.dim = dim
        self.timeout = timeout
        self.retries = retries
        self._session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def health(self):
        response = self._session.get(f"{self.url}/health", timeout=self.timeout)
        response.raise_for_status()
        return response.json()

    def _post_batch(self, texts):
        last_error = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(0.25 * 2.0 ** (attempt - 1))
            try:
                with self._slots:
                    response = self._session.post(
                        f"{self.url}/embed", json={"texts": texts}, timeout=self.timeout
                    )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = RuntimeError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"sidecar rejected request: {response.status_code} {response.text[:200]}",
                    retries=attempt,
                )
            return response.json()
        raise TransportError(
            f"sidecar unreachable after {self.retries + 1} attempts: {last_error}",
            retries=self.retries,
        )

    def embed(self, texts):
        vectors = []
        for start in range(0, len(texts), SIDECAR_BATCH_LIMIT):
            chunk = list(texts[start : start + SIDECAR_BATCH_LIMIT])
            payload = self._post_batch(chunk)
            got = payload.get("vectors", [])
            if len(got) != len(chunk):
                raise DimensionMismatchError(
                    f"sidecar returned {len(got)} vectors for {len(chunk)} texts"
                )
            for vec in got:
                arr = np.asarray(vec, dtype=np.float64)
                if arr.shape != (self.dim,):
                    raise DimensionMismatchError(
                        f"sidecar vector dim {arr.shape} != declared {self.dim}"
                    )
                vectors.append(arr)
        return vectors


def embed_batch(texts, backend):
    """Embed texts; output aligns index-for-index with the input."""
    texts = list(texts)
    for i, text in enumerate(texts):
        if not isinstance(text, str) or text == "":
            raise ValueError(f"empty string at index {i} rejected before dispatch")
    vectors = backend.embed(texts)
    if len(vectors) != len(texts):
        raise DimensionMismatchError(
            f"backend returned {len(vectors)} vectors for {len(texts)} texts"
        )
    for i, vec in enumerate(vectors):
        if vec.shape != (backend.dim,):
            raise DimensionMismatchError(
                f"vector {i} has dim {vec.shape}, backend declares {backend.dim}"
            )
        if not np.isfinite(vec).all():
            raise DimensionMismatchError(f"vector {i} has non-finite values")
    return vectors
