"""Labeled-dataset handling: stratified split, disjoint partitioning,
majority-class undersampling, and stratified k-fold indices.

All operations are deterministic under an explicit seed and preserve the
original sample order inside each output side/part.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DatasetError


@dataclass(frozen=True)
class EmbeddedSample:
    """A text mapped to a fixed-dimension vector.

    sample_id is a stable content id: the content hash of the text for
    paragraphs, the record id (hash of ontology/class/tag/text) for
    annotations, so ids stay distinct when the same annotation text
    occurs in several ontologies.
    """

    sample_id: str
    vector: np.ndarray
    label: str = None
    source: str = "paragraph"   # "annotation" | "paragraph"

    def __post_init__(self):
        if self.source not in ("annotation", "paragraph"):
            raise ValueError(f"unknown sample source {self.source!r}")
        if (self.label is not None) != (self.source == "annotation"):
            raise ValueError("samples are labeled iff source == 'annotation'")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.5
    n_test_partitions: int = 20
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.n_test_partitions < 1:
            raise ValueError("n_test_partitions must be >= 1")


@dataclass(frozen=True)
class LabeledDataset:
    """Columnar labeled samples: ids, float64 vectors, int-coded labels."""

    ids: tuple
    X: np.ndarray
    y: np.ndarray
    label_vocab: tuple

    def __post_init__(self):
        if len(self.ids) != self.X.shape[0] or len(self.ids) != self.y.shape[0]:
            raise DatasetError("ids, X and y must have equal lengths")
        if len(set(self.ids)) != len(self.ids):
            raise DatasetError("sample ids must be distinct")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.label_vocab)):
            raise DatasetError("labels out of vocabulary range")

    @classmethod
    def from_samples(cls, samples, label_vocab=None):
        """Build from EmbeddedSamples; vocab defaults to sorted distinct labels."""
        labels = [s.label for s in samples]
        if any(lab is None for lab in labels):
            raise DatasetError("all samples must be labeled")
        if label_vocab is None:
            label_vocab = tuple(sorted(set(labels)))
        index = {lab: i for i, lab in enumerate(label_vocab)}
        try:
            y = np.array([index[lab] for lab in labels], dtype=np.int64)
        except KeyError as exc:
            raise DatasetError(f"label {exc.args[0]!r} not in vocabulary") from exc
        X = (
            np.stack([np.asarray(s.vector, dtype=np.float64) for s in samples])
            if samples
            else np.zeros((0, 0))
        )
        return cls(
            ids=tuple(s.sample_id for s in samples),
            X=X,
            y=y,
            label_vocab=tuple(label_vocab),
        )

    def __len__(self):
        return len(self.ids)

    @property
    def dim(self):
        return self.X.shape[1]

    def class_counts(self):
        return np.bincount(self.y, minlength=len(self.label_vocab))

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            ids=tuple(self.ids[i] for i in indices),
            X=self.X[indices],
            y=self.y[indices],
            label_vocab=self.label_vocab,
        )


def _class_indices(data):
    return [np.nonzero(data.y == c)[0] for c in range(len(data.label_vocab))]


def stratified_split(data, spec):
    """Per-class split: round(train_fraction * count) samples to train.

    Both sides keep original sample order; every class needs >= 2 samples.
    """
    rng = np.random.default_rng(spec.seed)
    train_idx, test_idx = [], []
    for c, idx in enumerate(_class_indices(data)):
        if len(idx) < 2:
            raise DatasetError(
                f"class {data.label_vocab[c]!r} has {len(idx)} sample(s), needs >= 2"
            )
        permuted = idx[rng.permutation(len(idx))]
        n_train = int(np.floor(spec.train_fraction * len(idx) + 0.5))
        train_idx.extend(permuted[:n_train])
        test_idx.extend(permuted[n_train:])
    return data.subset(np.sort(train_idx)), data.subset(np.sort(test_idx))


def partition_disjoint(data, k, seed):
    """Stratified round-robin partition into k pairwise-disjoint parts."""
    if k < 1:
        raise DatasetError("k must be >= 1")
    if k > len(data):
        raise DatasetError(f"cannot make {k} partitions from {len(data)} samples")
    rng = np.random.default_rng(seed)
    parts = [[] for _ in range(k)]
    for idx in _class_indices(data):
        permuted = idx[rng.permutation(len(idx))]
        for pos, i in enumerate(permuted):
            parts[pos % k].append(i)
    return [data.subset(np.sort(part)) for part in parts]


def undersample(data, cap, seed):
    """Keep at most `cap` samples per class (seeded uniform choice).

    cap may be the string "min-class", meaning the smallest class count.
    """
    if cap == "min-class":
        counts = data.class_counts()
        cap = int(counts[counts > 0].min())
    cap = int(cap)
    if cap < 1:
        raise DatasetError(f"undersample cap must be >= 1, got {cap}")
    rng = np.random.default_rng(seed)
    kept = []
    for idx in _class_indices(data):
        if len(idx) > cap:
            kept.extend(rng.choice(idx, size=cap, replace=False))
        else:
            kept.extend(idx)
    return data.subset(np.sort(kept))


def stratified_kfold_indices(y, k, seed, n_classes=None):
    """k (train, validation) index pairs; per-class counts differ by <= 1
    across folds.  Raises when any class has fewer than k samples."""
    y = np.asarray(y)
    if k < 2:
        raise DatasetError("k must be >= 2")
    classes = np.unique(y) if n_classes is None else range(n_classes)
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    for c in classes:
        idx = np.nonzero(y == c)[0]
        if 0 < len(idx) < k:
            raise DatasetError(f"class {c} has {len(idx)} sample(s), needs >= {k}")
        permuted = idx[rng.permutation(len(idx))]
        for pos, i in enumerate(permuted):
            folds[pos % k].append(i)
    out = []
    all_idx = np.arange(len(y))
    for f in range(k):
        val = np.sort(np.array(folds[f], dtype=np.int64))
        mask = np.ones(len(y), dtype=bool)
        mask[val] = False
        out.append((all_idx[mask], val))
    return out
