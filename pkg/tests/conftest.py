import numpy as np
import pytest

from ontoselect.dataset import LabeledDataset


def make_blobs(n_classes=3, per_class=30, dim=6, sep=10.0, noise=0.3, seed=0,
               labels=None):
    """Well-separated Gaussian blobs: one axis-aligned center per class."""
    rng = np.random.default_rng(seed)
    centers = np.zeros((n_classes, dim))
    for i in range(n_classes):
        centers[i, i % dim] = sep
    x = np.vstack([c + noise * rng.normal(size=(per_class, dim)) for c in centers])
    y = np.repeat(np.arange(n_classes), per_class)
    if labels is None:
        labels = tuple(chr(ord("A") + i) for i in range(n_classes))
    ids = tuple(f"s{i}" for i in range(n_classes * per_class))
    return LabeledDataset(ids=ids, X=x, y=y, label_vocab=tuple(labels))


@pytest.fixture
def blobs3():
    return make_blobs()


@pytest.fixture
def blobs2():
    return make_blobs(n_classes=2, per_class=20, dim=4, seed=1)
