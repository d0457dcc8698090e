"""k-nearest-neighbors with Minkowski distance and (weighted) voting.

Stores the training set; queries rank training points by (distance,
training index) so ties are deterministic.  All `algorithm` values map to
exact brute-force search: tree indexes degrade at embedding dimensions,
and results stay algorithm-invariant by construction.  With distance
weights, any zero-distance neighbors among the k receive all the mass
(split equally); otherwise weights are 1/d.
"""

import math

import numpy as np

from .. import _core
from ..serialize import array_from_json, array_to_json
from .base import TrainedModel, validate_training_data


class KnnModel(TrainedModel):
    kind = "knn"

    def __init__(self, spec, label_vocab, dim, train_x, train_y, converged=True):
        super().__init__(spec, label_vocab, dim, converged)
        self.train_x = train_x
        self.train_y = train_y

    @classmethod
    def fit(cls, spec, data):
        validate_training_data(data)
        if spec.params.n_neighbors > len(data):
            raise ValueError(
                f"n_neighbors={spec.params.n_neighbors} exceeds {len(data)} samples"
            )
        x = np.ascontiguousarray(data.X, dtype=np.float64)
        return cls(spec, data.label_vocab, x.shape[1], x, data.y.copy())

    def _proba(self, x):
        params = self.spec.params
        k = params.n_neighbors
        c = float(params.minkowski_c)
        inv_c = 1.0 / c
        n_classes = len(self.label_vocab)
        powsum = _core.minkowski_powsum(x, self.train_x, c)
        out = np.empty((x.shape[0], n_classes))
        order_tiebreak = np.arange(self.train_x.shape[0])
        for row in range(x.shape[0]):
            order = np.lexsort((order_tiebreak, powsum[row]))[:k]
            labels = self.train_y[order]
            if params.weights == "uniform":
                votes = np.bincount(labels, minlength=n_classes).astype(np.float64)
            else:
                s = powsum[row, order]
                zero = s == 0.0
                if zero.any():
                    votes = np.bincount(
                        labels[zero], minlength=n_classes
                    ).astype(np.float64)
                else:
                    votes = np.zeros(n_classes)
                    for lab, sv in zip(labels, s):
                        votes[lab] += 1.0 / math.pow(sv, inv_c)
            out[row] = votes / votes.sum()
        return out

    def state_to_json(self):
        return {
            "train_x": array_to_json(self.train_x),
            "train_y": array_to_json(self.train_y),
        }

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        return cls(
            spec,
            label_vocab,
            dim,
            array_from_json(state["train_x"]),
            array_from_json(state["train_y"]),
            converged,
        )
