"""Random forest: bagged decision trees with per-split feature subsets.

Each split greedily minimizes weighted child impurity (gini or entropy)
over a seeded random subset of round(max_features_fraction * dim)
features; candidate ties resolve to the lowest feature index, then the
lowest threshold.  Trees stop at max_depth, pure nodes, or nodes with
fewer than 2 samples.  Prediction averages per-tree leaf class
frequencies.
"""

import numpy as np

from .. import _core
from ..serialize import array_from_json, array_to_json
from .base import TrainedModel, validate_training_data

_LEAF = -1


class _TreeBuilder:
    def __init__(self, x, y, n_classes, params, rng):
        self.x = x
        self.y = y
        self.n_classes = n_classes
        self.params = params
        self.rng = rng
        self.criterion_id = 0 if params.criterion == "gini" else 1
        self.n_features = max(1, int(np.floor(params.max_features_fraction * x.shape[1] + 0.5)))
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.counts = []

    def build(self, idx):
        self._grow(idx, depth=0)
        return (
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=np.float64),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.counts, dtype=np.int64),
        )

    def _new_node(self, idx):
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.counts.append(np.bincount(self.y[idx], minlength=self.n_classes))
        return len(self.feature) - 1

    def _grow(self, idx, depth):
        node = self._new_node(idx)
        counts = self.counts[node]
        if (
            depth >= self.params.max_depth
            or len(idx) < 2
            or np.count_nonzero(counts) == 1
        ):
            return node
        candidates = np.sort(
            self.rng.choice(self.x.shape[1], size=self.n_features, replace=False)
        )
        best = None  # (score, feature, threshold, order, pos)
        for f in candidates:
            v = self.x[idx, f]
            order = np.argsort(v, kind="stable")
            pos, score = _core.split_scan(
                v[order], self.y[idx[order]], self.n_classes, self.criterion_id
            )
            if pos >= 0 and (best is None or score < best[0]):
                best = (score, f, v[order], order, pos)
        if best is None:
            return node
        _, f, v_sorted, order, pos = best
        lo, hi = v_sorted[pos - 1], v_sorted[pos]
        threshold = lo + (hi - lo) / 2.0
        if threshold >= hi:  # midpoint rounded up to hi: fall back to lo
            threshold = lo
        left_idx = idx[order[:pos]]
        right_idx = idx[order[pos:]]
        self.feature[node] = int(f)
        self.threshold[node] = float(threshold)
        self.left[node] = self._grow(left_idx, depth + 1)
        self.right[node] = self._grow(right_idx, depth + 1)
        return node


class RandomForestModel(TrainedModel):
    kind = "random_forest"

    def __init__(self, spec, label_vocab, dim, trees, converged=True):
        super().__init__(spec, label_vocab, dim, converged)
        self.trees = trees  # list of (feature, threshold, left, right, counts)

    @classmethod
    def fit(cls, spec, data):
        validate_training_data(data)
        params = spec.params
        x = np.ascontiguousarray(data.X, dtype=np.float64)
        n = x.shape[0]
        n_classes = len(data.label_vocab)
        seeds = np.random.SeedSequence(spec.seed).spawn(params.n_estimators)
        trees = []
        for tree_seed in seeds:
            rng = np.random.default_rng(tree_seed)
            idx = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
            trees.append(_TreeBuilder(x, data.y, n_classes, params, rng).build(idx))
        return cls(spec, data.label_vocab, x.shape[1], trees)

    def _tree_freq(self, tree, x):
        feature, threshold, left, right, counts = tree
        node = np.zeros(x.shape[0], dtype=np.int64)
        active = feature[node] != _LEAF
        while active.any():
            rows = np.nonzero(active)[0]
            nd = node[rows]
            go_left = x[rows, feature[nd]] <= threshold[nd]
            node[rows] = np.where(go_left, left[nd], right[nd])
            active = feature[node] != _LEAF
        leaf_counts = counts[node].astype(np.float64)
        return leaf_counts / leaf_counts.sum(axis=1, keepdims=True)

    def _proba(self, x):
        acc = np.zeros((x.shape[0], len(self.label_vocab)))
        for tree in self.trees:
            acc += self._tree_freq(tree, x)
        return acc / len(self.trees)

    def state_to_json(self):
        return {
            "trees": [
                {
                    "feature": array_to_json(t[0]),
                    "threshold": array_to_json(t[1]),
                    "left": array_to_json(t[2]),
                    "right": array_to_json(t[3]),
                    "counts": array_to_json(t[4]),
                }
                for t in self.trees
            ]
        }

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        trees = [
            (
                array_from_json(t["feature"]),
                array_from_json(t["threshold"]),
                array_from_json(t["left"]),
                array_from_json(t["right"]),
                array_from_json(t["counts"]),
            )
            for t in state["trees"]
        ]
        return cls(spec, label_vocab, dim, trees, converged)
