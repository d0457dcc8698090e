"""Grid search with stratified k-fold cross-validation.

Grid points iterate in lexicographic order over the axes as declared, so
tie-breaking (first best mean score) is deterministic.  Infeasible points
(e.g. the lbfgs optimizer) are recorded as skipped with a reason, never
silently dropped.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classifiers import ClassifierSpec, fit
from .dataset import stratified_kfold_indices
from .errors import GridSearchError, UnsupportedOptimizerError
from .stats import ConfusionMatrix, compute_metrics

DEFAULT_FOLDS = 5

# Considered values per classifier, in grid-table row order.
DEFAULT_GRIDS = {
    "random_forest": {
        "max_depth": [5, 7, 9, 11],
        "criterion": ["entropy", "gini"],
        "n_estimators": [5, 10, 15, 20, 25, 30],
        "max_features_fraction": [0.5, 0.7],
        "bootstrap": [False, True],
    },
    "svm": {
        "c": [1, 10, 100, 1000],
        "kernel": ["linear", "rbf"],
        "gamma": [0.001, 0.0001],
    },
    "gaussian_process": {
        "kernel": ["rbf", "dot_product", "matern", "rational_quadratic", "white"],
        "random_state": [0, 50],   # accepted and ignored: the GP fit is deterministic
    },
    "knn": {
        "n_neighbors": [1, 5, 9, 13, 17],
        "weights": ["uniform", "distance"],
        "algorithm": ["auto", "ball_tree", "kd_tree", "brute"],
        "minkowski_c": [1, 2, 3, 4, 5],
    },
    "mlp": {
        "random_state": [0, 1],    # maps onto the fit seed
        "activation": ["identity", "logistic", "tanh", "relu"],
        "optimizer": ["lbfgs", "sgd", "adam"],
        "hidden_size": [1, 4, 16, 64],
        "l2_alpha": [0.0001, 0.05],
        "learning_rate_schedule": ["constant", "adaptive"],
    },
}


@dataclass(frozen=True)
class GridSpec:
    kind: str
    axes: dict = None

    def __post_init__(self):
        if self.kind not in DEFAULT_GRIDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.axes is None:
            object.__setattr__(self, "axes", dict(DEFAULT_GRIDS[self.kind]))
        if not self.axes or any(not v for v in self.axes.values()):
            raise ValueError("grid axes must be non-empty")

    def points(self):
        names = list(self.axes.keys())
        for combo in itertools.product(*(self.axes[n] for n in names)):
            yield dict(zip(names, combo))


@dataclass
class CvResult:
    kind: str
    points: list                 # dicts: params, mean_score, fold_scores, skipped, reason
    best_params: dict
    k_folds: int
    seed: int
    scoring: str = "accuracy"

    def to_dict(self):
        return {
            "kind": self.kind,
            "scoring": self.scoring,
            "k_folds": self.k_folds,
            "seed": self.seed,
            "best_params": self.best_params,
            "points": self.points,
        }


def stratified_kfold(data, k, seed):
    """k (train, validation) index pairs over a LabeledDataset."""
    return stratified_kfold_indices(data.y, k, seed, n_classes=len(data.label_vocab))


def _spec_for_point(kind, params, base_seed):
    params = dict(params)
    seed = base_seed
    random_state = params.pop("random_state", None)
    if random_state is not None and kind == "mlp":
        seed = int(random_state)
    return ClassifierSpec(kind=kind, params=params, seed=seed)


def _score(model, data, val_idx, scoring):
    sub = data.subset(val_idx)
    pred = model.predict(sub.X)
    truth = np.array([data.label_vocab[i] for i in sub.y], dtype=object)
    if scoring == "accuracy":
        return float(np.mean(pred == truth))
    cm = ConfusionMatrix.from_predictions(data.label_vocab, truth, pred)
    return compute_metrics(cm).macro_f1


def _evaluate_point(args):
    kind, params, base_seed, data, folds, scoring = args
    try:
        spec = _spec_for_point(kind, params, base_seed)
    except ValueError as exc:
        return {"params": params, "skipped": True, "reason": str(exc)}
    fold_scores = []
    for train_idx, val_idx in folds:
        try:
            model = fit(spec, data.subset(train_idx))
        except UnsupportedOptimizerError as exc:
            return {"params": params, "skipped": True, "reason": str(exc)}
        fold_scores.append(_score(model, data, val_idx, scoring))
    return {
        "params": params,
        "skipped": False,
        "reason": None,
        "fold_scores": fold_scores,
        "mean_score": float(np.mean(fold_scores)),
    }


def grid_search(grid, data, k=DEFAULT_FOLDS, seed=0, scoring="accuracy", workers=1):
    """Evaluate every grid point by stratified k-fold CV; pick the best mean.

    Ties resolve to the first point in grid-iteration order.
    """
    if scoring not in ("accuracy", "macro_f1"):
        raise ValueError(f"unknown scoring {scoring!r}")
    folds = stratified_kfold(data, k, seed)
    tasks = [(grid.kind, p, seed, data, folds, scoring) for p in grid.points()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_point, tasks))
    else:
        results = [_evaluate_point(t) for t in tasks]

    best = None
    for res in results:
        if res["skipped"]:
            continue
        if best is None or res["mean_score"] > best["mean_score"]:
            best = res
    if best is None:
        raise GridSearchError("every grid point was infeasible")
    return CvResult(
        kind=grid.kind,
        points=results,
        best_params=dict(best["params"]),
        k_folds=k,
        seed=seed,
        scoring=scoring,
    )
