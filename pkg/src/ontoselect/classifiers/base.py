"""Shared classifier contract: specs, parameter records, and TrainedModel.

All five classifiers share one fit/predict interface.  predict_proba
returns a distribution over label_vocab; predict is its argmax with ties
broken by label_vocab order (argmax returns the first maximum).
"""

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DimensionMismatchError, FitError
from .kernels import GP_KERNELS, SVM_KERNELS

KINDS = ("random_forest", "svm", "gaussian_process", "knn", "mlp")

_CRITERIA = ("gini", "entropy")
_KNN_WEIGHTS = ("uniform", "distance")
_KNN_ALGORITHMS = ("auto", "ball_tree", "kd_tree", "brute")
_ACTIVATIONS = ("identity", "logistic", "tanh", "relu")
_OPTIMIZERS = ("lbfgs", "sgd", "adam")  # lbfgs validates but is rejected at fit
_LR_SCHEDULES = ("constant", "adaptive")


def _require(cond, message):
    if not cond:
        raise ValueError(message)


@dataclass(frozen=True)
class RandomForestParams:
    max_depth: int = 11
    criterion: str = "gini"
    n_estimators: int = 20
    max_features_fraction: float = 0.5
    bootstrap: bool = True

    def __post_init__(self):
        _require(self.max_depth >= 1, f"max_depth must be >= 1, got {self.max_depth}")
        _require(self.criterion in _CRITERIA, f"criterion must be one of {_CRITERIA}")
        _require(self.n_estimators >= 1, "n_estimators must be >= 1")
        _require(
            0.0 < self.max_features_fraction <= 1.0,
            "max_features_fraction must be in (0, 1]",
        )


@dataclass(frozen=True)
class SvmParams:
    c: float = 100.0
    kernel: str = "rbf"
    gamma: float = 0.001

    def __post_init__(self):
        _require(self.c > 0, f"c must be > 0, got {self.c}")
        _require(self.kernel in SVM_KERNELS, f"kernel must be one of {SVM_KERNELS}")
        _require(self.gamma > 0, f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class GpParams:
    kernel: str = "matern"
    matern_nu: float = 1.5
    max_newton_iters: int = 100
    newton_tol: float = 1e-6

    def __post_init__(self):
        _require(self.kernel in GP_KERNELS, f"kernel must be one of {GP_KERNELS}")
        _require(self.matern_nu == 1.5, "matern_nu is fixed at 1.5")
        _require(self.max_newton_iters >= 1, "max_newton_iters must be >= 1")
        _require(self.newton_tol > 0, "newton_tol must be > 0")


@dataclass(frozen=True)
class KnnParams:
    n_neighbors: int = 9
    weights: str = "distance"
    algorithm: str = "auto"   # accepted for grid compatibility; always brute
    minkowski_c: float = 2

    def __post_init__(self):
        _require(self.n_neighbors >= 1, "n_neighbors must be >= 1")
        _require(self.weights in _KNN_WEIGHTS, f"weights must be one of {_KNN_WEIGHTS}")
        _require(
            self.algorithm in _KNN_ALGORITHMS,
            f"algorithm must be one of {_KNN_ALGORITHMS}",
        )
        _require(self.minkowski_c >= 1, "minkowski_c must be >= 1")


@dataclass(frozen=True)
class MlpParams:
    hidden_size: int = 4
    activation: str = "tanh"
    optimizer: str = "adam"
    l2_alpha: float = 0.05
    learning_rate_schedule: str = "constant"
    base_lr: float = 0.001
    max_epochs: int = 200
    batch_size: int = 0       # 0 means min(200, n) at fit time

    def __post_init__(self):
        _require(self.hidden_size >= 1, "hidden_size must be >= 1")
        _require(
            self.activation in _ACTIVATIONS, f"activation must be one of {_ACTIVATIONS}"
        )
        _require(self.optimizer in _OPTIMIZERS, f"optimizer must be one of {_OPTIMIZERS}")
        _require(self.l2_alpha >= 0, "l2_alpha must be >= 0")
        _require(
            self.learning_rate_schedule in _LR_SCHEDULES,
            f"learning_rate_schedule must be one of {_LR_SCHEDULES}",
        )
        _require(self.base_lr > 0, "base_lr must be > 0")
        _require(self.max_epochs >= 1, "max_epochs must be >= 1")
        _require(self.batch_size >= 0, "batch_size must be >= 0")


PARAM_CLASSES = {
    "random_forest": RandomForestParams,
    "svm": SvmParams,
    "gaussian_process": GpParams,
    "knn": KnnParams,
    "mlp": MlpParams,
}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: object = None
    seed: int = 0

    def __post_init__(self):
        _require(self.kind in KINDS, f"kind must be one of {KINDS}")
        cls = PARAM_CLASSES[self.kind]
        if self.params is None:
            object.__setattr__(self, "params", cls())
        elif isinstance(self.params, dict):
            object.__setattr__(self, "params", cls(**self.params))
        elif not isinstance(self.params, cls):
            raise ValueError(f"params for {self.kind} must be {cls.__name__}")

    def to_dict(self):
        return {"kind": self.kind, "params": asdict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, obj):
        return cls(kind=obj["kind"], params=obj.get("params"), seed=obj.get("seed", 0))


class TrainedModel:
    """Fitted classifier; immutable after fit, safe for concurrent predict."""

    kind = None

    def __init__(self, spec, label_vocab, dim, converged=True):
        self.spec = spec
        self.label_vocab = tuple(label_vocab)
        self.dim = int(dim)
        self.converged = bool(converged)

    # subclasses implement _proba(X) for a 2-d float64 array
    def _proba(self, x):
        raise NotImplementedError

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"input dim {x.shape[1]} != model dim {self.dim}"
            )
        return x, single

    def predict_proba(self, x):
        """Probability distribution over label_vocab for each input row."""
        x, single = self._check_input(x)
        probs = self._proba(x)
        return probs[0] if single else probs

    def predict(self, x):
        """Label with the highest probability; ties -> first in label_vocab."""
        x, single = self._check_input(x)
        idx = np.argmax(self._proba(x), axis=1)
        labels = np.array(self.label_vocab, dtype=object)[idx]
        return labels[0] if single else labels

    def state_to_json(self):
        raise NotImplementedError

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        raise NotImplementedError


def validate_training_data(data):
    if len(data.label_vocab) < 2:
        raise FitError("training data must contain at least 2 classes")
    counts = np.bincount(data.y, minlength=len(data.label_vocab))
    missing = [data.label_vocab[i] for i in np.nonzero(counts == 0)[0]]
    if missing:
        raise FitError(f"classes with no samples: {missing}")
    if not np.isfinite(data.X).all():
        raise FitError("training vectors must be finite")

