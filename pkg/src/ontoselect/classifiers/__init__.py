"""Five probabilistic classifiers sharing one fit/predict contract."""

from .base import (
    KINDS,
    ClassifierSpec,
    GpParams,
    KnnParams,
    MlpParams,
    RandomForestParams,
    SvmParams,
    TrainedModel,
)
from .forest import RandomForestModel
from .gp import GpModel
from .io import load_model, save_model
from .kernels import kernel_eval, minkowski_distance
from .knn import KnnModel
from .mlp import MlpModel
from .svm import SvmModel

MODEL_CLASSES = {
    "random_forest": RandomForestModel,
    "svm": SvmModel,
    "gaussian_process": GpModel,
    "knn": KnnModel,
    "mlp": MlpModel,
}


def fit(spec, data):
    """Train a classifier of spec.kind on a LabeledDataset."""
    if not isinstance(spec, ClassifierSpec):
        spec = ClassifierSpec.from_dict(spec)
    return MODEL_CLASSES[spec.kind].fit(spec, data)


__all__ = [
    "KINDS",
    "ClassifierSpec",
    "RandomForestParams",
    "SvmParams",
    "GpParams",
    "KnnParams",
    "MlpParams",
    "TrainedModel",
    "MODEL_CLASSES",
    "fit",
    "save_model",
    "load_model",
    "minkowski_distance",
    "kernel_eval",
]
