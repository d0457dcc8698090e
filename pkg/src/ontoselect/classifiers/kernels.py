"""Distance and kernel functions shared by the classifiers.

All kernels use fixed unit hyperparameters except the SVM rbf, whose
width comes from the grid-searchable gamma.
"""

import math

import numpy as np

SVM_KERNELS = ("linear", "rbf")
GP_KERNELS = ("rbf", "dot_product", "matern", "rational_quadratic", "white")

_SQRT3 = math.sqrt(3.0)


def minkowski_distance(x, y, c):
    """d(x, y) = (sum_i |x_i - y_i|^c)^(1/c); c=1 Manhattan, c=2 Euclidean.

    Integer exponents use multiplication chains so the value agrees
    bitwise with the batch kernels in ontoselect._core.
    """
    if c < 1:
        raise ValueError(f"minkowski exponent must be >= 1, got {c}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("minkowski_distance expects two equal-length vectors")
    c = float(c)
    c_int = int(c) if c.is_integer() else 0
    acc = 0.0
    for xi, yi in zip(x.tolist(), y.tolist()):
        diff = abs(xi - yi)
        if c_int >= 1:
            term = diff
            for _ in range(c_int - 1):
                term *= diff
        else:
            term = math.pow(diff, c)
        acc += term
    return math.pow(acc, 1.0 / c)


def squared_distances(x, y):
    """All-pairs squared Euclidean distances, floored at zero."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    sq = (x * x).sum(axis=1)[:, None] + (y * y).sum(axis=1)[None, :] - 2.0 * (x @ y.T)
    return np.maximum(sq, 0.0)


def svm_kernel_matrix(kind, x, y, gamma=None):
    """K[i, j] for the SVM: linear x.y or rbf exp(-gamma ||x-y||^2)."""
    if kind == "linear":
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        return x @ y.T
    if kind == "rbf":
        if gamma is None or gamma <= 0:
            raise ValueError(f"rbf kernel needs gamma > 0, got {gamma}")
        return np.exp(-gamma * squared_distances(x, y))
    raise ValueError(f"unknown svm kernel {kind!r}")


def gp_kernel_matrix(kind, x, y):
    """K[i, j] for the GP prior; unit length-scales throughout."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if kind == "rbf":
        return np.exp(-0.5 * squared_distances(x, y))
    if kind == "dot_product":
        return 1.0 + x @ y.T
    if kind == "matern":
        # nu = 3/2: (1 + sqrt(3) r) exp(-sqrt(3) r)
        r = np.sqrt(squared_distances(x, y))
        return (1.0 + _SQRT3 * r) * np.exp(-_SQRT3 * r)
    if kind == "rational_quadratic":
        # alpha = 1, l = 1: (1 + r^2/2)^-1
        return 1.0 / (1.0 + 0.5 * squared_distances(x, y))
    if kind == "white":
        return _exact_equality_matrix(x, y)
    raise ValueError(f"unknown gp kernel {kind!r}")


def gp_kernel_diag(kind, x):
    """k(x, x) for each row of x."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if kind == "dot_product":
        return 1.0 + (x * x).sum(axis=1)
    return np.ones(x.shape[0])


def _exact_equality_matrix(x, y, rows_per_chunk=256):
    out = np.zeros((x.shape[0], y.shape[0]))
    for start in range(0, x.shape[0], rows_per_chunk):
        stop = min(x.shape[0], start + rows_per_chunk)
        eq = (x[start:stop, None, :] == y[None, :, :]).all(axis=-1)
        out[start:stop] = eq.astype(np.float64)
    return out


def kernel_eval(family, kind, x, y, gamma=None):
    """Scalar kernel evaluation; family is "svm" or "gp"."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape or x.shape[0] != 1:
        raise ValueError("kernel_eval expects two equal-dimension vectors")
    if family == "svm":
        if kind not in SVM_KERNELS:
            raise ValueError(f"unknown svm kernel {kind!r}")
        return float(svm_kernel_matrix(kind, x, y, gamma=gamma)[0, 0])
    if family == "gp":
        if kind not in GP_KERNELS:
            raise ValueError(f"unknown gp kernel {kind!r}")
        return float(gp_kernel_matrix(kind, x, y)[0, 0])
    raise ValueError(f"unknown kernel family {family!r}")
