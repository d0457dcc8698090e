"""Gaussian process classification via the Laplace approximation.

One binary GP per class (one-vs-rest) with a logistic link: the latent
posterior mode is found by Newton iteration (convergence when the
penalized log-likelihood changes by less than newton_tol), and predictive
probabilities use the logistic-Gaussian integral approximation
sigma(mu / sqrt(1 + pi * var / 8)).  Kernels have unit hyperparameters;
grid search varies the kernel kind only.  A non-positive-definite kernel
matrix gets 1e-8 jitter up to 3 times before failing.
"""

import math

import numpy as np
from scipy.special import expit

from ..errors import KernelDegenerateError
from ..serialize import array_from_json, array_to_json
from .base import TrainedModel, validate_training_data
from .kernels import gp_kernel_diag, gp_kernel_matrix

JITTER = 1e-8
MAX_JITTER_TRIES = 3


def _chol_b_matrix(k, sqrt_w):
    """Cholesky of B = I + W^1/2 K W^1/2, jittering K when degenerate.

    Returns (L, k) where k may have accumulated jitter on its diagonal.
    """
    for attempt in range(MAX_JITTER_TRIES + 1):
        b = np.eye(k.shape[0]) + sqrt_w[:, None] * k * sqrt_w[None, :]
        try:
            return np.linalg.cholesky(b), k
        except np.linalg.LinAlgError:
            if attempt == MAX_JITTER_TRIES:
                raise KernelDegenerateError(
                    f"kernel matrix stayed degenerate after {MAX_JITTER_TRIES} "
                    f"jitter additions of {JITTER}"
                )
            k = k + JITTER * np.eye(k.shape[0])
    raise AssertionError("unreachable")


def _laplace_mode(k, t, max_iters, tol):
    """Newton iteration for the latent posterior mode.

    t: 0/1 targets.  Returns (grad_at_mode, sqrt_w, chol_b, converged).
    """
    n = len(t)
    f = np.zeros(n)
    last_obj = -np.inf
    converged = False
    grad = t - 0.5
    sqrt_w = np.full(n, 0.5)
    chol = None
    for _ in range(max_iters):
        p = expit(f)
        w = p * (1.0 - p)
        sqrt_w = np.sqrt(w)
        chol, k = _chol_b_matrix(k, sqrt_w)
        grad = t - p
        bvec = w * f + grad
        inner = sqrt_w * (k @ bvec)
        solved = np.linalg.solve(
            chol.T, np.linalg.solve(chol, inner)
        )
        a = bvec - sqrt_w * solved
        f = k @ a
        # penalized log-likelihood: -a.f/2 + sum(t*f - log(1 + e^f))
        obj = -0.5 * float(a @ f) + float(np.sum(t * f - np.logaddexp(0.0, f)))
        if abs(obj - last_obj) < tol:
            converged = True
            break
        last_obj = obj
    # refresh state at the final f
    p = expit(f)
    sqrt_w = np.sqrt(p * (1.0 - p))
    chol, k = _chol_b_matrix(k, sqrt_w)
    return t - p, sqrt_w, chol, converged


class GpModel(TrainedModel):
    kind = "gaussian_process"

    def __init__(self, spec, label_vocab, dim, train_x, binaries, converged=True):
        super().__init__(spec, label_vocab, dim, converged)
        self.train_x = train_x
        self.binaries = binaries  # per class: dict(grad, sqrt_w, chol)

    @classmethod
    def fit(cls, spec, data):
        validate_training_data(data)
        params = spec.params
        x = np.ascontiguousarray(data.X, dtype=np.float64)
        k = gp_kernel_matrix(params.kernel, x, x)
        binaries = []
        converged = True
        for class_idx in range(len(data.label_vocab)):
            t = (data.y == class_idx).astype(np.float64)
            grad, sqrt_w, chol, ok = _laplace_mode(
                k, t, params.max_newton_iters, params.newton_tol
            )
            converged = converged and ok
            binaries.append({"grad": grad, "sqrt_w": sqrt_w, "chol": chol})
        return cls(spec, data.label_vocab, x.shape[1], x, binaries, converged)

    def _proba(self, x):
        kind = self.spec.params.kernel
        ks = gp_kernel_matrix(kind, self.train_x, x)      # n_train x n_query
        diag = gp_kernel_diag(kind, x)
        p = np.empty((x.shape[0], len(self.binaries)))
        for j, binary in enumerate(self.binaries):
            mu = ks.T @ binary["grad"]
            v = np.linalg.solve(binary["chol"], binary["sqrt_w"][:, None] * ks)
            var = np.maximum(diag - (v * v).sum(axis=0), 0.0)
            p[:, j] = expit(mu / np.sqrt(1.0 + math.pi * var / 8.0))
        return p / p.sum(axis=1, keepdims=True)

    def state_to_json(self):
        return {
            "train_x": array_to_json(self.train_x),
            "binaries": [
                {
                    "grad": array_to_json(b["grad"]),
                    "sqrt_w": array_to_json(b["sqrt_w"]),
                    "chol": array_to_json(b["chol"]),
                }
                for b in self.binaries
            ],
        }

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        binaries = [
            {
                "grad": array_from_json(b["grad"]),
                "sqrt_w": array_from_json(b["sqrt_w"]),
                "chol": array_from_json(b["chol"]),
            }
            for b in state["binaries"]
        ]
        return cls(spec, label_vocab, dim, array_from_json(state["train_x"]), binaries, converged)
