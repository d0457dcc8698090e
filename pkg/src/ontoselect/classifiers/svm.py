"""Soft-margin SVM trained by sequential minimal optimization.

Multiclass is one-vs-rest: one binary dual problem per class, solved by
SMO to a KKT tolerance (default 1e-3), then calibrated to a probability
with a Platt sigmoid fit on out-of-fold decision values (internal 3-fold,
reduced when a binary class has fewer than 3 members).  Class
probabilities are the renormalized per-class sigmoid outputs.

Decision function convention: f(x) = sum_i alpha_i y_i K(x_i, x) + b.
All pair-selection heuristics are deterministic (greedy |E1-E2| choice,
then rotating scans), so identical inputs give identical models.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..dataset import stratified_kfold_indices
from ..serialize import array_from_json, array_to_json
from .base import TrainedModel, validate_training_data
from .kernels import svm_kernel_matrix

SMO_TOL = 1e-3
SV_THRESHOLD = 1e-8
_STEP_EPS = 1e-12


@dataclass
class SmoResult:
    alpha: np.ndarray
    b: float
    converged: bool
    n_steps: int

    def decision(self, k_train_query, y):
        """f for query columns of a train-by-query kernel matrix."""
        return (self.alpha * y) @ k_train_query + self.b


class _Smo:
    def __init__(self, k, y, c, tol, max_steps):
        self.k = k
        self.y = y
        self.c = c
        self.tol = tol
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.errors = -y.astype(np.float64)  # f - y with alpha = 0, b = 0
        self.steps = 0
        self.max_steps = max_steps
        self._rotation = 0

    def solve(self):
        converged = True
        num_changed = 0
        examine_all = True
        while num_changed > 0 or examine_all:
            num_changed = 0
            if examine_all:
                targets = range(self.n)
            else:
                targets = np.nonzero((self.alpha > 0) & (self.alpha < self.c))[0]
            for i2 in targets:
                num_changed += self._examine(int(i2))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
            if self.steps > self.max_steps:
                converged = False
                break
        return SmoResult(self.alpha, self.b, converged, self.steps)

    def _examine(self, i2):
        y2, a2, e2 = self.y[i2], self.alpha[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.c) or (r2 > self.tol and a2 > 0)):
            return 0
        nonbound = np.nonzero((self.alpha > 0) & (self.alpha < self.c))[0]
        if nonbound.size > 1:
            i1 = int(nonbound[np.argmax(np.abs(self.errors[nonbound] - e2))])
            if self._take_step(i1, i2):
                return 1
        for i1 in self._rotated(nonbound):
            if self._take_step(int(i1), i2):
                return 1
        for i1 in self._rotated(np.arange(self.n)):
            if self._take_step(int(i1), i2):
                return 1
        return 0

    def _rotated(self, indices):
        if indices.size == 0:
            return indices
        start = self._rotation % indices.size
        self._rotation += 1
        return np.concatenate([indices[start:], indices[:start]])

    def _take_step(self, i1, i2):
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1 + a2 - self.c), min(self.c, a1 + a2)
        else:
            lo, hi = max(0.0, a2 - a1), min(self.c, self.c + a2 - a1)
        if lo == hi:
            return False
        k11, k12, k22 = self.k[i1, i1], self.k[i1, i2], self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, lo), hi)
        else:
            # flat/concave direction: dual gain is g*d - eta*d^2/2 with
            # g = y2*(e1 - e2); evaluate at both box ends
            g = y2 * (e1 - e2)
            gain_lo = g * (lo - a2) - 0.5 * eta * (lo - a2) ** 2
            gain_hi = g * (hi - a2) - 0.5 * eta * (hi - a2) ** 2
            if gain_lo > gain_hi + _STEP_EPS:
                a2_new = lo
            elif gain_hi > gain_lo + _STEP_EPS:
                a2_new = hi
            else:
                return False
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False
        a1_new = min(max(a1 + s * (a2 - a2_new), 0.0), self.c)

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1_new < self.c:
            b_new = b1
        elif 0.0 < a2_new < self.c:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        self.errors += d1 * self.k[:, i1] + d2 * self.k[:, i2] + (b_new - self.b)
        self.alpha[i1] = a1_new
        self.alpha[i2] = a2_new
        self.b = b_new
        self.steps += 1
        return True


def smo_solve(k, y, c, tol=SMO_TOL, max_steps=None):
    """Solve one binary soft-margin dual problem.

    k: full kernel matrix, y: labels in {-1, +1}, c: box constraint.
    Returns SmoResult; converged=False means the step cap was hit.
    """
    k = np.asarray(k, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if max_steps is None:
        max_steps = 100_000 + 100 * len(y)
    return _Smo(k, y, c, tol, max_steps).solve()


def kkt_summary(k, y, alpha, b, c):
    """Box/constraint diagnostics of a dual solution (for verification)."""
    f = (alpha * y) @ k + b
    r = y * (f - y)
    upper_violation = np.where(alpha < c, np.maximum(0.0, -r), 0.0)
    lower_violation = np.where(alpha > 0, np.maximum(0.0, r), 0.0)
    return {
        "alpha_min": float(alpha.min()),
        "alpha_max": float(alpha.max()),
        "sum_alpha_y": float(np.sum(alpha * y)),
        "max_kkt_violation": float(np.maximum(upper_violation, lower_violation).max()),
    }


def fit_platt_sigmoid(decisions, y, max_iters=100):
    """Fit P(y=1 | f) = 1 / (1 + exp(A f + B)) by regularized Newton.

    Targets are the smoothed frequencies (n+ + 1)/(n+ + 2) and 1/(n- + 2).
    """
    f = np.asarray(decisions, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_pos = int((y > 0).sum())
    n_neg = len(y) - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(y > 0, hi, lo)

    def objective(a, b):
        z = a * f + b
        # -sum t log p + (1-t) log(1-p), stable both tails
        return float(np.sum(np.where(z >= 0, t * z + np.log1p(np.exp(-z)),
                                     (t - 1.0) * z + np.log1p(np.exp(z)))))

    a_cur, b_cur = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))
    f_cur = objective(a_cur, b_cur)
    sigma = 1e-12
    for _ in range(max_iters):
        z = a_cur * f + b_cur
        p = expit(-z)          # P(y=1)
        q = 1.0 - p
        d2 = p * q
        h11 = float(np.sum(f * f * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(f * d2))
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= 1e-10:
            a_new, b_new = a_cur + step * da, b_cur + step * db
            f_new = objective(a_new, b_new)
            if f_new < f_cur + 1e-4 * step * gd:
                a_cur, b_cur, f_cur = a_new, b_new, f_new
                break
            step /= 2.0
        else:
            break
    return a_cur, b_cur


class SvmModel(TrainedModel):
    kind = "svm"

    def __init__(self, spec, label_vocab, dim, binaries, converged=True):
        super().__init__(spec, label_vocab, dim, converged)
        self.binaries = binaries  # per class: dict(sv_x, coef, b, a, b_platt)

    @classmethod
    def fit(cls, spec, data):
        validate_training_data(data)
        params = spec.params
        x = np.ascontiguousarray(data.X, dtype=np.float64)
        k = svm_kernel_matrix(params.kernel, x, x, gamma=params.gamma)
        n = x.shape[0]
        seeds = np.random.SeedSequence(spec.seed).spawn(len(data.label_vocab))
        binaries = []
        converged = True
        for class_idx, class_seed in enumerate(seeds):
            y_bin = np.where(data.y == class_idx, 1.0, -1.0)
            decisions = cls._oof_decisions(k, y_bin, params.c, class_seed)
            a_platt, b_platt = fit_platt_sigmoid(decisions, y_bin)
            result = smo_solve(k, y_bin, params.c)
            converged = converged and result.converged
            sv = result.alpha > SV_THRESHOLD
            binaries.append(
                {
                    "sv_x": x[sv],
                    "coef": (result.alpha * y_bin)[sv],
                    "b": result.b,
                    "a_platt": a_platt,
                    "b_platt": b_platt,
                }
            )
        return cls(spec, data.label_vocab, x.shape[1], binaries, converged)

    @staticmethod
    def _oof_decisions(k, y_bin, c, seed):
        n = len(y_bin)
        n_pos = int((y_bin > 0).sum())
        folds = min(3, n_pos, n - n_pos)
        if folds < 2:
            result = smo_solve(k, y_bin, c)
            return result.decision(k, y_bin)
        out = np.empty(n)
        pairs = stratified_kfold_indices((y_bin > 0).astype(np.int64), folds, seed)
        for train_idx, val_idx in pairs:
            sub = smo_solve(k[np.ix_(train_idx, train_idx)], y_bin[train_idx], c)
            out[val_idx] = sub.decision(k[np.ix_(train_idx, val_idx)], y_bin[train_idx])
        return out

    def decision_values(self, x):
        """Uncalibrated OVR decision values, one column per class."""
        x, _ = self._check_input(x)
        params = self.spec.params
        cols = []
        for binary in self.binaries:
            if binary["sv_x"].shape[0]:
                kq = svm_kernel_matrix(params.kernel, binary["sv_x"], x, gamma=params.gamma)
                cols.append(binary["coef"] @ kq + binary["b"])
            else:
                cols.append(np.full(x.shape[0], binary["b"]))
        return np.stack(cols, axis=1)

    def _proba(self, x):
        f = self.decision_values(x)
        p = np.empty_like(f)
        for j, binary in enumerate(self.binaries):
            p[:, j] = expit(-(binary["a_platt"] * f[:, j] + binary["b_platt"]))
        return p / p.sum(axis=1, keepdims=True)

    def state_to_json(self):
        return {
            "binaries": [
                {
                    "sv_x": array_to_json(b["sv_x"]),
                    "coef": array_to_json(b["coef"]),
                    "b": b["b"],
                    "a_platt": b["a_platt"],
                    "b_platt": b["b_platt"],
                }
                for b in self.binaries
            ]
        }

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        binaries = [
            {
                "sv_x": array_from_json(b["sv_x"]),
                "coef": array_from_json(b["coef"]),
                "b": b["b"],
                "a_platt": b["a_platt"],
                "b_platt": b["b_platt"],
            }
            for b in state["binaries"]
        ]
        return cls(spec, label_vocab, dim, binaries, converged)
