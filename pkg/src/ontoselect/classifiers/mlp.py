"""Single-hidden-layer perceptron with softmax output.

Loss is mean cross-entropy plus (l2_alpha/2) * (||W1||^2 + ||W2||^2);
biases are not penalized.  Training is mini-batch sgd or adam (beta1=0.9,
beta2=0.999, eps=1e-8); the adaptive schedule halves the learning rate
after 2 consecutive epochs without loss improvement.  Training stops at
max_epochs or when the epoch loss changes by less than 1e-6; only the
loss-change stop sets the converged flag.  The lbfgs optimizer validates
in grids but is rejected here so grid runners can skip the point.
"""

import numpy as np

from ..errors import UnsupportedOptimizerError
from ..serialize import array_from_json, array_to_json
from .base import TrainedModel, validate_training_data

LOSS_TOL = 1e-6
_ADAM_B1, _ADAM_B2, _ADAM_EPS = 0.9, 0.999, 1e-8


def _activate(z, kind):
    if kind == "identity":
        return z
    if kind == "logistic":
        return 1.0 / (1.0 + np.exp(-z))
    if kind == "tanh":
        return np.tanh(z)
    return np.maximum(z, 0.0)  # relu


def _activate_grad(z, a, kind):
    if kind == "identity":
        return np.ones_like(z)
    if kind == "logistic":
        return a * (1.0 - a)
    if kind == "tanh":
        return 1.0 - a * a
    return (z > 0.0).astype(np.float64)


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(x, w1, b1, w2, b2, activation):
    z1 = x @ w1 + b1
    a1 = _activate(z1, activation)
    return z1, a1, a1 @ w2 + b2


def loss_and_grad(w1, b1, w2, b2, x, onehot, activation, l2_alpha):
    """Regularized cross-entropy loss and its analytic gradients."""
    n = x.shape[0]
    z1, a1, logits = forward(x, w1, b1, w2, b2, activation)
    probs = _softmax(logits)
    eps = np.finfo(np.float64).tiny
    ce = -np.sum(onehot * np.log(probs + eps)) / n
    loss = ce + 0.5 * l2_alpha * ((w1 * w1).sum() + (w2 * w2).sum())

    dlogits = (probs - onehot) / n
    gw2 = a1.T @ dlogits + l2_alpha * w2
    gb2 = dlogits.sum(axis=0)
    da1 = dlogits @ w2.T
    dz1 = da1 * _activate_grad(z1, a1, activation)
    gw1 = x.T @ dz1 + l2_alpha * w1
    gb1 = dz1.sum(axis=0)
    return loss, (gw1, gb1, gw2, gb2)


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class MlpModel(TrainedModel):
    kind = "mlp"

    def __init__(self, spec, label_vocab, dim, weights, converged=True):
        super().__init__(spec, label_vocab, dim, converged)
        self.w1, self.b1, self.w2, self.b2 = weights

    @classmethod
    def fit(cls, spec, data):
        params = spec.params
        if params.optimizer == "lbfgs":
            raise UnsupportedOptimizerError(
                "unsupported optimizer 'lbfgs' (quasi-Newton batch training "
                "is out of scope); use 'sgd' or 'adam'"
            )
        validate_training_data(data)
        x = np.ascontiguousarray(data.X, dtype=np.float64)
        n, dim = x.shape
        n_classes = len(data.label_vocab)
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), data.y] = 1.0

        rng = np.random.default_rng(spec.seed)
        w1 = _glorot(rng, dim, params.hidden_size)
        b1 = np.zeros(params.hidden_size)
        w2 = _glorot(rng, params.hidden_size, n_classes)
        b2 = np.zeros(n_classes)
        weights = [w1, b1, w2, b2]

        batch_size = params.batch_size or min(200, n)
        lr = params.base_lr
        adam_m = [np.zeros_like(w) for w in weights]
        adam_v = [np.zeros_like(w) for w in weights]
        adam_t = 0

        prev_loss, _ = loss_and_grad(*weights, x, onehot, params.activation, params.l2_alpha)
        best_loss = prev_loss
        stale_epochs = 0
        converged = False
        for _ in range(params.max_epochs):
            perm = rng.permutation(n)
            for start in range(0, n, batch_size):
                rows = perm[start : start + batch_size]
                _, grads = loss_and_grad(
                    *weights, x[rows], onehot[rows], params.activation, params.l2_alpha
                )
                if params.optimizer == "sgd":
                    for w, g in zip(weights, grads):
                        w -= lr * g
                else:
                    adam_t += 1
                    correction1 = 1.0 - _ADAM_B1**adam_t
                    correction2 = 1.0 - _ADAM_B2**adam_t
                    for w, g, m, v in zip(weights, grads, adam_m, adam_v):
                        m *= _ADAM_B1
                        m += (1.0 - _ADAM_B1) * g
                        v *= _ADAM_B2
                        v += (1.0 - _ADAM_B2) * g * g
                        w -= lr * (m / correction1) / (
                            np.sqrt(v / correction2) + _ADAM_EPS
                        )
            loss, _ = loss_and_grad(*weights, x, onehot, params.activation, params.l2_alpha)
            if abs(prev_loss - loss) < LOSS_TOL:
                converged = True
                break
            prev_loss = loss
            if params.learning_rate_schedule == "adaptive":
                if loss < best_loss:
                    best_loss = loss
                    stale_epochs = 0
                else:
                    stale_epochs += 1
                    if stale_epochs >= 2:
                        lr /= 2.0
                        stale_epochs = 0
        return cls(spec, data.label_vocab, dim, weights, converged)

    def _proba(self, x):
        _, _, logits = forward(
            x, self.w1, self.b1, self.w2, self.b2, self.spec.params.activation
        )
        return _softmax(logits)

    def state_to_json(self):
        return {
            "w1": array_to_json(self.w1),
            "b1": array_to_json(self.b1),
            "w2": array_to_json(self.w2),
            "b2": array_to_json(self.b2),
        }

    @classmethod
    def from_state(cls, spec, label_vocab, dim, converged, state):
        weights = [array_from_json(state[k]) for k in ("w1", "b1", "w2", "b2")]
        return cls(spec, label_vocab, dim, weights, converged)
