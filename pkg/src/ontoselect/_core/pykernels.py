"""Pure-numpy fallbacks for the compiled kernels.

Semantics match ``_kernels.pyx`` operation for operation. For integer
Minkowski exponents the power terms are built by left-to-right
multiplication chains and accumulated sequentially (cumsum), which makes
results bitwise identical to the compiled path; non-integer exponents go
through libm pow and may differ from the compiled path in the last ulp.
"""

import numpy as np

_CHUNK_ELEMENTS = 4_000_000  # cap on temporary (rows * m * d) buffer size


def minkowski_powsum(x, y, c):
    """Matrix s[i, j] = sum_t |x[i,t] - y[j,t]|^c (no 1/c root applied)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValueError("minkowski_powsum expects 2-d arrays with equal dim")
    n, d = x.shape
    m = y.shape[0]
    c_int = int(c) if float(c).is_integer() else 0
    out = np.empty((n, m), dtype=np.float64)
    rows = max(1, _CHUNK_ELEMENTS // max(1, m * d))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        diff = np.abs(x[start:stop, None, :] - y[None, :, :])
        if c_int >= 1:
            term = diff.copy()
            for _ in range(c_int - 1):
                term *= diff
        else:
            term = np.power(diff, c)
        np.cumsum(term, axis=-1, out=term)
        out[start:stop] = term[..., -1] if d else 0.0
    return out


def split_scan(values, classes, n_classes, criterion):
    """Best binary split of a sorted feature column.

    values must be sorted ascending, classes aligned with it.  Returns
    (pos, score) where pos is the left-child size (1..n-1) minimizing the
    weighted child impurity (nl*il + nr*ir)/n, considering only positions
    between strictly distinct values; ties resolve to the smallest pos.
    criterion: 0 = gini, 1 = entropy.  Returns (-1, inf) when no valid
    split exists.
    """
    values = np.asarray(values, dtype=np.float64)
    classes = np.asarray(classes, dtype=np.int64)
    n = values.shape[0]
    if n < 2:
        return -1, np.inf
    valid = values[1:] > values[:-1]
    if not valid.any():
        return -1, np.inf
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), classes] = 1
    left = onehot.cumsum(axis=0)[:-1]     # counts for pos = 1..n-1
    total = left[-1] + onehot[-1]
    right = total[None, :] - left
    nl = np.arange(1, n, dtype=np.float64)
    nr = float(n) - nl
    il = _impurity(left, nl, criterion)
    ir = _impurity(right, nr, criterion)
    score = (nl * il + nr * ir) / n
    score = np.where(valid, score, np.inf)
    pos = int(np.argmin(score))           # first minimum: smallest threshold
    return pos + 1, float(score[pos])


def _impurity(counts, sizes, criterion):
    p = counts / sizes[:, None]
    if criterion == 0:
        return 1.0 - (p * p).sum(axis=1)
    logp = np.zeros_like(p)
    np.log2(p, out=logp, where=counts > 0)
    return -(p * logp).sum(axis=1)
