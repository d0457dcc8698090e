# cython: language_level=3
"""Compiled hot kernels: Minkowski power-sum matrix and tree split scan.

Mirrors pykernels.py; keep term construction and accumulation order in
sync between the two so results agree bitwise across backends (integer
exponents use multiplication chains, not libm pow, for that reason).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, log2

cnp.import_array()


def minkowski_powsum(object x_in, object y_in, double c):
    """Matrix s[i, j] = sum_t |x[i,t] - y[j,t]|^c (no 1/c root applied)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] y = np.ascontiguousarray(y_in, dtype=np.float64)
    if x.shape[1] != y.shape[1]:
        raise ValueError("minkowski_powsum expects 2-d arrays with equal dim")
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0], d = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] out = np.empty((n, m), dtype=np.float64)
    cdef int c_int = <int> c if c == <double> (<int> c) else 0
    cdef Py_ssize_t i, j, t
    cdef int r
    cdef double acc, diff, term
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                if c_int >= 1:
                    for t in range(d):
                        diff = fabs(x[i, t] - y[j, t])
                        term = diff
                        for r in range(c_int - 1):
                            term *= diff
                        acc += term
                else:
                    for t in range(d):
                        acc += pow(fabs(x[i, t] - y[j, t]), c)
                out[i, j] = acc
    return out


def split_scan(object values_in, object classes_in, int n_classes, int criterion):
    """Best binary split of a sorted feature column.

    See pykernels.split_scan for the contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] values = np.ascontiguousarray(values_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] classes = np.ascontiguousarray(classes_in, dtype=np.int64)
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return -1, np.inf
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] left = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] right = np.zeros(n_classes, dtype=np.int64)
    cdef Py_ssize_t p, j
    cdef double best_score = np.inf, score, il, ir, nl, nr
    cdef Py_ssize_t best_pos = -1
    with nogil:
        for p in range(n):
            right[classes[p]] += 1
        for p in range(1, n):
            left[classes[p - 1]] += 1
            right[classes[p - 1]] -= 1
            if values[p - 1] < values[p]:
                nl = <double> p
                nr = <double> (n - p)
                il = _impurity(&left[0], n_classes, nl, criterion)
                ir = _impurity(&right[0], n_classes, nr, criterion)
                score = (nl * il + nr * ir) / n
                if score < best_score:
                    best_score = score
                    best_pos = p
    if best_pos < 0:
        return -1, np.inf
    return best_pos, best_score


cdef inline double _impurity(cnp.int64_t* counts, int n_classes, double size, int criterion) nogil:
    cdef double acc = 0.0, pj
    cdef int j
    if criterion == 0:
        for j in range(n_classes):
            pj = counts[j] / size
            acc += pj * pj
        return 1.0 - acc
    for j in range(n_classes):
        if counts[j] > 0:
            pj = counts[j] / size
            acc -= pj * log2(pj)
    return acc
