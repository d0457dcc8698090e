#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [--repeats 5]

Times the two _core kernels on shapes representative of the pipeline
(768-dim embeddings for distances, per-node feature columns for split
scans) plus two end-to-end consumers (knn batch prediction, forest fit).
"""

import argparse
import time

import numpy as np

from ontoselect._core import BACKEND, pykernels

try:
    from ontoselect._core import _kernels as compiled
except ImportError:
    compiled = None


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_minkowski(repeats):
    rng = np.random.default_rng(0)
    rows = []
    for n, m, dim, c in [(200, 500, 768, 2.0), (200, 500, 768, 3.0), (500, 1000, 32, 2.0)]:
        x = rng.normal(size=(n, dim))
        y = rng.normal(size=(m, dim))
        py_t = best_of(repeats, pykernels.minkowski_powsum, x, y, c)
        cy_t = best_of(repeats, compiled.minkowski_powsum, x, y, c) if compiled else None
        rows.append((f"minkowski {n}x{m} d={dim} c={c:g}", py_t, cy_t))
    return rows


def bench_split_scan(repeats):
    rng = np.random.default_rng(1)
    rows = []
    for n, k in [(500, 5), (5000, 5), (20000, 10)]:
        values = np.sort(rng.normal(size=n))
        classes = rng.integers(0, k, size=n)

        def run_many(impl):
            for _ in range(50):
                impl.split_scan(values, classes, k, 0)

        py_t = best_of(repeats, run_many, pykernels)
        cy_t = best_of(repeats, run_many, compiled) if compiled else None
        rows.append((f"split_scan n={n} x50 calls", py_t, cy_t))
    return rows


def bench_end_to_end(repeats):
    from ontoselect.classifiers import ClassifierSpec, MODEL_CLASSES
    from ontoselect.dataset import LabeledDataset

    rng = np.random.default_rng(2)
    n, dim, k = 400, 64, 5
    centers = np.zeros((k, dim))
    for i in range(k):
        centers[i, i] = 10.0
    x = np.vstack([centers[i] + rng.normal(size=(n // k, dim)) for i in range(k)])
    y = np.repeat(np.arange(k), n // k)
    data = LabeledDataset(ids=tuple(f"s{i}" for i in range(n)), X=x, y=y,
                          label_vocab=tuple("ABCDE"))
    queries = rng.normal(size=(300, dim))
    rows = []

    def with_backend(impl, label):
        import ontoselect._core as core

        saved = core.minkowski_powsum, core.split_scan
        core.minkowski_powsum = impl.minkowski_powsum
        core.split_scan = impl.split_scan
        try:
            forest_spec = ClassifierSpec(kind="random_forest",
                                         params={"n_estimators": 10, "max_depth": 8})
            t_forest = best_of(repeats, MODEL_CLASSES["random_forest"].fit, forest_spec, data)
            knn = MODEL_CLASSES["knn"].fit(
                ClassifierSpec(kind="knn", params={"n_neighbors": 9, "minkowski_c": 3}), data
            )
            t_knn = best_of(repeats, knn.predict_proba, queries)
        finally:
            core.minkowski_powsum, core.split_scan = saved
        return t_forest, t_knn

    py_forest, py_knn = with_backend(pykernels, "python")
    if compiled:
        cy_forest, cy_knn = with_backend(compiled, "compiled")
    else:
        cy_forest = cy_knn = None
    rows.append(("forest fit 400x64 (10 trees)", py_forest, cy_forest))
    rows.append(("knn predict 300 queries c=3", py_knn, cy_knn))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active import-time backend: {BACKEND}")
    if compiled is None:
        print("compiled extension not available; timing the fallback only\n")
    rows = []
    rows += bench_minkowski(args.repeats)
    rows += bench_split_scan(args.repeats)
    rows += bench_end_to_end(args.repeats)

    width = max(len(r[0]) for r in rows) + 2
    print(f"{'case':<{width}}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, py_t, cy_t in rows:
        if cy_t is None:
            print(f"{name:<{width}}{py_t * 1e3:>10.2f}ms{'-':>12}{'-':>10}")
        else:
            print(f"{name:<{width}}{py_t * 1e3:>10.2f}ms{cy_t * 1e3:>10.2f}ms"
                  f"{py_t / cy_t:>9.1f}x")


if __name__ == "__main__":
    main()
