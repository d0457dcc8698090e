"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single "ACCEPTANCE <n> PASS <summary>" line once its
assertions hold, so `pytest -s tests/test_acceptance.py` reads as a
checklist.  Criterion 10's real-ontology half is data-dependent and runs
only when ONTOSELECT_ONTOLOGY_DIR points at the OWL files; criterion 12's
live half runs only when ONTOSELECT_EMBED_URL points at a sidecar.
"""

import hashlib
import itertools
import json
import math
import os
import time

import numpy as np
import pytest

from ontoselect import owl
from ontoselect.classifiers import KINDS, ClassifierSpec, fit
from ontoselect.classifiers.kernels import svm_kernel_matrix
from ontoselect.classifiers.mlp import _glorot, loss_and_grad
from ontoselect.classifiers.svm import smo_solve
from ontoselect.corpus import FilterPolicy, filter_paragraphs, split_paragraphs
from ontoselect.dataset import (
    LabeledDataset,
    SplitSpec,
    partition_disjoint,
    stratified_split,
    undersample,
)
from ontoselect.stats import (
    ConfusionMatrix,
    average_ranks,
    class_metrics,
    compute_metrics,
    friedman_test,
    holm_correction,
    pairwise_comparison,
    wilcoxon_signed_rank,
)

SELECTED_PARAMS = {
    "random_forest": {"max_depth": 11, "criterion": "gini", "n_estimators": 20,
                      "max_features_fraction": 0.5, "bootstrap": True},
    "svm": {"c": 100.0, "kernel": "rbf", "gamma": 0.001},
    "gaussian_process": {"kernel": "matern"},
    "knn": {"n_neighbors": 9, "weights": "distance", "algorithm": "auto",
            "minkowski_c": 2},
    "mlp": {"hidden_size": 4, "activation": "tanh", "optimizer": "adam",
            "l2_alpha": 0.05, "learning_rate_schedule": "constant"},
}


def announce(number, message):
    print(f"\nACCEPTANCE {number} PASS {message}")


def separable_benchmark(seed=2024, n_classes=5, per_class=200, dim=32, noise=0.3):
    rng = np.random.default_rng(seed)
    centers = np.zeros((n_classes, dim))
    for i in range(n_classes):
        centers[i, i] = 10.0  # pairwise center distance 10*sqrt(2) >= 10
    x = np.vstack([c + noise * rng.normal(size=(per_class, dim)) for c in centers])
    y = np.repeat(np.arange(n_classes), per_class)
    return LabeledDataset(
        ids=tuple(f"s{i}" for i in range(n_classes * per_class)),
        X=x, y=y,
        label_vocab=tuple(chr(ord("A") + i) for i in range(n_classes)),
    )


def test_01_synthetic_separable_benchmark():
    """5x200, dim 32, 1:1 split, 20 partitions: every kind >= 0.99 in < 120 s."""
    started = time.monotonic()
    data = separable_benchmark()
    train, test = stratified_split(data, SplitSpec(train_fraction=0.5, seed=11))
    parts = partition_disjoint(test, 20, seed=11)
    means = {}
    for kind in KINDS:
        model = fit(ClassifierSpec(kind=kind, params=SELECTED_PARAMS[kind], seed=0), train)
        accs = []
        for part in parts:
            pred = model.predict(part.X)
            truth = np.array([part.label_vocab[i] for i in part.y], dtype=object)
            accs.append(float((pred == truth).mean()))
        means[kind] = float(np.mean(accs))
    elapsed = time.monotonic() - started
    for kind, mean_acc in means.items():
        assert mean_acc >= 0.99, f"{kind}: mean accuracy {mean_acc}"
    assert elapsed < 120.0, f"benchmark took {elapsed:.1f}s"
    announce(1, f"all five >= 0.99 mean accuracy over 20 partitions in {elapsed:.1f}s "
                f"({ {k: round(v, 4) for k, v in means.items()} })")


def knn_oracle(train_x, train_y, query, k, c, weights, n_classes):
    """Independent exhaustive scan with (distance, index) ordering."""
    scored = []
    for idx in range(train_x.shape[0]):
        acc = 0.0
        for t in range(train_x.shape[1]):
            diff = abs(train_x[idx, t] - query[t])
            term = diff
            for _ in range(c - 1):
                term *= diff
            acc += term
        scored.append((acc, idx))
    scored.sort()
    top = scored[:k]
    votes = [0.0] * n_classes
    if weights == "uniform":
        for _, idx in top:
            votes[train_y[idx]] += 1.0
    else:
        zero_hits = [idx for acc, idx in top if acc == 0.0]
        if zero_hits:
            for idx in zero_hits:
                votes[train_y[idx]] += 1.0
        else:
            for acc, idx in top:
                votes[train_y[idx]] += 1.0 / math.pow(acc, 1.0 / c)
    total = sum(votes)
    return [v / total for v in votes]


def test_02_knn_oracle_equivalence():
    """knn == brute-force oracle exactly: 200 points, dim 8, full grid."""
    rng = np.random.default_rng(88)
    n_train, n_query, dim = 120, 80, 8
    train_x = rng.normal(size=(n_train, dim))
    train_y = rng.integers(0, 4, size=n_train)
    queries = rng.normal(size=(n_query, dim))
    queries[0] = train_x[3]  # exercise the exact-match rule
    data = LabeledDataset(
        ids=tuple(f"t{i}" for i in range(n_train)),
        X=train_x, y=train_y, label_vocab=("A", "B", "C", "D"),
    )
    checked = 0
    for k in (1, 5, 9, 13, 17):
        for c in (1, 2, 3, 4, 5):
            for weights in ("uniform", "distance"):
                model = fit(ClassifierSpec(
                    kind="knn",
                    params={"n_neighbors": k, "weights": weights, "minkowski_c": c},
                ), data)
                got = model.predict_proba(queries)
                pred = model.predict(queries)
                for q in range(n_query):
                    want = knn_oracle(train_x, train_y, queries[q], k, c, weights, 4)
                    assert got[q].tolist() == want
                    assert pred[q] == data.label_vocab[int(np.argmax(want))]
                checked += 1
    announce(2, f"{checked} grid combinations, probabilities and predictions "
                f"bitwise-equal to the exhaustive-scan oracle")


def test_03_mlp_gradient_check():
    """Analytic vs central differences (h=1e-5): relative error < 1e-5."""
    rng = np.random.default_rng(3)
    dim, hidden, n_classes, n = 5, 4, 3, 16
    x = rng.normal(size=(n, dim))
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), rng.integers(0, n_classes, n)] = 1.0
    weights = [_glorot(rng, dim, hidden), 0.1 * rng.normal(size=hidden),
               _glorot(rng, hidden, n_classes), 0.1 * rng.normal(size=n_classes)]
    _, analytic = loss_and_grad(*weights, x, onehot, "tanh", 0.05)
    h = 1e-5
    worst = 0.0
    for p, grad in zip(weights, analytic):
        it = np.nditer(p, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + h
            up, _ = loss_and_grad(*weights, x, onehot, "tanh", 0.05)
            p[idx] = orig - h
            down, _ = loss_and_grad(*weights, x, onehot, "tanh", 0.05)
            p[idx] = orig
            numeric = (up - down) / (2.0 * h)
            rel = abs(numeric - grad[idx]) / max(1e-8, abs(numeric) + abs(grad[idx]))
            worst = max(worst, rel)
            it.iternext()
    assert worst < 1e-5
    announce(3, f"max relative gradient error {worst:.2e} < 1e-5")


def test_04_svm_kkt_and_support_vector_sufficiency():
    """Box/equality constraints at convergence; SV-only refit equivalence."""
    rng = np.random.default_rng(4)
    data = separable_benchmark(seed=4, n_classes=3, per_class=40, dim=6, noise=0.6)
    x = data.X
    k_full = svm_kernel_matrix("rbf", x, x, gamma=0.05)
    queries = rng.normal(size=(60, 6)) * 2.0
    c_box = 10.0
    worst_sum = 0.0
    worst_refit = 0.0
    for class_idx in range(3):
        y_bin = np.where(data.y == class_idx, 1.0, -1.0)
        result = smo_solve(k_full, y_bin, c_box, tol=1e-8)
        assert result.converged
        assert result.alpha.min() >= 0.0 and result.alpha.max() <= c_box
        worst_sum = max(worst_sum, abs(float(np.sum(result.alpha * y_bin))))
        sv = result.alpha > 1e-8
        assert 0 < sv.sum() < len(y_bin)
        refit = smo_solve(
            svm_kernel_matrix("rbf", x[sv], x[sv], gamma=0.05), y_bin[sv], c_box, tol=1e-8
        )
        full_f = result.decision(svm_kernel_matrix("rbf", x, queries, gamma=0.05), y_bin)
        sv_f = refit.decision(svm_kernel_matrix("rbf", x[sv], queries, gamma=0.05), y_bin[sv])
        worst_refit = max(worst_refit, float(np.max(np.abs(full_f - sv_f))))
    assert worst_sum <= 1e-6
    assert worst_refit <= 1e-6
    announce(4, f"|sum alpha*y| <= {worst_sum:.1e}, SV-refit decision drift "
                f"{worst_refit:.1e} <= 1e-6 on all binary subproblems")


def test_05_statistics_oracle_suite():
    """Wilcoxon vs 2^n enumeration, Holm vs definition, Friedman fixtures."""
    rng = np.random.default_rng(5)
    # (a) exact Wilcoxon equals enumeration for all n <= 12
    for n in range(1, 13):
        for _ in range(4):
            a = rng.integers(-5, 6, size=n).astype(float)
            b = rng.integers(-5, 6, size=n).astype(float)
            diff = a - b
            kept = diff[diff != 0]
            if len(kept) == 0:
                a[0] += 1.0
                kept = (a - b)[(a - b) != 0]
            mine = wilcoxon_signed_rank(a, b)
            ranks = average_ranks(np.abs(kept))
            total = ranks.sum()
            count = 0
            for signs in itertools.product((0, 1), repeat=len(kept)):
                w_plus = sum(r for s, r in zip(signs, ranks) if s)
                if min(w_plus, total - w_plus) <= mine.statistic + 1e-12:
                    count += 1
            enum_p = count / 2.0 ** len(kept)
            assert abs(mine.p_value - enum_p) <= 1e-12
    # (b) Holm matches the step-down definition on 1000 random vectors
    for _ in range(1000):
        m = int(rng.integers(1, 11))
        p = rng.uniform(size=m)
        got = holm_correction(p)
        order = np.argsort(p, kind="stable")
        running = 0.0
        expected = np.empty(m)
        for rank, idx in enumerate(order):
            running = max(running, min(1.0, (m - rank) * p[idx]))
            expected[idx] = running
        assert np.allclose(got, expected, atol=1e-15)
    # (c) Friedman fixture is exactly 4.0
    fixture = friedman_test(np.array([[0.1, 0.2, 0.3], [1.0, 2.0, 3.0]]))
    assert fixture.statistic == 4.0
    # (d) dominant classifier: p < 0.01 and a 20-win column for the dominated
    scores = rng.uniform(0.90, 0.95, size=(20, 5))
    scores[:, 3] = rng.uniform(0.50, 0.60, size=20)  # dominated model
    assert friedman_test(scores).p_value < 0.01
    win_matrix = pairwise_comparison(scores, names=("a", "b", "c", "weak", "e"))
    for i in range(5):
        if i != 3:
            assert win_matrix.wins[i, 3] == 20
    assert win_matrix.summary_score[3] == min(win_matrix.summary_score)
    announce(5, "Wilcoxon==enumeration (n<=12), Holm==step-down (1000 vectors), "
                "Friedman fixture == 4.0, dominant 20x5 matrix significant with "
                "20-win column")


def test_06_metric_identities():
    """compute_metrics equals a per-sample counting oracle; binary fixture."""
    rng = np.random.default_rng(6)
    labels = ("a", "b", "c", "d")
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        y_true = [labels[i] for i in rng.integers(0, 4, n)]
        y_pred = [labels[i] for i in rng.integers(0, 4, n)]
        cm = ConfusionMatrix.from_predictions(labels, y_true, y_pred)
        report = compute_metrics(cm)
        accuracy = sum(t == p for t, p in zip(y_true, y_pred)) / n
        precisions, recalls, f1s = [], [], []
        for lab in labels:
            tp = sum(1 for t, p in zip(y_true, y_pred) if t == lab and p == lab)
            fp = sum(1 for t, p in zip(y_true, y_pred) if t != lab and p == lab)
            fn = sum(1 for t, p in zip(y_true, y_pred) if t == lab and p != lab)
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            f1s.append(2 * precision * recall / (precision + recall)
                       if precision + recall else 0.0)
            precisions.append(precision)
            recalls.append(recall)
        assert abs(report.accuracy - accuracy) <= 1e-12
        assert abs(report.macro_precision - np.mean(precisions)) <= 1e-12
        assert abs(report.macro_recall - np.mean(recalls)) <= 1e-12
        assert abs(report.macro_f1 - np.mean(f1s)) <= 1e-12
    cm = ConfusionMatrix(labels=("pos", "neg"), counts=np.array([[9, 1], [1, 89]]))
    precision, recall, f1 = class_metrics(cm)
    assert (precision[0], recall[0], f1[0]) == (0.9, 0.9, 0.9)
    announce(6, "1000 random matrices match the counting oracle at 1e-12; "
                "TP=9/FP=1/FN=1 fixture gives P=R=F1=0.9")


def test_07_probability_simplex():
    """All five kinds, 1000 random inputs each: sums 1 +- 1e-9, no negatives."""
    data = separable_benchmark(seed=7, n_classes=4, per_class=15, dim=6, noise=1.0)
    rng = np.random.default_rng(7)
    x = rng.normal(scale=4.0, size=(1000, 6))
    fast = {"random_forest": {"n_estimators": 5, "max_depth": 5}, "svm": {},
            "gaussian_process": {}, "knn": {"n_neighbors": 5}, "mlp": {"max_epochs": 30}}
    for kind in KINDS:
        model = fit(ClassifierSpec(kind=kind, params=fast[kind], seed=1), data)
        probs = model.predict_proba(x)
        assert (probs >= 0.0).all(), kind
        assert np.abs(probs.sum(axis=1) - 1.0).max() <= 1e-9, kind
    announce(7, "predict_proba on 5 kinds x 1000 inputs stays on the simplex "
                "(sum 1 +- 1e-9, non-negative)")


def test_08_data_ops_properties():
    """Split/partition disjointness, coverage, +-1 stratification; exact
    min-class equalization; over 500 random datasets."""
    rng = np.random.default_rng(8)
    for trial in range(500):
        n_classes = int(rng.integers(2, 6))
        counts = [int(rng.integers(4, 30)) for _ in range(n_classes)]
        while sum(counts) < 20:
            counts[0] += 20
        labels = tuple(chr(ord("A") + i) for i in range(n_classes))
        ids, y = [], []
        for c, count in enumerate(counts):
            ids.extend(f"t{trial}_{c}_{j}" for j in range(count))
            y.extend([c] * count)
        data = LabeledDataset(
            ids=tuple(ids), X=rng.normal(size=(sum(counts), 2)),
            y=np.array(y, dtype=np.int64), label_vocab=labels,
        )
        fraction = float(rng.uniform(0.3, 0.7))
        train, test = stratified_split(
            data, SplitSpec(train_fraction=fraction, seed=trial)
        )
        assert set(train.ids) | set(test.ids) == set(data.ids)
        assert not set(train.ids) & set(test.ids)
        for c, count in enumerate(counts):
            assert abs(int((train.y == c).sum()) - fraction * count) < 1.0
        parts = partition_disjoint(data, 20, seed=trial)
        seen = [sid for part in parts for sid in part.ids]
        assert len(seen) == len(set(seen)) == len(data)
        for c in range(n_classes):
            per = [int((part.y == c).sum()) for part in parts]
            assert max(per) - min(per) <= 1
        balanced = undersample(data, "min-class", seed=trial)
        assert len(set(balanced.class_counts().tolist())) == 1
        assert balanced.class_counts()[0] == min(counts)
    announce(8, "500 random datasets: split/partition disjoint, covering, "
                "stratified within 1; min-class undersampling equalizes exactly")


def test_09_text_filter_fixture():
    """12-paragraph document: 99/100 boundary, headings, References region."""
    body_99 = "b" * 98 + "."     # 99 characters
    body_100 = "c" * 99 + "."    # exactly 100
    document = "\n\n".join([
        "# Title Heading",                       # 0 heading, dropped
        "d" * 149 + ".",                         # 1 kept
        body_99,                                 # 2 dropped: too short
        body_100,                                # 3 kept: boundary inclusive
        "Short standalone heading",              # 4 heading, dropped
        "e" * 119 + ".",                         # 5 kept
        "# References",                          # 6 heading: banned region
        "f" * 199 + ".",                         # 7 dropped: banned region
        "g" * 199 + ".",                         # 8 dropped: banned region
        "# Appendix",                            # 9 heading, dropped
        "h" * 129 + ".",                         # 10 kept: region ended
        "i" * 49 + ".",                          # 11 dropped: too short
    ])
    paragraphs = split_paragraphs(document, "fixture-doc")
    assert len(paragraphs) == 12
    kept = filter_paragraphs(paragraphs, FilterPolicy())
    assert [p.index for p in kept] == [1, 3, 5, 10]
    assert all(p.kind == "body" and p.char_len >= 100 for p in kept)
    announce(9, "kept exactly paragraphs {1, 3, 5, 10} of the 12-paragraph fixture")


OWL_FIXTURE = b"""<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xmlns:obo="http://purl.obolibrary.org/obo/">
  <owl:Class rdf:about="http://fixture/C1">
    <rdfs:label>catalytic reactor</rdfs:label>
    <rdfs:comment>vessel supporting catalysis</rdfs:comment>
    <obo:IAO_0000115>device definition text</obo:IAO_0000115>
  </owl:Class>
  <owl:Class rdf:about="http://fixture/C2">
    <rdfs:label>zeolite</rdfs:label>
    <rdfs:comment>microporous catalyst support</rdfs:comment>
  </owl:Class>
  <owl:Class rdf:about="http://fixture/C3">
    <rdfs:label>xx</rdfs:label>
  </owl:Class>
</rdf:RDF>
"""


def test_10_owl_fixture_and_round_trip(tmp_path):
    """Known tag counts from a hand-built OWL file; serialization identity."""
    tag_set = owl.TagSet(ontology="FIX", tags=("rdfs:label", "rdfs:comment",
                                               "obo:IAO_0000115"))
    records = owl.extract_annotations(OWL_FIXTURE, tag_set)
    by_tag = {}
    for record in records:
        by_tag[record.tag] = by_tag.get(record.tag, 0) + 1
    # C3's two-char label falls under the min length of 3
    assert by_tag == {"rdfs:label": 2, "rdfs:comment": 2, "obo:IAO_0000115": 1}
    assert owl.count_classes(records) == {"FIX": 2}
    path = tmp_path / "records.ndjson"
    owl.write_records(path, records)
    assert owl.read_records(path) == records
    rerun = owl.extract_annotations(OWL_FIXTURE, tag_set)
    assert rerun == records
    announce(10, "fixture yields exact per-tag counts {label: 2, comment: 2, "
                 "definition: 1} and round-trips identically")


TABLE1_CLASS_COUNTS = {"Allotrope": 2773, "NCIT": 1169, "SBO": 534,
                       "CHEBI": 35067, "CHMO": 2521}


@pytest.mark.skipif(
    "ONTOSELECT_ONTOLOGY_DIR" not in os.environ,
    reason="real ontology files not available (set ONTOSELECT_ONTOLOGY_DIR)",
)
def test_10b_real_ontologies_optional():
    """Data-dependent: five real ontologies within +-10% of published counts."""
    base = os.environ["ONTOSELECT_ONTOLOGY_DIR"]
    tag_sets = owl.default_tag_sets()
    for name, expected in TABLE1_CLASS_COUNTS.items():
        path = os.path.join(base, f"{name.lower()}.owl")
        if not os.path.exists(path):
            pytest.skip(f"{path} not present")
        started = time.monotonic()
        records = owl.extract_annotations(path, tag_sets[name])
        elapsed = time.monotonic() - started
        got = owl.count_classes(records).get(name, 0)
        assert abs(got - expected) <= 0.10 * expected, (name, got, expected)
        if name == "CHEBI":
            assert elapsed < 300.0
    announce("10b", "real per-ontology class counts within 10%")


def test_11_pipeline_determinism(tmp_path, capsys):
    """Rerunning the synthetic pipeline reproduces byte-identical artifacts."""
    from ontoselect import vectorstore
    from ontoselect.cli import main as cli_main
    from ontoselect.serialize import write_ndjson

    rng = np.random.default_rng(11)
    centers = np.zeros((3, 8))
    for i in range(3):
        centers[i, i] = 10.0
    ids, vectors, labels = [], [], []
    for c in range(3):
        for j in range(20):
            ids.append(f"rec{c}_{j}")
            vectors.append(centers[c] + 0.3 * rng.normal(size=8))
            labels.append(f"ONT{c}")
    store = tmp_path / "all.vec"
    labels_path = tmp_path / "all.labels"

    def run_pipeline():
        vectorstore.write_store(store, ids, np.array(vectors, dtype=np.float32),
                                command="synthetic")
        write_ndjson(labels_path, "labels",
                     ({"sample_id": i, "label": lab} for i, lab in zip(ids, labels)),
                     command="synthetic")
        splits = tmp_path / "splits"
        cli_main(["split", "--vectors", str(store), "--labels", str(labels_path),
                  "--partitions", "5", "--seed", "3", "--out", str(splits)])
        models = tmp_path / "models"
        cli_main(["train", "--train", str(splits / "train.vec"),
                  "--labels", str(splits / "train.labels"),
                  *itertools.chain.from_iterable(("--kind", k) for k in KINDS),
                  "--seed", "3", "--out", str(models)])
        model_files = sorted(str(p) for p in models.glob("*.model.json"))
        cli_main(["evaluate", "--models", *model_files, "--partitions", str(splits),
                  "--out", str(tmp_path / "metrics.ndjson")])
        cli_main(["compare", "--metrics", str(tmp_path / "metrics.ndjson"),
                  "--out", str(tmp_path / "comparison.json")])
        cli_main(["predict", "--models", *model_files, "--vectors", str(store),
                  "--out", str(tmp_path / "predictions.ndjson")])
        cli_main(["report", "--predictions", str(tmp_path / "predictions.ndjson"),
                  "--out", str(tmp_path / "report.json")])
        artifacts = sorted(
            p for p in tmp_path.rglob("*")
            if p.is_file() and p.suffix in (".vec", ".labels", ".json", ".ndjson")
        )
        return {
            str(p.relative_to(tmp_path)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in artifacts
        }

    first = run_pipeline()
    assert any("model.json" in name for name in first)
    for name in first:
        (tmp_path / name).unlink()
    second = run_pipeline()
    assert first == second
    announce(11, f"{len(first)} artifacts (including 5 model files) byte-identical "
                 f"across pipeline reruns")


def test_12_remote_backend_fixture_replay():
    """[SECONDARY half, primary side] recorded sidecar responses replay
    without the sidecar running."""
    from ontoselect.embedding import RemoteBackend, embed_batch

    fixture_path = os.path.join(os.path.dirname(__file__), "fixtures",
                                "remote_embed_fixture.json")
    with open(fixture_path, "r", encoding="utf-8") as fh:
        fixture = json.load(fh)

    class _Response:
        status_code = 200

        def json(self):
            return fixture["response"]

    class _Session:
        def post(self, url, json=None, timeout=None):
            assert json["texts"] == fixture["request"]["texts"]
            return _Response()

    backend = RemoteBackend(url="http://fixture.test", dim=768, session=_Session())
    vectors = embed_batch(fixture["request"]["texts"], backend)
    assert len(vectors) == len(fixture["response"]["vectors"])
    for got, want in zip(vectors, fixture["response"]["vectors"]):
        assert got.shape == (768,)
        assert np.array_equal(got, np.asarray(want, dtype=np.float64))
    announce(12, "remote-backend tests pass against the recorded fixture "
                 "without the sidecar")


@pytest.mark.skipif(
    "ONTOSELECT_EMBED_URL" not in os.environ,
    reason="live sidecar not configured (set ONTOSELECT_EMBED_URL)",
)
def test_12b_remote_backend_live_sidecar():
    """[SECONDARY half] live sidecar: 768-dim, aligned, deterministic."""
    from ontoselect.embedding import RemoteBackend, embed_batch

    backend = RemoteBackend(dim=768)
    health = backend.health()
    assert health["dim"] == 768
    texts = ["Catalytic conversion of methane.", "Reaction vessel materials."]
    first = embed_batch(texts, backend)
    second = embed_batch(texts, backend)
    assert all(v.shape == (768,) for v in first)
    for a, b in zip(first, second):
        assert np.array_equal(a, b)
    announce("12b", f"live sidecar at {backend.url} returns deterministic "
                    f"768-dim vectors")
