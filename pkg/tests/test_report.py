"""Prediction records and per-ontology aggregation."""

import numpy as np
import pytest

from conftest import make_blobs
from ontoselect.classifiers import ClassifierSpec, fit
from ontoselect.dataset import EmbeddedSample
from ontoselect.errors import DimensionMismatchError
from ontoselect.report import PredictionRecord, aggregate, classify_corpus


def make_record(predicted, confidence, margin, distribution=None, sample_id="s"):
    return PredictionRecord(
        sample_id=sample_id,
        doc_id="doc",
        predicted=predicted,
        confidence=confidence,
        margin=margin,
        distribution=distribution or {},
    )


class TestClassifyCorpus:
    def _models_and_samples(self, n_paragraphs=7):
        data = make_blobs(n_classes=3, per_class=12, dim=4, seed=50)
        models = {
            "knn": fit(ClassifierSpec(kind="knn", params={"n_neighbors": 3}), data),
            "forest": fit(ClassifierSpec(
                kind="random_forest", params={"n_estimators": 3, "max_depth": 4}), data),
        }
        rng = np.random.default_rng(51)
        samples = [
            EmbeddedSample(f"p{i}", rng.normal(size=4), source="paragraph")
            for i in range(n_paragraphs)
        ]
        return models, samples

    def test_one_record_per_model_and_paragraph(self):
        models, samples = self._models_and_samples(7)
        records = classify_corpus(models, samples)
        assert set(records) == {"knn", "forest"}
        assert all(len(rows) == 7 for rows in records.values())

    def test_margin_is_top_two_gap(self):
        models, samples = self._models_and_samples(5)
        for rows in classify_corpus(models, samples).values():
            for rec in rows:
                probs = sorted(rec.distribution.values(), reverse=True)
                assert rec.confidence == pytest.approx(probs[0], abs=1e-12)
                assert rec.margin == pytest.approx(probs[0] - probs[1], abs=1e-12)
                assert 0.0 <= rec.margin <= rec.confidence <= 1.0

    def test_dimension_mismatch_names_paragraph(self):
        models, _ = self._models_and_samples(1)
        bad = [EmbeddedSample("bad-par", np.zeros(9), source="paragraph")]
        with pytest.raises(DimensionMismatchError, match="bad-par"):
            classify_corpus(models, bad)

    def test_distribution_arithmetic_examples(self):
        assert make_record("A", 0.7, 0.5).margin == 0.5  # [0.7, 0.2, 0.1]
        uniform = make_record("A", 0.2, 0.0)
        assert uniform.confidence == 0.2 and uniform.margin == 0.0


class TestAggregate:
    def test_counts_and_sums(self):
        records = {
            "m": [
                make_record("A", 0.9, 0.8, {"A": 0.9, "B": 0.1}, "p1"),
                make_record("A", 0.8, 0.6, {"A": 0.8, "B": 0.2}, "p2"),
                make_record("A", 0.7, 0.4, {"A": 0.7, "B": 0.3}, "p3"),
                make_record("B", 0.6, 0.2, {"A": 0.4, "B": 0.6}, "p4"),
            ]
        }
        out = aggregate(records, ontologies=("A", "B"))
        cell = out.rows["m"]["A"]
        assert cell["count"] == 3
        assert cell["confidence_sum"] == pytest.approx(2.4)
        assert cell["margin_sum"] == pytest.approx(1.8)
        assert out.totals["m"] == 4

    def test_counts_partition_paragraphs(self):
        rng = np.random.default_rng(52)
        labels = ("A", "B", "C")
        records = {"m": []}
        for i in range(137):
            probs = rng.dirichlet(np.ones(3))
            top = int(np.argmax(probs))
            records["m"].append(make_record(
                labels[top], float(probs[top]),
                float(np.sort(probs)[-1] - np.sort(probs)[-2]),
                dict(zip(labels, probs)), f"p{i}",
            ))
        out = aggregate(records, ontologies=labels)
        assert sum(out.rows["m"][o]["count"] for o in labels) == 137
        for o in labels:
            cell = out.rows["m"][o]
            assert cell["margin_sum"] <= cell["confidence_sum"] <= cell["count"]

    def test_permutation_invariance(self):
        rng = np.random.default_rng(53)
        rows = [
            make_record("A" if i % 2 else "B", 0.5 + i / 100, 0.1,
                        {"A": 0.6, "B": 0.4}, f"p{i}")
            for i in range(20)
        ]
        shuffled = list(rows)
        rng.shuffle(shuffled)
        a = aggregate({"m": rows}, ontologies=("A", "B"))
        b = aggregate({"m": shuffled}, ontologies=("A", "B"))
        assert a.rows == b.rows

    def test_empty_input(self):
        out = aggregate({"m": []}, ontologies=("A", "B"))
        assert out.totals == {"m": 0}
        assert out.rows["m"]["A"]["count"] == 0

    def test_all_basis_sums_probabilities_over_every_record(self):
        records = {
            "m": [
                make_record("A", 0.9, 0.8, {"A": 0.9, "B": 0.1}, "p1"),
                make_record("B", 0.6, 0.2, {"A": 0.4, "B": 0.6}, "p2"),
            ]
        }
        out = aggregate(records, ontologies=("A", "B"), basis="all")
        assert out.rows["m"]["A"]["confidence_sum"] == pytest.approx(1.3)
        assert out.rows["m"]["B"]["confidence_sum"] == pytest.approx(0.7)

    def test_chart_rows_cover_measures(self):
        records = {"m": [make_record("A", 0.9, 0.8, {"A": 0.9, "B": 0.1})]}
        rows = aggregate(records, ontologies=("A", "B")).chart_rows()
        measures = {r[0] for r in rows}
        assert measures == {"count", "confidence_sum", "margin_sum"}
        assert len(rows) == 6
