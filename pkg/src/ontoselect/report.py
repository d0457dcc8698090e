"""Classify unlabeled paragraph collections and aggregate the results.

Per paragraph and model: the predicted ontology, its confidence (top
probability), and the margin between the top two probabilities.  The
aggregate groups records by predicted ontology (count / confidence sum /
margin sum); an alternative basis sums every ontology's probability over
all paragraphs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    doc_id: str
    predicted: str
    confidence: float
    margin: float
    distribution: dict

    def to_dict(self):
        return {
            "sample_id": self.sample_id,
            "doc_id": self.doc_id,
            "predicted": self.predicted,
            "confidence": self.confidence,
            "margin": self.margin,
            "distribution": self.distribution,
        }


def classify_corpus(models, samples, doc_ids=None):
    """One PredictionRecord per (model, sample).

    models: mapping name -> TrainedModel sharing label_vocab and dim;
    samples: EmbeddedSamples (or anything with sample_id and vector);
    doc_ids: optional per-sample document ids (defaults to "").
    """
    names = list(models.keys())
    if not names:
        return {}
    vocabs = {models[n].label_vocab for n in names}
    dims = {models[n].dim for n in names}
    if len(vocabs) != 1 or len(dims) != 1:
        raise ValueError("all models must share label_vocab and dim")
    vocab = next(iter(vocabs))
    dim = next(iter(dims))
    if doc_ids is None:
        doc_ids = [""] * len(samples)

    x = np.zeros((len(samples), dim))
    for i, sample in enumerate(samples):
        vec = np.asarray(sample.vector, dtype=np.float64)
        if vec.shape != (dim,):
            raise DimensionMismatchError(
                f"paragraph {sample.sample_id} has dim {vec.shape}, models expect {dim}"
            )
        x[i] = vec

    out = {}
    for name in names:
        probs = np.atleast_2d(models[name].predict_proba(x)) if len(samples) else np.zeros((0, len(vocab)))
        records = []
        for i, sample in enumerate(samples):
            row = probs[i]
            top = int(np.argmax(row))
            top2 = float(np.partition(row, -2)[-2]) if len(row) > 1 else 0.0
            records.append(
                PredictionRecord(
                    sample_id=sample.sample_id,
                    doc_id=doc_ids[i],
                    predicted=vocab[top],
                    confidence=float(row[top]),
                    margin=float(row[top]) - top2,
                    distribution={lab: float(p) for lab, p in zip(vocab, row)},
                )
            )
        out[name] = records
    return out


@dataclass
class AggregateReport:
    """Per (classifier, ontology) prediction counts and probability sums."""

    ontologies: tuple
    rows: dict          # model -> ontology -> {count, confidence_sum, margin_sum}
    totals: dict        # model -> record count
    basis: str          # "predicted" | "all"

    def to_dict(self):
        return {
            "basis": self.basis,
            "ontologies": list(self.ontologies),
            "totals": self.totals,
            "rows": self.rows,
        }

    def chart_rows(self):
        """(measure, ontology, classifier, value) rows for external plotting."""
        out = []
        for measure in ("count", "confidence_sum", "margin_sum"):
            for model in self.rows:
                for onto in self.ontologies:
                    out.append((measure, onto, model, self.rows[model][onto][measure]))
        return out


def aggregate(records_by_model, ontologies=None, basis="predicted"):
    """Reduce prediction records to per-ontology counts and sums.

    basis "predicted": confidence/margin sums cover only records whose
    prediction is that ontology.  basis "all": confidence_sum becomes the
    sum of that ontology's probability over every record (margin sums
    stay prediction-based; a margin has no per-class reading).
    """
    if basis not in ("predicted", "all"):
        raise ValueError(f"unknown aggregation basis {basis!r}")
    if ontologies is None:
        seen = {}
        for records in records_by_model.values():
            for rec in records:
                for lab in rec.distribution:
                    seen[lab] = True
        ontologies = tuple(seen.keys())
    rows = {}
    totals = {}
    for model, records in records_by_model.items():
        counts = {onto: 0 for onto in ontologies}
        confidences = {onto: [] for onto in ontologies}
        margins = {onto: [] for onto in ontologies}
        for rec in records:
            counts[rec.predicted] += 1
            margins[rec.predicted].append(rec.margin)
            if basis == "predicted":
                confidences[rec.predicted].append(rec.confidence)
            else:
                for onto in ontologies:
                    confidences[onto].append(rec.distribution.get(onto, 0.0))
        # fsum: exactly-rounded sums keep aggregation permutation-invariant
        rows[model] = {
            onto: {
                "count": counts[onto],
                "confidence_sum": math.fsum(confidences[onto]),
                "margin_sum": math.fsum(margins[onto]),
            }
            for onto in ontologies
        }
        totals[model] = len(records)
    return AggregateReport(ontologies=tuple(ontologies), rows=rows, totals=totals, basis=basis)
