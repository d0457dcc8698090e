"""CLI pipeline: artifact formats, resumability, determinism, verify."""

import hashlib
import json
import os

import numpy as np
import pytest

from ontoselect import vectorstore
from ontoselect.cli import main
from ontoselect.serialize import write_ndjson

OWL_DOC = """<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#">
  <owl:Class rdf:about="http://x/A">
    <rdfs:label>alpha level annotation</rdfs:label>
    <rdfs:comment>first comment body</rdfs:comment>
  </owl:Class>
  <owl:Class rdf:about="http://x/B">
    <rdfs:label>beta level annotation</rdfs:label>
    <rdfs:comment>second comment body</rdfs:comment>
  </owl:Class>
</rdf:RDF>
"""

DOC_TEXT = (
    "# Introduction\n\n"
    + "An opening paragraph about catalytic processes. " * 4
    + "\n\n# References\n\nSmith, a very long reference entry repeated. " * 3
    + "\n\n# Appendix\n\n"
    + "Closing appendix paragraph with enough characters to survive. " * 3
)


def run(argv):
    return main(argv)


def synthetic_labeled_store(tmp_path, n_classes=3, per_class=30, dim=8, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.zeros((n_classes, dim))
    for i in range(n_classes):
        centers[i, i] = 10.0
    ids, vectors, labels = [], [], []
    for c in range(n_classes):
        for j in range(per_class):
            ids.append(f"rec{c}_{j}")
            vectors.append(centers[c] + 0.3 * rng.normal(size=dim))
            labels.append(f"ONT{c}")
    store_path = tmp_path / "all.vec"
    labels_path = tmp_path / "all.labels"
    vectorstore.write_store(store_path, ids, np.array(vectors, dtype=np.float32),
                            command="synthetic")
    write_ndjson(labels_path, "labels",
                 ({"sample_id": i, "label": lab} for i, lab in zip(ids, labels)),
                 command="synthetic")
    return store_path, labels_path


class TestTextAndOwlCommands:
    def test_extract_owl(self, tmp_path, capsys):
        owl_path = tmp_path / "test.owl"
        owl_path.write_text(OWL_DOC)
        tagsets = tmp_path / "tags.json"
        tagsets.write_text(json.dumps({"TESTONT": ["rdfs:label", "rdfs:comment"]}))
        out = tmp_path / "annotations.ndjson"
        assert run(["extract-owl", str(owl_path), "--ontology", "TESTONT",
                    "--tagsets", str(tagsets), "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["records"] == 4
        assert summary["classes"] == {"TESTONT": 2}

    def test_ingest_text(self, tmp_path, capsys):
        doc = tmp_path / "paper.txt"
        doc.write_text(DOC_TEXT)
        out = tmp_path / "paragraphs.ndjson"
        assert run(["ingest-text", str(doc), "--out", str(out)]) == 0
        assert json.loads(capsys.readouterr().out)["paragraphs"] == 2  # refs dropped

    def test_embed_annotations_then_paragraphs(self, tmp_path, capsys):
        owl_path = tmp_path / "test.owl"
        owl_path.write_text(OWL_DOC)
        tagsets = tmp_path / "tags.json"
        tagsets.write_text(json.dumps({"TESTONT": ["rdfs:label", "rdfs:comment"]}))
        ann = tmp_path / "ann.ndjson"
        run(["extract-owl", str(owl_path), "--ontology", "TESTONT",
             "--tagsets", str(tagsets), "--out", str(ann)])
        store = tmp_path / "ann.vec"
        assert run(["embed", str(ann), "--kind", "annotations", "--backend", "hashing",
                    "--dim", "16", "--out", str(store)]) == 0
        loaded = vectorstore.read_store(store)
        assert len(loaded) == 4 and loaded.dim == 16

        doc = tmp_path / "paper.txt"
        doc.write_text(DOC_TEXT)
        paragraphs = tmp_path / "paragraphs.ndjson"
        run(["ingest-text", str(doc), "--out", str(paragraphs)])
        pstore = tmp_path / "par.vec"
        capsys.readouterr()
        assert run(["embed", str(paragraphs), "--kind", "paragraphs",
                    "--backend", "hashing", "--dim", "16", "--out", str(pstore)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["paragraphs"] == 2
        assert os.path.exists(info["provenance"])


class TestPipeline:
    def _run_pipeline(self, tmp_path, seed="7"):
        store, labels = synthetic_labeled_store(tmp_path)
        splits = tmp_path / "splits"
        run(["split", "--vectors", str(store), "--labels", str(labels),
             "--partitions", "5", "--seed", seed, "--out", str(splits)])
        models = tmp_path / "models"
        run(["train", "--train", str(splits / "train.vec"),
             "--labels", str(splits / "train.labels"),
             "--kind", "knn", "--kind", "random_forest", "--kind", "svm",
             "--seed", seed, "--out", str(models)])
        metrics = tmp_path / "metrics.ndjson"
        model_files = sorted(str(p) for p in models.glob("*.model.json"))
        run(["evaluate", "--models", *model_files,
             "--partitions", str(splits), "--out", str(metrics)])
        comparison = tmp_path / "comparison.json"
        run(["compare", "--metrics", str(metrics), "--out", str(comparison)])
        predictions = tmp_path / "predictions.ndjson"
        run(["predict", "--models", *model_files, "--vectors", str(store),
             "--out", str(predictions)])
        report = tmp_path / "report.json"
        run(["report", "--predictions", str(predictions), "--out", str(report),
             "--chart-data", str(tmp_path / "chart.csv")])
        return [splits / "train.vec", splits / "train.labels",
                *sorted(splits.glob("part*.vec")), *sorted(splits.glob("part*.labels")),
                *map(lambda p: tmp_path / "models" / p.name, models.glob("*.json")),
                metrics, comparison, predictions, report, tmp_path / "chart.csv"]

    def test_partition_rows_propagate(self, tmp_path, capsys):
        self._run_pipeline(tmp_path)
        rows = [json.loads(line) for line in
                open(tmp_path / "metrics.ndjson")][1:]
        assert len(rows) == 5 * 3  # partitions x models
        partitions = {r["partition"] for r in rows}
        assert partitions == {f"part{i:02d}" for i in range(1, 6)}

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        first = self._run_pipeline(tmp_path)
        digests = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in first}
        for path in first:
            path.unlink()
        second = self._run_pipeline(tmp_path)
        assert {p.name for p in second} == set(digests)
        for path in second:
            assert hashlib.sha256(path.read_bytes()).hexdigest() == digests[path.name], path.name

    def test_verify_detects_tampering(self, tmp_path, capsys):
        store, labels = synthetic_labeled_store(tmp_path)
        splits = tmp_path / "splits"
        run(["split", "--vectors", str(store), "--labels", str(labels),
             "--partitions", "3", "--seed", "1", "--out", str(splits)])
        capsys.readouterr()
        assert run(["verify", str(splits / "train.vec")]) == 0
        assert "OK" in capsys.readouterr().out
        with open(store, "ab") as fh:
            fh.write(b"\x00")
        assert run(["verify", str(splits / "train.vec")]) == 1
        assert "MISMATCH" in capsys.readouterr().out

    def test_headers_record_command_and_seeds(self, tmp_path):
        store, labels = synthetic_labeled_store(tmp_path)
        splits = tmp_path / "splits"
        run(["split", "--vectors", str(store), "--labels", str(labels),
             "--partitions", "3", "--seed", "9", "--out", str(splits)])
        header = json.loads(open(splits / "train.labels").readline())
        assert header["seeds"] == {"seed": 9}
        assert header["command"].startswith("ontoselect split")
        assert len(header["inputs"]) == 2

    def test_tune_emits_consumable_params(self, tmp_path, capsys):
        store, labels = synthetic_labeled_store(tmp_path, per_class=20)
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"n_neighbors": [1, 3], "weights": ["uniform"]}))
        cv = tmp_path / "cv.json"
        run(["tune", "--train", str(store), "--labels", str(labels), "--kind", "knn",
             "--grid", str(grid), "--folds", "2", "--seed", "3", "--out", str(cv)])
        payload = json.loads(open(cv).read())
        assert payload["artifact"] == "cv-result"
        assert payload["best_params"]["n_neighbors"] in (1, 3)
        models = tmp_path / "models"
        run(["train", "--train", str(store), "--labels", str(labels),
             "--from-tune", str(cv), "--seed", "3", "--out", str(models)])
        assert (models / "knn.model.json").exists()


class TestErrorHandling:
    def test_missing_input_is_machine_parsable(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exit_info:
            run(["predict", "--models", "nope.model.json",
                 "--vectors", str(tmp_path / "missing.vec"), "--out", "x"])
        assert exit_info.value.code != 0
        err = capsys.readouterr().err.strip()
        assert json.loads(err)["error"]

    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit) as exit_info:
            run(["frobnicate"])
        assert exit_info.value.code == 2

    def test_format_mismatch_rejected(self, tmp_path, capsys):
        store, labels = synthetic_labeled_store(tmp_path)
        with pytest.raises(SystemExit):
            run(["report", "--predictions", str(labels), "--out", "r.json"])
        assert "error" in capsys.readouterr().err

    def test_config_supplies_defaults(self, tmp_path, capsys):
        store, labels = synthetic_labeled_store(tmp_path)
        config = tmp_path / "config.json"
        out_dir = tmp_path / "from-config"
        config.write_text(json.dumps({"seed": 5, "out": str(out_dir), "partitions": 3}))
        run(["split", "--vectors", str(store), "--labels", str(labels),
             "--config", str(config)])
        assert (out_dir / "train.vec").exists()
        header = json.loads(open(out_dir / "train.labels").readline())
        assert header["seeds"] == {"seed": 5}
