"""Command-line pipeline: every stage reads and writes persisted artifacts.

Subcommands: extract-owl, ingest-text, embed, split, tune, train,
evaluate, compare, predict, report, verify.  All randomness flows from
explicit --seed values recorded into artifact headers; rerunning a
command with identical inputs and seeds produces byte-identical outputs.
Option resolution order: explicit flag, then --config JSON entry, then
the built-in default.
"""

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import corpus, owl, selection, stats, vectorstore
from .classifiers import ClassifierSpec, fit as fit_classifier, load_model, save_model
from .dataset import (
    EmbeddedSample,
    LabeledDataset,
    SplitSpec,
    partition_disjoint,
    stratified_split,
    undersample,
)
from .embedding import (
    DEFAULT_DIM,
    HashingBackend,
    RemoteBackend,
    embed_batch,
)
from .errors import FormatError, OntoselectError
from .report import PredictionRecord, aggregate, classify_corpus
from .serialize import (
    content_id,
    dumps,
    fail,
    file_digest,
    make_header,
    read_header,
    read_ndjson,
    write_ndjson,
)

LABELS_ARTIFACT = "labels"
PROVENANCE_ARTIFACT = "provenance"
CV_ARTIFACT = "cv-result"
METRICS_ARTIFACT = "metrics"
COMPARISON_ARTIFACT = "comparison"
PREDICTIONS_ARTIFACT = "predictions"
REPORT_ARTIFACT = "report"


def _opt(args, key, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return args.config_values.get(key, default)


def _write_json_artifact(path, artifact, payload, command, seeds=None, inputs=None):
    header = make_header(artifact, command=command, seeds=seeds, inputs=inputs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps({**header, **payload}) + "\n")


def _read_json_artifact(path, artifact):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("artifact") != artifact:
        raise FormatError(f"{path}: expected {artifact} artifact")
    return payload


def _load_dataset(vectors_path, labels_path):
    store = vectorstore.read_store(vectors_path)
    labels = {
        row["sample_id"]: row["label"] for row in read_ndjson(labels_path, LABELS_ARTIFACT)
    }
    missing = [sid for sid in labels if sid not in store]
    if missing:
        raise FormatError(f"{len(missing)} labeled ids missing from store, e.g. {missing[0]}")
    ids = [sid for sid in store.ids if sid in labels]
    vocab = tuple(sorted(set(labels.values())))
    index = {lab: i for i, lab in enumerate(vocab)}
    x = store.lookup(ids).astype(np.float64)
    y = np.array([index[labels[sid]] for sid in ids], dtype=np.int64)
    return LabeledDataset(ids=tuple(ids), X=x, y=y, label_vocab=vocab)


def _write_dataset(prefix, data, command, seeds, inputs):
    vectorstore.write_store(
        f"{prefix}.vec", data.ids, data.X.astype(np.float32),
        command=command, seeds=seeds, inputs=inputs,
    )
    write_ndjson(
        f"{prefix}.labels",
        LABELS_ARTIFACT,
        (
            {"sample_id": sid, "label": data.label_vocab[data.y[i]]}
            for i, sid in enumerate(data.ids)
        ),
        command=command,
        seeds=seeds,
        inputs=inputs,
    )


# ---------------------------------------------------------------- commands

def cmd_extract_owl(args, command):
    ontology = _opt(args, "ontology")
    if not ontology:
        fail("extract-owl requires --ontology")
    tagsets_path = _opt(args, "tagsets")
    tag_sets = owl.load_tag_sets(tagsets_path) if tagsets_path else owl.default_tag_sets()
    if ontology not in tag_sets:
        fail(f"no tag set for ontology {ontology!r}; configure one via --tagsets")
    records = []
    for path in args.inputs:
        if path == "-":
            records.extend(
                owl.extract_annotations(sys.stdin.buffer, tag_sets[ontology],
                                        min_length=int(_opt(args, "min_length", 3)))
            )
        else:
            records.extend(
                owl.extract_annotations(path, tag_sets[ontology],
                                        min_length=int(_opt(args, "min_length", 3)))
            )
    inputs = [p for p in args.inputs if p != "-"]
    if tagsets_path:
        inputs.append(tagsets_path)
    owl.write_records(_opt(args, "out", "annotations.ndjson"), records,
                      command=command, inputs=inputs)
    if not records:
        sys.stderr.write("warning: empty extraction\n")
    classes = owl.count_classes(records)
    sys.stdout.write(dumps({"records": len(records), "classes": classes}) + "\n")
    return 0


def cmd_ingest_text(args, command):
    policy = corpus.FilterPolicy(
        min_length=int(_opt(args, "min_length", 100)),
        banned_sections=frozenset(
            s.strip().lower()
            for s in _opt(args, "banned_sections",
                          ",".join(sorted(corpus.DEFAULT_BANNED_SECTIONS))).split(",")
            if s.strip()
        ),
        drop_headings=not args.keep_headings,
    )
    paragraphs = []
    inputs = []
    for path in args.inputs:
        if os.path.isdir(path):
            files = sorted(
                os.path.join(path, f) for f in os.listdir(path)
                if os.path.isfile(os.path.join(path, f))
            )
        else:
            files = [path]
        for file_path in files:
            inputs.append(file_path)
            if args.pre_split:
                split = corpus.read_paragraphs(file_path)
            else:
                with open(file_path, "r", encoding="utf-8") as fh:
                    split = corpus.split_paragraphs(fh.read(), os.path.basename(file_path))
            paragraphs.extend(corpus.filter_paragraphs(split, policy))
    corpus.write_paragraphs(_opt(args, "out", "paragraphs.ndjson"), paragraphs,
                            command=command, inputs=inputs)
    sys.stdout.write(dumps({"paragraphs": len(paragraphs)}) + "\n")
    return 0


def _make_backend(args):
    backend = _opt(args, "backend", "hashing")
    dim = int(_opt(args, "dim", DEFAULT_DIM))
    if backend == "hashing":
        return HashingBackend(dim=dim)
    if backend == "remote":
        return RemoteBackend(url=_opt(args, "url"), dim=dim)
    fail(f"unknown backend {backend!r} (expected hashing or remote)")


def cmd_embed(args, command):
    backend = _make_backend(args)
    in_path = args.input
    out_path = _opt(args, "out", "vectors.vec")
    encoding = _opt(args, "store_format", "binary")
    if args.kind == "annotations":
        records = owl.read_records(in_path)
        texts = [r.text for r in records]
        ids = [r.record_id for r in records]
        vectors = embed_batch(texts, backend) if texts else []
        vectorstore.write_store(out_path, ids, np.array(vectors, dtype=np.float32),
                                encoding=encoding, command=command, inputs=[in_path])
        labels_path = _opt(args, "labels", f"{out_path}.labels")
        write_ndjson(
            labels_path, LABELS_ARTIFACT,
            ({"sample_id": r.record_id, "label": r.ontology} for r in records),
            command=command, inputs=[in_path],
        )
        sys.stdout.write(dumps({"embedded": len(ids), "labels": labels_path}) + "\n")
    else:
        paragraphs = corpus.read_paragraphs(in_path)
        unique_texts = {}
        provenance = []
        for p in paragraphs:
            sid = content_id(p.text)
            unique_texts.setdefault(sid, p.text)
            provenance.append({"sample_id": sid, "doc_id": p.doc_id, "index": p.index})
        ids = list(unique_texts.keys())
        vectors = embed_batch([unique_texts[sid] for sid in ids], backend) if ids else []
        vectorstore.write_store(out_path, ids, np.array(vectors, dtype=np.float32),
                                encoding=encoding, command=command, inputs=[in_path])
        prov_path = _opt(args, "provenance", f"{out_path}.provenance")
        write_ndjson(prov_path, PROVENANCE_ARTIFACT, provenance,
                     command=command, inputs=[in_path])
        sys.stdout.write(
            dumps({"embedded": len(ids), "paragraphs": len(provenance),
                   "provenance": prov_path}) + "\n"
        )
    return 0


def cmd_split(args, command):
    seed = int(_opt(args, "seed", 0))
    data = _load_dataset(args.vectors, args.labels)
    spec = SplitSpec(
        train_fraction=float(_opt(args, "train_fraction", 0.5)),
        n_test_partitions=int(_opt(args, "partitions", 20)),
        seed=seed,
    )
    train, test = stratified_split(data, spec)
    cap = _opt(args, "undersample", "min-class")
    if cap != "none":
        train = undersample(train, cap if cap == "min-class" else int(cap), seed)
    parts = partition_disjoint(test, spec.n_test_partitions, seed)
    out_dir = _opt(args, "out", "splits")
    os.makedirs(out_dir, exist_ok=True)
    seeds = {"seed": seed}
    inputs = [args.vectors, args.labels]
    _write_dataset(os.path.join(out_dir, "train"), train, command, seeds, inputs)
    for i, part in enumerate(parts, start=1):
        _write_dataset(os.path.join(out_dir, f"part{i:02d}"), part, command, seeds, inputs)
    sys.stdout.write(
        dumps({"train": len(train), "test": len(test),
               "partitions": [len(p) for p in parts], "out": out_dir}) + "\n"
    )
    return 0


def cmd_tune(args, command):
    seed = int(_opt(args, "seed", 0))
    data = _load_dataset(args.train, args.labels)
    axes = None
    inputs = [args.train, args.labels]
    grid_path = _opt(args, "grid")
    if grid_path:
        with open(grid_path, "r", encoding="utf-8") as fh:
            axes = json.load(fh)
        inputs.append(grid_path)
    grid = selection.GridSpec(kind=args.kind, axes=axes)
    result = selection.grid_search(
        grid, data,
        k=int(_opt(args, "folds", selection.DEFAULT_FOLDS)),
        seed=seed,
        scoring=_opt(args, "scoring", "accuracy"),
        workers=int(_opt(args, "workers", 1)),
    )
    out = _opt(args, "out", f"cv-{args.kind}.json")
    _write_json_artifact(out, CV_ARTIFACT, result.to_dict(), command,
                         seeds={"seed": seed}, inputs=inputs)
    sys.stdout.write(dumps({"kind": args.kind, "best_params": result.best_params}) + "\n")
    return 0


def _specs_from_args(args, seed):
    """Training specs from --params file, --from-tune results, or --kind."""
    specs = []
    params_path = _opt(args, "params")
    if params_path:
        with open(params_path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        entries = loaded if isinstance(loaded, list) else [loaded]
        for entry in entries:
            entry.setdefault("seed", seed)
            specs.append(ClassifierSpec.from_dict(entry))
    for cv_path in args.from_tune or []:
        payload = _read_json_artifact(cv_path, CV_ARTIFACT)
        params = dict(payload["best_params"])
        kind = payload["kind"]
        point_seed = seed
        random_state = params.pop("random_state", None)
        if random_state is not None and kind == "mlp":
            point_seed = int(random_state)
        specs.append(ClassifierSpec(kind=kind, params=params, seed=point_seed))
    for kind in args.kind or []:
        specs.append(ClassifierSpec(kind=kind, seed=seed))
    if not specs:
        fail("train needs --params, --from-tune, or --kind")
    return specs


def cmd_train(args, command):
    seed = int(_opt(args, "seed", 0))
    data = _load_dataset(args.train, args.labels)
    specs = _specs_from_args(args, seed)
    out_dir = _opt(args, "out", "models")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for spec in specs:
        model = fit_classifier(spec, data)
        path = os.path.join(out_dir, f"{spec.kind}.model.json")
        save_model(model, path, command=command, inputs=[args.train, args.labels])
        written.append({"path": path, "kind": spec.kind, "converged": model.converged})
    sys.stdout.write(dumps({"models": written}) + "\n")
    return 0


def _partition_paths(partitions_dir):
    paths = sorted(glob.glob(os.path.join(partitions_dir, "part*.vec")))
    if not paths:
        raise FormatError(f"no part*.vec files under {partitions_dir}")
    return paths


def cmd_evaluate(args, command):
    models = {}
    for path in args.models:
        name = os.path.basename(path).split(".model")[0]
        models[name] = load_model(path)
    rows = []
    part_paths = _partition_paths(args.partitions)
    for part_path in part_paths:
        part_name = os.path.basename(part_path)[: -len(".vec")]
        data = _load_dataset(part_path, part_path[: -len(".vec")] + ".labels")
        truth = np.array([data.label_vocab[i] for i in data.y], dtype=object)
        for name, model in models.items():
            pred = model.predict(data.X)
            cm = stats.ConfusionMatrix.from_predictions(model.label_vocab, truth, pred)
            metrics = stats.compute_metrics(cm)
            rows.append({"model": name, "partition": part_name, "n": len(data),
                         **metrics.to_dict()})
    out = _opt(args, "out", "metrics.ndjson")
    write_ndjson(out, METRICS_ARTIFACT, rows, command=command,
                 inputs=list(args.models) + part_paths)
    sys.stdout.write(dumps({"rows": len(rows), "out": out}) + "\n")
    return 0


def cmd_compare(args, command):
    metric = _opt(args, "metric", "accuracy")
    alpha = float(_opt(args, "alpha", 0.05))
    rows = list(read_ndjson(args.metrics, METRICS_ARTIFACT))
    models = []
    partitions = []
    for row in rows:
        if row["model"] not in models:
            models.append(row["model"])
        if row["partition"] not in partitions:
            partitions.append(row["partition"])
    scores = np.full((len(partitions), len(models)), np.nan)
    for row in rows:
        scores[partitions.index(row["partition"]), models.index(row["model"])] = row[metric]
    if np.isnan(scores).any():
        raise FormatError("metric table is not complete over partitions x models")
    friedman = stats.friedman_test(scores)
    win_matrix = stats.pairwise_comparison(scores, alpha=alpha, names=models)
    payload = {
        "metric": metric,
        "alpha": alpha,
        "models": models,
        "partitions": partitions,
        "scores": scores.tolist(),
        "friedman": {
            "statistic": friedman.statistic,
            "p_value": friedman.p_value,
            "method": friedman.method,
            "n": friedman.n,
        },
        "win_matrix": win_matrix.to_dict(),
    }
    out = _opt(args, "out", "comparison.json")
    _write_json_artifact(out, COMPARISON_ARTIFACT, payload, command,
                         inputs=[args.metrics])
    sys.stdout.write(
        f"friedman chi2={friedman.statistic:.4f} p={friedman.p_value:.3e} "
        f"(n={friedman.n} {metric} rows)\n"
    )
    sys.stdout.write(win_matrix.to_text() + "\n")
    return 0


def cmd_predict(args, command):
    models = {}
    for path in args.models:
        name = os.path.basename(path).split(".model")[0]
        models[name] = load_model(path)
    store = vectorstore.read_store(args.vectors)
    if args.provenance:
        prov = list(read_ndjson(args.provenance, PROVENANCE_ARTIFACT))
    else:
        prov = [{"sample_id": sid, "doc_id": "", "index": i}
                for i, sid in enumerate(store.ids)]
    vectors = store.lookup([p["sample_id"] for p in prov]).astype(np.float64)
    samples = [
        EmbeddedSample(sample_id=p["sample_id"], vector=vectors[i], source="paragraph")
        for i, p in enumerate(prov)
    ]
    records = classify_corpus(models, samples, doc_ids=[p["doc_id"] for p in prov])
    rows = []
    for name in records:
        for rec in records[name]:
            rows.append({"model": name, **rec.to_dict()})
    out = _opt(args, "out", "predictions.ndjson")
    inputs = [args.vectors] + list(args.models)
    if args.provenance:
        inputs.append(args.provenance)
    write_ndjson(out, PREDICTIONS_ARTIFACT, rows, command=command, inputs=inputs)
    sys.stdout.write(dumps({"records": len(rows), "out": out}) + "\n")
    return 0


def cmd_report(args, command):
    basis = _opt(args, "basis", "predicted")
    by_model = {}
    for row in read_ndjson(args.predictions, PREDICTIONS_ARTIFACT):
        by_model.setdefault(row["model"], []).append(
            PredictionRecord(
                sample_id=row["sample_id"],
                doc_id=row["doc_id"],
                predicted=row["predicted"],
                confidence=row["confidence"],
                margin=row["margin"],
                distribution=row["distribution"],
            )
        )
    result = aggregate(by_model, basis=basis)
    out = _opt(args, "out", "report.json")
    _write_json_artifact(out, REPORT_ARTIFACT, result.to_dict(), command,
                         inputs=[args.predictions])
    chart_path = _opt(args, "chart_data")
    if chart_path:
        with open(chart_path, "w", encoding="utf-8") as fh:
            fh.write("measure,category,series,value\n")
            for measure, onto, model, value in result.chart_rows():
                fh.write(f"{measure},{onto},{model},{value}\n")
    for model in sorted(result.rows):
        counts = {o: result.rows[model][o]["count"] for o in result.ontologies}
        sys.stdout.write(dumps({"model": model, "counts": counts}) + "\n")
    return 0


def cmd_verify(args, command):
    status = 0
    for path in args.artifacts:
        try:
            header = read_header(path)
        except (FormatError, OSError) as exc:
            sys.stdout.write(f"ERROR {path}: {exc}\n")
            status = 1
            continue
        problems = []
        for entry in header.get("inputs", []):
            in_path, digest = entry["path"], entry["sha256"]
            if not os.path.exists(in_path):
                problems.append(f"missing input {in_path}")
            elif file_digest(in_path) != digest:
                problems.append(f"digest mismatch for {in_path}")
        if problems:
            sys.stdout.write(f"MISMATCH {path}: {'; '.join(problems)}\n")
            status = 1
        else:
            sys.stdout.write(f"OK {path}\n")
    return status


# ----------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="ontoselect",
        description="Rank domain ontologies by relevance to scientific text.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of default option values")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract-owl", parents=[common],
                       help="OWL/XML files -> annotation records")
    p.add_argument("inputs", nargs="+", help="OWL files ('-' for stdin)")
    p.add_argument("--ontology", help="ontology name (selects the tag set)")
    p.add_argument("--tagsets", help="JSON mapping ontology -> tag list")
    p.add_argument("--min-length", dest="min_length", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract_owl)

    p = sub.add_parser("ingest-text", parents=[common],
                       help="text documents -> filtered paragraphs")
    p.add_argument("inputs", nargs="+", help="text files or directories")
    p.add_argument("--min-length", dest="min_length", type=int)
    p.add_argument("--banned-sections", dest="banned_sections")
    p.add_argument("--keep-headings", action="store_true")
    p.add_argument("--pre-split", action="store_true",
                   help="inputs are paragraph record files, filter only")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest_text)

    p = sub.add_parser("embed", parents=[common],
                       help="annotation/paragraph records -> vector store")
    p.add_argument("input", help="annotations or paragraphs artifact")
    p.add_argument("--kind", choices=["annotations", "paragraphs"], required=True)
    p.add_argument("--backend", choices=["hashing", "remote"])
    p.add_argument("--dim", type=int)
    p.add_argument("--url", help="sidecar base url (or ONTOSELECT_EMBED_URL)")
    p.add_argument("--store-format", dest="store_format", choices=["binary", "ndjson"])
    p.add_argument("--labels", help="labels sidecar path (annotations)")
    p.add_argument("--provenance", help="provenance sidecar path (paragraphs)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("split", parents=[common],
                       help="labeled vectors -> train + test partitions")
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--partitions", type=int)
    p.add_argument("--undersample", help="'min-class' (default), integer cap, or 'none'")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("tune", parents=[common], help="grid search one classifier kind")
    p.add_argument("--train", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--kind", required=True, choices=list(selection.DEFAULT_GRIDS))
    p.add_argument("--grid", help="JSON axes override")
    p.add_argument("--folds", type=int)
    p.add_argument("--scoring", choices=["accuracy", "macro_f1"])
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("train", parents=[common], help="fit classifiers, write model files")
    p.add_argument("--train", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--params", help="JSON spec {kind, params, seed} or list of them")
    p.add_argument("--from-tune", dest="from_tune", action="append",
                   help="cv-result artifact; may repeat")
    p.add_argument("--kind", action="append", choices=list(selection.DEFAULT_GRIDS),
                   help="train with default params; may repeat")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score models on every test partition")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--partitions", required=True, help="directory with part*.vec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", parents=[common],
                       help="metric table -> significance tests + win matrix")
    p.add_argument("--metrics", required=True)
    p.add_argument("--metric")
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("predict", parents=[common],
                       help="classify unlabeled paragraph vectors")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--provenance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", parents=[common],
                       help="prediction records -> per-ontology aggregates")
    p.add_argument("--predictions", required=True)
    p.add_argument("--basis", choices=["predicted", "all"])
    p.add_argument("--chart-data", dest="chart_data")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", parents=[common],
                       help="re-check input digests recorded in artifact headers")
    p.add_argument("artifacts", nargs="+")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.config_values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            fail("--config must contain a JSON object")
        args.config_values = loaded
    command = " ".join(["ontoselect"] + argv)
    try:
        return args.func(args, command)
    except OntoselectError as exc:
        fail(f"{type(exc).__name__}: {exc}")
    except FileNotFoundError as exc:
        fail(f"missing input: {exc.filename}")
    except ValueError as exc:
        fail(f"ValueError: {exc}")


if __name__ == "__main__":
    raise SystemExit(main())
