"""End-to-end pipeline: ledger -> graph -> features -> split -> normalize ->
KNN evaluation -> correlation/ranking/summaries, all persisted to one
output directory.

Every delimited artifact is reproducible byte-for-byte from (inputs,
config). The run log records the package version, a config hash, stage
timings, and the artifact list; timings aside, reruns produce identical
artifacts. Figures are rendered next to the artifacts they illustrate.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import ConfigError, InputError
from .features_lsi import LsiParams
from .graph import build_graph, graph_stats, merge_parallel_edges, write_snapshot
from .knn import evaluate, knn_fit, knn_predict
from .labels import read_labels
from .ledger import parse_ledger_file
from .manifest import LSI_IDS, SI_IDS, write_manifest
from .pipeline import (
    FeatureTable,
    apply_minmax,
    correlation_matrix,
    extract_table,
    feature_rank,
    fit_minmax,
    split,
    summarize_by_label,
    write_feature_csv,
)
from .subgraph import GkParams


@dataclass(frozen=True)
class RunConfig:
    ledger: str
    labels: str
    out_dir: str
    k: int = 4
    max_nodes: int = 3000
    alpha: float = 0.85
    tol: float = 1e-10
    max_iters: int = 200
    seed: int = 9
    test_fraction: float = 0.2
    knn_k: int = 4
    jobs: int = 1
    fit_on: str = "train"
    summary_features: tuple[str, ...] = ("PDIa1-3",)
    figures: bool = True

    def __post_init__(self):
        if self.fit_on not in ("train", "all"):
            raise ConfigError("fit_on must be 'train' or 'all'")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(asdict(cfg), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


@dataclass
class RunResult:
    artifacts: dict[str, str] = field(default_factory=dict)
    evals: dict[str, dict] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)


def _write_corr_csv(corr, feature_ids, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", *feature_ids])
        for i, fid in enumerate(feature_ids):
            writer.writerow([fid, *[repr(float(x)) for x in corr[i]]])


def _write_rank_csv(ranked, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "f_statistic"])
        for fid, score in ranked:
            writer.writerow([fid, repr(float(score))])


def _write_summary_csv(summaries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "label", "avg", "max", "min", "median"])
        for fid, per_label in summaries:
            for label, stats in per_label.items():
                writer.writerow(
                    [
                        fid,
                        label,
                        repr(stats["avg"]),
                        repr(stats["max"]),
                        repr(stats["min"]),
                        repr(stats["median"]),
                    ]
                )


def _eval_subset(train: FeatureTable, test: FeatureTable, ids, k: int) -> dict:
    train_sub = train.select_features(ids)
    test_sub = test.select_features(ids)
    model = knn_fit(train_sub.matrix(), train_sub.labels, k=k)
    predicted = knn_predict(model, test_sub.matrix())
    return evaluate(predicted, test_sub.labels).to_dict()


def run_pipeline(cfg: RunConfig) -> RunResult:
    ledger_path = Path(cfg.ledger)
    labels_path = Path(cfg.labels)
    for path in (ledger_path, labels_path):
        if not path.exists():
            raise InputError(f"input file not found: {path}")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    result = RunResult()
    stages: list[tuple[str, float]] = []

    def stage(name):
        stages.append((name, time.perf_counter()))

    stage("parse")
    blocks = parse_ledger_file(ledger_path)
    label_rows = read_labels(labels_path)

    stage("graph")
    g = build_graph(blocks)
    g_merged = merge_parallel_edges(g)
    snapshot = out / "graph.bin"
    write_snapshot(g, snapshot)
    result.artifacts["graph_snapshot"] = str(snapshot)

    stage("manifest")
    manifest_path = out / "manifest.json"
    write_manifest(manifest_path)
    result.artifacts["manifest"] = str(manifest_path)

    stage("extract")
    gk_params = GkParams(max_depth=cfg.k, max_nodes=cfg.max_nodes)
    lsi_params = LsiParams(alpha=cfg.alpha, tol=cfg.tol, max_iters=cfg.max_iters)
    table, report = extract_table(
        g, g_merged, label_rows, gk_params, lsi_params, parallelism=cfg.jobs
    )
    features_csv = out / "features.csv"
    write_feature_csv(table, features_csv)
    result.artifacts["features"] = str(features_csv)
    report_path = out / "extract_report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "rows": table.n_rows,
                "missing": [{"address": a, "reason": r} for a, r in report.missing],
                "failed": [{"address": a, "error": e} for a, e in report.failed],
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    result.artifacts["extract_report"] = str(report_path)

    stage("split")
    train, test = split(table, test_fraction=cfg.test_fraction, seed=cfg.seed)
    write_feature_csv(train, out / "train.csv")
    write_feature_csv(test, out / "test.csv")
    result.artifacts["train"] = str(out / "train.csv")
    result.artifacts["test"] = str(out / "test.csv")

    stage("normalize")
    scaler = fit_minmax(table if cfg.fit_on == "all" else train)
    train_norm = apply_minmax(scaler, train)
    test_norm = apply_minmax(scaler, test)
    write_feature_csv(train_norm, out / "train_norm.csv")
    write_feature_csv(test_norm, out / "test_norm.csv")
    result.artifacts["train_norm"] = str(out / "train_norm.csv")
    result.artifacts["test_norm"] = str(out / "test_norm.csv")
    scaler_path = out / "scaler.json"
    with open(scaler_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "fit_on": cfg.fit_on,
                "features": list(scaler.feature_ids),
                "min": [repr(v) for v in scaler.mins],
                "max": [repr(v) for v in scaler.maxs],
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    result.artifacts["scaler"] = str(scaler_path)

    stage("classify")
    evals = {
        "si+lsi": _eval_subset(train_norm, test_norm, train_norm.feature_ids, cfg.knn_k),
        "si": _eval_subset(train_norm, test_norm, SI_IDS, cfg.knn_k),
        "lsi": _eval_subset(train_norm, test_norm, LSI_IDS, cfg.knn_k),
    }
    result.evals = evals
    eval_path = out / "eval.json"
    with open(eval_path, "w", encoding="utf-8") as fh:
        json.dump(evals, fh, indent=2)
        fh.write("\n")
    result.artifacts["eval"] = str(eval_path)

    stage("correlate")
    corr = correlation_matrix(table)
    _write_corr_csv(corr, table.feature_ids, out / "correlation.csv")
    result.artifacts["correlation"] = str(out / "correlation.csv")

    stage("rank")
    ranked = feature_rank(table)
    _write_rank_csv(ranked, out / "feature_rank.csv")
    result.artifacts["feature_rank"] = str(out / "feature_rank.csv")

    stage("summarize")
    summaries = [(fid, summarize_by_label(table, fid)) for fid in cfg.summary_features]
    _write_summary_csv(summaries, out / "label_summary.csv")
    result.artifacts["label_summary"] = str(out / "label_summary.csv")

    if cfg.figures:
        stage("figures")
        from . import report as figures
        from .knn import EvalReport

        figures.plot_correlation(corr, out / "correlation.png")
        figures.plot_rank(ranked, out / "feature_rank.png")
        if summaries:
            figures.plot_label_summary(
                summaries[0][1], summaries[0][0], out / "label_summary.png"
            )
        full = evals["si+lsi"]
        confusion = {
            (entry["true"], entry["predicted"]): entry["count"]
            for entry in full["confusion"]
        }
        figures.plot_confusion(
            EvalReport(
                accuracy=full["accuracy"],
                precision=full["precision"],
                recall=full["recall"],
                f1=full["f1"],
                confusion=confusion,
            ),
            out / "confusion.png",
        )
        for name in ("correlation.png", "feature_rank.png", "label_summary.png", "confusion.png"):
            if (out / name).exists():
                result.artifacts[name.removesuffix(".png") + "_figure"] = str(out / name)

    stage("end")
    for (name, start), (_, end) in zip(stages, stages[1:]):
        result.timings[name] = end - start

    log_path = out / "run.log"
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write(f"version: {__version__}\n")
        fh.write(f"config_hash: {config_hash(cfg)}\n")
        fh.write(f"config: {json.dumps(asdict(cfg), sort_keys=True)}\n")
        stats = graph_stats(g)
        fh.write(f"graph: {json.dumps(stats, sort_keys=True)}\n")
        fh.write(
            f"extraction: rows={table.n_rows} missing={len(report.missing)} "
            f"failed={len(report.failed)}\n"
        )
        for name, seconds in result.timings.items():
            fh.write(f"timing.{name}: {seconds:.3f}s\n")
        for key, path in sorted(result.artifacts.items()):
            fh.write(f"artifact.{key}: {path}\n")
    result.artifacts["run_log"] = str(log_path)
    return result
