"""Command-line entry point.

One executable, one subcommand per stage:

    ingest    validate or synthesize ledgers
    graph     build/inspect the transaction multigraph
    subgraph  extract a k-hop subgraph around an address
    features  print the statistical (si) or structural (lsi) feature map
    dataset   extract/split/normalize/corr/rank/summary over feature tables
    classify  k-nearest-neighbor baseline with weighted metrics
    run       the whole pipeline into one output directory

`run` accepts a TOML config file mirroring its flags (flags win). The
ADDRBEHAVIOR_OUT environment variable supplies the default output
directory. Exit codes: 0 success, 2 input/usage, 3 validation, 4 compute,
5 i/o.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from .errors import EXIT_IO, AddrBehaviorError, ConfigError, InputError
from .features_lsi import LsiParams, compute_lsi
from .features_si import compute_si
from .graph import (
    build_graph,
    graph_stats,
    merge_parallel_edges,
    read_snapshot,
    write_snapshot,
)
from .knn import evaluate, knn_fit, knn_predict
from .labels import read_labels, write_labels
from .ledger import parse_ledger_file, write_ledger
from .manifest import write_manifest
from .pipeline import (
    apply_minmax,
    correlation_matrix,
    extract_table,
    feature_rank,
    fit_minmax,
    read_feature_csv,
    split,
    summarize_by_label,
    write_feature_csv,
)
from .runner import RunConfig, run_pipeline
from .subgraph import GkParams, gk_generate, subgraph_to_json
from .synth import ARCHETYPES, SynthConfig, synth_ledger

OUT_ENV = "ADDRBEHAVIOR_OUT"


def _default_out() -> str:
    return os.environ.get(OUT_ENV, ".")


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            raise InputError(f"--{name} is required")


def _load_graph(args):
    if getattr(args, "graph", None):
        return read_snapshot(args.graph)
    if getattr(args, "ledger", None):
        return build_graph(parse_ledger_file(args.ledger))
    raise InputError("one of --graph or --ledger is required")


# -- handlers -----------------------------------------------------------------


def _cmd_ingest_validate(args) -> int:
    blocks = parse_ledger_file(args.file)
    txs = sum(len(b.txs) for b in blocks)
    print(f"ok: {len(blocks)} blocks, {txs} txs")
    return 0


def _cmd_ingest_synth(args) -> int:
    cfg = SynthConfig(
        archetypes=tuple(args.archetypes.split(",")) if args.archetypes else ARCHETYPES,
        blocks=args.blocks,
        seed=args.seed,
        txs_per_block=args.txs_per_block,
    )
    blocks, labels = synth_ledger(cfg)
    write_ledger(blocks, args.out)
    print(f"wrote {len(blocks)} blocks to {args.out}")
    if args.labels_out:
        write_labels(labels, args.labels_out)
        print(f"wrote {len(labels)} labels to {args.labels_out}")
    return 0


def _cmd_graph_build(args) -> int:
    g = build_graph(parse_ledger_file(args.ledger))
    write_snapshot(g, args.out)
    print(f"wrote snapshot with {g.node_count} nodes, {g.edge_count} edges to {args.out}")
    return 0


def _cmd_graph_stats(args) -> int:
    g = _load_graph(args)
    for key, value in graph_stats(g).items():
        print(f"{key}: {value}")
    return 0


def _cmd_subgraph(args) -> int:
    g = _load_graph(args)
    sub = gk_generate(g, args.address, GkParams(args.k, args.max_nodes))
    doc = subgraph_to_json(sub)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
        print(
            f"wrote subgraph ({sub.node_count} nodes, {sub.edge_count} edges) to {args.out}"
        )
    else:
        print(doc)
    return 0


def _cmd_features_si(args) -> int:
    g = _load_graph(args)
    values = compute_si(g, merge_parallel_edges(g), args.address)
    print(json.dumps(values, indent=2))
    return 0


def _cmd_features_lsi(args) -> int:
    g = _load_graph(args)
    sub = gk_generate(g, args.address, GkParams(args.k, args.max_nodes))
    values = compute_lsi(
        sub, LsiParams(alpha=args.alpha, tol=args.tol, max_iters=args.max_iters)
    )
    print(json.dumps(values, indent=2))
    return 0


def _cmd_dataset_extract(args) -> int:
    g = _load_graph(args)
    g_merged = merge_parallel_edges(g)
    labels = read_labels(args.labels)
    table, report = extract_table(
        g,
        g_merged,
        labels,
        GkParams(args.k, args.max_nodes),
        LsiParams(alpha=args.alpha, tol=args.tol, max_iters=args.max_iters),
        parallelism=args.jobs,
    )
    write_feature_csv(table, args.out)
    print(f"wrote {table.n_rows} rows to {args.out}")
    for address, reason in report.missing + report.failed:
        print(f"skipped {address}: {reason}", file=sys.stderr)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
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
    return 0


def _cmd_dataset_split(args) -> int:
    table = read_feature_csv(args.features)
    train, test = split(table, test_fraction=args.test_fraction, seed=args.seed)
    write_feature_csv(train, args.train_out)
    write_feature_csv(test, args.test_out)
    print(f"wrote {train.n_rows} train rows, {test.n_rows} test rows")
    return 0


def _cmd_dataset_normalize(args) -> int:
    train = read_feature_csv(args.train)
    test = read_feature_csv(args.test)
    if args.fit_on == "all":
        combined = train.select(range(train.n_rows))
        for i in range(test.n_rows):
            combined.append(
                test.addresses[i], test.values[i], test.labels[i], test.strengths[i]
            )
        scaler = fit_minmax(combined)
    else:
        scaler = fit_minmax(train)
    write_feature_csv(apply_minmax(scaler, train), args.train_out)
    write_feature_csv(apply_minmax(scaler, test), args.test_out)
    print(f"wrote normalized tables to {args.train_out}, {args.test_out}")
    return 0


def _cmd_dataset_corr(args) -> int:
    from .runner import _write_corr_csv

    table = read_feature_csv(args.features)
    corr = correlation_matrix(table)
    _write_corr_csv(corr, table.feature_ids, args.out)
    print(f"wrote {corr.shape[0]}x{corr.shape[1]} correlation matrix to {args.out}")
    if args.png:
        from .report import plot_correlation

        plot_correlation(corr, args.png)
        print(f"rendered {args.png}")
    return 0


def _cmd_dataset_rank(args) -> int:
    from .runner import _write_rank_csv

    table = read_feature_csv(args.features)
    ranked = feature_rank(table)
    _write_rank_csv(ranked, args.out)
    print(f"wrote {len(ranked)} ranked features to {args.out}")
    if args.png:
        from .report import plot_rank

        plot_rank(ranked, args.png)
        print(f"rendered {args.png}")
    return 0


def _cmd_dataset_summary(args) -> int:
    from .runner import _write_summary_csv

    table = read_feature_csv(args.features)
    summary = summarize_by_label(table, args.feature)
    _write_summary_csv([(args.feature, summary)], args.out)
    print(f"wrote per-label summary of {args.feature} to {args.out}")
    if args.png:
        from .report import plot_label_summary

        plot_label_summary(summary, args.feature, args.png)
        print(f"rendered {args.png}")
    return 0


def _cmd_classify_knn(args) -> int:
    train = read_feature_csv(args.train)
    test = read_feature_csv(args.test)
    model = knn_fit(train.matrix(), train.labels, k=args.k)
    predicted = knn_predict(model, test.matrix())
    report = evaluate(predicted, test.labels)
    print(f"accuracy   {report.accuracy:.4f}")
    print(f"precision  {report.precision:.4f}  (weighted)")
    print(f"recall     {report.recall:.4f}  (weighted)")
    print(f"f1         {report.f1:.4f}  (weighted)")
    print("label  precision  recall  f1      support")
    for label, m in report.per_class.items():
        print(
            f"{label:<6} {m['precision']:<10.4f} {m['recall']:<7.4f} "
            f"{m['f1']:<7.4f} {int(m['support'])}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"wrote report to {args.out}")
    if args.png:
        from .report import plot_confusion

        plot_confusion(report, args.png)
        print(f"rendered {args.png}")
    return 0


_RUN_DEFAULTS = dict(
    k=4,
    max_nodes=3000,
    alpha=0.85,
    tol=1e-10,
    max_iters=200,
    seed=9,
    test_fraction=0.2,
    knn_k=4,
    jobs=1,
    fit_on="train",
    summary_features=["PDIa1-3"],
    figures=True,
)


def _cmd_run(args) -> int:
    file_cfg = {}
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                file_cfg = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
        unknown = set(file_cfg) - set(_RUN_DEFAULTS) - {"ledger", "labels", "out_dir"}
        if unknown:
            raise ConfigError(f"{args.config}: unknown keys {sorted(unknown)}")

    def pick(name, fallback):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_cfg:
            return file_cfg[name]
        return fallback

    ledger = pick("ledger", None)
    labels = pick("labels", None)
    if ledger is None or labels is None:
        raise InputError("--ledger and --labels are required (flag or config)")
    cfg = RunConfig(
        ledger=str(ledger),
        labels=str(labels),
        out_dir=str(pick("out_dir", _default_out())),
        **{
            key: (tuple(v) if key == "summary_features" else v)
            for key in _RUN_DEFAULTS
            for v in [pick(key, _RUN_DEFAULTS[key])]
        },
    )
    result = run_pipeline(cfg)
    for name, path in sorted(result.artifacts.items()):
        print(f"{name}: {path}")
    full = result.evals["si+lsi"]
    print(f"knn accuracy (si+lsi): {full['accuracy']:.4f}")
    return 0


def _cmd_manifest(args) -> int:
    write_manifest(args.out)
    print(f"wrote manifest to {args.out}")
    return 0


# -- parser -------------------------------------------------------------------


def _add_graph_source(p, required=False):
    p.add_argument("--graph", help="binary graph snapshot")
    p.add_argument("--ledger", help="NDJSON ledger file")


def _add_gk_flags(p):
    p.add_argument("--k", type=int, default=4, help="max undirected hop depth")
    p.add_argument("--max-nodes", type=int, default=3000, help="subgraph node cap")


def _add_lsi_flags(p):
    p.add_argument("--alpha", type=float, default=0.85, help="pagerank damping")
    p.add_argument("--tol", type=float, default=1e-10, help="pagerank tolerance")
    p.add_argument("--max-iters", type=int, default=200, help="pagerank iteration cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addrbehavior",
        description="Address-behavior feature extraction and classification "
        "over block ledgers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="validate or synthesize ledgers")
    ingest_sub = ingest.add_subparsers(dest="subcommand", required=True)
    p = ingest_sub.add_parser("validate", help="parse and validate a ledger file")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_ingest_validate)
    p = ingest_sub.add_parser("synth", help="generate a labeled synthetic ledger")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument(
        "--archetypes",
        help=f"comma-separated subset of {','.join(ARCHETYPES)} (default: all)",
    )
    p.add_argument("--txs-per-block", type=int, default=16)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out")
    p.set_defaults(handler=_cmd_ingest_synth)

    graph = sub.add_parser("graph", help="build or inspect the multigraph")
    graph_sub = graph.add_subparsers(dest="subcommand", required=True)
    p = graph_sub.add_parser("build", help="build a graph snapshot from a ledger")
    p.add_argument("--ledger", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_graph_build)
    p = graph_sub.add_parser("stats", help="print node/edge counts")
    _add_graph_source(p)
    p.set_defaults(handler=_cmd_graph_stats)

    p = sub.add_parser("subgraph", help="extract a k-hop subgraph around an address")
    _add_graph_source(p)
    p.add_argument("--address", required=True)
    _add_gk_flags(p)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_subgraph)

    features = sub.add_parser("features", help="per-address feature maps")
    features_sub = features.add_subparsers(dest="subcommand", required=True)
    p = features_sub.add_parser("si", help="132 statistical features")
    _add_graph_source(p)
    p.add_argument("--address", required=True)
    p.set_defaults(handler=_cmd_features_si)
    p = features_sub.add_parser("lsi", help="16 structural features")
    _add_graph_source(p)
    p.add_argument("--address", required=True)
    _add_gk_flags(p)
    _add_lsi_flags(p)
    p.set_defaults(handler=_cmd_features_lsi)

    dataset = sub.add_parser("dataset", help="feature-table pipeline stages")
    dataset_sub = dataset.add_subparsers(dest="subcommand", required=True)
    p = dataset_sub.add_parser("extract", help="labels -> feature CSV")
    _add_graph_source(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write skipped/failed addresses as JSON")
    p.add_argument("--jobs", type=int, default=1)
    _add_gk_flags(p)
    _add_lsi_flags(p)
    p.set_defaults(handler=_cmd_dataset_extract)
    p = dataset_sub.add_parser("split", help="seeded shuffle split")
    p.add_argument("--features", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=9)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.set_defaults(handler=_cmd_dataset_split)
    p = dataset_sub.add_parser("normalize", help="min-max normalization")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--fit-on", choices=("train", "all"), default="train")
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.set_defaults(handler=_cmd_dataset_normalize)
    p = dataset_sub.add_parser("corr", help="feature correlation matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--png", help="also render a heatmap figure")
    p.set_defaults(handler=_cmd_dataset_corr)
    p = dataset_sub.add_parser("rank", help="ANOVA F feature ranking")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--png", help="also render a bar chart")
    p.set_defaults(handler=_cmd_dataset_rank)
    p = dataset_sub.add_parser("summary", help="per-label feature summary")
    p.add_argument("--features", required=True)
    p.add_argument("--feature", default="PDIa1-3")
    p.add_argument("--out", required=True)
    p.add_argument("--png", help="also render a chart")
    p.set_defaults(handler=_cmd_dataset_summary)

    classify = sub.add_parser("classify", help="baseline classifiers")
    classify_sub = classify.add_subparsers(dest="subcommand", required=True)
    p = classify_sub.add_parser("knn", help="distance-weighted knn")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--out", help="write the evaluation report as JSON")
    p.add_argument("--png", help="also render the confusion matrix")
    p.set_defaults(handler=_cmd_classify_knn)

    p = sub.add_parser("manifest", help="write the feature manifest JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_manifest)

    p = sub.add_parser("run", help="full pipeline into one output directory")
    p.add_argument("--config", help="TOML file mirroring the flags below")
    p.add_argument("--ledger")
    p.add_argument("--labels")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--k", type=int)
    p.add_argument("--max-nodes", type=int, dest="max_nodes")
    p.add_argument("--alpha", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.add_argument("--knn-k", type=int, dest="knn_k")
    p.add_argument("--jobs", type=int)
    p.add_argument("--fit-on", choices=("train", "all"), dest="fit_on")
    p.add_argument(
        "--summary-features",
        dest="summary_features",
        help="comma-separated feature ids to summarize per label",
    )
    p.add_argument(
        "--no-figures", dest="figures", action="store_const", const=False
    )
    p.set_defaults(handler=_cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "summary_features", None) is not None and isinstance(
        args.summary_features, str
    ):
        args.summary_features = [s for s in args.summary_features.split(",") if s]
    try:
        return args.handler(args)
    except AddrBehaviorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
