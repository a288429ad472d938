"""Dataset pipeline: feature-table extraction, persistence, normalization,
splitting, correlation, ranking, and per-label summaries.

Feature CSV format: header `address,<148 feature ids>,label,strength`,
UTF-8, LF line endings. Floats are written with repr() (shortest decimal
that round-trips), which makes byte-level determinism testable: identical
tables serialize to identical bytes on every platform and worker count.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    RankingError,
    ShapeError,
    SplitError,
    UnknownNodeError,
    ValidationError,
)
from .features_lsi import LsiParams, compute_lsi
from .features_si import compute_si
from .graph import TxGraph
from .labels import LabeledAddress
from .manifest import FEATURE_IDS
from .parallel import map_indexed
from .subgraph import GkParams, gk_from_node


@dataclass
class FeatureTable:
    feature_ids: tuple[str, ...]
    addresses: list[str] = field(default_factory=list)
    values: list[list[float]] = field(default_factory=list)
    labels: list[int] = field(default_factory=list)
    strengths: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.addresses)

    def append(self, address, row, label, strength) -> None:
        if len(row) != len(self.feature_ids):
            raise ShapeError(
                f"row width {len(row)} != manifest width {len(self.feature_ids)}"
            )
        self.addresses.append(address)
        self.values.append(row)
        self.labels.append(label)
        self.strengths.append(strength)

    def column(self, feature_id: str) -> list[float]:
        try:
            j = self.feature_ids.index(feature_id)
        except ValueError:
            raise ValidationError(f"unknown feature id {feature_id!r}") from None
        return [row[j] for row in self.values]

    def select(self, indices) -> "FeatureTable":
        return FeatureTable(
            feature_ids=self.feature_ids,
            addresses=[self.addresses[i] for i in indices],
            values=[self.values[i] for i in indices],
            labels=[self.labels[i] for i in indices],
            strengths=[self.strengths[i] for i in indices],
        )

    def select_features(self, feature_ids) -> "FeatureTable":
        cols = []
        for fid in feature_ids:
            try:
                cols.append(self.feature_ids.index(fid))
            except ValueError:
                raise ValidationError(f"unknown feature id {fid!r}") from None
        return FeatureTable(
            feature_ids=tuple(feature_ids),
            addresses=list(self.addresses),
            values=[[row[j] for j in cols] for row in self.values],
            labels=list(self.labels),
            strengths=list(self.strengths),
        )

    def matrix(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64).reshape(
            self.n_rows, len(self.feature_ids)
        )


@dataclass
class ExtractReport:
    missing: list[tuple[str, str]] = field(default_factory=list)
    failed: list[tuple[str, str]] = field(default_factory=list)


def _feature_row(shared, task):
    g, g_merged, gk_params, lsi_params = shared
    node, address = task
    try:
        values = compute_si(g, g_merged, address)
        sub = gk_from_node(g, node, gk_params)
        values.update(compute_lsi(sub, lsi_params))
        return True, [values[fid] for fid in FEATURE_IDS]
    except Exception as exc:  # collected into the report, never aborts the batch
        return False, f"{type(exc).__name__}: {exc}"


def extract_table(
    g: TxGraph,
    g_merged: TxGraph,
    labels: list[LabeledAddress],
    gk_params: GkParams = GkParams(),
    lsi_params: LsiParams = LsiParams(),
    parallelism: int = 1,
) -> tuple[FeatureTable, ExtractReport]:
    """One 148-feature row per labeled address found in the graph.

    Row order equals label order regardless of worker count. Addresses not
    in the graph and per-address failures are reported, not zero-rowed.
    """
    report = ExtractReport()
    tasks = []
    kept: list[LabeledAddress] = []
    for rec in labels:
        try:
            node = g.address_id(rec.address)
        except UnknownNodeError:
            report.missing.append((rec.address, "address not in ledger window"))
            continue
        tasks.append((node, rec.address))
        kept.append(rec)
    shared = (g, g_merged, gk_params, lsi_params)
    results = map_indexed(_feature_row, tasks, shared, parallelism)
    table = FeatureTable(feature_ids=FEATURE_IDS)
    for rec, (ok, payload) in zip(kept, results):
        if ok:
            table.append(rec.address, payload, rec.label_id, rec.strength)
        else:
            report.failed.append((rec.address, payload))
    return table, report


def split(
    table: FeatureTable, test_fraction: float = 0.2, seed: int = 9
) -> tuple[FeatureTable, FeatureTable]:
    """Seeded uniform shuffle, then partition (non-stratified).

    The test partition takes ceil(n * test_fraction) rows (clamped so both
    sides stay non-empty); rows keep their shuffled order.
    """
    if not 0 < test_fraction < 1:
        raise SplitError("test_fraction must be in (0, 1)")
    n = table.n_rows
    if n < 2:
        raise SplitError(f"cannot split a table with {n} row(s)")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    n_test = min(max(1, math.ceil(n * test_fraction)), n - 1)
    return table.select(indices[n_test:]), table.select(indices[:n_test])


@dataclass
class ScalerState:
    feature_ids: tuple[str, ...]
    mins: list[float]
    maxs: list[float]


def fit_minmax(train: FeatureTable) -> ScalerState:
    if train.n_rows == 0:
        raise ShapeError("cannot fit a scaler on an empty table")
    m = train.matrix()
    return ScalerState(
        feature_ids=train.feature_ids,
        mins=[float(v) for v in m.min(axis=0)],
        maxs=[float(v) for v in m.max(axis=0)],
    )


def apply_minmax(state: ScalerState, table: FeatureTable) -> FeatureTable:
    """x' = (x - min) / (max - min) per feature; constant features map to 0.
    Values outside the training range are not clipped."""
    if table.feature_ids != state.feature_ids:
        raise ShapeError("scaler was fit on a different feature set")
    spans = [hi - lo for lo, hi in zip(state.mins, state.maxs)]
    out = FeatureTable(
        feature_ids=table.feature_ids,
        addresses=list(table.addresses),
        labels=list(table.labels),
        strengths=list(table.strengths),
    )
    out.values = [
        [
            (x - lo) / span if span else 0.0
            for x, lo, span in zip(row, state.mins, spans)
        ]
        for row in table.values
    ]
    return out


def correlation_matrix(table: FeatureTable) -> np.ndarray:
    """Pearson correlation between feature columns; zero-variance features
    produce all-zero rows/columns, non-degenerate diagonals are exactly 1."""
    if table.n_rows < 2:
        raise ShapeError("correlation needs at least 2 rows")
    m = table.matrix()
    centered = m - m.mean(axis=0)
    cov = centered.T @ centered / m.shape[0]
    sd = np.sqrt(np.diag(cov))
    corr = np.zeros_like(cov)
    ok = sd > 0.0
    denom = np.outer(sd[ok], sd[ok])
    corr[np.ix_(ok, ok)] = cov[np.ix_(ok, ok)] / denom
    idx = np.where(ok)[0]
    corr[idx, idx] = 1.0
    return corr


def feature_rank(table: FeatureTable) -> list[tuple[str, float]]:
    """One-way ANOVA F-statistic of each feature against the label,
    descending (ties keep manifest order). Degenerate features score 0; a
    feature constant within every class but varying between them scores inf.
    """
    classes = sorted(set(table.labels))
    if len(classes) < 2:
        raise RankingError("feature ranking needs at least 2 classes")
    n = table.n_rows
    k = len(classes)
    rows_by_class = {c: [i for i in range(n) if table.labels[i] == c] for c in classes}
    scores: list[tuple[str, float]] = []
    for j, fid in enumerate(table.feature_ids):
        col = [row[j] for row in table.values]
        grand = sum(col) / n
        ssb = 0.0
        ssw = 0.0
        for c in classes:
            group = [col[i] for i in rows_by_class[c]]
            mean = sum(group) / len(group)
            ssb += len(group) * (mean - grand) ** 2
            ssw += sum((x - mean) ** 2 for x in group)
        dfw = n - k
        if ssb == 0.0 or dfw <= 0:
            f = 0.0
        elif ssw == 0.0:
            f = math.inf
        else:
            f = (ssb / (k - 1)) / (ssw / dfw)
        scores.append((fid, f))
    return sorted(scores, key=lambda item: -item[1])


def summarize_by_label(table: FeatureTable, feature_id: str) -> dict[int, dict[str, float]]:
    """Exact {avg, max, min, median} of one feature per label (median of an
    even count is the mean of the middle two)."""
    col = table.column(feature_id)
    by_label: dict[int, list[float]] = {}
    for value, label in zip(col, table.labels):
        by_label.setdefault(label, []).append(value)
    out: dict[int, dict[str, float]] = {}
    for label in sorted(by_label):
        xs = sorted(by_label[label])
        n = len(xs)
        median = xs[n // 2] if n % 2 else (xs[n // 2 - 1] + xs[n // 2]) / 2
        out[label] = {
            "avg": sum(xs) / n,
            "max": xs[-1],
            "min": xs[0],
            "median": median,
        }
    return out


# -- persistence --------------------------------------------------------------


def _format(x: float) -> str:
    return repr(float(x))


def write_feature_csv(table: FeatureTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["address", *table.feature_ids, "label", "strength"])
        for i in range(table.n_rows):
            writer.writerow(
                [
                    table.addresses[i],
                    *[_format(x) for x in table.values[i]],
                    table.labels[i],
                    table.strengths[i],
                ]
            )


def read_feature_csv(path, feature_ids: tuple[str, ...] = FEATURE_IDS) -> FeatureTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["address", *feature_ids, "label", "strength"]
        if header != expected:
            raise ValidationError(f"{path}: header does not match the manifest")
        table = FeatureTable(feature_ids=tuple(feature_ids))
        width = len(feature_ids)
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width + 3:
                raise ValidationError(f"{path} line {i}: expected {width + 3} fields")
            try:
                values = [float(x) for x in row[1 : width + 1]]
                label = int(row[width + 1])
            except ValueError as exc:
                raise ValidationError(f"{path} line {i}: {exc}") from None
            table.append(row[0], values, label, row[width + 2])
    return table
