"""Feature-table pipeline: extraction, split, scaling, correlation, ranking,
summaries, and the CSV interchange format."""

import math
import random

import numpy as np
import pytest

from addrbehavior.errors import (
    RankingError,
    ShapeError,
    SplitError,
    ValidationError,
)
from addrbehavior.features_lsi import LsiParams
from addrbehavior.graph import merge_parallel_edges
from addrbehavior.labels import LabeledAddress
from addrbehavior.manifest import FEATURE_IDS
from addrbehavior.pipeline import (
    FeatureTable,
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
from addrbehavior.subgraph import GkParams
from conftest import fixture_graph


def small_table(ids=("f1", "f2", "f3"), rows=None):
    table = FeatureTable(feature_ids=tuple(ids))
    rows = rows or [
        ("a0", [0.0, 1.0, 5.0], 0, "SA"),
        ("a1", [1.0, 1.0, 4.0], 0, "WA"),
        ("a2", [4.0, 1.0, 3.0], 1, "SA"),
        ("a3", [5.0, 1.0, 2.0], 1, "SA"),
    ]
    for address, values, label, strength in rows:
        table.append(address, values, label, strength)
    return table


# -- FeatureTable ----------------------------------------------------------------


def test_append_rejects_wrong_width():
    table = FeatureTable(feature_ids=("f1", "f2"))
    with pytest.raises(ShapeError):
        table.append("a", [1.0], 0, "SA")


def test_column_lookup():
    table = small_table()
    assert table.column("f2") == [1.0, 1.0, 1.0, 1.0]
    with pytest.raises(ValidationError):
        table.column("nope")


def test_select_and_select_features():
    table = small_table()
    picked = table.select([2, 0])
    assert picked.addresses == ["a2", "a0"]
    assert picked.labels == [1, 0]
    assert picked.values[0] == [4.0, 1.0, 3.0]
    narrowed = table.select_features(("f3", "f1"))
    assert narrowed.feature_ids == ("f3", "f1")
    assert narrowed.values[0] == [5.0, 0.0]
    assert narrowed.addresses == table.addresses
    with pytest.raises(ValidationError):
        table.select_features(("f1", "zzz"))


def test_matrix_shape_and_dtype():
    m = small_table().matrix()
    assert m.shape == (4, 3)
    assert m.dtype == np.float64
    empty = FeatureTable(feature_ids=("f1",)).matrix()
    assert empty.shape == (0, 1)


# -- extraction ------------------------------------------------------------------


def _fixture_labels():
    return [
        LabeledAddress("A", 1, "SA"),
        LabeledAddress("B", 2, "WA"),
        LabeledAddress("C", 1, "SA"),
        LabeledAddress("D", 3, "SA"),
    ]


def test_extract_rows_follow_label_order():
    g = fixture_graph()
    table, report = extract_table(g, merge_parallel_edges(g), _fixture_labels())
    assert table.addresses == ["A", "B", "C", "D"]
    assert table.labels == [1, 2, 1, 3]
    assert table.strengths == ["SA", "WA", "SA", "SA"]
    assert table.feature_ids == FEATURE_IDS
    assert not report.missing and not report.failed


def test_extract_reports_missing_addresses():
    g = fixture_graph()
    labels = _fixture_labels() + [LabeledAddress("ghost", 0, "SA")]
    table, report = extract_table(g, merge_parallel_edges(g), labels)
    assert table.addresses == ["A", "B", "C", "D"]
    assert report.missing == [("ghost", "address not in ledger window")]


def test_extract_collects_per_address_failures():
    g = fixture_graph()
    table, report = extract_table(
        g,
        merge_parallel_edges(g),
        _fixture_labels(),
        lsi_params=LsiParams(tol=1e-30, max_iters=1),
    )
    assert table.n_rows == 0
    assert len(report.failed) == 4
    assert all(err.startswith("ConvergenceError") for _, err in report.failed)


def test_extract_parallel_matches_sequential():
    g = fixture_graph()
    gm = merge_parallel_edges(g)
    labels = _fixture_labels()
    seq, _ = extract_table(g, gm, labels, parallelism=1)
    par, _ = extract_table(g, gm, labels, parallelism=4)
    assert seq.addresses == par.addresses
    assert seq.values == par.values  # bitwise identical, not just close


def test_extract_si_and_lsi_agree_with_direct_calls():
    from addrbehavior.features_lsi import compute_lsi
    from addrbehavior.features_si import compute_si
    from addrbehavior.subgraph import gk_generate

    g = fixture_graph()
    gm = merge_parallel_edges(g)
    table, _ = extract_table(g, gm, [LabeledAddress("B", 2, "SA")])
    expected = compute_si(g, gm, "B")
    expected.update(compute_lsi(gk_generate(g, "B", GkParams())))
    assert table.values[0] == [expected[fid] for fid in FEATURE_IDS]


# -- split -----------------------------------------------------------------------


def test_split_is_deterministic_and_partitions():
    table = small_table()
    train1, test1 = split(table, test_fraction=0.25, seed=9)
    train2, test2 = split(table, test_fraction=0.25, seed=9)
    assert train1.addresses == train2.addresses
    assert test1.addresses == test2.addresses
    assert len(train1.addresses) == 3 and len(test1.addresses) == 1
    assert sorted(train1.addresses + test1.addresses) == ["a0", "a1", "a2", "a3"]


def test_split_seed_changes_partition():
    rows = [(f"a{i}", [float(i)], i % 2, "SA") for i in range(30)]
    table = small_table(ids=("f1",), rows=rows)
    _, test_a = split(table, seed=1)
    _, test_b = split(table, seed=2)
    assert test_a.addresses != test_b.addresses


def test_split_count_rounds_up_and_clamps():
    rows10 = [(f"a{i}", [0.0], 0, "SA") for i in range(10)]
    _, test = split(small_table(ids=("f1",), rows=rows10), test_fraction=0.2)
    assert test.n_rows == 2
    rows3 = rows10[:3]
    _, test = split(small_table(ids=("f1",), rows=rows3), test_fraction=0.5)
    assert test.n_rows == 2  # ceil(1.5)
    rows2 = rows10[:2]
    train, test = split(small_table(ids=("f1",), rows=rows2), test_fraction=0.9)
    assert (train.n_rows, test.n_rows) == (1, 1)  # clamped to keep both sides
    _, test = split(small_table(ids=("f1",), rows=rows10), test_fraction=0.01)
    assert test.n_rows == 1  # floor of at least one row


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.2, 1.5])
def test_split_rejects_bad_fraction(fraction):
    with pytest.raises(SplitError):
        split(small_table(), test_fraction=fraction)


def test_split_rejects_tiny_tables():
    table = small_table(ids=("f1",), rows=[("a", [1.0], 0, "SA")])
    with pytest.raises(SplitError):
        split(table)


# -- scaling ---------------------------------------------------------------------


def test_minmax_maps_train_to_unit_interval():
    table = small_table()
    state = fit_minmax(table)
    scaled = apply_minmax(state, table)
    assert scaled.column("f1") == [0.0, 0.2, 0.8, 1.0]
    assert scaled.column("f2") == [0.0, 0.0, 0.0, 0.0]  # constant -> 0
    assert scaled.column("f3") == [1.0, pytest.approx(2 / 3), pytest.approx(1 / 3), 0.0]
    assert scaled.addresses == table.addresses
    assert scaled.labels == table.labels


def test_minmax_does_not_clip_unseen_values():
    train = small_table()
    state = fit_minmax(train)
    other = small_table(rows=[("q", [10.0, 5.0, -2.0], 0, "SA")])
    scaled = apply_minmax(state, other)
    assert scaled.values[0][0] == 2.0  # above the training max
    assert scaled.values[0][2] == pytest.approx(-4 / 3)  # below the training min


def test_minmax_errors():
    with pytest.raises(ShapeError):
        fit_minmax(FeatureTable(feature_ids=("f1",)))
    state = fit_minmax(small_table())
    with pytest.raises(ShapeError):
        apply_minmax(state, FeatureTable(feature_ids=("other",)))


# -- correlation -----------------------------------------------------------------


def test_correlation_against_numpy_oracle():
    rng = random.Random(7)
    rows = [
        (f"a{i}", [rng.uniform(-5, 5) for _ in range(6)], 0, "SA") for i in range(40)
    ]
    table = small_table(ids=tuple(f"f{j}" for j in range(6)), rows=rows)
    ours = correlation_matrix(table)
    expected = np.corrcoef(table.matrix().T)
    assert np.allclose(ours, expected, atol=1e-9)
    assert np.all(np.diag(ours) == 1.0)


def test_correlation_zero_variance_rows():
    table = small_table()  # f2 is constant
    corr = correlation_matrix(table)
    assert corr.shape == (3, 3)
    assert np.all(corr[1, :] == 0.0) and np.all(corr[:, 1] == 0.0)
    assert corr[0, 0] == 1.0 and corr[2, 2] == 1.0
    expected = np.corrcoef(table.column("f1"), table.column("f3"))[0, 1]
    assert corr[0, 2] == pytest.approx(expected, abs=1e-12)


def test_correlation_needs_two_rows():
    table = small_table(rows=[("a", [1.0, 2.0, 3.0], 0, "SA")])
    with pytest.raises(ShapeError):
        correlation_matrix(table)


# -- ranking ---------------------------------------------------------------------


def test_anova_closed_form_two_classes():
    # f1: class 0 -> [0, 1], class 1 -> [4, 5]
    # grand mean 2.5, ssb = 16, ssw = 1, F = (16/1) / (1/2) = 32
    table = small_table()
    ranked = dict(feature_rank(table))
    assert ranked["f1"] == pytest.approx(32.0)
    assert ranked["f2"] == 0.0  # constant everywhere: ssb = 0
    # f3: class 0 -> [5, 4], class 1 -> [3, 2]: ssb = 4, ssw = 1, F = 8
    assert ranked["f3"] == pytest.approx(8.0)


def test_anova_perfect_separation_is_infinite():
    rows = [
        ("a0", [1.0, 0.5], 0, "SA"),
        ("a1", [1.0, 0.6], 0, "SA"),
        ("a2", [2.0, 0.7], 1, "SA"),
        ("a3", [2.0, 0.8], 1, "SA"),
    ]
    table = small_table(ids=("sep", "noisy"), rows=rows)
    ranked = feature_rank(table)
    assert ranked[0] == ("sep", math.inf)


def test_rank_is_descending_with_stable_ties():
    rows = [
        ("a0", [0.0, 0.0, 3.0], 0, "SA"),
        ("a1", [1.0, 1.0, 3.0], 0, "SA"),
        ("a2", [4.0, 4.0, 3.0], 1, "SA"),
        ("a3", [5.0, 5.0, 3.0], 1, "SA"),
    ]
    table = small_table(ids=("x1", "x2", "flat"), rows=rows)
    ranked = feature_rank(table)
    scores = [s for _, s in ranked]
    assert scores == sorted(scores, reverse=True)
    assert [fid for fid, _ in ranked] == ["x1", "x2", "flat"]  # tie keeps order


def test_rank_needs_two_classes():
    rows = [("a0", [1.0], 0, "SA"), ("a1", [2.0], 0, "SA")]
    with pytest.raises(RankingError):
        feature_rank(small_table(ids=("f1",), rows=rows))


def test_anova_matches_direct_formula_fuzz():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(6, 30)
        k = rng.randint(2, 4)
        labels = [rng.randrange(k) for _ in range(n)]
        while len(set(labels)) < 2:
            labels = [rng.randrange(k) for _ in range(n)]
        col = [rng.uniform(-3, 3) for _ in range(n)]
        rows = [(f"a{i}", [col[i]], labels[i], "SA") for i in range(n)]
        ranked = dict(feature_rank(small_table(ids=("f",), rows=rows)))
        classes = sorted(set(labels))
        grand = sum(col) / n
        ssb = sum(
            sum(1 for l in labels if l == c)
            * (sum(x for x, l in zip(col, labels) if l == c)
               / sum(1 for l in labels if l == c) - grand) ** 2
            for c in classes
        )
        ssw = sum(
            (x - sum(y for y, m in zip(col, labels) if m == l)
             / sum(1 for m in labels if m == l)) ** 2
            for x, l in zip(col, labels)
        )
        expected = (ssb / (len(classes) - 1)) / (ssw / (n - len(classes)))
        assert ranked["f"] == pytest.approx(expected, rel=1e-9)


# -- summaries -------------------------------------------------------------------


def test_summarize_by_label_hand_numbers():
    rows = [
        ("a0", [1.0], 0, "SA"),
        ("a1", [3.0], 0, "SA"),
        ("a2", [5.0], 0, "SA"),
        ("a3", [2.0], 1, "SA"),
        ("a4", [4.0], 1, "SA"),
    ]
    summary = summarize_by_label(small_table(ids=("f",), rows=rows), "f")
    assert list(summary) == [0, 1]
    assert summary[0] == {"avg": 3.0, "max": 5.0, "min": 1.0, "median": 3.0}
    assert summary[1] == {"avg": 3.0, "max": 4.0, "min": 2.0, "median": 3.0}


def test_summarize_even_median_is_midpoint_mean():
    rows = [("a%d" % i, [float(v)], 0, "SA") for i, v in enumerate([1, 2, 10, 20])]
    summary = summarize_by_label(small_table(ids=("f",), rows=rows), "f")
    assert summary[0]["median"] == 6.0


# -- CSV interchange -------------------------------------------------------------


def test_feature_csv_round_trip(tmp_path):
    g = fixture_graph()
    table, _ = extract_table(g, merge_parallel_edges(g), _fixture_labels())
    path = tmp_path / "features.csv"
    write_feature_csv(table, path)
    again = read_feature_csv(path)
    assert again.addresses == table.addresses
    assert again.labels == table.labels
    assert again.strengths == table.strengths
    assert again.values == table.values  # repr round-trips floats exactly
    path2 = tmp_path / "features2.csv"
    write_feature_csv(again, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_feature_csv_header_and_layout(tmp_path):
    table = small_table()
    path = tmp_path / "t.csv"
    write_feature_csv(table, path)
    lines = path.read_bytes().decode("utf-8").split("\n")
    assert lines[0] == "address,f1,f2,f3,label,strength"
    assert lines[1] == "a0,0.0,1.0,5.0,0,SA"
    assert lines[-1] == ""  # trailing newline, LF only
    assert "\r" not in path.read_bytes().decode("utf-8")


def test_feature_csv_shortest_float_form(tmp_path):
    rows = [("a", [0.1, 1 / 3, 2.0], 0, "SA")]
    path = tmp_path / "t.csv"
    write_feature_csv(small_table(rows=rows), path)
    body = path.read_text()
    assert "0.1," in body
    assert "0.3333333333333333," in body
    assert ",2.0," in body


def test_read_feature_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("address,label,strength\n")
    with pytest.raises(ValidationError, match="header"):
        read_feature_csv(path, feature_ids=("f1",))


def test_read_feature_csv_reports_bad_cell_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("address,f1,label,strength\nok,1.5,0,SA\nbad,oops,0,SA\n")
    with pytest.raises(ValidationError, match="line 3"):
        read_feature_csv(path, feature_ids=("f1",))


def test_read_feature_csv_reports_width(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("address,f1,label,strength\nok,1.5,0\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_feature_csv(path, feature_ids=("f1",))
