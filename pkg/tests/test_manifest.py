"""Feature manifest: ids, ordering, serialization, and remap configs."""

import json

import pytest

from addrbehavior.errors import ConfigError, ValidationError
from addrbehavior.manifest import (
    FEATURE_DESCRIPTIONS,
    FEATURE_IDS,
    LSI_IDS,
    SI_IDS,
    load_remap,
    manifest_dict,
    resolve_columns,
    write_manifest,
)


def test_counts():
    assert len(SI_IDS) == 132
    assert len(LSI_IDS) == 16
    assert len(FEATURE_IDS) == 148
    assert FEATURE_IDS == SI_IDS + LSI_IDS
    assert len(set(FEATURE_IDS)) == 148


def test_family_counts():
    def count(prefix, merged):
        return sum(
            1 for f in SI_IDS if f.startswith(prefix) and ("-R" in f) == merged
        )

    assert count("PAI", False) == 17
    assert count("PAI", True) == 21
    assert count("PDI", False) == 7
    assert count("PDI", True) == 7
    assert count("PTI", False) == 13
    assert count("PTI", True) == 0
    assert count("CI", False) == 67
    assert count("CI", True) == 0


def test_known_id_positions():
    assert SI_IDS[0] == "PAIa14-1"
    assert "PAIa21-1" in SI_IDS and "PAIa21-4" in SI_IDS
    assert "PAIa11-R1" in SI_IDS and "PAIa11-1" not in SI_IDS
    assert "PAIa13-R" in SI_IDS and "PAIa13" not in SI_IDS
    assert "PDIa1-3" in SI_IDS and "PDIa1-R3" in SI_IDS
    assert "CI4a43" in SI_IDS
    assert LSI_IDS == (
        "S1-1",
        "S1-2",
        "S1-3",
        "S1-4",
        "S1-5",
        "S1-6",
        "S2-1",
        "S2-2",
        "S2-3",
        "S3",
        "S4",
        "S5",
        "S6",
        "S7",
        "S8",
        "S9",
    )


def test_subfamily_sizes():
    ci = [f for f in SI_IDS if f.startswith("CI")]
    assert sum(1 for f in ci if f.startswith("CI1")) == 3
    assert sum(1 for f in ci if f.startswith("CI2")) == 22
    assert sum(1 for f in ci if f.startswith("CI3")) == 26
    assert sum(1 for f in ci if f.startswith("CI4")) == 16


def test_every_feature_has_description():
    assert set(FEATURE_DESCRIPTIONS) == set(FEATURE_IDS)
    assert all(FEATURE_DESCRIPTIONS[f] for f in FEATURE_IDS)


def test_manifest_document(tmp_path):
    doc = manifest_dict()
    assert doc["version"] == 1
    assert doc["feature_count"] == 148
    assert [f["id"] for f in doc["features"]] == list(FEATURE_IDS)
    merged_flags = {f["id"]: f["merged_edge_view"] for f in doc["features"]}
    assert merged_flags["PAIa11-R1"] is True
    assert merged_flags["PAIa14-1"] is False
    assert merged_flags["S3"] is False
    path = tmp_path / "manifest.json"
    write_manifest(path)
    assert json.loads(path.read_text()) == doc


def _write_remap(tmp_path, obj):
    path = tmp_path / "remap.json"
    path.write_text(json.dumps(obj))
    return path


def test_remap_load_and_resolve(tmp_path):
    path = _write_remap(
        tmp_path,
        {
            "version": 1,
            "address_column": "account",
            "label_column": "SW",
            "columns": {"PAIa14-1": "in_min", "S3": "assort"},
        },
    )
    remap = load_remap(path)
    header = ["account", "in_min", "assort", "SW"] + [
        f for f in FEATURE_IDS if f not in ("PAIa14-1", "S3")
    ]
    resolved = resolve_columns(header, remap)
    assert resolved["PAIa14-1"] == 1
    assert resolved["S3"] == 2
    assert resolved["PAIa14-2"] == header.index("PAIa14-2")
    assert len(resolved) == 148


def test_remap_rejects_bad_version(tmp_path):
    path = _write_remap(tmp_path, {"version": 2, "address_column": "a", "label_column": "l"})
    with pytest.raises(ConfigError, match="version"):
        load_remap(path)


def test_remap_rejects_unknown_ids(tmp_path):
    path = _write_remap(
        tmp_path,
        {
            "version": 1,
            "address_column": "a",
            "label_column": "l",
            "columns": {"NOPE-1": "x"},
        },
    )
    with pytest.raises(ConfigError, match="unknown manifest ids"):
        load_remap(path)


def test_remap_rejects_missing_fields(tmp_path):
    path = _write_remap(tmp_path, {"version": 1, "address_column": "a"})
    with pytest.raises(ConfigError, match="label_column"):
        load_remap(path)


def test_resolve_reports_missing_columns(tmp_path):
    path = _write_remap(
        tmp_path, {"version": 1, "address_column": "a", "label_column": "l"}
    )
    remap = load_remap(path)
    with pytest.raises(ValidationError, match="lacks"):
        resolve_columns(["a", "l", "PAIa14-1"], remap)
