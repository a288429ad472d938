"""Canonical feature manifest: the ordered 148 feature ids (132 SI + 16 LSI).

Sub-index convention for ids with several variants: direction varies slowest
and the statistic varies fastest. Directions are ordered in, out[, all];
min/max pairs are ordered [min, max]; min/max/avg triples [min, max, avg].
Examples: PAIa14-1 = incoming minimum, PAIa14-2 = incoming maximum,
PAIa14-3 = outgoing minimum; PDIa1-1/-2/-3 = in/out/total degree.

Ids with a single value carry no numeric suffix (e.g. PTIa1). Features
re-evaluated on the merged-edge view use an -R suffix: -R1, -R2, ... for
multi-variant ids and a bare -R for single-value ids (PAIa11-R1, PDIa12-R).
The merged-edge re-evaluation covers every amount- and degree-dependent id
(the PAI and PDI families); pure-time ids are unaffected by merging and the
combination family is emitted on the raw view only. The amount totals and
their two derived scalars appear only in merged form (PAIa11-R1/R2,
PAIa12-R, PAIa13-R) because merging cannot change a sum.

External column order = the order produced here; a remap file can align
columns of a foreign CSV with these ids.
"""

from __future__ import annotations

import json

from .errors import ConfigError, ValidationError

MANIFEST_VERSION = 1

_MINMAX = (("min", "minimum"), ("max", "maximum"))
_MINMAXAVG = (("min", "minimum"), ("max", "maximum"), ("avg", "average"))
_DIR2 = (("in", "incoming"), ("out", "outgoing"))
_DIR3 = (("in", "incoming"), ("out", "outgoing"), ("all", "combined"))


def _spread(base, dirs, stats=None, describe=None, r=False):
    """Expand one table row into its variant ids, direction-major."""
    entries = []
    n = 0
    for _, dword in dirs:
        if stats is None:
            n += 1
            entries.append((n, describe(dword, None)))
        else:
            for _, sword in stats:
                n += 1
                entries.append((n, describe(dword, sword)))
    out = []
    for i, desc in entries:
        if len(entries) == 1:
            fid = f"{base}-R" if r else base
        else:
            fid = f"{base}-R{i}" if r else f"{base}-{i}"
        out.append((fid, desc + (" [merged-edge view]" if r else "")))
    return out


def _single(base, desc, r=False):
    fid = f"{base}-R" if r else base
    return [(fid, desc + (" [merged-edge view]" if r else ""))]


def _pai_entries(r: bool):
    e = []
    if r:
        e += _spread(
            "PAIa11", _DIR2, None,
            lambda d, _: f"total {d} amount (BTC)", r=True,
        )
        e += _single("PAIa12", "total incoming minus total outgoing amount (BTC)", r=True)
        e += _single("PAIa13", "ratio of total incoming to total outgoing amount", r=True)
    e += _spread(
        "PAIa14", _DIR2, _MINMAX,
        lambda d, s: f"{s} per-event {d} amount (BTC)", r=r,
    )
    e += _spread(
        "PAIa15", _DIR2, None,
        lambda d, _: f"range (max minus min) of per-event {d} amounts (BTC)", r=r,
    )
    e += _spread(
        "PAIa16", _DIR2, None,
        lambda d, _: f"ratio of the {d} amount range to the total {d} amount", r=r,
    )
    e += _spread(
        "PAIa17", _DIR3, None,
        lambda d, _: f"population standard deviation of per-event {d} amounts (BTC)", r=r,
    )
    e += _spread(
        "PAIa21", _DIR2, _MINMAX,
        lambda d, s: f"{s} per-event share of the total {d} amount", r=r,
    )
    e += _spread(
        "PAIa22", _DIR2, None,
        lambda d, _: f"population standard deviation of per-event shares of the total {d} amount", r=r,
    )
    return e


def _pdi_entries(r: bool):
    e = []
    e += _spread(
        "PDIa1", _DIR3, None,
        lambda d, _: f"{d} degree (edge count, parallel edges included)"
        if d != "combined" else "combined degree (in plus out edge count)",
        r=r,
    )
    e += _spread(
        "PDIa11", _DIR2, None,
        lambda d, _: f"ratio of {d} degree to combined degree", r=r,
    )
    e += _single("PDIa12", "ratio of in-degree to out-degree", r=r)
    e += _single("PDIa13", "in-degree minus out-degree", r=r)
    return e


def _pti_entries():
    e = []
    e += _single("PTIa1", "life period: days between first and last event (fractional)")
    e += _single("PTIa2", "active period: count of distinct UTC days with at least one event")
    e += _single("PTIa21", "ratio of active period to life period")
    e += _spread(
        "PTIa31", (("", ""),), _MINMAXAVG,
        lambda _, s: f"{s} events per active day",
    )
    e += _single("PTIa32", "range (max minus min) of events per active day")
    e += _single("PTIa33", "population standard deviation of events per active day")
    e += _spread(
        "PTIa41", (("", ""),), _MINMAXAVG,
        lambda _, s: f"{s} gap between consecutive events (seconds)",
    )
    e += _single("PTIa42", "range (max minus min) of gaps between consecutive events (seconds)")
    e += _single("PTIa43", "population standard deviation of gaps between consecutive events (seconds)")
    return e


def _ci_entries():
    e = []
    e += _spread(
        "CI1a1", _DIR2, None,
        lambda d, _: f"total {d} amount per unit of {d} degree (BTC per edge)",
    )
    e += _single("CI1a2", "ratio of the amount difference (PAIa12) to the degree difference (PDIa13)")

    # CI2: amount per active day and its derived series
    e += _spread("CI2a11", _DIR2, None, lambda d, _: f"average per-active-day {d} amount (BTC)")
    e += _spread("CI2a12", _DIR2, _MINMAX, lambda d, s: f"{s} per-active-day {d} amount (BTC)")
    e += _spread("CI2a21", _DIR2, None, lambda d, _: f"average of per-active-day {d} amount divided by the life period")
    e += _spread("CI2a22", _DIR2, _MINMAX, lambda d, s: f"{s} of per-active-day {d} amount divided by the life period")
    e += _spread("CI2a23", _DIR2, None, lambda d, _: f"population standard deviation of per-active-day {d} amount divided by the life period")
    e += _spread("CI2a31", _DIR2, None, lambda d, _: f"average per-gap {d} amount change divided by the gap (BTC per second)")
    e += _spread("CI2a32", _DIR2, _MINMAX, lambda d, s: f"{s} per-gap {d} amount change divided by the gap (BTC per second)")
    e += _spread("CI2a33", _DIR2, None, lambda d, _: f"population standard deviation of per-gap {d} amount change divided by the gap (BTC per second)")

    # CI3: degree per active day and its derived series
    e += _spread("CI3a11", _DIR2, None, lambda d, _: f"average per-active-day {d} degree")
    e += _spread("CI3a12", _DIR2, _MINMAX, lambda d, s: f"{s} per-active-day {d} degree")
    e += _spread("CI3a21", _DIR3, None, lambda d, _: f"average of per-active-day {d} degree divided by the life period")
    e += _spread("CI3a22", _DIR3, _MINMAX, lambda d, s: f"{s} of per-active-day {d} degree divided by the life period")
    e += _spread("CI3a23", _DIR3, None, lambda d, _: f"population standard deviation of per-active-day {d} degree divided by the life period")
    e += _spread("CI3a31", _DIR2, None, lambda d, _: f"average per-gap {d} degree change divided by the gap (edges per second)")
    e += _spread("CI3a32", _DIR2, _MINMAX, lambda d, s: f"{s} per-gap {d} degree change divided by the gap (edges per second)")
    e += _spread("CI3a33", _DIR2, None, lambda d, _: f"population standard deviation of per-gap {d} degree change divided by the gap (edges per second)")

    # CI4: amount-per-degree rate series and degree-rate-per-gap series
    for base, d in (("CI4a1", "incoming"), ("CI4a2", "outgoing")):
        e += _single(f"{base}1", f"average of cumulative per-day {d} amount-per-degree divided by the elapsed life period")
        e += _spread(f"{base}2", ((d, d),), _MINMAX, lambda dd, s: f"{s} of cumulative per-day {dd} amount-per-degree divided by the elapsed life period")
        e += _single(f"{base}3", f"population standard deviation of cumulative per-day {d} amount-per-degree divided by the elapsed life period")
    for base, d in (("CI4a3", "incoming"), ("CI4a4", "outgoing")):
        e += _single(f"{base}1", f"average of per-gap {d} degree-change rate divided by the gap")
        e += _spread(f"{base}2", ((d, d),), _MINMAX, lambda dd, s: f"{s} of per-gap {dd} degree-change rate divided by the gap")
        e += _single(f"{base}3", f"population standard deviation of per-gap {d} degree-change rate divided by the gap")
    return e


def _lsi_entries():
    e = []
    stats = (("mean", "mean"), ("std", "population standard deviation"))
    n = 0
    for _, dword in _DIR3:
        for _, sword in stats:
            n += 1
            e.append((f"S1-{n}", f"{sword} of {dword} degree over subgraph nodes"))
    for i, (_, dword) in enumerate(_DIR3, start=1):
        e.append((f"S2-{i}", f"largest {dword}-degree distribution proportion in the subgraph"))
    e.append(("S3", "degree correlation (assortativity) of the subgraph, total degrees at edge endpoints"))
    e.append(("S4", "betweenness of the origin: sum over ordered pairs of shortest-path fractions through it"))
    e.append(("S5", "average directed shortest-path length over reachable ordered pairs"))
    e.append(("S6", "diameter: longest directed shortest-path length over reachable ordered pairs"))
    e.append(("S7", "closeness of the origin: reciprocal of summed directed distances to reachable nodes"))
    e.append(("S8", "PageRank score of the origin (damping 0.85)"))
    e.append(("S9", "edge density: edges (with multiplicity) over ordered node pairs"))
    return e


def _build():
    si = (
        _pai_entries(r=False)
        + _pai_entries(r=True)
        + _pdi_entries(r=False)
        + _pdi_entries(r=True)
        + _pti_entries()
        + _ci_entries()
    )
    lsi = _lsi_entries()
    return si, lsi


_SI_ENTRIES, _LSI_ENTRIES = _build()

SI_IDS: tuple[str, ...] = tuple(fid for fid, _ in _SI_ENTRIES)
LSI_IDS: tuple[str, ...] = tuple(fid for fid, _ in _LSI_ENTRIES)
FEATURE_IDS: tuple[str, ...] = SI_IDS + LSI_IDS
FEATURE_DESCRIPTIONS: dict[str, str] = dict(_SI_ENTRIES + _LSI_ENTRIES)

assert len(SI_IDS) == 132, len(SI_IDS)
assert len(LSI_IDS) == 16, len(LSI_IDS)
assert len(FEATURE_DESCRIPTIONS) == 148, "duplicate feature id in manifest"


def _family(fid: str) -> str:
    if fid.startswith("S"):
        return "LSI"
    for fam in ("PAI", "PDI", "PTI", "CI"):
        if fid.startswith(fam):
            return fam
    raise ValueError(fid)


def manifest_dict() -> dict:
    return {
        "version": MANIFEST_VERSION,
        "feature_count": len(FEATURE_IDS),
        "si_count": len(SI_IDS),
        "lsi_count": len(LSI_IDS),
        "features": [
            {
                "id": fid,
                "family": _family(fid),
                "merged_edge_view": "-R" in fid,
                "description": FEATURE_DESCRIPTIONS[fid],
            }
            for fid in FEATURE_IDS
        ],
    }


def write_manifest(path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest_dict(), fh, indent=2)
        fh.write("\n")


# -- remap config -------------------------------------------------------------
#
# A remap file aligns a foreign feature CSV with this manifest:
#   {"version": 1,
#    "address_column": "account",
#    "label_column": "label",
#    "columns": {"<manifest id>": "<foreign column name>", ...}}
# Manifest ids absent from "columns" are assumed to share their name with
# the foreign column.


def load_remap(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or obj.get("version") != 1:
        raise ConfigError(f"{path}: remap file must be a version-1 object")
    for key in ("address_column", "label_column"):
        if not isinstance(obj.get(key), str):
            raise ConfigError(f"{path}: missing string field {key!r}")
    columns = obj.get("columns", {})
    if not isinstance(columns, dict):
        raise ConfigError(f"{path}: 'columns' must be an object")
    unknown = [k for k in columns if k not in FEATURE_DESCRIPTIONS]
    if unknown:
        raise ConfigError(f"{path}: unknown manifest ids in remap: {unknown[:5]}")
    return obj


def resolve_columns(header: list[str], remap: dict) -> dict[str, int]:
    """Map every manifest id to its column index in a foreign header."""
    positions = {name: i for i, name in enumerate(header)}
    columns = remap.get("columns", {})
    out: dict[str, int] = {}
    missing = []
    for fid in FEATURE_IDS:
        name = columns.get(fid, fid)
        if name in positions:
            out[fid] = positions[name]
        else:
            missing.append(name)
    if missing:
        raise ValidationError(
            f"foreign table lacks {len(missing)} mapped columns, e.g. {missing[:5]}"
        )
    return out
