"""Statistical indicator features for one address on the transaction graph.

Conventions shared by every feature here:
  * Events are an address's incident edges: incoming = Tx->Ads, outgoing =
    Ads->Tx. Event order is (timestamp, edge insertion id). Pooled series
    interleave both directions in that order.
  * Arithmetic runs on integer satoshi as long as possible; conversion to
    BTC (divide by 1e8) happens at emission.
  * Every ratio with a zero denominator and every statistic of an empty
    series is 0 — features are total, never NaN/Inf.
  * Standard deviations are population standard deviations.
  * The day bucket is the UTC calendar day (timestamp // 86400); "life
    period" is (last - first) / 86400 in fractional days.
  * Per-day series (amount per day, degree per day, and their derivatives)
    are indexed by the pooled active-day set, so both directions of one
    address share series length.
  * Addresses with fewer than two pooled events emit 0 for every
    series-derived combination feature (the series are degenerate).
"""

from __future__ import annotations

import math

from .graph import TxGraph
from .manifest import SI_IDS

SATS = 1e8

CI_SERIES_IDS = tuple(
    fid for fid in SI_IDS if fid.startswith("CI") and not fid.startswith("CI1")
)


def _avg(xs) -> float:
    return sum(xs) / len(xs) if xs else 0.0


def _pop_std(xs) -> float:
    if not xs:
        return 0.0
    mean = sum(xs) / len(xs)
    return math.sqrt(sum((x - mean) ** 2 for x in xs) / len(xs))


def _ratio(num, den) -> float:
    return num / den if den else 0.0


def _events(g: TxGraph, node: int):
    """(incoming, outgoing, pooled) event lists.

    incoming/outgoing: (ts, eid, sats) sorted by (ts, eid).
    pooled: (ts, eid, sats, is_incoming) sorted by (ts, eid).
    """
    incoming = sorted((g.edge_ts[e], e, g.edge_amount[e]) for e in g.in_edges[node])
    outgoing = sorted((g.edge_ts[e], e, g.edge_amount[e]) for e in g.out_edges[node])
    pooled = sorted(
        [(ts, eid, sats, True) for ts, eid, sats in incoming]
        + [(ts, eid, sats, False) for ts, eid, sats in outgoing]
    )
    return incoming, outgoing, pooled


def compute_pai(g: TxGraph, ads: str) -> dict[str, float]:
    """All 21 pure-amount values (keyed without the -R suffix)."""
    node = g.address_id(ads)
    incoming, outgoing, _ = _events(g, node)
    out: dict[str, float] = {}
    sums, mins, maxs = {}, {}, {}
    for i, events in enumerate((incoming, outgoing)):
        amounts = [sats for _, _, sats in events]
        sums[i] = sum(amounts)
        mins[i] = min(amounts) if amounts else 0
        maxs[i] = max(amounts) if amounts else 0
        out[f"PAIa11-{i + 1}"] = sums[i] / SATS
        out[f"PAIa14-{2 * i + 1}"] = mins[i] / SATS
        out[f"PAIa14-{2 * i + 2}"] = maxs[i] / SATS
        out[f"PAIa15-{i + 1}"] = (maxs[i] - mins[i]) / SATS
        out[f"PAIa16-{i + 1}"] = _ratio(maxs[i] - mins[i], sums[i])
        out[f"PAIa17-{i + 1}"] = _pop_std([sats / SATS for sats in amounts])
        shares = [_ratio(sats, sums[i]) for sats in amounts]
        out[f"PAIa21-{2 * i + 1}"] = min(shares) if shares else 0.0
        out[f"PAIa21-{2 * i + 2}"] = max(shares) if shares else 0.0
        out[f"PAIa22-{i + 1}"] = _pop_std(shares)
    out["PAIa12"] = (sums[0] - sums[1]) / SATS
    out["PAIa13"] = _ratio(sums[0], sums[1])
    pooled_amounts = [sats / SATS for _, _, sats in incoming] + [
        sats / SATS for _, _, sats in outgoing
    ]
    out["PAIa17-3"] = _pop_std(pooled_amounts)
    return out


def compute_pdi(g: TxGraph, ads: str) -> dict[str, float]:
    """All 7 pure-degree values (keyed without the -R suffix)."""
    node = g.address_id(ads)
    d_in = len(g.in_edges[node])
    d_out = len(g.out_edges[node])
    d_all = d_in + d_out
    return {
        "PDIa1-1": float(d_in),
        "PDIa1-2": float(d_out),
        "PDIa1-3": float(d_all),
        "PDIa11-1": _ratio(d_in, d_all),
        "PDIa11-2": _ratio(d_out, d_all),
        "PDIa12": _ratio(d_in, d_out),
        "PDIa13": float(d_in - d_out),
    }


def compute_pti(g: TxGraph, ads: str) -> dict[str, float]:
    """All 13 pure-time values."""
    node = g.address_id(ads)
    _, _, pooled = _events(g, node)
    out = {fid: 0.0 for fid in SI_IDS if fid.startswith("PTI")}
    if not pooled:
        return out
    timestamps = [ts for ts, _, _, _ in pooled]
    life = (timestamps[-1] - timestamps[0]) / 86400
    day_counts: dict[int, int] = {}
    for ts in timestamps:
        day = ts // 86400
        day_counts[day] = day_counts.get(day, 0) + 1
    per_day = [float(day_counts[d]) for d in sorted(day_counts)]
    out["PTIa1"] = life
    out["PTIa2"] = float(len(per_day))
    out["PTIa21"] = _ratio(len(per_day), life)
    out["PTIa31-1"] = min(per_day)
    out["PTIa31-2"] = max(per_day)
    out["PTIa31-3"] = _avg(per_day)
    out["PTIa32"] = max(per_day) - min(per_day)
    out["PTIa33"] = _pop_std(per_day)
    gaps = [float(timestamps[i + 1] - timestamps[i]) for i in range(len(timestamps) - 1)]
    if gaps:
        out["PTIa41-1"] = min(gaps)
        out["PTIa41-2"] = max(gaps)
        out["PTIa41-3"] = _avg(gaps)
        out["PTIa42"] = max(gaps) - min(gaps)
        out["PTIa43"] = _pop_std(gaps)
    return out


def compute_ci(g: TxGraph, ads: str) -> dict[str, float]:
    """All 67 combination values."""
    node = g.address_id(ads)
    incoming, outgoing, pooled = _events(g, node)
    d_in, d_out = len(incoming), len(outgoing)
    sum_in = sum(sats for _, _, sats in incoming)
    sum_out = sum(sats for _, _, sats in outgoing)

    out: dict[str, float] = {}
    out["CI1a1-1"] = _ratio(sum_in / SATS, d_in)
    out["CI1a1-2"] = _ratio(sum_out / SATS, d_out)
    out["CI1a2"] = _ratio((sum_in - sum_out) / SATS, d_in - d_out)

    for fid in CI_SERIES_IDS:
        out[fid] = 0.0
    if len(pooled) < 2:
        return out

    days = sorted({ts // 86400 for ts, _, _, _ in pooled})
    life = (pooled[-1][0] - pooled[0][0]) / 86400

    amt_day = {True: {}, False: {}}
    cnt_day = {True: {}, False: {}}
    for ts, _, sats, is_in in pooled:
        day = ts // 86400
        amt_day[is_in][day] = amt_day[is_in].get(day, 0) + sats
        cnt_day[is_in][day] = cnt_day[is_in].get(day, 0) + 1

    av_a = {}  # per-day amount series, BTC
    av_d = {}  # per-day degree series
    for i, is_in in enumerate((True, False)):
        av_a[i] = [amt_day[is_in].get(d, 0) / SATS for d in days]
        av_d[i] = [float(cnt_day[is_in].get(d, 0)) for d in days]
    av_d[2] = [av_d[0][j] + av_d[1][j] for j in range(len(days))]

    gaps = [pooled[j + 1][0] - pooled[j][0] for j in range(len(pooled) - 1)]
    dra1 = {}  # per-gap amount change / gap
    dra2 = {}  # per-gap degree change / gap
    ra4 = {}  # dra2 / gap
    for i, is_in in enumerate((True, False)):
        dra1[i] = [
            _ratio(pooled[j + 1][2] / SATS if pooled[j + 1][3] == is_in else 0.0, gaps[j])
            for j in range(len(gaps))
        ]
        dra2[i] = [
            _ratio(1.0 if pooled[j + 1][3] == is_in else 0.0, gaps[j])
            for j in range(len(gaps))
        ]
        ra4[i] = [_ratio(dra2[i][j], gaps[j]) for j in range(len(gaps))]

    # Cumulative amount-per-degree rate, evaluated once per active day:
    # (cumulative directional total / cumulative directional degree), divided
    # by the life period elapsed through that day's last event.
    ra3 = {0: [], 1: []}
    cum_amt = [0, 0]
    cum_cnt = [0, 0]
    pos = 0
    first_ts = pooled[0][0]
    for day in days:
        last_ts = first_ts
        while pos < len(pooled) and pooled[pos][0] // 86400 == day:
            ts, _, sats, is_in = pooled[pos]
            i = 0 if is_in else 1
            cum_amt[i] += sats
            cum_cnt[i] += 1
            last_ts = ts
            pos += 1
        elapsed = (last_ts - first_ts) / 86400
        for i in (0, 1):
            cum_ra1 = _ratio(cum_amt[i] / SATS, cum_cnt[i])
            ra3[i].append(_ratio(cum_ra1, elapsed))

    rap2 = {i: [_ratio(v, life) for v in av_a[i]] for i in (0, 1)}
    rav1 = {i: [_ratio(v, life) for v in av_d[i]] for i in (0, 1, 2)}

    for i in (0, 1):
        out[f"CI2a11-{i + 1}"] = _avg(av_a[i])
        out[f"CI2a12-{2 * i + 1}"] = min(av_a[i])
        out[f"CI2a12-{2 * i + 2}"] = max(av_a[i])
        out[f"CI2a21-{i + 1}"] = _avg(rap2[i])
        out[f"CI2a22-{2 * i + 1}"] = min(rap2[i])
        out[f"CI2a22-{2 * i + 2}"] = max(rap2[i])
        out[f"CI2a23-{i + 1}"] = _pop_std(rap2[i])
        out[f"CI2a31-{i + 1}"] = _avg(dra1[i])
        out[f"CI2a32-{2 * i + 1}"] = min(dra1[i])
        out[f"CI2a32-{2 * i + 2}"] = max(dra1[i])
        out[f"CI2a33-{i + 1}"] = _pop_std(dra1[i])
        out[f"CI3a11-{i + 1}"] = _avg(av_d[i])
        out[f"CI3a12-{2 * i + 1}"] = min(av_d[i])
        out[f"CI3a12-{2 * i + 2}"] = max(av_d[i])
        out[f"CI3a31-{i + 1}"] = _avg(dra2[i])
        out[f"CI3a32-{2 * i + 1}"] = min(dra2[i])
        out[f"CI3a32-{2 * i + 2}"] = max(dra2[i])
        out[f"CI3a33-{i + 1}"] = _pop_std(dra2[i])
    for i in (0, 1, 2):
        out[f"CI3a21-{i + 1}"] = _avg(rav1[i])
        out[f"CI3a22-{2 * i + 1}"] = min(rav1[i])
        out[f"CI3a22-{2 * i + 2}"] = max(rav1[i])
        out[f"CI3a23-{i + 1}"] = _pop_std(rav1[i])
    for base, series in (("CI4a1", ra3[0]), ("CI4a2", ra3[1])):
        out[f"{base}1"] = _avg(series)
        out[f"{base}2-1"] = min(series)
        out[f"{base}2-2"] = max(series)
        out[f"{base}3"] = _pop_std(series)
    for base, series in (("CI4a3", ra4[0]), ("CI4a4", ra4[1])):
        out[f"{base}1"] = _avg(series)
        out[f"{base}2-1"] = min(series)
        out[f"{base}2-2"] = max(series)
        out[f"{base}3"] = _pop_std(series)
    return out


def compute_si(g: TxGraph, g_merged: TxGraph, ads: str) -> dict[str, float]:
    """The full 132-value statistical feature map, in manifest order.

    Base features come from the raw multigraph; -R features re-evaluate the
    amount/degree families on the merged-edge graph.
    """
    base = {}
    base.update(compute_pai(g, ads))
    base.update(compute_pdi(g, ads))
    base.update(compute_pti(g, ads))
    base.update(compute_ci(g, ads))
    merged = {}
    merged.update(compute_pai(g_merged, ads))
    merged.update(compute_pdi(g_merged, ads))
    values: dict[str, float] = {}
    for fid in SI_IDS:
        if "-R" in fid:
            plain = fid.replace("-R", "-", 1) if not fid.endswith("-R") else fid[:-2]
            values[fid] = merged[plain]
        else:
            values[fid] = base[fid]
    return values
