"""Directed heterogeneous multigraph of addresses and transactions.

Two node kinds: ADDRESS and TX. Every edge connects an address to a
transaction (spend, Ads->Tx) or a transaction to an address (receive,
Tx->Ads), carrying integer satoshi amount, the containing block's
timestamp, and the block height. Parallel edges are kept.

Node ids are dense integers assigned in first-seen order; per-node
adjacency lists hold edge ids in insertion order. Both orders are part of
the determinism contract: identical block streams produce identical
iteration order everywhere downstream (subgraph extraction, features).
Graphs are immutable once built.
"""

from __future__ import annotations

import struct
from typing import Iterable

from .errors import GraphBuildError, SnapshotError, UnknownNodeError
from .ledger import RawBlock

ADDRESS = 0
TX = 1

_DIRECTIONS = ("in", "out", "all")


class TxGraph:
    """Struct-of-arrays multigraph; build through build_graph()."""

    __slots__ = (
        "node_kind",
        "node_name",
        "node_coinbase",
        "addr_ids",
        "tx_ids",
        "edge_src",
        "edge_dst",
        "edge_amount",
        "edge_ts",
        "edge_height",
        "out_edges",
        "in_edges",
        "inc_edges",
    )

    def __init__(self):
        self.node_kind: list[int] = []
        self.node_name: list[str] = []
        self.node_coinbase: list[bool] = []
        self.addr_ids: dict[str, int] = {}
        self.tx_ids: dict[str, int] = {}
        self.edge_src: list[int] = []
        self.edge_dst: list[int] = []
        self.edge_amount: list[int] = []
        self.edge_ts: list[int] = []
        self.edge_height: list[int] = []
        self.out_edges: list[list[int]] = []
        self.in_edges: list[list[int]] = []
        # Edge ids touching each node, in global insertion order; this is
        # the neighbor iteration order for the undirected BFS view.
        self.inc_edges: list[list[int]] = []

    # -- construction helpers (module-internal) --

    def _new_node(self, kind: int, name: str, coinbase: bool = False) -> int:
        node = len(self.node_kind)
        self.node_kind.append(kind)
        self.node_name.append(name)
        self.node_coinbase.append(coinbase)
        self.out_edges.append([])
        self.in_edges.append([])
        self.inc_edges.append([])
        return node

    def _get_address(self, name: str) -> int:
        node = self.addr_ids.get(name)
        if node is None:
            node = self._new_node(ADDRESS, name)
            self.addr_ids[name] = node
        return node

    def _add_tx(self, txid: str, coinbase: bool) -> int:
        if txid in self.tx_ids:
            raise GraphBuildError(f"duplicate txid {txid}")
        node = self._new_node(TX, txid, coinbase)
        self.tx_ids[txid] = node
        return node

    def _add_edge(self, src: int, dst: int, amount: int, ts: int, height: int) -> int:
        eid = len(self.edge_src)
        self.edge_src.append(src)
        self.edge_dst.append(dst)
        self.edge_amount.append(amount)
        self.edge_ts.append(ts)
        self.edge_height.append(height)
        self.out_edges[src].append(eid)
        self.in_edges[dst].append(eid)
        self.inc_edges[src].append(eid)
        self.inc_edges[dst].append(eid)
        return eid

    # -- read API --

    @property
    def node_count(self) -> int:
        return len(self.node_kind)

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    def address_id(self, name: str) -> int:
        node = self.addr_ids.get(name)
        if node is None:
            raise UnknownNodeError(f"unknown address {name!r}")
        return node

    def tx_id(self, txid: str) -> int:
        node = self.tx_ids.get(txid)
        if node is None:
            raise UnknownNodeError(f"unknown transaction {txid!r}")
        return node

    def _check_node(self, node: int) -> None:
        if not 0 <= node < len(self.node_kind):
            raise UnknownNodeError(f"node id {node} out of range")

    def degree(self, node: int, direction: str = "all") -> int:
        """Edge count touching `node`; parallel edges all count."""
        self._check_node(node)
        if direction == "in":
            return len(self.in_edges[node])
        if direction == "out":
            return len(self.out_edges[node])
        if direction == "all":
            return len(self.in_edges[node]) + len(self.out_edges[node])
        raise ValueError(f"direction must be one of {_DIRECTIONS}")

    def edge_ids(self, node: int, direction: str) -> list[int]:
        """Edge ids in (timestamp, insertion) order for one direction."""
        self._check_node(node)
        if direction == "in":
            eids = self.in_edges[node]
        elif direction == "out":
            eids = self.out_edges[node]
        elif direction == "all":
            eids = sorted(self.in_edges[node] + self.out_edges[node])
        else:
            raise ValueError(f"direction must be one of {_DIRECTIONS}")
        return sorted(eids, key=lambda e: self.edge_ts[e])

    def amounts(self, node: int, direction: str = "all") -> list[tuple[int, int]]:
        """Time-ordered (amount_sats, timestamp) events for `node`."""
        return [
            (self.edge_amount[e], self.edge_ts[e])
            for e in self.edge_ids(node, direction)
        ]

    def is_bipartite_between_kinds(self) -> bool:
        kind = self.node_kind
        return all(
            kind[s] != kind[d] for s, d in zip(self.edge_src, self.edge_dst)
        )


def build_graph(blocks: Iterable[RawBlock]) -> TxGraph:
    """Build the multigraph: one node per tx and per distinct address, one
    directed edge per input (Ads->Tx) and per output (Tx->Ads)."""
    g = TxGraph()
    for block in blocks:
        ts, height = block.timestamp, block.height
        for tx in block.txs:
            tx_node = g._add_tx(tx.txid, tx.is_coinbase)
            for entry in tx.inputs:
                addr = g._get_address(entry.address)
                g._add_edge(addr, tx_node, entry.value_sats, ts, height)
            for entry in tx.outputs:
                addr = g._get_address(entry.address)
                g._add_edge(tx_node, addr, entry.value_sats, ts, height)
    return g


def merge_parallel_edges(g: TxGraph) -> TxGraph:
    """Collapse each ordered (src, dst) group of parallel edges into one edge
    whose amount is the group sum and whose timestamp/height come from the
    earliest constituent (ties: first inserted). Node ids are preserved;
    merged edges appear in first-occurrence order of their pair.
    """
    merged = TxGraph()
    merged.node_kind = list(g.node_kind)
    merged.node_name = list(g.node_name)
    merged.node_coinbase = list(g.node_coinbase)
    merged.addr_ids = dict(g.addr_ids)
    merged.tx_ids = dict(g.tx_ids)
    merged.out_edges = [[] for _ in range(g.node_count)]
    merged.in_edges = [[] for _ in range(g.node_count)]
    merged.inc_edges = [[] for _ in range(g.node_count)]

    order: list[tuple[int, int]] = []
    groups: dict[tuple[int, int], list[int]] = {}
    for eid in range(g.edge_count):
        key = (g.edge_src[eid], g.edge_dst[eid])
        bucket = groups.get(key)
        if bucket is None:
            groups[key] = [eid]
            order.append(key)
        else:
            bucket.append(eid)
    for key in order:
        eids = groups[key]
        total = sum(g.edge_amount[e] for e in eids)
        earliest = eids[0]
        for e in eids[1:]:
            if g.edge_ts[e] < g.edge_ts[earliest]:
                earliest = e
        merged._add_edge(
            key[0], key[1], total, g.edge_ts[earliest], g.edge_height[earliest]
        )
    return merged


def graph_stats(g: TxGraph) -> dict:
    n_addr = sum(1 for k in g.node_kind if k == ADDRESS)
    n_tx = g.node_count - n_addr
    stats = {
        "nodes": g.node_count,
        "address_nodes": n_addr,
        "transaction_nodes": n_tx,
        "edges": g.edge_count,
        "coinbase_transactions": sum(1 for c in g.node_coinbase if c),
        "total_amount_sats": sum(g.edge_amount),
    }
    if g.edge_count:
        stats["height_min"] = min(g.edge_height)
        stats["height_max"] = max(g.edge_height)
        stats["timestamp_min"] = min(g.edge_ts)
        stats["timestamp_max"] = max(g.edge_ts)
    return stats


# -- binary snapshot ---------------------------------------------------------
#
# Layout (all integers little-endian):
#   magic     8 bytes  b"TXGSNAP\x01"
#   n_nodes   u64
#   n_edges   u64
#   nodes     n_nodes * (kind u8, coinbase u8, name_len u32, name utf-8)
#   edges     n_edges * (src u64, dst u64, amount u64, ts u64, height u64)
#
# Node and edge order equal insertion order, so a round-trip reproduces the
# exact adjacency iteration order. The writer emits deterministic bytes.

_MAGIC = b"TXGSNAP\x01"
_NODE_FIXED = struct.Struct("<BBI")
_EDGE = struct.Struct("<QQQQQ")
_COUNTS = struct.Struct("<QQ")


def write_snapshot(g: TxGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_COUNTS.pack(g.node_count, g.edge_count))
        for node in range(g.node_count):
            name = g.node_name[node].encode("utf-8")
            fh.write(
                _NODE_FIXED.pack(
                    g.node_kind[node], int(g.node_coinbase[node]), len(name)
                )
            )
            fh.write(name)
        for eid in range(g.edge_count):
            fh.write(
                _EDGE.pack(
                    g.edge_src[eid],
                    g.edge_dst[eid],
                    g.edge_amount[eid],
                    g.edge_ts[eid],
                    g.edge_height[eid],
                )
            )


def read_snapshot(path) -> TxGraph:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[: len(_MAGIC)] != _MAGIC:
        raise SnapshotError(f"{path}: not a graph snapshot (bad magic/version)")
    off = len(_MAGIC)
    try:
        n_nodes, n_edges = _COUNTS.unpack_from(data, off)
        off += _COUNTS.size
        g = TxGraph()
        for _ in range(n_nodes):
            kind, coinbase, name_len = _NODE_FIXED.unpack_from(data, off)
            off += _NODE_FIXED.size
            name = data[off : off + name_len].decode("utf-8")
            if len(name.encode("utf-8")) != name_len:
                raise SnapshotError(f"{path}: truncated node name")
            off += name_len
            node = g._new_node(kind, name, bool(coinbase))
            if kind == ADDRESS:
                g.addr_ids[name] = node
            elif kind == TX:
                g.tx_ids[name] = node
            else:
                raise SnapshotError(f"{path}: unknown node kind {kind}")
        for _ in range(n_edges):
            src, dst, amount, ts, height = _EDGE.unpack_from(data, off)
            off += _EDGE.size
            if src >= n_nodes or dst >= n_nodes:
                raise SnapshotError(f"{path}: edge endpoint out of range")
            g._add_edge(src, dst, amount, ts, height)
    except struct.error:
        raise SnapshotError(f"{path}: truncated snapshot") from None
    if off != len(data):
        raise SnapshotError(f"{path}: trailing bytes after snapshot payload")
    return g
