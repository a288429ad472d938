"""Structure-preserving k-hop subgraph extraction around an address node.

The extractor walks the graph's *undirected* view breadth-first from a seed
address, admitting nodes in discovery order up to `max_depth` hops and a
`max_nodes` cap, then copies every parallel directed edge between admitted
pairs with its original direction and attributes.

Pinned semantics (all observable, all deterministic):
  * Neighbors are visited in adjacency insertion order (block order).
  * A node at distance d is admitted only while d <= max_depth; nodes at
    exactly max_depth are leaves and expand no further edges.
  * Each unordered node pair is processed once, when first reached from an
    expanding node f: all parallel edges f->t are copied in insertion
    order, then all t->f.
  * If admitting a node would exceed max_nodes, the walk stops immediately;
    the partially built subgraph (with every edge copied so far) is
    returned with `truncated` set.
  * Local ids are assigned by first admission, so the origin is local 0.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .errors import UnknownNodeError
from .graph import ADDRESS, TX, TxGraph


@dataclass(frozen=True)
class GkParams:
    max_depth: int = 4
    max_nodes: int = 3000

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")


@dataclass
class KHopSubgraph:
    """Renumbered local graph around an origin address.

    Local node ids are dense, assigned in admission order (origin = 0).
    `node_global` maps local -> original id in the source graph.
    """

    origin: int
    node_kind: list[int]
    node_name: list[str]
    node_global: list[int]
    node_dist: list[int]
    edge_src: list[int] = field(default_factory=list)
    edge_dst: list[int] = field(default_factory=list)
    edge_amount: list[int] = field(default_factory=list)
    edge_ts: list[int] = field(default_factory=list)
    edge_height: list[int] = field(default_factory=list)
    truncated: bool = False

    @property
    def node_count(self) -> int:
        return len(self.node_kind)

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    @property
    def n_addresses(self) -> int:
        return sum(1 for k in self.node_kind if k == ADDRESS)

    @property
    def n_transactions(self) -> int:
        return sum(1 for k in self.node_kind if k == TX)

    @property
    def max_dist(self) -> int:
        return max(self.node_dist) if self.node_dist else 0


def gk_generate(g: TxGraph, address: str, params: GkParams = GkParams()) -> KHopSubgraph:
    """Extract the k-hop subgraph around `address` (see module docstring)."""
    return gk_from_node(g, g.address_id(address), params)


def gk_from_node(g: TxGraph, seed: int, params: GkParams) -> KHopSubgraph:
    g._check_node(seed)
    k, cap = params.max_depth, params.max_nodes
    local: dict[int, int] = {seed: 0}
    order: list[int] = [seed]
    dist: dict[int, int] = {seed: 0}
    processed: set[tuple[int, int]] = set()
    copied: list[int] = []
    truncated = False

    queue: deque[int] = deque([seed])
    while queue:
        f = queue.popleft()
        if dist[f] >= k:
            continue
        stop = False
        for eid in g.inc_edges[f]:
            s = g.edge_src[eid]
            t = g.edge_dst[eid] if s == f else s
            if t not in local:
                if len(order) + 1 > cap:
                    truncated = True
                    stop = True
                    break
                dist[t] = dist[f] + 1
                local[t] = len(order)
                order.append(t)
                queue.append(t)
            pair = (f, t) if f < t else (t, f)
            if pair not in processed:
                processed.add(pair)
                for e2 in g.out_edges[f]:
                    if g.edge_dst[e2] == t:
                        copied.append(e2)
                for e2 in g.out_edges[t]:
                    if g.edge_dst[e2] == f:
                        copied.append(e2)
        if stop:
            break

    sub = KHopSubgraph(
        origin=0,
        node_kind=[g.node_kind[n] for n in order],
        node_name=[g.node_name[n] for n in order],
        node_global=order,
        node_dist=[dist[n] for n in order],
        truncated=truncated,
    )
    for eid in copied:
        sub.edge_src.append(local[g.edge_src[eid]])
        sub.edge_dst.append(local[g.edge_dst[eid]])
        sub.edge_amount.append(g.edge_amount[eid])
        sub.edge_ts.append(g.edge_ts[eid])
        sub.edge_height.append(g.edge_height[eid])
    return sub


def gk_batch(
    g: TxGraph,
    addresses: list[str],
    params: GkParams = GkParams(),
    parallelism: int = 1,
) -> list[KHopSubgraph]:
    """gk_generate over many seeds; output order matches input order and is
    identical for every parallelism level (workers only change scheduling)."""
    seeds = []
    for address in addresses:
        try:
            seeds.append(g.address_id(address))
        except UnknownNodeError:
            raise UnknownNodeError(f"seed {address!r} not in graph") from None
    if parallelism <= 1 or len(seeds) <= 1:
        return [gk_from_node(g, s, params) for s in seeds]
    from .parallel import map_indexed  # local import: avoids cycle at import time

    return map_indexed(
        _gk_worker, [(s, params) for s in seeds], g, parallelism
    )


def _gk_worker(g: TxGraph, task) -> KHopSubgraph:
    seed, params = task
    return gk_from_node(g, seed, params)


def subgraph_to_json(sub: KHopSubgraph) -> str:
    """Canonical JSON document: node table plus directed edge list."""
    kind_name = {ADDRESS: "address", TX: "transaction"}
    obj = {
        "origin": sub.origin,
        "truncated": sub.truncated,
        "max_dist": sub.max_dist,
        "address_nodes": sub.n_addresses,
        "transaction_nodes": sub.n_transactions,
        "nodes": [
            {
                "id": i,
                "kind": kind_name[sub.node_kind[i]],
                "name": sub.node_name[i],
                "dist": sub.node_dist[i],
                "global_id": sub.node_global[i],
            }
            for i in range(sub.node_count)
        ],
        "edges": [
            {
                "src": sub.edge_src[i],
                "dst": sub.edge_dst[i],
                "amount_sats": sub.edge_amount[i],
                "timestamp": sub.edge_ts[i],
                "block_height": sub.edge_height[i],
            }
            for i in range(sub.edge_count)
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)
