"""Shared fixtures: a small hand-traceable ledger and randomized generators.

The hand ledger is three blocks over three days:

    block 100 @ T0:          tx1 (coinbase) -> A: 50 BTC
    block 101 @ T0+1d:       tx2: A(50) -> B: 30, C: 20
    block 102 @ T0+2d+1h:    tx3 (coinbase) -> D: 6.25
                             tx4: B(30) -> C: 10, C: 10, B: 10

tx4 pays C twice in one transaction (parallel edges) and sends change
back to B (a cycle through a transaction node). Every expected value in
the hand-computed tests traces back to this picture.
"""

from __future__ import annotations

import random

from addrbehavior.graph import TxGraph, build_graph
from addrbehavior.ledger import RawBlock, RawTx, TxEntry
from addrbehavior.subgraph import GkParams, KHopSubgraph, gk_generate

T0 = 1_600_000_000
DAY = 86_400
BTC = 100_000_000


def fixture_blocks() -> list[RawBlock]:
    return [
        RawBlock(
            100,
            T0,
            (RawTx("tx1", True, (), (TxEntry("A", 50 * BTC),)),),
        ),
        RawBlock(
            101,
            T0 + DAY,
            (
                RawTx(
                    "tx2",
                    False,
                    (TxEntry("A", 50 * BTC),),
                    (TxEntry("B", 30 * BTC), TxEntry("C", 20 * BTC)),
                ),
            ),
        ),
        RawBlock(
            102,
            T0 + 2 * DAY + 3600,
            (
                RawTx("tx3", True, (), (TxEntry("D", 625_000_000),)),
                RawTx(
                    "tx4",
                    False,
                    (TxEntry("B", 30 * BTC),),
                    (
                        TxEntry("C", 10 * BTC),
                        TxEntry("C", 10 * BTC),
                        TxEntry("B", 10 * BTC),
                    ),
                ),
            ),
        ),
    ]


def fixture_graph() -> TxGraph:
    return build_graph(fixture_blocks())


def random_ledger(
    rng: random.Random,
    n_blocks: int | None = None,
    n_addresses: int | None = None,
    max_txs_per_block: int = 5,
) -> list[RawBlock]:
    """A random valid ledger: unique txids, increasing heights, sats >= 0."""
    n_blocks = n_blocks if n_blocks is not None else rng.randint(1, 6)
    n_addresses = n_addresses if n_addresses is not None else rng.randint(2, 12)
    addrs = [f"a{i}" for i in range(n_addresses)]
    height = rng.randint(0, 700_000)
    ts = rng.randint(1_000_000, 2_000_000_000)
    blocks = []
    seq = 0
    for _ in range(n_blocks):
        txs = []
        for _ in range(rng.randint(1, max_txs_per_block)):
            coinbase = rng.random() < 0.2
            inputs = ()
            if not coinbase:
                inputs = tuple(
                    TxEntry(rng.choice(addrs), rng.randint(0, 10**10))
                    for _ in range(rng.randint(1, 3))
                )
            outputs = tuple(
                TxEntry(rng.choice(addrs), rng.randint(0, 10**10))
                for _ in range(rng.randint(1, 3))
            )
            txs.append(RawTx(f"x{seq}", coinbase, inputs, outputs))
            seq += 1
        blocks.append(RawBlock(height, ts, tuple(txs)))
        height += rng.randint(1, 3)
        ts = max(1, ts + rng.randint(-3600, 2 * DAY))
    return blocks


def random_graph(rng: random.Random, **kwargs) -> TxGraph:
    return build_graph(random_ledger(rng, **kwargs))


def random_subgraph(rng: random.Random, max_depth: int = 4) -> KHopSubgraph:
    """A k-hop subgraph around a random address of a random graph."""
    g = random_graph(rng)
    names = list(g.addr_ids)
    address = rng.choice(names)
    params = GkParams(
        max_depth=rng.randint(1, max_depth),
        max_nodes=rng.choice([4, 8, 3000]),
    )
    return gk_generate(g, address, params)
