"""Deterministic synthetic ledger generator with labeled behavior archetypes.

Three archetypes, each generated as its own disconnected community around a
focal (labeled) address:

  * hub            -- many one-off payers deposit into one address, which
                      later pays out to a few winners (fan-in star);
                      labeled ponzi-scheme.
  * one-shot       -- receives exactly once and forwards exactly once
                      (a short chain); labeled darknet-market.
  * periodic-payer -- funded by coinbase, then pays member batches on a
                      roughly daily cadence (fan-out star); labeled
                      mining-pool.

Inputs spend directly from fresh payer addresses (no UTXO resolution), so
communities stay small and subgraph extraction around any labeled address
never leaves its community.

Instances are generated round-robin over the requested archetypes until the
tx budget (blocks * txs_per_block) is reached; leftover budget is filled
with unlabeled single-tx background payments so the block count is exact.
All randomness flows from one seeded generator, making output byte-stable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError
from .labels import LabeledAddress
from .ledger import RawBlock, RawTx, TxEntry

ARCHETYPES = ("hub", "one-shot", "periodic-payer")
ARCHETYPE_LABELS = {"hub": 9, "one-shot": 2, "periodic-payer": 10}


@dataclass(frozen=True)
class SynthConfig:
    archetypes: tuple[str, ...]
    blocks: int
    seed: int
    txs_per_block: int = 16
    start_time: int = 1_650_000_000
    start_height: int = 100_000

    def __post_init__(self):
        if not self.archetypes:
            raise ConfigError("at least one archetype is required")
        unknown = [a for a in self.archetypes if a not in ARCHETYPES]
        if unknown:
            raise ConfigError(f"unknown archetypes {unknown}; valid: {ARCHETYPES}")
        if self.blocks < 1:
            raise ConfigError("blocks must be >= 1")
        if self.txs_per_block < 1:
            raise ConfigError("txs_per_block must be >= 1")


@dataclass
class _PendingTx:
    ts: int
    seq: int
    tx: RawTx


def _amount(rng: random.Random) -> int:
    # 0.05 .. 5 BTC, the shared range for every archetype so amounts alone
    # do not separate the classes.
    return rng.randint(5_000_000, 500_000_000)


def _instance_start(rng: random.Random, cfg: SynthConfig) -> int:
    return cfg.start_time + rng.randrange(0, 300) * 86400 + rng.randrange(0, 86400)


def _gen_hub(rng, cfg, idx, emit):
    hub = f"hub{idx:05d}"
    t = _instance_start(rng, cfg)
    deposits = rng.randint(8, 14)
    for j in range(deposits):
        t += rng.randint(3600, 2 * 86400)
        amt = _amount(rng)
        emit(t, False, [TxEntry(f"{hub}p{j}", amt)], [TxEntry(hub, amt)])
    for j in range(rng.randint(1, 3)):
        t += rng.randint(3600, 86400)
        amt = _amount(rng)
        winners = rng.randint(1, 2)
        outs = []
        remaining = amt
        for w in range(winners):
            part = remaining if w == winners - 1 else rng.randint(1, remaining - 1)
            outs.append(TxEntry(f"{hub}w{j}_{w}", part))
            remaining -= part
        emit(t, False, [TxEntry(hub, amt)], outs)
    return hub


def _gen_one_shot(rng, cfg, idx, emit):
    target = f"one{idx:05d}"
    t = _instance_start(rng, cfg)
    amt = _amount(rng)
    emit(t, False, [TxEntry(f"{target}p", amt)], [TxEntry(target, amt)])
    t += rng.randint(3600, 3 * 86400)
    spend = rng.randint(1, amt)
    emit(t, False, [TxEntry(target, spend)], [TxEntry(f"{target}s", spend)])
    return target


def _gen_periodic(rng, cfg, idx, emit):
    pool = f"pool{idx:05d}"
    t = _instance_start(rng, cfg)
    for _ in range(rng.randint(1, 2)):
        emit(t, True, [], [TxEntry(pool, _amount(rng))])
        t += rng.randint(1800, 7200)
    for r in range(rng.randint(6, 10)):
        t += 86400 + rng.randint(-7200, 7200)
        amt = _amount(rng)
        members = rng.randint(3, 6)
        outs = []
        remaining = amt
        for m in range(members):
            part = remaining if m == members - 1 else max(1, remaining // (members - m))
            outs.append(TxEntry(f"{pool}m{r}_{m}", part))
            remaining -= part
        emit(t, False, [TxEntry(pool, amt)], outs)
    return pool


_GENERATORS = {
    "hub": _gen_hub,
    "one-shot": _gen_one_shot,
    "periodic-payer": _gen_periodic,
}


def synth_ledger(cfg: SynthConfig) -> tuple[list[RawBlock], list[LabeledAddress]]:
    """Generate (blocks, labels); deterministic for a fixed config."""
    rng = random.Random(cfg.seed)
    budget = cfg.blocks * cfg.txs_per_block
    pending: list[_PendingTx] = []
    labels: list[LabeledAddress] = []
    seq = 0

    def make_emitter(batch):
        def emit(ts, is_coinbase, inputs, outputs):
            nonlocal seq
            tx = RawTx(
                txid=f"t{seq:07d}",
                is_coinbase=is_coinbase,
                inputs=tuple(inputs),
                outputs=tuple(outputs),
            )
            batch.append(_PendingTx(ts=ts, seq=seq, tx=tx))
            seq += 1

        return emit

    idx = 0
    while True:
        archetype = cfg.archetypes[idx % len(cfg.archetypes)]
        batch: list[_PendingTx] = []
        focal = _GENERATORS[archetype](rng, cfg, idx, make_emitter(batch))
        if len(pending) + len(batch) > budget:
            seq -= len(batch)  # the partial instance is discarded entirely
            break
        pending.extend(batch)
        strength = "SA" if rng.random() < 0.85 else "WA"
        labels.append(LabeledAddress(focal, ARCHETYPE_LABELS[archetype], strength))
        idx += 1

    fill = 0
    while len(pending) < budget:
        batch = []
        emit = make_emitter(batch)
        t = _instance_start(rng, cfg)
        amt = _amount(rng)
        emit(t, False, [TxEntry(f"bg{fill:05d}", amt)], [TxEntry(f"bg{fill:05d}x", amt)])
        pending.extend(batch)
        fill += 1

    pending.sort(key=lambda p: (p.ts, p.seq))
    blocks: list[RawBlock] = []
    for b in range(cfg.blocks):
        chunk = pending[b * cfg.txs_per_block : (b + 1) * cfg.txs_per_block]
        blocks.append(
            RawBlock(
                height=cfg.start_height + b,
                timestamp=chunk[0].ts,
                txs=tuple(p.tx for p in chunk),
            )
        )
    return blocks, labels
