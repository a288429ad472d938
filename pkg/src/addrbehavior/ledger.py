"""Canonical block ledger: NDJSON parsing, validation, and serialization.

One block per line:

    {"height":u64,"timestamp":u64,"txs":[{"txid":str,"is_coinbase":bool,
     "inputs":[{"address":str,"value_sats":u64}],
     "outputs":[{"address":str,"value_sats":u64}]}]}

Amounts are integer satoshi throughout so parsing and re-serialization are
bit-exact; conversion to BTC happens only when features are emitted.
Inputs carry resolved addresses and values directly -- there is no prev-txid
resolution here. Zero-value outputs (OP_RETURN-like) are accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class TxEntry:
    """One input or output slot: a resolved address and its satoshi value."""

    address: str
    value_sats: int


@dataclass(frozen=True)
class RawTx:
    txid: str
    is_coinbase: bool
    inputs: tuple[TxEntry, ...]
    outputs: tuple[TxEntry, ...]


@dataclass(frozen=True)
class RawBlock:
    height: int
    timestamp: int
    txs: tuple[RawTx, ...] = field(default_factory=tuple)


def _entry_from_obj(obj, what, height, line):
    if not isinstance(obj, dict):
        raise ParseError(f"{what} must be an object", line)
    try:
        address = obj["address"]
        value = obj["value_sats"]
    except KeyError as exc:
        raise ParseError(f"{what} missing key {exc}", line) from None
    if not isinstance(address, str) or not address:
        raise ValidationError(
            f"block {height}: {what}.address must be a non-empty string"
        )
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValidationError(
            f"block {height}: {what}.value_sats must be a non-negative integer"
        )
    return TxEntry(address=address, value_sats=value)


def _tx_from_obj(obj, height, line):
    if not isinstance(obj, dict):
        raise ParseError("tx must be an object", line)
    for key in ("txid", "is_coinbase", "inputs", "outputs"):
        if key not in obj:
            raise ParseError(f"tx missing key '{key}'", line)
    txid = obj["txid"]
    if not isinstance(txid, str) or not txid:
        raise ValidationError(f"block {height}: txid must be a non-empty string")
    is_coinbase = obj["is_coinbase"]
    if not isinstance(is_coinbase, bool):
        raise ParseError(f"tx {txid}: is_coinbase must be a boolean", line)
    inputs = tuple(
        _entry_from_obj(o, f"tx {txid} input", height, line) for o in obj["inputs"]
    )
    outputs = tuple(
        _entry_from_obj(o, f"tx {txid} output", height, line) for o in obj["outputs"]
    )
    if is_coinbase and inputs:
        raise ValidationError(f"block {height}: coinbase tx {txid} has inputs")
    if not is_coinbase and not inputs:
        raise ValidationError(f"block {height}: non-coinbase tx {txid} has no inputs")
    if not outputs:
        raise ValidationError(f"block {height}: tx {txid} has no outputs")
    return RawTx(txid=txid, is_coinbase=is_coinbase, inputs=inputs, outputs=outputs)


def parse_ledger(source: IO[bytes] | IO[str]) -> list[RawBlock]:
    """Parse an NDJSON block stream, enforcing all ledger invariants.

    Raises ParseError (with the 1-based line number) for malformed JSON or
    missing keys, ValidationError for invariant violations: non-increasing
    heights, timestamp <= 0, coinbase/inputs mismatch, empty outputs,
    negative values, or a txid seen twice anywhere in the stream.
    """
    blocks: list[RawBlock] = []
    seen_txids: set[str] = set()
    last_height = None
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict):
            raise ParseError("block must be an object", lineno)
        for key in ("height", "timestamp", "txs"):
            if key not in obj:
                raise ParseError(f"block missing key '{key}'", lineno)
        height = obj["height"]
        timestamp = obj["timestamp"]
        if not isinstance(height, int) or isinstance(height, bool) or height < 0:
            raise ValidationError(f"block at line {lineno}: height must be >= 0")
        if not isinstance(timestamp, int) or isinstance(timestamp, bool) or timestamp <= 0:
            raise ValidationError(f"block {height}: timestamp must be > 0")
        if last_height is not None and height <= last_height:
            raise ValidationError(
                f"block {height}: heights must strictly increase (previous {last_height})"
            )
        last_height = height
        txs = []
        for tx_obj in obj["txs"]:
            tx = _tx_from_obj(tx_obj, height, lineno)
            if tx.txid in seen_txids:
                raise ValidationError(f"block {height}: duplicate txid {tx.txid}")
            seen_txids.add(tx.txid)
            txs.append(tx)
        blocks.append(RawBlock(height=height, timestamp=timestamp, txs=tuple(txs)))
    return blocks


def parse_ledger_file(path) -> list[RawBlock]:
    with open(path, "rb") as fh:
        return parse_ledger(fh)


def _entry_obj(e: TxEntry):
    return {"address": e.address, "value_sats": e.value_sats}


def block_to_json(block: RawBlock) -> str:
    """Canonical single-line JSON for one block (fixed key order, no spaces)."""
    obj = {
        "height": block.height,
        "timestamp": block.timestamp,
        "txs": [
            {
                "txid": tx.txid,
                "is_coinbase": tx.is_coinbase,
                "inputs": [_entry_obj(e) for e in tx.inputs],
                "outputs": [_entry_obj(e) for e in tx.outputs],
            }
            for tx in block.txs
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def serialize_ledger(blocks: Iterable[RawBlock]) -> bytes:
    """Canonical NDJSON bytes; parse_ledger(serialize_ledger(b)) == b."""
    lines = [block_to_json(b) for b in blocks]
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_ledger(blocks: Iterable[RawBlock], path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_ledger(blocks))
