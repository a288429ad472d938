"""Address label table: 13 behavior categories plus annotation strength.

The CSV format is `address,label_id,strength` with a header row. Label ids
are fixed small integers; strength is "SA" (strongly annotated: the address
is directly known to act as the category) or "WA" (weakly annotated: the
behavior is inferred, e.g. one hop from a known actor).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import ValidationError

LABEL_NAMES: dict[int, str] = {
    0: "blackmail",
    1: "cyber-security",
    2: "darknet-market",
    3: "centralized-exchange",
    4: "p2p-financial-infrastructure",
    5: "p2p-financial-service",
    6: "gambling",
    7: "government-blacklist",
    8: "money-laundering",
    9: "ponzi-scheme",
    10: "mining-pool",
    11: "tumbler",
    12: "individual-wallet",
}

STRENGTHS = ("SA", "WA")


@dataclass(frozen=True)
class LabeledAddress:
    address: str
    label_id: int
    strength: str


def read_labels(path) -> list[LabeledAddress]:
    """Read a label CSV, preserving row order. Duplicate addresses are an error."""
    rows: list[LabeledAddress] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["address", "label_id", "strength"]:
            raise ValidationError(
                f"{path}: expected header 'address,label_id,strength'"
            )
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"{path} line {i}: expected 3 fields")
            address, label_str, strength = (field.strip() for field in row)
            if not address:
                raise ValidationError(f"{path} line {i}: empty address")
            if address in seen:
                raise ValidationError(f"{path} line {i}: duplicate address {address}")
            seen.add(address)
            try:
                label_id = int(label_str)
            except ValueError:
                raise ValidationError(
                    f"{path} line {i}: label_id must be an integer"
                ) from None
            if label_id not in LABEL_NAMES:
                raise ValidationError(
                    f"{path} line {i}: unknown label_id {label_id}"
                )
            if strength not in STRENGTHS:
                raise ValidationError(
                    f"{path} line {i}: strength must be one of {STRENGTHS}"
                )
            rows.append(LabeledAddress(address, label_id, strength))
    return rows


def write_labels(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["address", "label_id", "strength"])
        for row in rows:
            writer.writerow([row.address, row.label_id, row.strength])
