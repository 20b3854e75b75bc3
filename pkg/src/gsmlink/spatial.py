"""Transmit antenna combination (TAC) tables for generalized spatial modulation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

__all__ = ["TacTable", "build_tac_table", "tac_to_bits", "bits_to_tac"]


@dataclass(frozen=True)
class TacTable:
    """Power-of-two subset of antenna combinations, lexicographic, 1-based."""

    mt: int
    mu: int
    combos: tuple
    bits_per_tac: int


def build_tac_table(mt: int, mu: int) -> TacTable:
    """Keep the first 2^floor(log2(C(mt, mu))) combinations in lexicographic order."""
    if mu < 1 or mu > mt:
        raise ValueError(f"need 1 <= mu <= mt, got mu={mu}, mt={mt}")
    n_comb = comb(mt, mu)
    bits = n_comb.bit_length() - 1
    kept = 1 << bits
    combos = tuple(itertools.islice(
        itertools.combinations(range(1, mt + 1), mu), kept))
    return TacTable(mt, mu, combos, bits)


def tac_to_bits(table: TacTable, combo: tuple) -> str:
    """Return the bit label of a combination in the kept subset."""
    try:
        idx = table.combos.index(tuple(combo))
    except ValueError:
        raise ValueError(f"combination {tuple(combo)} is not in the kept subset") from None
    return format(idx, f"0{table.bits_per_tac}b") if table.bits_per_tac else ""


def bits_to_tac(table: TacTable, bits: str) -> tuple:
    """Return the combination selected by a bit label."""
    if len(bits) != table.bits_per_tac or any(c not in "01" for c in bits):
        raise ValueError(f"expected {table.bits_per_tac} bits, got {bits!r}")
    idx = int(bits, 2) if bits else 0
    return table.combos[idx]
