"""Frame construction: differential encoders and block power allocation.

A frame is one reference block (identity, one antenna per slot) followed by
K information-carrying symbol vectors. Power allocation is realized as
per-slot-type noise variances with unit-amplitude transmitted symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import TYPE_CHECKING

import numpy as np

from .modem import Constellation, map_bits
from .spatial import TacTable, bits_to_tac

if TYPE_CHECKING:  # pragma: no cover
    from .engine import SystemConfig

__all__ = [
    "SymbolVector",
    "TxFrame",
    "PowerAllocation",
    "encode_dgsm",
    "encode_dmgsm",
    "encode_gdsm",
    "build_frame",
    "make_power_allocation",
]


@dataclass
class SymbolVector:
    """Length-mt transmit vector with non-zeros on the active antennas (1-based)."""

    entries: np.ndarray
    active: tuple


@dataclass
class TxFrame:
    """Reference block (mt x mt) followed by the normal symbol vectors."""

    reference: np.ndarray
    normals: list
    bits: str


@dataclass
class PowerAllocation:
    """Per-slot-type noise variances for a frame of B = 1 + K/mt blocks."""

    rho_bar: float
    blocks: int
    sigma2_r: float
    sigma2_n: float
    enabled: bool


def make_power_allocation(rho_bar: float, blocks: int, enabled: bool) -> PowerAllocation:
    """Split the frame power budget between reference and normal slots.

    Enabled: sigma_r^2 = (1+sqrt(B-1))/(B*rho), sigma_n^2 = (B-1+sqrt(B-1))/(B*rho),
    so the per-slot SNRs satisfy rho_r + (B-1)*rho_n = B*rho. Disabled: both 1/rho.
    """
    if rho_bar <= 0:
        raise ValueError(f"rho_bar must be positive, got {rho_bar}")
    if enabled:
        if blocks < 2:
            raise ValueError(f"need at least 2 blocks per frame, got {blocks}")
        root = sqrt(blocks - 1.0)
        sigma2_r = (1.0 + root) / (blocks * rho_bar)
        sigma2_n = (blocks - 1.0 + root) / (blocks * rho_bar)
    else:
        sigma2_r = sigma2_n = 1.0 / rho_bar
    return PowerAllocation(rho_bar, blocks, sigma2_r, sigma2_n, enabled)


def encode_dgsm(bits: str, tac: TacTable, const: Constellation,
                scale: float = 1.0) -> SymbolVector:
    """Map TAC bits + one symbol label to a vector repeating the symbol on the TAC."""
    need = tac.bits_per_tac + const.bits_per_symbol
    if len(bits) != need:
        raise ValueError(f"expected {need} bits, got {len(bits)}")
    combo = bits_to_tac(tac, bits[:tac.bits_per_tac])
    x = map_bits(const, bits[tac.bits_per_tac:])
    entries = np.zeros(tac.mt, dtype=complex)
    for ant in combo:
        entries[ant - 1] = scale * x
    return SymbolVector(entries, combo)


def encode_dmgsm(bits: str, tac: TacTable, const: Constellation,
                 scale: float = 1.0) -> SymbolVector:
    """Map TAC bits + mu symbol labels to distinct symbols on the TAC antennas."""
    b = const.bits_per_symbol
    need = tac.bits_per_tac + tac.mu * b
    if len(bits) != need:
        raise ValueError(f"expected {need} bits, got {len(bits)}")
    combo = bits_to_tac(tac, bits[:tac.bits_per_tac])
    entries = np.zeros(tac.mt, dtype=complex)
    for i, ant in enumerate(combo):
        chunk = bits[tac.bits_per_tac + i * b: tac.bits_per_tac + (i + 1) * b]
        entries[ant - 1] = scale * map_bits(const, chunk)
    return SymbolVector(entries, combo)


def encode_gdsm(bits: str, mt: int, const: Constellation,
                scale: float = 1.0) -> SymbolVector:
    """Map antenna-index bits + one symbol label to a single-active-antenna vector."""
    ant_bits = mt.bit_length() - 1
    need = ant_bits + const.bits_per_symbol
    if len(bits) != need:
        raise ValueError(f"expected {need} bits, got {len(bits)}")
    ant = (int(bits[:ant_bits], 2) if ant_bits else 0) + 1
    entries = np.zeros(mt, dtype=complex)
    entries[ant - 1] = scale * map_bits(const, bits[ant_bits:])
    return SymbolVector(entries, (ant,))


def build_frame(bits: str, cfg: "SystemConfig") -> TxFrame:
    """Assemble the reference block and K encoded normal vectors from a bit string."""
    from .engine import bits_per_vector, frame_workspace  # deferred to avoid a cycle

    ws = frame_workspace(cfg)
    m = bits_per_vector(cfg)
    if len(bits) != cfg.k * m:
        raise ValueError(f"expected {cfg.k * m} bits for k={cfg.k}, got {len(bits)}")
    normals = [ws.encode(bits[i * m:(i + 1) * m]) for i in range(cfg.k)]
    reference = np.eye(cfg.mt, dtype=complex)  # s^r = 1 on the diagonal
    return TxFrame(reference, normals, bits)
