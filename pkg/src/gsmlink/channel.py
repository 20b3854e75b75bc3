"""Quasi-static Rayleigh channel and per-slot-type AWGN."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .txframe import PowerAllocation, TxFrame

__all__ = ["RxFrame", "draw_channel", "crandn", "transmit"]


@dataclass
class RxFrame:
    """Received reference block (mr x mt) and normal slots (mr x K)."""

    yr: np.ndarray
    yn: np.ndarray


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """CN(0,1) samples: two independent real normals with variance 1/2 each."""
    return sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_channel(mr: int, mt: int, rng: np.random.Generator) -> np.ndarray:
    """One quasi-static channel realization with i.i.d. CN(0,1) entries."""
    if mr < 1 or mt < 1:
        raise ValueError(f"need mr >= 1 and mt >= 1, got mr={mr}, mt={mt}")
    return crandn(rng, mr, mt)


def transmit(frame: TxFrame, h: np.ndarray, pa: PowerAllocation,
             rng: np.random.Generator) -> RxFrame:
    """Pass a frame through h, adding AWGN at the slot-type noise variance."""
    mr, mt = h.shape
    if frame.reference.shape != (mt, mt):
        raise ValueError(
            f"reference block is {frame.reference.shape}, channel expects mt={mt}")
    yr = h @ frame.reference
    if pa.sigma2_r > 0:
        yr = yr + sqrt(pa.sigma2_r) * crandn(rng, mr, mt)
    k = len(frame.normals)
    s = np.zeros((mt, k), dtype=complex)
    for i, vec in enumerate(frame.normals):
        s[:, i] = vec.entries
    yn = h @ s
    if pa.sigma2_n > 0 and k:
        yn = yn + sqrt(pa.sigma2_n) * crandn(rng, mr, k)
    return RxFrame(yr, yn)
