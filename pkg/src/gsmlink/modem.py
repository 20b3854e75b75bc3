"""Gray-labeled PSK/QAM constellations with unit mean power."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Constellation", "build_constellation", "map_bits", "demap_point"]

_KINDS = ("psk", "qam")

# Rectangular grids for non-square orders: (I levels, Q levels).
_QAM_GRIDS = {4: (2, 2), 8: (4, 2), 16: (4, 4), 32: (8, 4), 64: (8, 8)}


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _gray_inverse(g: int) -> int:
    k = 0
    while g:
        k ^= g
        g >>= 1
    return k


@dataclass(frozen=True)
class Constellation:
    """Unit-mean-power constellation; points[i] carries the label value i."""

    kind: str
    order: int
    points: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1


def build_constellation(kind: str, order: int) -> Constellation:
    """Build an M-PSK or M-QAM constellation indexed by label value.

    PSK places point k at angle 2*pi*k/M with zero offset and label gray(k).
    QAM uses the odd-integer grid (4x2 and 8x4 for the rectangular orders),
    per-axis Gray labels, scaled to unit mean power.
    """
    kind = kind.lower()
    if kind not in _KINDS:
        raise ValueError(f"unknown constellation kind {kind!r}; expected psk or qam")
    if order < 2 or order & (order - 1):
        raise ValueError(f"constellation order must be a power of two >= 2, got {order}")

    if kind == "psk":
        # label value v sits at angle index gray_inverse(v)
        angles = 2.0 * np.pi * np.array(
            [_gray_inverse(v) for v in range(order)]) / order
        points = np.exp(1j * angles)
    else:
        if order < 4 or order not in _QAM_GRIDS:
            raise ValueError(f"unsupported qam order {order}")
        ni, nq = _QAM_GRIDS[order]
        bi = ni.bit_length() - 1
        bq = nq.bit_length() - 1
        mean_power = (np.mean((2 * np.arange(ni) - (ni - 1)) ** 2)
                      + np.mean((2 * np.arange(nq) - (nq - 1)) ** 2))
        scale = 1.0 / np.sqrt(mean_power)
        points = np.empty(order, dtype=complex)
        for v in range(order):
            vi, vq = v >> bq, v & (nq - 1)
            i_pos = _gray_inverse(vi)
            q_pos = _gray_inverse(vq)
            points[v] = scale * ((2 * i_pos - (ni - 1)) + 1j * (2 * q_pos - (nq - 1)))
    points.setflags(write=False)
    return Constellation(kind, order, points)


def map_bits(const: Constellation, bits: str) -> complex:
    """Map a bit string of length log2(M) to its constellation point."""
    b = const.bits_per_symbol
    if len(bits) != b or any(c not in "01" for c in bits):
        raise ValueError(f"expected {b} bits, got {bits!r}")
    return complex(const.points[int(bits, 2)])


def demap_point(const: Constellation, x: complex) -> str:
    """Return the label of the nearest point; ties go to the lowest label value."""
    d2 = np.abs(const.points - x) ** 2
    # points are stored in label order, so argmin's first match is the lowest label
    return format(int(np.argmin(d2)), f"0{const.bits_per_symbol}b")
