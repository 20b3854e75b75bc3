"""Closed-form error, rate, and complexity analysis for the simulated schemes."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, log2
from typing import TYPE_CHECKING, Optional

import numpy as np

from .channel import crandn
from .modem import build_constellation
from .detect import build_hypothesis_map
from .txframe import make_power_allocation

if TYPE_CHECKING:  # pragma: no cover
    from .engine import SystemConfig

__all__ = [
    "PepParams",
    "DiffStats",
    "semifactorial",
    "diff_stats",
    "pep",
    "pairwise_error_rate",
    "abep_bound",
    "bpcu",
    "throughput",
    "flops",
    "complexity_table",
    "throughput_table",
    "snr_at_ber",
    "truncate_pct",
]

_BOUND_SCHEMES = ("dgsm", "dmgsm")


@dataclass(frozen=True)
class PepParams:
    """Noise and dimension parameters entering the pairwise error bound."""

    sigma2_n: float
    sigma2_r: float
    mu: int
    mr: int


@dataclass(frozen=True)
class DiffStats:
    """Non-zero count and squared norm of a hypothesis difference vector."""

    beta: int
    d2: float


def semifactorial(n: int) -> int:
    """n!! with the conventions 0!! = (-1)!! = 1."""
    if n < -1:
        raise ValueError(f"semifactorial undefined for n={n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _entries(x) -> np.ndarray:
    return np.asarray(getattr(x, "entries", x), dtype=complex)


def diff_stats(x, x_tilde) -> DiffStats:
    """Count and energy of the non-zero entries of (x_tilde - x)."""
    d = _entries(x_tilde) - _entries(x)
    nz = d[d != 0]
    return DiffStats(int(nz.size), float(np.sum(np.abs(nz) ** 2)))


def pep(x, x_tilde, params: PepParams) -> float:
    """High-SNR pairwise error bound for mistaking x for x_tilde.

    (2*(sigma_n^2 + mu*sigma_r^2))^mr * 2^mr * (2mr-1)!!
    / (2 * d2^mr * (2mr)!!), with d2 the difference energy.
    """
    stats = diff_stats(x, x_tilde)
    if stats.d2 == 0:
        raise ValueError("hypotheses are identical; pairwise error is undefined")
    return _pep_from_d2(np.array([stats.d2]), params)[0]


def _pep_from_d2(d2: np.ndarray, p: PepParams) -> np.ndarray:
    c = 2.0 * (p.sigma2_n + p.mu * p.sigma2_r)
    num = (c ** p.mr) * (2 ** p.mr) * semifactorial(2 * p.mr - 1)
    den = 2.0 * (d2 ** p.mr) * semifactorial(2 * p.mr)
    return num / den


def pairwise_error_rate(x, x_tilde, params: PepParams, trials: int,
                        rng: np.random.Generator, chunk: int = 1 << 19) -> float:
    """Monte Carlo rate at which detection of x decides x_tilde instead.

    Draws an independent Rayleigh channel per trial, forms the noisy received
    reference and one data slot carrying x, and compares the two candidates'
    metrics. The empirical counterpart of ``pep`` for checking the bound.
    """
    xa, xb = _entries(x), _entries(x_tilde)
    if xa.shape != xb.shape:
        raise ValueError("hypotheses must have the same length")
    mt, mr = xa.size, params.mr
    sr, sn = np.sqrt(params.sigma2_r), np.sqrt(params.sigma2_n)
    errors = 0
    left = int(trials)
    while left > 0:
        m = min(chunk, left)
        h = crandn(rng, m, mr, mt)
        yr = h + sr * crandn(rng, m, mr, mt)
        yn = h @ xa + sn * crandn(rng, m, mr)
        metric_a = np.sum(np.abs(yn - yr @ xa) ** 2, axis=1)
        metric_b = np.sum(np.abs(yn - yr @ xb) ** 2, axis=1)
        errors += int(np.count_nonzero(metric_b < metric_a))
        left -= m
    return errors / trials


def abep_bound(cfg: "SystemConfig", snr_db):
    """Union bound on average BER: bit-weighted pairwise errors over the map.

    Accepts a scalar or array of SNR values in dB.  Returns the raw value
    (can exceed 0.5 at low SNR); clip for presentation.
    """
    if cfg.scheme not in _BOUND_SCHEMES:
        raise ValueError(f"no closed-form bound for scheme {cfg.scheme!r}")
    const = build_constellation(cfg.mod_kind, cfg.mod_order)
    scale = 1.0 / np.sqrt(cfg.mu) if cfg.split_mu_power else 1.0
    hmap = build_hypothesis_map(cfg.scheme, cfg.mt, cfg.mu, const, scale)

    v = hmap.vectors
    n, m = hmap.n_entries, hmap.n_bits
    power = np.sum(np.abs(v) ** 2, axis=1)
    gram = v @ v.conj().T
    d2 = np.maximum(power[:, None] + power[None, :] - 2.0 * gram.real, 0.0)
    idx = np.arange(n)
    hamming = _popcount(idx[:, None] ^ idx[None, :])
    off = ~np.eye(n, dtype=bool)
    # Only the noise-variance factor c^mr depends on SNR; sum the rest once.
    base = float(np.sum(hamming[off] / d2[off] ** cfg.mr))
    factor = (2 ** cfg.mr) * semifactorial(2 * cfg.mr - 1) / (
        2.0 * semifactorial(2 * cfg.mr)
    )

    snr = np.atleast_1d(np.asarray(snr_db, dtype=float))
    blocks = 1 + cfg.k // cfg.mt
    # Reference noise is weighted by the hypothesis power mu*scale^2
    # (1 when the symbol power is split across the active antennas).
    mu_eff = cfg.mu * scale ** 2
    out = np.empty(snr.shape)
    for i, s in enumerate(snr):
        pa = make_power_allocation(10.0 ** (s / 10.0), blocks, cfg.power_allocation)
        c = 2.0 * (pa.sigma2_n + mu_eff * pa.sigma2_r)
        out[i] = (c ** cfg.mr) * factor * base / (m * n)
    return float(out[0]) if np.isscalar(snr_db) else out


def _popcount(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    while a.any():
        out += a & 1
        a = a >> 1
    return out


def _tac_bits(mt: int, mu: int) -> int:
    return comb(mt, mu).bit_length() - 1


def bpcu(scheme: str, mt: int, mu: int, m_order: int) -> float:
    """Bits per channel use of a scheme at modulation order m_order."""
    b = log2(m_order)
    if scheme in ("dgsm", "gsm1"):
        return _tac_bits(mt, mu) + b
    if scheme in ("dmgsm", "gsm2"):
        return _tac_bits(mt, mu) + mu * b
    if scheme == "gdsm":
        return (mt.bit_length() - 1) + b
    if scheme == "dsm":
        return (int(log2_floor_factorial(mt)) + mt * b) / mt
    if scheme == "apsk_dsm_hr":
        return (int(log2_floor_factorial(mt)) + mt * b + 2 * mt) / mt
    raise ValueError(f"unknown scheme {scheme!r}")


def log2_floor_factorial(n: int) -> int:
    """floor(log2(n!)) computed exactly."""
    return factorial(n).bit_length() - 1


def throughput(k: int, mt: int, coherent: bool = False) -> float:
    """Fraction of slots carrying data: K/(K+mt), or K/(K+4*mt) with pilots."""
    if k < 0 or mt < 1:
        raise ValueError(f"need k >= 0 and mt >= 1, got k={k}, mt={mt}")
    overhead = 4 * mt if coherent else mt
    return k / (k + overhead)


def flops(scheme: str, mt: int, mr: int, mu: int, m_order: int, k: int,
          pl: Optional[int] = None) -> int:
    """Real-operation count of one frame of ML detection (closed form).

    The differential counts assume the per-hypothesis reference combination
    is computed once and reused over the frame's k slots; the coherent counts
    add the LS estimation term with pilot length pl (default 4*mt).
    """
    n = 1 << _tac_bits(mt, mu)
    m = m_order
    if scheme == "gdsm":
        return mt * m * (6 * mr + 6 * mr * k - k)
    if scheme in ("dgsm", "gsm1"):
        core = m * n * (2 * mr * mu + 6 * mr * k + 4 * mr - k)
    elif scheme in ("dmgsm", "gsm2"):
        core = (2 ** mu) * m * n * (8 * mr * mu + 6 * mr * k - 2 * mr - k)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme in ("gsm1", "gsm2"):
        if pl is None:
            pl = 4 * mt
        core += pl * (6 * mr + 12) + 6 * mt
    return core


# Comparison presets: spectral efficiency, antenna configs, and K values
# at the reference operating points (mr=2, K in {100, 400}).

_TABLE4 = [(5, 4), (6, 5), (7, 5), (8, 5)]  # (se, mt); dgsm/gsm1, mu=2
_TABLE5 = [(5, 5), (6, 4), (7, 5), (8, 4)]  # (se, mt); dmgsm/gsm2, mu=2
_TABLE6 = [  # (se, (gdsm mt, gdsm M), (dmgsm mt, dmgsm M)); mr=2, mu=2
    (5, (4, 8), (5, 2)),
    (6, (4, 16), (4, 4)),
    (7, (4, 32), (5, 4)),
    (8, (8, 32), (4, 8)),
    (9, (8, 64), (5, 8)),
    (10, (16, 64), (7, 8)),
]
_KS = (100, 400)
_MR = 2

COMPLEXITY_TABLE_IDS = {
    "4": "4", "dgsm-vs-gsm1": "4",
    "5": "5", "dmgsm-vs-gsm2": "5",
    "6": "6", "dmgsm-vs-gdsm": "6",
}
THROUGHPUT_TABLE_IDS = {
    "8": "8", "coherent-vs-proposed": "8",
    "9": "9", "gdsm-vs-proposed": "9",
}


def complexity_table(table_id) -> list:
    """Rows of a detection-complexity comparison preset (ids 4, 5, 6)."""
    tid = COMPLEXITY_TABLE_IDS.get(str(table_id))
    if tid is None:
        raise ValueError(f"unknown complexity table {table_id!r}; use 4, 5, or 6")
    rows = []
    if tid in ("4", "5"):
        proposed, reference = ("dgsm", "gsm1") if tid == "4" else ("dmgsm", "gsm2")
        mu = 2
        for se, mt in (_TABLE4 if tid == "4" else _TABLE5):
            sym_bits = se - _tac_bits(mt, mu)
            m = 1 << (sym_bits if tid == "4" else sym_bits // mu)
            for k in _KS:
                prop = flops(proposed, mt, _MR, mu, m, k)
                ref = flops(reference, mt, _MR, mu, m, k)
                rows.append({
                    "se_bpcu": se, "k": k,
                    "proposed": proposed, "proposed_mt": mt, "proposed_mr": _MR,
                    "proposed_mu": mu, "proposed_m": m, "proposed_flops": prop,
                    "reference": reference, "reference_mt": mt, "reference_mr": _MR,
                    "reference_mu": mu, "reference_m": m, "reference_flops": ref,
                    "pct_change": 100.0 * (ref - prop) / ref,
                })
    else:
        for se, (gmt, gm), (dmt, dm) in _TABLE6:
            for k in _KS:
                prop = flops("dmgsm", dmt, _MR, 2, dm, k)
                ref = flops("gdsm", gmt, _MR, 1, gm, k)
                rows.append({
                    "se_bpcu": se, "k": k,
                    "proposed": "dmgsm", "proposed_mt": dmt, "proposed_mr": _MR,
                    "proposed_mu": 2, "proposed_m": dm, "proposed_flops": prop,
                    "reference": "gdsm", "reference_mt": gmt, "reference_mr": _MR,
                    "reference_mu": 1, "reference_m": gm, "reference_flops": ref,
                    "pct_change": 100.0 * (ref - prop) / ref,
                })
    return rows


def throughput_table(table_id) -> list:
    """Rows of a throughput comparison preset (ids 8, 9)."""
    tid = THROUGHPUT_TABLE_IDS.get(str(table_id))
    if tid is None:
        raise ValueError(f"unknown throughput table {table_id!r}; use 8 or 9")
    rows = []
    if tid == "8":
        for mt in (4, 5):
            for k in _KS:
                coh = 100.0 * throughput(k, mt, coherent=True)
                prop = 100.0 * throughput(k, mt)
                rows.append({
                    "mt": mt, "k": k,
                    "coherent_pct": coh, "coherent_display": f"{truncate_pct(coh):.1f}",
                    "proposed_pct": prop, "proposed_display": f"{truncate_pct(prop):.1f}",
                })
    else:
        for gdsm_mt, prop_mt, prop_mu in ((4, 4, 2), (8, 5, 2), (16, 6, 2)):
            for k in _KS:
                gd = 100.0 * throughput(k, gdsm_mt)
                prop = 100.0 * throughput(k, prop_mt)
                rows.append({
                    "gdsm_mt": gdsm_mt, "proposed_mt": prop_mt,
                    "proposed_mu": prop_mu, "k": k,
                    "gdsm_pct": gd, "gdsm_display": f"{truncate_pct(gd):.1f}",
                    "proposed_pct": prop, "proposed_display": f"{truncate_pct(prop):.1f}",
                })
    return rows


def truncate_pct(x: float) -> float:
    """Truncate a percentage to one decimal, the tables' display convention."""
    return np.floor(x * 10.0 + 1e-9) / 10.0


def snr_at_ber(snr_db, ber, target: float):
    """SNR where a monotone-sampled BER curve crosses target (log interpolation).

    Returns None when the curve never reaches the target.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    if snr_db.size != ber.size or snr_db.size == 0:
        raise ValueError("snr_db and ber must be equal-length, non-empty")
    for i in range(ber.size):
        if ber[i] <= target:
            if i == 0:
                return float(snr_db[0])
            b0, b1 = ber[i - 1], ber[i]
            if b1 <= 0:
                return float(snr_db[i])
            frac = (np.log10(b0) - np.log10(target)) / (np.log10(b0) - np.log10(b1))
            return float(snr_db[i - 1] + frac * (snr_db[i] - snr_db[i - 1]))
    return None
