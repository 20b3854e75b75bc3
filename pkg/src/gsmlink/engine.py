"""Monte Carlo driver: per-frame simulation and multi-SNR sweeps.

Every frame draws from its own counter-based stream keyed by
(seed, snr index, frame index), so results are reproducible and
independent of worker count or batching.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import sqrt
from typing import Optional

import numpy as np

from . import analysis
from .channel import crandn, draw_channel
from .detect import HypothesisMap, build_hypothesis_map, ls_estimate, ml_select, pilot_schedule
from .modem import build_constellation
from .txframe import PowerAllocation, make_power_allocation

__all__ = [
    "SystemConfig",
    "BerPoint",
    "run_frame",
    "run_sweep",
    "frame_rng",
    "bits_per_vector",
    "effective_workers",
    "SCHEMES",
    "DIFFERENTIAL_SCHEMES",
    "COHERENT_SCHEMES",
]

DIFFERENTIAL_SCHEMES = ("dgsm", "dmgsm", "gdsm")
COHERENT_SCHEMES = ("gsm1", "gsm2")
SCHEMES = DIFFERENTIAL_SCHEMES + COHERENT_SCHEMES

_WORKER_ENV = "GSMLINK_MAX_WORKERS"


@dataclass(frozen=True)
class SystemConfig:
    """Complete description of one simulated link."""

    scheme: str
    mt: int
    mr: int
    mu: int
    mod_kind: str
    mod_order: int
    k: int = 100
    power_allocation: bool = False
    split_mu_power: bool = False
    csi: str = "differential"
    seed: int = 0

    def validate(self) -> "SystemConfig":
        if self.scheme not in SCHEMES:
            raise ValueError(f"field 'scheme': unknown scheme {self.scheme!r}")
        if self.mt < 1:
            raise ValueError(f"field 'mt': need mt >= 1, got {self.mt}")
        if self.mr < 1:
            raise ValueError(f"field 'mr': need mr >= 1, got {self.mr}")
        if not 1 <= self.mu <= self.mt:
            raise ValueError(f"field 'mu': need 1 <= mu <= mt, got {self.mu}")
        if self.scheme == "gdsm":
            if self.mu != 1:
                raise ValueError(f"field 'mu': gdsm uses mu=1, got {self.mu}")
            if self.mt & (self.mt - 1):
                raise ValueError(f"field 'mt': gdsm needs a power-of-two mt, got {self.mt}")
        try:
            build_constellation(self.mod_kind, self.mod_order)
        except ValueError as exc:
            raise ValueError(f"field 'mod_kind'/'mod_order': {exc}") from None
        if self.k < 0:
            raise ValueError(f"field 'k': need k >= 0, got {self.k}")
        if self.scheme in DIFFERENTIAL_SCHEMES:
            if self.csi != "differential":
                raise ValueError(
                    f"field 'csi': {self.scheme} is noncoherent, got {self.csi!r}")
        else:
            if self.csi not in ("perfect", "ls"):
                raise ValueError(
                    f"field 'csi': {self.scheme} needs 'perfect' or 'ls', got {self.csi!r}")
            if self.power_allocation:
                raise ValueError(
                    "field 'power_allocation': coherent schemes use uniform power")
        if self.power_allocation and (self.k == 0 or self.k % self.mt):
            raise ValueError(
                f"field 'k': power allocation needs k a positive multiple of mt, "
                f"got k={self.k}, mt={self.mt}")
        if self.seed < 0:
            raise ValueError(f"field 'seed': need seed >= 0, got {self.seed}")
        return self


@dataclass
class BerPoint:
    """Measured error rate at one SNR, with the analytical bound when defined."""

    snr_db: float
    frames: int
    bits: int
    errors: int
    ber: float
    bound: Optional[float] = None


@dataclass
class _Workspace:
    hmap: HypothesisMap
    popcount: np.ndarray = field(repr=False)

    def encode(self, bits: str):
        from .txframe import SymbolVector

        idx = int(bits, 2) if bits else 0
        entries = self.hmap.vectors[idx].copy()
        active = tuple(int(a) + 1 for a in np.flatnonzero(entries))
        return SymbolVector(entries, active)


@lru_cache(maxsize=64)
def _workspace(cfg: SystemConfig) -> _Workspace:
    cfg.validate()
    const = build_constellation(cfg.mod_kind, cfg.mod_order)
    scale = 1.0 / sqrt(cfg.mu) if cfg.split_mu_power else 1.0
    hmap = build_hypothesis_map(cfg.scheme, cfg.mt, cfg.mu, const, scale)
    pc = np.array([bin(i).count("1") for i in range(hmap.n_entries)], dtype=np.int64)
    return _Workspace(hmap, pc)


def frame_workspace(cfg: SystemConfig) -> _Workspace:
    """Cached per-config encoder state (hypothesis map in bit-label order)."""
    return _workspace(cfg)


def bits_per_vector(cfg: SystemConfig) -> int:
    """Information bits carried by one normal symbol vector."""
    return _workspace(cfg).hmap.n_bits


def _power_for(cfg: SystemConfig, snr_db: float) -> PowerAllocation:
    rho = 10.0 ** (snr_db / 10.0)
    blocks = 1 + cfg.k // cfg.mt
    if cfg.power_allocation:
        return make_power_allocation(rho, blocks, True)
    return PowerAllocation(rho, blocks, 1.0 / rho, 1.0 / rho, False)


def frame_rng(seed: int, snr_idx: int, frame_idx: int) -> np.random.Generator:
    """Independent counter-based stream for one (seed, SNR point, frame)."""
    key = (seed << 64) | (snr_idx << 32) | frame_idx
    return np.random.Generator(np.random.Philox(key=key))


def run_frame(cfg: SystemConfig, snr_db: float, rng: np.random.Generator,
              noise_free: bool = False) -> tuple:
    """Simulate one frame; returns (bits_sent, bit_errors).

    Draw order is fixed: data indices, channel, then the noise blocks, so a
    caller can replay the frame against the reference encode/transmit path.
    """
    ws = _workspace(cfg)
    hmap = ws.hmap
    idx = rng.integers(0, hmap.n_entries, size=cfg.k)
    h = draw_channel(cfg.mr, cfg.mt, rng)
    s = hmap.vectors[idx].T
    pa = _power_for(cfg, snr_db)

    if cfg.scheme in DIFFERENTIAL_SCHEMES:
        yr = h @ np.eye(cfg.mt, dtype=complex)
        if not noise_free:
            yr = yr + sqrt(pa.sigma2_r) * crandn(rng, cfg.mr, cfg.mt)
        ref = yr
    else:
        if cfg.csi == "ls":
            sched = pilot_schedule(cfg.mt)
            yp = h[:, sched - 1]
            if not noise_free:
                yp = yp + sqrt(pa.sigma2_n) * crandn(rng, cfg.mr, sched.size)
            ref = ls_estimate(yp, sched)
        else:
            ref = h

    yn = h @ s
    if not noise_free:
        yn = yn + sqrt(pa.sigma2_n) * crandn(rng, cfg.mr, cfg.k)
    det = ml_select(yn, ref, hmap)
    errors = int(ws.popcount[np.bitwise_xor(idx, det)].sum())
    return cfg.k * hmap.n_bits, errors


def _frame_batch(cfg: SystemConfig, snr_db: float, snr_idx: int,
                 start: int, stop: int, noise_free: bool) -> np.ndarray:
    out = np.empty(stop - start, dtype=np.int64)
    for f in range(start, stop):
        _, out[f - start] = run_frame(
            cfg, snr_db, frame_rng(cfg.seed, snr_idx, f), noise_free)
    return out


def effective_workers(requested: int) -> int:
    """Clamp a worker request by the GSMLINK_MAX_WORKERS environment cap."""
    cap = os.environ.get(_WORKER_ENV)
    if cap is not None:
        try:
            requested = min(requested, int(cap))
        except ValueError:
            raise ValueError(f"{_WORKER_ENV} must be an integer, got {cap!r}") from None
    return max(1, requested)


def run_sweep(cfg: SystemConfig, snr_list, min_errors: int = 200,
              max_frames: int = 200000, workers: int = 1,
              noise_free: bool = False) -> list:
    """Measure BER at each SNR, stopping each point at min_errors or max_frames.

    The stopping rule is applied to per-frame results in frame order, so the
    output is identical for any worker count or wave size.
    """
    cfg.validate()
    snr_list = list(snr_list)
    if not snr_list:
        raise ValueError("snr_list must not be empty")
    if min_errors < 1:
        raise ValueError(f"need min_errors >= 1, got {min_errors}")
    if max_frames < 1:
        raise ValueError(f"need max_frames >= 1, got {max_frames}")
    if cfg.k < 1:
        raise ValueError(f"field 'k': simulation needs k >= 1, got {cfg.k}")
    workers = effective_workers(workers)

    bits_per_frame = cfg.k * bits_per_vector(cfg)
    points = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for snr_idx, snr_db in enumerate(snr_list):
            per_frame = []
            cum = 0
            frames_run = None
            done = 0
            chunk = 64
            while frames_run is None and done < max_frames:
                wave_end = min(done + chunk * workers, max_frames)
                if pool is None:
                    batches = [_frame_batch(cfg, snr_db, snr_idx, done, wave_end,
                                            noise_free)]
                else:
                    bounds = np.linspace(done, wave_end, workers + 1, dtype=int)
                    futs = [pool.submit(_frame_batch, cfg, snr_db, snr_idx,
                                        int(a), int(b), noise_free)
                            for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
                    batches = [f.result() for f in futs]
                for batch in batches:
                    for e in batch:
                        per_frame.append(int(e))
                        if frames_run is None:
                            cum += int(e)
                            if cum >= min_errors:
                                frames_run = len(per_frame)
                done = wave_end
            if frames_run is None:
                frames_run = max_frames
            errors = int(np.sum(per_frame[:frames_run], dtype=np.int64))
            bits = frames_run * bits_per_frame
            bound = None
            if cfg.scheme in ("dgsm", "dmgsm"):
                bound = analysis.abep_bound(cfg, snr_db)
            points.append(BerPoint(float(snr_db), frames_run, bits, errors,
                                   errors / bits, bound))
    finally:
        if pool is not None:
            pool.shutdown()
    return points
