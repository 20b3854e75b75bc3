"""Link-level toolkit for differential generalized spatial modulation.

Monte Carlo BER simulation, closed-form union bounds, and rate/complexity
calculators for reference-block differential schemes (dgsm, dmgsm, gdsm)
and their coherent baselines (gsm1, gsm2).
"""

from .analysis import abep_bound, bpcu, flops, pep, throughput
from .engine import BerPoint, SystemConfig, run_frame, run_sweep

__all__ = [
    "SystemConfig",
    "BerPoint",
    "run_frame",
    "run_sweep",
    "abep_bound",
    "pep",
    "bpcu",
    "flops",
    "throughput",
]

__version__ = "0.1.0"
