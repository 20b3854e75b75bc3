"""Closed-form bound, rate, and complexity checks against frozen values."""

import numpy as np
import pytest

from gsmlink.analysis import (
    PepParams,
    abep_bound,
    bpcu,
    complexity_table,
    diff_stats,
    flops,
    pairwise_error_rate,
    pep,
    semifactorial,
    snr_at_ber,
    throughput,
    throughput_table,
    truncate_pct,
)
from gsmlink.engine import SystemConfig


# ---------------------------------------------------------------- semifactorial

def test_semifactorial_values():
    assert semifactorial(-1) == 1
    assert semifactorial(0) == 1
    assert semifactorial(1) == 1
    assert semifactorial(3) == 3
    assert semifactorial(4) == 8
    assert semifactorial(7) == 105
    assert semifactorial(8) == 384
    with pytest.raises(ValueError):
        semifactorial(-2)


# -------------------------------------------------------------------- pep

def test_diff_stats_counts_nonzero_entries():
    s = diff_stats(np.array([1, 1, 0, 0]), np.array([1, -1, 0, 1]))
    assert s.beta == 2
    assert s.d2 == pytest.approx(5.0)


def test_pep_reference_value():
    # d2 = 8, mr = 2, equal power 1/rho: pep = 27/(64 rho^2)
    x = np.array([1.0, 1.0])
    p = PepParams(sigma2_n=0.1, sigma2_r=0.1, mu=2, mr=2)
    assert pep(x, -x, p) == pytest.approx(0.421875 * 0.01)


def test_pep_mr2_prefactor():
    # for mr=2 the bound reduces to 0.75 * (2c)^2 / d2^2
    x = np.array([1.0, 0.0])
    xt = np.array([-1.0, 0.0])
    p = PepParams(sigma2_n=0.2, sigma2_r=0.05, mu=1, mr=2)
    c = p.sigma2_n + p.mu * p.sigma2_r
    assert pep(x, xt, p) == pytest.approx(0.75 * (2 * c) ** 2 / 16.0)


@pytest.mark.parametrize("mr", [1, 2, 3, 4])
def test_pep_difference_scaling(mr):
    # scaling the difference by c divides the bound by c^(2 mr)
    p = PepParams(sigma2_n=0.1, sigma2_r=0.02, mu=2, mr=mr)
    x = np.array([1.0, 1.0, 0.0])
    xt = np.array([-1.0, 1.0, 1.0])
    base = pep(x, xt, p)
    scaled = pep(3 * x, 3 * xt, p)
    assert scaled == pytest.approx(base / 3 ** (2 * mr))


def test_pep_identical_hypotheses_rejected():
    p = PepParams(0.1, 0.1, 2, 2)
    x = np.array([1.0, 1.0])
    with pytest.raises(ValueError):
        pep(x, x.copy(), p)


def test_pep_upper_bounds_empirical_rate():
    # modest-size check; the acceptance suite runs the full-size version
    x = np.array([1.0, 1.0])
    rho = 10.0 ** 1.5
    p = PepParams(1 / rho, 1 / rho, 2, 2)
    emp = pairwise_error_rate(x, -x, p, 400000, np.random.default_rng(42))
    assert emp <= pep(x, -x, p)
    # and the bound is not absurdly loose
    assert emp >= 0.5 * pep(x, -x, p)


# -------------------------------------------------------------- abep bound

CFG_DGSM = SystemConfig(scheme="dgsm", mt=4, mr=2, mu=2,
                        mod_kind="qam", mod_order=4, k=100)


def test_bound_decays_one_decade_per_mr():
    for mr in (2, 3, 4):
        cfg = SystemConfig(scheme="dgsm", mt=4, mr=mr, mu=2,
                           mod_kind="qam", mod_order=4, k=100)
        b = abep_bound(cfg, np.array([10.0, 20.0, 30.0]))
        assert b[0] / b[1] == pytest.approx(10.0 ** mr, rel=1e-9)
        assert b[1] / b[2] == pytest.approx(10.0 ** mr, rel=1e-9)


def test_bound_monotone_decreasing():
    snr = np.arange(0.0, 31.0, 2.0)
    b = abep_bound(CFG_DGSM, snr)
    assert np.all(np.diff(b) < 0)


def test_bound_scalar_matches_array():
    b = abep_bound(CFG_DGSM, 18.0)
    arr = abep_bound(CFG_DGSM, np.array([18.0]))
    assert b == pytest.approx(arr[0])


def test_bound_power_split_helps_at_same_snr():
    on = SystemConfig(scheme="dgsm", mt=4, mr=2, mu=2, mod_kind="qam",
                      mod_order=4, k=100, power_allocation=True)
    assert abep_bound(on, 20.0) < abep_bound(CFG_DGSM, 20.0)


def test_bound_rejects_unsupported_scheme():
    cfg = SystemConfig(scheme="gdsm", mt=4, mr=2, mu=1,
                       mod_kind="qam", mod_order=4, k=100)
    with pytest.raises(ValueError):
        abep_bound(cfg, 20.0)


def test_bound_split_mu_power_uses_actual_vector_power():
    # with the split (mu=2), every d2 halves and the hypothesis power seen
    # by the reference noise drops from 2 to 1, so with equal-power slots
    # c goes 6/rho -> 4/rho and the bound gains exactly (2 * 4/6)^mr = (4/3)^mr
    split = SystemConfig(scheme="dmgsm", mt=5, mr=2, mu=2, mod_kind="qam",
                         mod_order=4, k=100, split_mu_power=True)
    plain = SystemConfig(scheme="dmgsm", mt=5, mr=2, mu=2, mod_kind="qam",
                         mod_order=4, k=100)
    b_split, b_plain = abep_bound(split, 25.0), abep_bound(plain, 25.0)
    assert b_split == pytest.approx(b_plain * (4.0 / 3.0) ** 2, rel=1e-9)


# ------------------------------------------------------------------- bpcu

def test_bpcu_values():
    assert bpcu("dgsm", 4, 2, 4) == 4
    assert bpcu("dgsm", 5, 2, 4) == 5
    assert bpcu("dmgsm", 4, 2, 4) == 6
    assert bpcu("dmgsm", 5, 2, 4) == 7
    assert bpcu("dmgsm", 4, 2, 8) == 8
    assert bpcu("gsm1", 4, 2, 4) == 4
    assert bpcu("gsm2", 5, 2, 4) == 7
    assert bpcu("gdsm", 4, 1, 64) == 8
    assert bpcu("gdsm", 8, 1, 4) == 5
    assert bpcu("dsm", 2, 1, 4) == pytest.approx((1 + 2 * 2) / 2)
    assert bpcu("dsm", 4, 1, 4) == pytest.approx((4 + 4 * 2) / 4)
    assert bpcu("apsk_dsm_hr", 2, 1, 4) == pytest.approx((1 + 4 + 4) / 2)
    with pytest.raises(ValueError):
        bpcu("nope", 4, 2, 4)


# -------------------------------------------------------------- throughput

def test_throughput_values():
    assert throughput(100, 4) == pytest.approx(100 / 104)
    assert throughput(400, 4) == pytest.approx(400 / 404)
    assert throughput(100, 5) == pytest.approx(100 / 105)
    assert throughput(100, 4, coherent=True) == pytest.approx(100 / 116)
    assert throughput(400, 5, coherent=True) == pytest.approx(400 / 420)


def test_truncate_pct():
    assert truncate_pct(96.1538) == pytest.approx(96.1)
    assert truncate_pct(92.59) == pytest.approx(92.5)
    assert truncate_pct(98.765) == pytest.approx(98.7)
    assert truncate_pct(99.0099) == pytest.approx(99.0)


# ------------------------------------------------------------------ flops

def test_flops_hand_values():
    # single-symbol differential: M*N*(2 mr mu + 6 mr K + 4 mr - K)
    assert flops("dgsm", 4, 2, 2, 8, 100) == 35712
    assert flops("dgsm", 4, 2, 2, 8, 400) == 141312
    # multi-symbol differential: 2^mu * M * N * (8 mr mu + 6 mr K - 2 mr - K)
    assert flops("dmgsm", 5, 2, 2, 4, 100) == 144384
    assert flops("dmgsm", 4, 2, 2, 2, 100) == 36096
    # single-antenna differential: mt * M * (6 mr + 6 mr K - K)
    assert flops("gdsm", 4, 2, 1, 8, 100) == 35584
    assert flops("gdsm", 4, 2, 1, 64, 100) == 284672
    # coherent adds the pilot overhead 4*mt*(6 mr + 12) + 6 mt
    assert flops("gsm1", 4, 2, 2, 8, 100) == 35712 + 408
    assert flops("gsm1", 5, 2, 2, 8, 100) == flops("dgsm", 5, 2, 2, 8, 100) + 510
    assert flops("gsm2", 5, 2, 2, 2, 100) == flops("dmgsm", 5, 2, 2, 2, 100) + 510


def test_flops_pilot_override():
    base = flops("gsm1", 4, 2, 2, 8, 100, pl=None)
    wider = flops("gsm1", 4, 2, 2, 8, 100, pl=32)
    assert wider - base == (32 - 16) * (6 * 2 + 12)


def test_flops_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        flops("dsm", 4, 2, 1, 4, 100)


# ------------------------------------------------------------------ tables

def test_single_symbol_complexity_table():
    rows = complexity_table(4)
    assert len(rows) == 8
    got = [round(r["pct_change"], 4) for r in rows]
    assert got == [1.1296, 0.2879, 0.709, 0.1801, 0.3558, 0.0901, 0.1782, 0.0451]
    assert rows[0]["proposed_flops"] == 35712
    assert rows[0]["reference_flops"] == 36120
    # spectral efficiencies are 5..8 with k in {100, 400}
    assert [(r["se_bpcu"], r["k"]) for r in rows] == [
        (5, 100), (5, 400), (6, 100), (6, 400),
        (7, 100), (7, 400), (8, 100), (8, 400),
    ]


def test_multi_symbol_complexity_table():
    rows = complexity_table(5)
    assert len(rows) == 8
    got = [round(r["pct_change"], 4) for r in rows]
    assert got == [0.7015, 0.1796, 0.562, 0.1438, 0.352, 0.0899, 0.2818, 0.0719]


def test_cross_scheme_complexity_table():
    rows = complexity_table(6)
    assert len(rows) == 12
    got = [round(r["pct_change"], 4) for r in rows]
    assert got == [
        -102.8777, -100.7253,
        -1.4388, -0.3626,
        -1.4388, -0.3626,
        49.2806, 49.8187,
        49.2806, 49.8187,
        49.2806, 49.8187,
    ]


def test_complexity_table_aliases():
    assert complexity_table("4") == complexity_table(4)
    with pytest.raises(ValueError):
        complexity_table(7)


def test_throughput_tables():
    rows = throughput_table(8)
    assert [(r["mt"], r["k"]) for r in rows] == [
        (4, 100), (4, 400), (5, 100), (5, 400)]
    assert [r["proposed_display"] for r in rows] == ["96.1", "99.0", "95.2", "98.7"]
    assert [r["coherent_display"] for r in rows] == ["86.2", "96.1", "83.3", "95.2"]

    rows = throughput_table(9)
    assert [r["gdsm_display"] for r in rows] == [
        "96.1", "99.0", "92.5", "98.0", "86.2", "96.1"]
    assert [r["proposed_display"] for r in rows] == [
        "96.1", "99.0", "95.2", "98.7", "94.3", "98.5"]
    with pytest.raises(ValueError):
        throughput_table(10)


# --------------------------------------------------------------- snr_at_ber

def test_snr_at_ber_interpolates_logarithmically():
    snr = [10.0, 12.0, 14.0]
    ber = [1e-2, 1e-3, 1e-4]
    assert snr_at_ber(snr, ber, 1e-3) == pytest.approx(12.0)
    # halfway in log-BER is halfway in snr here
    assert snr_at_ber(snr, ber, 10 ** -2.5) == pytest.approx(11.0)


def test_snr_at_ber_first_crossing_and_bounds():
    assert snr_at_ber([0.0, 2.0], [1e-4, 1e-5], 1e-3) == 0.0
    assert snr_at_ber([0.0, 2.0], [1e-1, 1e-2], 1e-3) is None
    with pytest.raises(ValueError):
        snr_at_ber([0.0], [1e-1, 1e-2], 1e-3)


def test_snr_at_ber_handles_zero_tail():
    # an exact-zero point terminates the curve at that snr
    assert snr_at_ber([0.0, 2.0, 4.0], [1e-2, 1e-3, 0.0], 1e-4) == 4.0
