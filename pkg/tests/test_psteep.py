import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from steep import mc_oracle, psteep
from steep.errors import BoundNotApplicableError, InvalidArgumentError, SingularChannelError
from steep.gsteep import SisoSnr

ANCHOR = SisoSnr(100.0, 1000.0, 2.0, 2.0)


def random_snr(rng):
    return SisoSnr(*(10 ** rng.uniform([-1, -1, -2, -2], [4, 4, 2, 2])))


def test_q_function_values():
    assert psteep.q_function(0.0) == 0.5
    assert psteep.q_function(1.0) == pytest.approx(stats.norm.sf(1.0), rel=1e-14)
    assert psteep.q_function(10.0) == pytest.approx(stats.norm.sf(10.0), rel=1e-12)


def test_q_function_sandwich():
    x = np.linspace(0.05, 30.0, 400)
    phi = np.exp(-(x**2) / 2) / np.sqrt(2 * np.pi)
    q = psteep.q_function(x)
    assert np.all(x / (1 + x**2) * phi < q)
    assert np.all(q < phi / x)


def test_psk_config():
    assert (psteep.PskConfig(2).m, psteep.PskConfig(2).n0) == (1, 1)
    assert (psteep.PskConfig(8).m, psteep.PskConfig(8).n0) == (3, 2)
    for bad in (1, 3, 6, 2.5):
        with pytest.raises(InvalidArgumentError):
            psteep.PskConfig(bad)


def test_error_params_alice_equal_links():
    ep = psteep.psk_error_params(2, SisoSnr(25.0, 25.0, 1.0, 1.0))
    assert ep.eps_A == pytest.approx(math.sqrt(1 / 25.0), rel=1e-14)
    big = psteep.psk_error_params(2, SisoSnr(1e8, 1e8, 1.0, 1.0))
    assert big.p_eA == 0.0


def test_error_params_vanishing_distance():
    # no Eve link in either phase: sin(pi/M)/eps = 0 and p_e = n0 Q(0)
    ep = psteep.psk_error_params(4, SisoSnr(10.0, 10.0, 0.0, 1.0))
    assert ep.p_eE == 1.0
    ep = psteep.psk_error_params(2, SisoSnr(10.0, 10.0, 1.0, 0.0))
    assert ep.p_eE == 0.5


def test_error_params_anchor_closed_form():
    ep = psteep.psk_error_params(2, ANCHOR)
    assert ep.p_eA == pytest.approx(stats.norm.sf(math.sqrt(1 / (1 / 200 + 1 / 2000))), rel=1e-10)
    eps_E = math.sqrt(1 / 200 + 1 / 400 + 1 / 4000)
    assert ep.p_eE == pytest.approx(stats.norm.sf(1 / eps_E), rel=1e-10)


def test_error_params_degenerate_link():
    with pytest.raises(SingularChannelError):
        psteep.psk_error_params(2, SisoSnr(0.0, 10.0, 1.0, 1.0))


@pytest.mark.slow
def test_anchor_error_rate_monte_carlo():
    reports = {r.name: r for r in mc_oracle.mc_psteep(2, ANCHOR, 10_000_000, seed=2)}
    r = reports["p_eA"]
    assert abs(r.z) <= 3, r
    assert r.empirical * 1e7 <= 10


def test_error_rate_monte_carlo_moderate_snr():
    # an operating point with errors actually observed at both receivers
    snr = SisoSnr(6.0, 12.0, 1.0, 1.0)
    reports = {r.name: r for r in mc_oracle.mc_psteep(2, snr, 1_000_000, seed=3)}
    assert reports["p_eA"].empirical > 1e-3
    assert abs(reports["p_eA"].z) <= 3, reports["p_eA"]
    assert abs(reports["p_eE[linear]"].z) <= 3, reports["p_eE[linear]"]


def test_psk_capacity_error_free():
    for M in (2, 4, 8, 16):
        assert psteep.psk_capacity(M, 0.0) == math.log2(M)


def test_psk_capacity_bpsk_half():
    assert psteep.psk_capacity(2, 0.5) == 0.0


def test_psk_capacity_qpsk():
    h2 = stats.entropy([0.01, 0.99], base=2)
    assert psteep.binary_entropy(0.01) == pytest.approx(h2, rel=1e-14)
    c = psteep.psk_capacity(4, 0.01)
    assert c == pytest.approx(2 - 0.01 - h2, rel=1e-14)
    assert c == pytest.approx(1.9092, abs=5e-5)


def test_psk_capacity_clamped_and_validated():
    assert psteep.psk_capacity(4, 1.0) == 1.0
    assert psteep.psk_capacity(4, 0.5) == 0.5
    with pytest.raises(InvalidArgumentError):
        psteep.psk_capacity(2, 1.5)


@settings(max_examples=100, deadline=None)
@given(p=st.floats(0.0, 1.0))
def test_binary_entropy_matches_scipy(p):
    assert psteep.binary_entropy(p) == pytest.approx(stats.entropy([p, 1 - p], base=2), abs=1e-12)


def test_equal_effective_channels_give_zero_rate():
    a, b, beta = 50.0, 80.0, 2.0
    snr = SisoSnr(a, b, 2 * b / a, beta)
    ep = psteep.psk_error_params(2, snr)
    assert ep.eps_E == pytest.approx(ep.eps_A, rel=1e-12)
    assert psteep.psteep_secrecy_rate(2, snr).R_s == pytest.approx(0.0, abs=1e-12)


def test_anchor_rate_positive():
    assert psteep.psteep_power_condition(ANCHOR)
    res = psteep.psteep_secrecy_rate(2, ANCHOR)
    assert res.R_s > 0
    assert res.R_s == pytest.approx(res.rate_h2_difference, abs=1e-15)


def test_qpsk_rate_includes_error_difference():
    res = psteep.psteep_secrecy_rate(4, SisoSnr(10.0, 30.0, 2.0, 2.0))
    ep = psteep.psk_error_params(4, SisoSnr(10.0, 30.0, 2.0, 2.0))
    h = psteep.binary_entropy
    full = (ep.p_eE - ep.p_eA) + h(ep.p_eE) - h(ep.p_eA)
    assert res.R_s == pytest.approx(full, rel=1e-12)
    assert res.rate_h2_difference == pytest.approx(h(ep.p_eE) - h(ep.p_eA), rel=1e-12)
    assert res.R_s > res.rate_h2_difference


def test_approximation_warning():
    assert psteep.psteep_secrecy_rate(8, SisoSnr(0.5, 0.5, 1.0, 1.0)).approx_warning
    assert not psteep.psteep_secrecy_rate(2, SisoSnr(0.5, 0.5, 1.0, 1.0)).approx_warning


def test_power_condition_cases():
    assert psteep.psteep_power_condition(SisoSnr(100.0, 1.0, 50.0, 0.5))
    assert not psteep.psteep_power_condition(SisoSnr(10.0, 10.0, 2.0, 2.0))


def test_power_condition_equivalences():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        snr = random_snr(rng)
        ep = psteep.psk_error_params(2, snr)
        cond = psteep.psteep_power_condition(snr)
        assert cond == (ep.eps_A < ep.eps_E)
        if ep.p_eA > 0 or ep.p_eE > 0:
            assert cond == (ep.p_eA < ep.p_eE)


def test_rate_nonincreasing_in_eve_strength():
    grid = np.logspace(-1, 1, 10)
    for M in (2, 4):
        R = np.array([[psteep.psteep_secrecy_rate(M, SisoSnr(20.0, 60.0, al, be)).R_s for be in grid] for al in grid])
        assert np.all(np.diff(R, axis=0) <= 1e-12)
        assert np.all(np.diff(R, axis=1) <= 1e-12)


def test_error_ratio_anchor():
    assert abs(psteep.error_ratio_bound(2, ANCHOR).P - 26.4) <= 0.05


def test_error_ratio_anchor_independent_form():
    # P = (x_A^2 - x_E^2)/2 with x = sin(pi/M)/eps
    ep = psteep.psk_error_params(2, ANCHOR)
    P = (1 / ep.eps_A**2 - 1 / ep.eps_E**2) / 2
    assert psteep.error_ratio_bound(2, ANCHOR).P == pytest.approx(P, rel=1e-12)


def test_error_ratio_large_b_limit():
    res = psteep.error_ratio_bound(2, SisoSnr(100.0, 1e12, 1.0, 2.0))
    assert res.P_limit_large_b == pytest.approx(50.0, rel=1e-14)
    assert res.P == pytest.approx(50.0, rel=1e-6)


def test_error_ratio_bound_holds():
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 1000:
        snr = random_snr(rng)
        M = int(rng.choice([2, 4, 8]))
        try:
            res = psteep.error_ratio_bound(M, snr)
        except BoundNotApplicableError:
            continue
        ep = psteep.psk_error_params(M, snr)
        if ep.p_eE == 0.0:
            continue
        assert ep.p_eA / ep.p_eE <= res.bound * (1 + 1e-12)
        checked += 1


def test_error_ratio_not_applicable():
    with pytest.raises(BoundNotApplicableError):
        psteep.error_ratio_bound(2, SisoSnr(10.0, 10.0, 2.0, 2.0))
