import numpy as np
import pytest

from steep import gsteep, mc_oracle, msteep
from steep.channel_model import ChannelSet, PowerConfig, sample_channels
from steep.errors import InvalidArgumentError
from steep.sweep import random_network

ONES = ChannelSet([[1.0]], [[1.0]], [[1.0]], [[1.0]])


def by_name(reports):
    return {r.name: r for r in reports}


def test_make_report_fields():
    r = mc_oracle.make_report("q", 1.0, [1.0, 1.2, 0.8, 1.0], 400)
    assert r.empirical == 1.0 and r.z == 0.0 and r.passed
    assert r.std_error > 0
    assert r.as_dict()["name"] == "q"


def test_make_report_se_floor():
    r = mc_oracle.make_report("p", 1e-3, [0.0] * 10, 1000, se_floor=1e-3)
    assert r.std_error == 1e-3
    assert r.z == pytest.approx(-1.0)
    bare = mc_oracle.make_report("p", 1e-3, [0.0] * 10, 1000)
    assert bare.z == -np.inf and not bare.passed


def test_zero_noise_probe_estimate():
    reps = by_name(mc_oracle.mc_gsteep(ONES, PowerConfig(1e12, 1.0), 100_000, seed=0))
    assert reps["R_dp[0]"].empirical < 1e-11
    assert reps["R_dp[0]"].analytic < 1e-11


def test_unit_siso_all_pass():
    reps = mc_oracle.mc_gsteep(ONES, PowerConfig(1.0, 1.0), 1_000_000, seed=1)
    gated = [r for r in reps if r.gated]
    assert len(gated) == 8
    assert all(r.passed for r in gated), [r for r in gated if not r.passed]


def test_gsteep_analytics_match_exact_model():
    ch = sample_channels(3, 2, 2, 14)
    pw = PowerConfig(6.0, 12.0)
    reps = by_name(mc_oracle.mc_gsteep(ch, pw, 10_000, seed=0))
    ex = mc_oracle.GsteepModel(ch, pw).exact()
    for key in ("R_dp", "R_phat", "R_dp_prime", "R_dphat_E", "R_ds_A", "R_ds_E"):
        for k in range(2):
            assert reps[f"{key}[{k}]"].analytic == pytest.approx(np.real(ex[key][k, k]), abs=1e-9), key
    assert reps["C_user"].analytic == pytest.approx(ex["C_user"], abs=1e-9)
    assert reps["C_eve"].analytic == pytest.approx(ex["C_eve"], abs=1e-9)


def test_determinism():
    ch = sample_channels(2, 1, 2, 3)
    a = mc_oracle.mc_gsteep(ch, PowerConfig(2.0, 2.0), 20_000, seed=5)
    b = mc_oracle.mc_gsteep(ch, PowerConfig(2.0, 2.0), 20_000, seed=5)
    assert a == b
    c = mc_oracle.mc_gsteep(ch, PowerConfig(2.0, 2.0), 20_000, seed=6)
    assert a != c


def test_seed_may_be_a_sequence():
    a = mc_oracle.mc_psteep(2, gsteep.SisoSnr(5.0, 5.0, 1.0, 1.0), 100_000, seed=[7, 1])
    b = mc_oracle.mc_psteep(2, gsteep.SisoSnr(5.0, 5.0, 1.0, 1.0), 100_000, seed=[7, 1])
    assert a == b


def test_sample_minimum():
    with pytest.raises(InvalidArgumentError):
        mc_oracle.mc_gsteep(ONES, PowerConfig(1.0, 1.0), 100, seed=0)
    with pytest.raises(InvalidArgumentError):
        mc_oracle.mc_psteep(2, gsteep.SisoSnr(1.0, 1.0, 1.0, 1.0), 1000, seed=0)


def test_psk_high_snr_few_errors():
    reps = by_name(mc_oracle.mc_psteep(2, gsteep.SisoSnr(1e4, 1e4, 1.0, 1.0), 100_000, seed=2))
    assert reps["p_eA"].empirical * 100_000 <= 10


def test_psk_anchor_within_three_se():
    reps = by_name(mc_oracle.mc_psteep(2, gsteep.SisoSnr(100.0, 1000.0, 2.0, 2.0), 100_000, seed=3))
    assert abs(reps["p_eA"].z) <= 3


def test_psk_higher_order_gates():
    reps = by_name(mc_oracle.mc_psteep(4, gsteep.SisoSnr(8.0, 16.0, 1.0, 1.0), 200_000, seed=4))
    assert reps["p_eA"].gated and abs(reps["p_eA"].z) <= 3
    assert not reps["p_eE[linear]"].gated
    assert not reps["p_eE[full]"].gated


def test_detect_psk():
    M = 8
    pts = np.exp(2j * np.pi * np.arange(M) / M)
    np.testing.assert_array_equal(mc_oracle.detect_psk(pts, M), np.arange(M))
    # exact ties go to the lower index, including the wrap-around one
    ties = np.array([1 + 1j, 1 - 1j])
    np.testing.assert_array_equal(mc_oracle.detect_psk(ties, 4), [0, 0])
    np.testing.assert_array_equal(mc_oracle.detect_psk(np.array([1j, -1j]), 2), [0, 0])
    np.testing.assert_array_equal(mc_oracle.detect_psk(np.array([-1.0 + 0j, -1 + 0.1j, 1 - 0.1j]), 2), [1, 1, 0])


def test_rotation_invariance():
    reps = mc_oracle.rotation_invariance_check(200_000, seed=8, var=2.0, theta=1.1)
    assert len(reps) == 5
    assert all(abs(r.z) <= 3 for r in reps), reps


def test_msteep_single_ue_matches_gsteep():
    net = random_network(1, 2, 2, 5.0, 10.0, 3)
    ch = ChannelSet(net.h, net.h_A.T, net.H_EA, net.h_E.T)
    g = by_name(mc_oracle.mc_gsteep(ch, PowerConfig(5.0, 10.0), 1_000_000, seed=9))
    m = by_name(mc_oracle.mc_msteep(net, 1_000_000, seed=10))
    assert m["sigma2_ds[0]"].analytic == pytest.approx(g["R_ds_A[0]"].analytic, abs=1e-9)
    assert m["sigma2_ds1E"].analytic == pytest.approx(g["R_ds_E[0]"].analytic, abs=1e-9)
    assert m["E[p_hat0 p_hat0*].real"].analytic == pytest.approx(g["R_phat[0]"].analytic, abs=1e-12)
    for a, b in (("sigma2_ds[0]", "R_ds_A[0]"), ("sigma2_ds1E", "R_ds_E[0]")):
        se = np.hypot(m[a].std_error, g[b].std_error)
        assert abs(m[a].empirical - g[b].empirical) <= 3 * se


def test_msteep_symmetric():
    sym = (0.1, 0.2, 0.3, 0.05)
    reps = by_name(mc_oracle.mc_msteep(msteep.symmetric_network(*sym, 4), 1_000_000, seed=11, symmetric=sym))
    r = reps["1/sigma2_ds[sym]"]
    assert r.analytic == pytest.approx(1 + 1 / msteep.symmetric_analysis(*sym, 4).g_A, rel=1e-12)
    assert abs(r.z) <= 3


def test_msteep_random_probe_correlations():
    net = random_network(3, 2, 2, 4.0, 4.0, 12)
    reps = mc_oracle.mc_msteep(net, 1_000_000, seed=12)
    corr = [r for r in reps if r.name.startswith("E[p_hat")]
    assert len(corr) == 3 + 2 * 3
    st_ = msteep.ue_stats(net)
    assert by_name(corr)["E[p_hat0 p_hat1*].real"].analytic == pytest.approx(
        (st_.c[0] * st_.c[1] * st_.phi[0, 1]).real, rel=1e-12)
    assert all(abs(r.z) <= 3 for r in corr), corr


def test_classic_report():
    ch = sample_channels(2, 2, 2, 1)
    r = mc_oracle.mc_classic_wtc(ch, PowerConfig(3.0, 3.0), np.eye(2), 200_000, seed=13)
    assert abs(r.z) <= 3


def test_perturbation_never_helps():
    reps = mc_oracle.perturbation_check(sample_channels(2, 1, 2, 4), PowerConfig(4.0, 8.0), 200_000, seed=14)
    assert len(reps) == 4
    for r in reps:
        assert r.analytic >= 0
        assert r.empirical >= -3 * r.std_error
        assert abs(r.z) <= 3


def test_standard_error_scaling():
    ch = sample_channels(2, 2, 2, 2)
    pw = PowerConfig(3.0, 3.0)
    se1 = np.mean([mc_oracle.scaled_standard_error(ch, pw, 100_000, seed=s) for s in range(5)])
    se2 = np.mean([mc_oracle.scaled_standard_error(ch, pw, 200_000, seed=s) for s in range(5, 10)])
    assert abs((se1 / se2) / np.sqrt(2) - 1) < 0.2
