"""Release criteria, each run at its stated tolerance.

Every test records a one-line PASS/FAIL verdict that is printed in the
terminal summary, then asserts it.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import ACCEPTANCE
from steep import gsteep, msteep, psteep
from steep.channel_model import ChannelSet, PowerConfig, sample_channels
from steep.config import ValidationConfig
from steep.errors import BoundNotApplicableError
from steep.gsteep import SisoSnr
from steep.sweep import random_network
from steep.validation import suite_oracle

pytestmark = pytest.mark.acceptance


def verdict(n, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} ({detail})"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def rel(x, y):
    return abs(x - y) / max(1.0, abs(y))


@pytest.fixture(scope="module")
def oracle_run():
    cfg = ValidationConfig()
    t0 = time.perf_counter()
    checks = suite_oracle(cfg)
    return checks, time.perf_counter() - t0


def test_criterion_01_psk_anchor():
    snr = SisoSnr(100.0, 1000.0, 2.0, 2.0)
    P = psteep.error_ratio_bound(2, snr).P
    n = 2000
    t0 = time.perf_counter()
    for _ in range(n):
        psteep.error_ratio_bound(2, snr)
    per_call = (time.perf_counter() - t0) / n
    ok = abs(P - 26.4) <= 0.05 and per_call < 1e-3
    verdict(1, "PSK error-ratio anchor P", ok, f"P={P:.4f}, {per_call * 1e6:.1f} us per call")


def test_criterion_02_formula_vs_oracle(oracle_run):
    checks, elapsed = oracle_run
    gated = [c for c in checks if c["gated"]]
    failed = [c for c in gated if not c["passed"]]
    names = ", ".join(f"{c['name']} {c['detail'].split()[0]}" for c in failed)
    ok = not failed and elapsed < 300
    detail = f"{len(gated) - len(failed)}/{len(gated)} gated |z| <= 3 in {elapsed:.0f} s"
    verdict(2, "closed forms vs Monte Carlo", ok, detail + (f"; failed: {names}" if failed else ""))


def test_criterion_03_cross_path_identities():
    rng = np.random.default_rng(303)
    worst = 0.0
    for k in range(50):
        p_A, p_B = 10 ** rng.uniform(-1, 3, 2)
        pw = PowerConfig(p_A, p_B)
        ch = sample_channels(int(rng.integers(1, 5)), 1, int(rng.integers(1, 5)), [303, k])
        g, c = gsteep.gsteep_secrecy_rate(ch, pw), gsteep.corollary1_breakdown(ch, pw)
        worst = max(worst, rel(g.C_user, c.C_user), rel(g.C_eve, c.C_eve), rel(g.R_s, c.R_s))
        ch1 = sample_channels(1, 1, int(rng.integers(1, 5)), [304, k])
        g1 = gsteep.gsteep_secrecy_rate(ch1, pw)
        c1 = gsteep.corollary1_breakdown(ch1, pw)
        s1 = gsteep.siso_secrecy_rate(gsteep.siso_snr_from_channels(ch1, pw))
        for other in (c1, s1):
            worst = max(worst, rel(g1.C_user, other.C_user), rel(g1.C_eve, other.C_eve), rel(g1.R_s, other.R_s))
    worst_t = 0.0
    for k in range(50):
        M = int(rng.integers(2, 9))
        net = random_network(M, 1, int(rng.integers(1, 4)), 10 ** rng.uniform(-1, 3), 10 ** rng.uniform(-1, 3),
                             [305, k])
        t = msteep.t1m_appendix_c(net)
        worst_t = max(worst_t, rel(t.recursion, t.quadratic_form))
    ok = worst <= 1e-9 and worst_t <= 1e-9
    verdict(3, "cross-path identities", ok, f"max rate error {worst:.2e}, max t error {worst_t:.2e}")


def test_criterion_04_siso_threshold():
    rng = np.random.default_rng(404)
    bad = 0
    for _ in range(20):
        a = 10 ** rng.uniform(-1, 4)
        alpha = 10 ** rng.uniform(-1, 1)
        beta = 1 + 10 ** rng.uniform(-1, 1)
        b_bar = gsteep.siso_threshold_b(a, alpha, beta)
        lo = gsteep.siso_secrecy_rate(SisoSnr(a, b_bar * (1 - 1e-3), alpha, beta)).R_s
        hi = gsteep.siso_secrecy_rate(SisoSnr(a, b_bar * (1 + 1e-3), alpha, beta)).R_s
        bad += not (lo == 0.0 and hi > 0.0)
    verdict(4, "echo-SNR threshold sign change", bad == 0, f"{20 - bad}/20 draws")


def test_criterion_05_dof():
    grid = 10 ** np.arange(4.0, 8.0001, 0.25)
    worst, lines = 0.0, []
    for dims in ((4, 2, 1), (2, 2, 2), (3, 1, 2), (3, 2, 3)):
        est = gsteep.dof_slope(sample_channels(*dims, 505), 1.0, grid)
        tol = 0.05 * max(1, est.reference)
        err = max(abs(est.slope_rate - est.reference), abs(est.slope_key - est.reference)) / tol
        worst = max(worst, err)
        lines.append(f"{dims}: {est.slope_rate:.3f}/{est.slope_key:.3f} vs {est.reference}")
    verdict(5, "degrees of freedom", worst <= 1.0, "; ".join(lines))


def test_criterion_06_high_power_limit():
    ok, gaps = True, []
    for k, dims in enumerate(((1, 1, 1), (2, 1, 2), (2, 2, 2), (2, 2, 3), (3, 2, 4))):
        ch = sample_channels(*dims, [606, k])
        near = gsteep.highpower_gap(ch, 1e4, 1e3)
        far = gsteep.highpower_gap(ch, 1e2, 10.0)
        ok &= near.gap_rate < 0.05 and near.gap_rate < far.gap_rate
        gaps.append(f"{near.gap_rate:.3g}<{far.gap_rate:.3g}")
    r = gsteep.siso_secrecy_rate(SisoSnr(1e4, 1e7, 1.0, 1.0)).R_s
    ok &= abs(r - 1.0) <= 0.02
    verdict(6, "high-power convergence", ok, f"gaps {', '.join(gaps)}; SISO anchor R_s={r:.5f}")


def test_criterion_07_key_capacity_vs_rate():
    alphas = np.logspace(-1, 1, 5)
    a_s = np.logspace(-1, 4, 5)
    b_s = np.logspace(-1, 6, 5)
    worst = np.inf
    for beta in (1.0, 2.0, 10.0):
        for al in alphas:
            for a in a_s:
                ck = gsteep.siso_key_capacity(a, al)
                for b in b_s:
                    worst = min(worst, ck - gsteep.siso_secrecy_rate(SisoSnr(a, b, al, beta)).R_s)
    found = 0
    for al in alphas:
        for a in a_s:
            ck = gsteep.siso_key_capacity(a, al)
            found += any(
                gsteep.siso_secrecy_rate(SisoSnr(a, b, al, be)).R_s > ck
                for be in np.logspace(-6, -0.01, 30) for b in np.logspace(-1, 8, 40)
            )
    ok = worst > 0 and found == 25
    verdict(7, "key capacity vs secrecy rate", ok, f"min C_key - R_s = {worst:.3g} for beta >= 1; "
            f"search succeeded for {found}/25 (alpha, a)")


def _ue_margin(net, p):
    r = msteep.msteep_secrecy_rate_ue1(net.with_uplink_power(0, p))
    return r.R_A - r.C_E


def test_criterion_08_multi_user_thresholds():
    rng = np.random.default_rng(808)
    notes, ok = [], True
    for M in (1, 2, 4, 8):
        net = random_network(M, 1, 1, 30.0, 3.0, [808, M])
        h_E = net.h_E.copy()
        h_E[0] *= 2.0 * np.abs(net.h_A[0, 0]) / np.abs(h_E[0, 0])
        net = msteep.MultiAccessNetwork(net.h, net.h_A, h_E, net.H_EA, net.p_A, net.p_u)
        p_star = msteep.positivity_threshold_ue1(net) / np.abs(net.h_A[0, 0]) ** 2
        lo, hi = _ue_margin(net, p_star * (1 - 1e-3)), _ue_margin(net, p_star * (1 + 1e-3))
        ok &= lo < 0 < hi
    notes.append("UE_1 thresholds M=1,2,4,8")

    pos = 0
    for _ in range(20):
        s2, s2ea = 10 ** rng.uniform(-2, 1, 2)
        s2a = 10 ** rng.uniform(-2, 1)
        beta0 = rng.uniform(0.1, 1.0)
        M = int(rng.integers(1, 20))
        pos += msteep.symmetric_analysis(s2, s2a, s2a / beta0, s2ea, M).last_positive
    ok &= pos == 20
    notes.append(f"beta0<=1 positive {pos}/20")

    worst = 0.0
    for _ in range(10):
        s2, s2ea = 10 ** rng.uniform(-2, 1, 2)
        M = int(rng.integers(1, 50))
        thr = msteep.symmetric_threshold(2.0, s2, s2ea, M)
        below = msteep.symmetric_analysis(s2, thr * (1 - 1e-3), thr * (1 - 1e-3) / 2, s2ea, M).R_terms[-1]
        above = msteep.symmetric_analysis(s2, thr * (1 + 1e-3), thr * (1 + 1e-3) / 2, s2ea, M).R_terms[-1]
        ok &= below > 0 > above
        root = brentq(lambda x: msteep.symmetric_gap(s2, x, x / 2.0, s2ea, M), thr / 10, thr * 10,
                      xtol=1e-16, rtol=4 * np.finfo(float).eps)
        worst = max(worst, abs(root - thr) / thr)
    ok &= worst < 1e-8
    notes.append(f"beta0=2 bisection residual {worst:.1e}")

    t1 = msteep.symmetric_threshold(2.0, 0.1, 0.05, 1000) * 1000
    t2 = msteep.symmetric_threshold(2.0, 0.1, 0.05, 2000) * 2000
    ok &= abs(t1 / t2 - 1) <= 0.1
    notes.append(f"M*threshold ratio {t1 / t2:.4f}")
    verdict(8, "multi-user thresholds", ok, "; ".join(notes))


def test_criterion_09_psk_equivalences(oracle_run):
    rng = np.random.default_rng(909)
    agree = 0
    for _ in range(1000):
        snr = SisoSnr(*(10 ** rng.uniform([-1, -1, -2, -2], [4, 4, 2, 2])))
        M = int(rng.choice([2, 4, 8]))
        ep = psteep.psk_error_params(M, snr)
        cond = psteep.psteep_power_condition(snr)
        # error rates below the smallest double are both 0; compare the Q arguments then
        pe = ep.p_eA < ep.p_eE if (ep.p_eA > 0 or ep.p_eE > 0) else ep.eps_A < ep.eps_E
        agree += cond == (ep.eps_A < ep.eps_E) == pe
    checks, _ = oracle_run
    ber = [c for c in checks if c["name"].startswith("psteep") and c["name"].endswith(":p_eA")]
    ber_ok = sum(c["passed"] for c in ber)
    ok = agree == 1000 and ber_ok == len(ber) and len(ber) == 20
    verdict(9, "PSK equivalences and error rate", ok, f"{agree}/1000 draws agree; Alice BER within 3 SE "
            f"in {ber_ok}/{len(ber)} oracle configs")


def test_criterion_10_cli_determinism(tmp_path):
    env = dict(os.environ)
    env.pop("STEEP_SEED", None)
    codes, outs = [], []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        r = subprocess.run([sys.executable, "-m", "steep", "validate", "--out", str(out)],
                           capture_output=True, text=True, env=env)
        codes.append(r.returncode)
        outs.append(out.read_bytes() if out.exists() else None)
    same = outs[0] is not None and outs[0] == outs[1]
    ok = codes == [0, 0] and same
    verdict(10, "validate determinism", ok, f"exit codes {codes}, reports byte-identical: {same}")
