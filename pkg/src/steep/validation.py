"""Validation suites run by ``steep validate``.

Each suite returns a list of check records. A record carries the measured
value, its reference, the tolerance and a verdict; ungated records are
informational. Suites never stop at a failing check.

Suites
------
oracle
    Closed forms against Monte Carlo simulation on random configurations.
identities
    Independent computation paths that must agree to round-off.
propositions
    Thresholds, degrees of freedom, high-power limits, key capacity
    comparisons and the PSK error-rate relations.
appendixC
    The multi-user quadratic form ``t_{1,M}``: recursion, direct solve and bounds.
appendixD
    The symmetric multi-user network: closed forms, threshold root and scaling.
"""

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import optimize, special

from . import gsteep, mc_oracle, msteep, psteep
from .channel_model import PowerConfig, sample_channels, scale_channels
from .config import ValidationConfig
from .errors import ConsistencyError, SteepError
from .sweep import random_network

# stream ids keep the random draws of different suites apart
_S_GSTEEP, _S_PSTEEP, _S_MSTEEP, _S_SYM = 0, 1, 2, 3
_S_IDENT, _S_APPC, _S_APPD, _S_PROP, _S_ROOT = 10, 11, 12, 13, 14

DOF_TRIPLES = ((4, 2, 1), (2, 2, 2), (3, 1, 2), (3, 2, 3))
PROP2_TRIPLES = ((1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 2, 3), (2, 1, 3))
THRESHOLD_M = (1, 2, 4, 8)
ORACLE_SYMMETRIC = (0.1, 0.2, 0.3, 0.05, 4)


def check(suite, name, passed, value=None, reference=None, tolerance=None, metric="", gated=True, detail=""):
    return {
        "suite": suite,
        "name": name,
        "value": value,
        "reference": reference,
        "metric": metric,
        "tolerance": tolerance,
        "passed": bool(passed),
        "gated": bool(gated),
        "detail": detail,
    }


def _rel_err(x, ref):
    return abs(x - ref) / max(1.0, abs(ref))


def _loguniform(rng, lo, hi, size=None):
    return 10.0 ** rng.uniform(math.log10(lo), math.log10(hi), size)


# -- oracle ------------------------------------------------------------------


def oracle_gsteep_config(seed, k):
    rng = np.random.default_rng([seed, _S_GSTEEP, k])
    n_B = int(rng.integers(1, 3))
    n_A = int(rng.integers(n_B, 4))
    n_E = int(rng.integers(1, 4))
    p_A, p_B = _loguniform(rng, 1.0, 100.0, 2)
    ch = sample_channels(n_A, n_B, n_E, [seed, _S_GSTEEP, k, 1])
    return ch, PowerConfig(p_A, p_B)


def oracle_psteep_config(seed, k):
    """A PSK link whose user error rate lies in [2e-3, 2e-2]."""
    rng = np.random.default_rng([seed, _S_PSTEEP, k])
    cfg = psteep.PskConfig(int(rng.choice([2, 4, 8])))
    p = _loguniform(rng, 2e-3, 2e-2)
    x = math.sqrt(2.0) * special.erfcinv(2.0 * p / cfg.n0)
    eps2 = (cfg.min_dist_half / x) ** 2
    u = rng.uniform(0.3, 0.7)
    alpha, beta = _loguniform(rng, 0.5, 4.0, 2)
    return cfg.M, gsteep.SisoSnr(1.0 / (2.0 * eps2 * u), 1.0 / (2.0 * eps2 * (1.0 - u)), alpha, beta)


def oracle_msteep_config(seed, k):
    rng = np.random.default_rng([seed, _S_MSTEEP, k])
    M = int(rng.integers(1, 4))
    n_A, n_E = (int(v) for v in rng.integers(1, 3, 2))
    p_A, p_u = _loguniform(rng, 1.0, 100.0, 2)
    return random_network(M, n_A, n_E, p_A, p_u, [seed, _S_MSTEEP, k, 1])


def _oracle_task(task):
    kind, k, seed, n_gauss, n_psk = task
    if kind == "gsteep":
        ch, pw = oracle_gsteep_config(seed, k)
        label = f"gsteep#{k}(n={ch.n_A},{ch.n_B},{ch.n_E})"
        reps = mc_oracle.mc_gsteep(ch, pw, n_gauss, [seed, _S_GSTEEP, k, 2])
    elif kind == "psteep":
        M, snr = oracle_psteep_config(seed, k)
        label = f"psteep#{k}(M={M})"
        reps = mc_oracle.mc_psteep(M, snr, n_psk, [seed, _S_PSTEEP, k, 2])
    elif kind == "msteep":
        net = oracle_msteep_config(seed, k)
        label = f"msteep#{k}(M={net.M},n_A={net.n_A},n_E={net.n_E})"
        reps = mc_oracle.mc_msteep(net, n_gauss, [seed, _S_MSTEEP, k, 2])
    else:
        *sym, M = ORACLE_SYMMETRIC
        label = f"msteep-symmetric(M={M})"
        net = msteep.symmetric_network(*sym, M)
        reps = mc_oracle.mc_msteep(net, n_gauss, [seed, _S_SYM, k], symmetric=tuple(sym))
    return label, [r.as_dict() for r in reps]


def suite_oracle(cfg: ValidationConfig, jobs=1):
    tol = cfg.tolerances["z"]
    tasks = []
    for kind in ("gsteep", "psteep", "msteep"):
        tasks += [(kind, k, cfg.seed, cfg.gaussian_samples, cfg.psk_symbols) for k in range(cfg.configs_per_scheme)]
    tasks.append(("symmetric", 0, cfg.seed, cfg.gaussian_samples, cfg.psk_symbols))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_oracle_task, tasks))
    else:
        results = [_oracle_task(t) for t in tasks]
    out = []
    for label, reps in results:
        for r in reps:
            out.append(check(
                "oracle", f"{label}:{r['name']}", abs(r["z"]) <= tol,
                value=r["empirical"], reference=r["analytic"], tolerance=tol, metric="|z|",
                gated=r["gated"], detail=f"z={r['z']:.4f} se={r['std_error']:.4g} n={r['n_samples']}",
            ))
    return out


# -- identities --------------------------------------------------------------


def _breakdown_err(x, y):
    return max(_rel_err(x.C_user, y.C_user), _rel_err(x.C_eve, y.C_eve), _rel_err(x.R_s, y.R_s))


def suite_identities(cfg: ValidationConfig, jobs=1):
    tol = cfg.tolerances["identity"]
    out = []
    for k in range(cfg.instances):
        rng = np.random.default_rng([cfg.seed, _S_IDENT, k])
        pw = PowerConfig(*_loguniform(rng, 0.1, 1e3, 2))
        n_E = int(rng.integers(1, 4))

        ch = sample_channels(1, 1, n_E, [cfg.seed, _S_IDENT, k, 1])
        g = gsteep.gsteep_secrecy_rate(ch, pw)
        c1 = gsteep.corollary1_breakdown(ch, pw)
        s = gsteep.siso_secrecy_rate(gsteep.siso_snr_from_channels(ch, pw))
        e1, e2 = _breakdown_err(g, c1), _breakdown_err(g, s)
        out.append(check("identities", f"siso#{k}: gsteep == corollary1", e1 <= tol, e1, 0.0, tol, "rel"))
        out.append(check("identities", f"siso#{k}: gsteep == siso", e2 <= tol, e2, 0.0, tol, "rel"))

        n_A = int(rng.integers(2, 5))
        ch = sample_channels(n_A, 1, n_E, [cfg.seed, _S_IDENT, k, 2])
        e = _breakdown_err(gsteep.gsteep_secrecy_rate(ch, pw), gsteep.corollary1_breakdown(ch, pw))
        out.append(check("identities", f"nB1#{k}(n_A={n_A}): gsteep == corollary1", e <= tol, e, 0.0, tol, "rel"))

        # closed forms against covariances of the simulated signal model
        n_B = int(rng.integers(1, 3))
        ch = sample_channels(n_B + int(rng.integers(0, 2)), n_B, n_E, [cfg.seed, _S_IDENT, k, 3])
        ex = mc_oracle.GsteepModel(ch, pw).exact()
        br = gsteep.gsteep_secrecy_rate(ch, pw)
        sc = scale_channels(ch, pw)
        st = gsteep.effective_probe_stats(sc.Hp_BA)
        R_e, _ = gsteep.eve_probe_mse(sc.Hp_EA, st)
        diffs = [
            _rel_err(br.C_user, ex["C_user"]),
            _rel_err(br.C_eve, ex["C_eve"]),
            float(np.max(np.abs(st.R_dp - ex["R_dp"]))),
            float(np.max(np.abs(st.R_dp_prime - ex["R_dp_prime"]))),
            float(np.max(np.abs(R_e - ex["R_dphat_E"]))),
        ]
        e = max(diffs)
        out.append(check("identities", f"model#{k}(n={ch.n_A},{n_B},{n_E}): closed form == signal model",
                         e <= tol, e, 0.0, tol, "max abs/rel"))

        M = int(rng.integers(1, 5))
        net = random_network(M, int(rng.integers(1, 3)), int(rng.integers(1, 3)), *_loguniform(rng, 1.0, 100.0, 2),
                             [cfg.seed, _S_IDENT, k, 4])
        chain = msteep.total_secrecy_terms(net).eve_total
        direct = msteep.eve_total_information(net)
        e = _rel_err(chain, direct)
        out.append(check("identities", f"msteep#{k}(M={M}): Eve chain rule == log-det", e <= tol, e, 0.0, tol, "rel"))

        model = mc_oracle.MsteepModel(net)
        err = model.err_eve_cond[0]
        sim = float(np.real(err @ err.conj().T)[0, 0])
        e = _rel_err(msteep.eve_joint_mse_ue1(net).sigma2, sim)
        out.append(check("identities", f"msteep#{k}(M={M}): Eve MSE of s_1 == signal model", e <= tol, e, 0.0, tol, "rel"))
    return out


# -- appendix C --------------------------------------------------------------


def suite_appendix_c(cfg: ValidationConfig, jobs=1):
    tol = cfg.tolerances["identity"]
    out = []
    for k in range(cfg.instances):
        rng = np.random.default_rng([cfg.seed, _S_APPC, k])
        M = int(rng.integers(2, 9))
        n_E = int(rng.integers(1, 4))
        p_A, p_u = _loguniform(rng, 0.1, 1e3, 2)
        net = random_network(M, 1, n_E, p_A, p_u, [cfg.seed, _S_APPC, k, 1])
        name = f"t1M#{k}(M={M},n_E={n_E})"
        try:
            t = msteep.t1m_appendix_c(net)
        except ConsistencyError as exc:
            out.append(check("appendixC", f"{name}: recursion == quadratic form", False, detail=str(exc)))
            continue
        e = _rel_err(t.recursion, t.quadratic_form)
        out.append(check("appendixC", f"{name}: recursion == quadratic form", e <= tol,
                         t.recursion, t.quadratic_form, tol, "rel"))
        st = msteep.ue_stats(net)
        bound = min(M - 1.0, st.S_EA + 1.0)
        out.append(check("appendixC", f"{name}: 0 <= t < min(M-1, S_EA+1)", 0.0 <= t.quadratic_form < bound,
                         t.quadratic_form, bound, None, "bound"))
        closed = 1.0 + msteep.gamma1_closed_form(st.S[0], st.S_EA, t.quadratic_form)
        e = _rel_err(closed, msteep.eve_joint_mse_ue1(net, st).gamma_1)
        out.append(check("appendixC", f"{name}: gamma_1 closed form == matrix", e <= tol, e, 0.0, tol, "rel"))
    return out


# -- appendix D --------------------------------------------------------------


def _symmetric_draw(rng):
    return tuple(_loguniform(rng, 0.01, 1.0, 2))


def suite_appendix_d(cfg: ValidationConfig, jobs=1):
    tol = cfg.tolerances["identity"]
    out = []
    for k in range(cfg.instances):
        rng = np.random.default_rng([cfg.seed, _S_APPD, k])
        s2, s2_ea = _symmetric_draw(rng)
        s2_a, s2_e = _loguniform(rng, 0.01, 1.0, 2)
        M = int(rng.integers(1, 9))
        name = f"sym#{k}(M={M})"
        try:
            sym = msteep.symmetric_analysis(s2, s2_a, s2_e, s2_ea, M)
        except ConsistencyError as exc:
            out.append(check("appendixD", f"{name}: g_E closed form == matrix", False, detail=str(exc)))
            continue
        e = _rel_err(sym.g_E_closed, sym.g_E)
        out.append(check("appendixD", f"{name}: g_E closed form == matrix", e <= tol, e, 0.0, tol, "rel"))
        e = _rel_err(sym.gap_closed, sym.g_E - sym.g_A)
        out.append(check("appendixD", f"{name}: gap closed form == g_E - g_A", e <= tol, e, 0.0, tol, "rel"))
        terms = msteep.total_secrecy_terms(msteep.symmetric_network(s2, s2_a, s2_e, s2_ea, M)).terms
        e = max(_rel_err(x, t.R_tilde) for x, t in zip(sym.R_terms, terms))
        out.append(check("appendixD", f"{name}: terms == general network", e <= tol, e, 0.0, tol, "rel"))
        # beta0 <= 1: Eve's echo is no cleaner than the AP's
        lo, hi = sorted((s2_a, s2_e))
        last = msteep.symmetric_analysis(s2, lo, hi, s2_ea, M).R_terms[-1]
        out.append(check("appendixD", f"{name}: beta0 <= 1 gives a positive last term", last > 0, last, 0.0, None, ">"))

    delta = cfg.tolerances["threshold_rel"]
    rtol = cfg.tolerances["bisection"]
    rng = np.random.default_rng([cfg.seed, _S_ROOT])
    for M in THRESHOLD_M:
        s2, s2_ea = _symmetric_draw(rng)
        tau = msteep.symmetric_threshold(2.0, s2, s2_ea, M)
        name = f"threshold(beta0=2,M={M})"
        below = msteep.symmetric_analysis(s2, tau * (1 - delta), tau * (1 - delta) / 2, s2_ea, M).R_terms[-1]
        above = msteep.symmetric_analysis(s2, tau * (1 + delta), tau * (1 + delta) / 2, s2_ea, M).R_terms[-1]
        out.append(check("appendixD", f"{name}: positive below", below > 0, below, 0.0, delta, ">"))
        out.append(check("appendixD", f"{name}: negative above", above < 0, above, 0.0, delta, "<"))
        root = optimize.bisect(lambda x: msteep.symmetric_gap(s2, x, x / 2, s2_ea, M), tau / 10, tau * 10,
                               xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
        e = abs(root - tau) / tau
        out.append(check("appendixD", f"{name}: bisection root == closed-form root", e < rtol, root, tau, rtol, "rel"))

    stol = cfg.tolerances["scaling"]
    for k in range(5):
        s2, s2_ea = _symmetric_draw(rng)
        t1 = msteep.symmetric_threshold(2.0, s2, s2_ea, 1000)
        t2 = msteep.symmetric_threshold(2.0, s2, s2_ea, 2000)
        ratio = t1 / t2
        out.append(check("appendixD", f"scaling#{k}: threshold(M=1e3)/threshold(M=2e3) ~ 2",
                         abs(ratio / 2.0 - 1.0) <= stol, ratio, 2.0, stol, "rel"))
        c = msteep.symmetric_threshold_coeffs(2.0, s2, s2_ea, 1000)
        e = abs(t1 - c.c0 / c.c1) / t1
        out.append(check("appendixD", f"scaling#{k}: threshold(M=1e3) ~ c0/c1", e <= stol, t1, c.c0 / c.c1, stol, "rel"))
    return out


# -- propositions ------------------------------------------------------------


def _siso_rate(a, b, alpha, beta):
    return gsteep.siso_secrecy_rate(gsteep.SisoSnr(a, b, alpha, beta)).R_s


def suite_propositions(cfg: ValidationConfig, jobs=1):
    tol = cfg.tolerances
    out = []

    # PSK anchor
    snr = gsteep.SisoSnr(100.0, 1000.0, 2.0, 2.0)
    P = psteep.error_ratio_bound(2, snr).P
    ep = psteep.psk_error_params(2, snr)
    out.append(check("propositions", "PSK anchor P ~ 26.4", abs(P - 26.4) <= tol["P_anchor"], P, 26.4,
                     tol["P_anchor"], "abs"))
    P_alt = ((1.0 / ep.eps_A) ** 2 - (1.0 / ep.eps_E) ** 2) / 2.0
    e = _rel_err(P, P_alt)
    out.append(check("propositions", "PSK anchor P == (x_A^2 - x_E^2)/2", e <= tol["identity"], P, P_alt,
                     tol["identity"], "rel"))

    # echo-SNR threshold of the single-antenna Gaussian scheme
    delta = tol["threshold_rel"]
    for k in range(cfg.configs_per_scheme):
        rng = np.random.default_rng([cfg.seed, _S_PROP, 0, k])
        a = _loguniform(rng, 1.0, 1e3)
        alpha = _loguniform(rng, 0.1, 10.0)
        beta = 1.0 + _loguniform(rng, 0.1, 10.0)
        bbar = gsteep.siso_threshold_b(a, alpha, beta)
        lo, hi = _siso_rate(a, bbar * (1 - delta), alpha, beta), _siso_rate(a, bbar * (1 + delta), alpha, beta)
        out.append(check("propositions", f"b_threshold#{k}: R_s = 0 below, > 0 above", lo == 0.0 and hi > 0.0,
                         hi, bbar, delta, "sign", detail=f"R_s(below)={lo!r} R_s(above)={hi!r}"))

    # degrees of freedom
    grid = 10.0 ** np.arange(4.0, 8.01, 0.5)
    for i, (n_A, n_B, n_E) in enumerate(DOF_TRIPLES):
        ch = sample_channels(n_A, n_B, n_E, [cfg.seed, _S_PROP, 1, i])
        d = gsteep.dof_slope(ch, 1.0, grid)
        t = tol["dof"] * max(1, d.reference)
        for what, slope in (("R_s", d.slope_rate), ("C_key", d.slope_key)):
            out.append(check("propositions", f"DoF({n_A},{n_B},{n_E}) {what}", abs(slope - d.reference) <= t,
                             slope, d.reference, t, "abs"))

    # high-power limit
    for i, (n_A, n_B, n_E) in enumerate(PROP2_TRIPLES):
        ch = sample_channels(n_A, n_B, n_E, [cfg.seed, _S_PROP, 2, i])
        hi = gsteep.highpower_gap(ch, 1e4, 1e3)
        lo = gsteep.highpower_gap(ch, 1e2, 10.0)
        ok = hi.gap_rate < tol["prop2_gap"] and hi.gap_rate < lo.gap_rate
        out.append(check("propositions", f"high-power limit({n_A},{n_B},{n_E})", ok, hi.gap_rate, 0.0,
                         tol["prop2_gap"], "abs", detail=f"gap at (1e2,10) = {lo.gap_rate!r}"))
    r = _siso_rate(1e4, 1e7, 1.0, 1.0)
    out.append(check("propositions", "SISO anchor a=1e4 b=1e7 alpha=beta=1", abs(r - 1.0) <= tol["siso_anchor"],
                     r, 1.0, tol["siso_anchor"], "abs"))

    # key capacity against secrecy rate
    a_grid, al_grid = np.logspace(0, 4, 5), np.logspace(-1, 1, 5)
    be_grid, b_grid = (1.0, 1.5, 2.0, 4.0, 10.0), np.logspace(0, 8, 5)
    worst = math.inf
    for a in a_grid:
        for al in al_grid:
            ck = gsteep.siso_key_capacity(a, al)
            for be in be_grid:
                for b in b_grid:
                    worst = min(worst, ck - _siso_rate(a, b, al, be))
    out.append(check("propositions", "C_key > R_s for beta >= 1 (5x5x5 grid, 5 values of b)", worst > 0,
                     worst, 0.0, None, "min margin"))
    found = 0
    for a in a_grid:
        for al in al_grid:
            ck = gsteep.siso_key_capacity(a, al)
            found += any(_siso_rate(a, b, al, be) > ck for be in (0.5, 0.1, 0.01, 0.0) for b in np.logspace(0, 8, 17))
    n_pairs = a_grid.size * al_grid.size
    out.append(check("propositions", "beta < 1 search finds R_s > C_key for every (a, alpha)", found == n_pairs,
                     found, n_pairs, None, "count"))

    # per-UE threshold of the multi-user scheme
    for M in THRESHOLD_M:
        rng = np.random.default_rng([cfg.seed, _S_PROP, 3, M])
        net = random_network(M, 1, int(rng.integers(1, 3)), *_loguniform(rng, 1.0, 100.0, 2),
                             [cfg.seed, _S_PROP, 3, M, 1])
        gA = float(np.sum(np.abs(net.h_A[0]) ** 2))
        gE = float(np.sum(np.abs(net.h_E[0]) ** 2))
        h_E = net.h_E.copy()
        h_E[0] *= math.sqrt(2.0 * gA / gE)  # beta_1 = 2
        net = msteep.MultiAccessNetwork(net.h, net.h_A, h_E, net.H_EA, net.p_A, net.p_u)
        tau = msteep.positivity_threshold_ue1(net)
        lo = msteep.msteep_secrecy_rate_ue1(net.with_uplink_power(0, tau * (1 - delta) / gA)).R_s
        hi = msteep.msteep_secrecy_rate_ue1(net.with_uplink_power(0, tau * (1 + delta) / gA)).R_s
        out.append(check("propositions", f"UE_1 threshold(M={M}): R_s = 0 below, > 0 above",
                         lo == 0.0 and hi > 0.0, hi, tau, delta, "sign",
                         detail=f"R_s(below)={lo!r} R_s(above)={hi!r}"))

    # PSK: power condition, effective noise order and error-rate order agree
    rng = np.random.default_rng([cfg.seed, _S_PROP, 4])
    bad = 0
    for _ in range(1000):
        M = int(rng.choice([2, 4, 8]))
        snr = gsteep.SisoSnr(*_loguniform(rng, 0.1, 100.0, 2), *_loguniform(rng, 0.1, 10.0, 2))
        ep = psteep.psk_error_params(M, snr)
        c = psteep.psteep_power_condition(snr)
        bad += not (c == (ep.eps_A < ep.eps_E) == (ep.p_eA < ep.p_eE))
    out.append(check("propositions", "PSK: power condition <=> eps_A < eps_E <=> p_eA < p_eE (1000 draws)",
                     bad == 0, bad, 0, None, "mismatches"))
    return out


SUITE_FUNCS = {
    "oracle": suite_oracle,
    "identities": suite_identities,
    "propositions": suite_propositions,
    "appendixC": suite_appendix_c,
    "appendixD": suite_appendix_d,
}


def run_validation(cfg: ValidationConfig, jobs=1):
    """Run the selected suites and return ``(report, exit_status)``.

    The status is 0 iff every gated check passed. An unexpected library
    error inside a suite is recorded as one failed check for that suite.
    """
    checks = []
    for name in cfg.suites:
        try:
            checks += SUITE_FUNCS[name](cfg, jobs)
        except (SteepError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            checks.append(check(name, f"{name}: suite aborted", False, detail=f"{type(exc).__name__}: {exc}"))
    gated = [c for c in checks if c["gated"]]
    failed = [c for c in gated if not c["passed"]]
    report = {
        "seed": cfg.seed,
        "suites": list(cfg.suites),
        "samples": {"gaussian": cfg.gaussian_samples, "psk": cfg.psk_symbols},
        "configs_per_scheme": cfg.configs_per_scheme,
        "instances": cfg.instances,
        "tolerances": dict(cfg.tolerances),
        "summary": {"checks": len(checks), "gated": len(gated), "failed": len(failed), "passed": not failed},
        "checks": checks,
    }
    return report, (0 if not failed else 1)


__all__ = [
    "SUITE_FUNCS",
    "check",
    "oracle_gsteep_config",
    "oracle_msteep_config",
    "oracle_psteep_config",
    "run_validation",
    "suite_appendix_c",
    "suite_appendix_d",
    "suite_identities",
    "suite_oracle",
    "suite_propositions",
]
