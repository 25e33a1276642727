"""Parameter sweeps: one row of closed-form results per grid point."""

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import gsteep, msteep, psteep
from .channel_model import (
    PowerConfig,
    channel_strength_ratio_alpha,
    classic_wtc_terms,
    sample_channels,
    scale_channels,
)
from .config import SweepSpec
from .errors import BoundNotApplicableError, RatioUndefinedError, UnsupportedConfigurationError

RESULT_COLUMNS = {
    ("gsteep", "siso"): ("C_user", "C_eve", "R_s", "C_key", "log2_N_user", "log2_D_user",
                         "log2_N_eve", "log2_D_eve", "R_s_limit_large_b", "b_threshold"),
    ("gsteep", "mimo"): ("C_user", "C_eve", "R_s", "C_key", "log2_N_user", "log2_D_user",
                         "log2_N_eve", "log2_D_eve"),
    ("psteep", "siso"): ("C_user", "C_eve", "R_s", "R_s_h2", "eps_A", "eps_E", "p_eA", "p_eE",
                         "power_condition", "P", "error_ratio_bound", "approx_warning"),
    ("msteep", "symmetric"): ("C_user", "C_eve", "R_s", "R_tilde_last", "R_tilde_sum", "g_A", "g_E",
                              "sigma2_A_threshold"),
    ("msteep", "random"): ("C_user", "C_eve", "R_s", "R_tilde_sum", "gamma_1", "S_A1_threshold"),
    ("classic", "mimo"): ("C_user", "C_eve", "R_s", "alpha_ratio"),
}


def columns(spec: SweepSpec):
    """Output columns: scheme, the grid keys, the results, then ``error``."""
    key = (spec.scheme, spec.mode)
    return ("scheme",) + spec.keys + RESULT_COLUMNS[key] + ("error",)


def _gsteep_siso(p, seed):
    snr = gsteep.SisoSnr(p["a"], p["b"], p["alpha"], p["beta"])
    br = gsteep.siso_secrecy_rate(snr)
    return dict(
        C_user=br.C_user, C_eve=br.C_eve, R_s=br.R_s,
        C_key=gsteep.siso_key_capacity(snr.a, snr.alpha),
        log2_N_user=br.log_terms.log2_N_user, log2_D_user=br.log_terms.log2_D_user,
        log2_N_eve=br.log_terms.log2_N_eve, log2_D_eve=br.log_terms.log2_D_eve,
        R_s_limit_large_b=gsteep.siso_rate_limit_large_b(snr),
        b_threshold=gsteep.siso_threshold_b(snr.a, snr.alpha, snr.beta),
    )


def _gsteep_mimo(p, seed):
    ch = sample_channels(p["n_A"], p["n_B"], p["n_E"], [seed, p["realization"]])
    pw = PowerConfig(p["p_A"], p["p_B"])
    br = gsteep.gsteep_secrecy_rate(ch, pw)
    sc = scale_channels(ch, pw)
    return dict(
        C_user=br.C_user, C_eve=br.C_eve, R_s=br.R_s,
        C_key=gsteep.secret_key_capacity(sc.Hp_BA, sc.Hp_EA),
        log2_N_user=br.log_terms.log2_N_user, log2_D_user=br.log_terms.log2_D_user,
        log2_N_eve=br.log_terms.log2_N_eve, log2_D_eve=br.log_terms.log2_D_eve,
    )


def _psteep(p, seed):
    snr = gsteep.SisoSnr(p["a"], p["b"], p["alpha"], p["beta"])
    res = psteep.psteep_secrecy_rate(p["M"], snr)
    ep = psteep.psk_error_params(p["M"], snr)
    row = dict(
        C_user=res.C_user, C_eve=res.C_eve, R_s=res.R_s, R_s_h2=res.rate_h2_difference,
        eps_A=ep.eps_A, eps_E=ep.eps_E, p_eA=ep.p_eA, p_eE=ep.p_eE,
        power_condition=psteep.psteep_power_condition(snr), approx_warning=res.approx_warning,
    )
    try:
        b = psteep.error_ratio_bound(p["M"], snr)
        row.update(P=b.P, error_ratio_bound=b.bound)
    except BoundNotApplicableError:
        pass
    return row


def _msteep_symmetric(p, seed):
    args = (p["sigma2"], p["sigma2_A"], p["sigma2_E"], p["sigma2_EA"])
    sym = msteep.symmetric_analysis(*args, p["M"])
    c_user = -math.log2(sym.sigma2_ap)
    c_eve = -math.log2(sym.sigma2_eve[-1])
    row = dict(
        C_user=c_user, C_eve=c_eve, R_s=max(0.0, float(sym.R_terms[-1])),
        R_tilde_last=float(sym.R_terms[-1]), R_tilde_sum=float(np.sum(sym.R_terms)),
        g_A=sym.g_A, g_E=sym.g_E,
    )
    beta0 = p["sigma2_A"] / p["sigma2_E"]
    if beta0 > 1.0:
        row["sigma2_A_threshold"] = msteep.symmetric_threshold(beta0, p["sigma2"], p["sigma2_EA"], p["M"])
    return row


def random_network(M, n_A, n_E, p_A, p_u, seed):
    """An M-UE network with i.i.d. CN(0, 1) channels and equal UE powers."""
    rng = np.random.default_rng(seed)

    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

    return msteep.MultiAccessNetwork(
        h=cn(M, n_A), h_A=cn(M, n_A), h_E=cn(M, n_E), H_EA=cn(n_E, n_A),
        p_A=p_A, p_u=np.full(M, float(p_u)),
    )


def _msteep_random(p, seed):
    net = random_network(p["M"], p["n_A"], p["n_E"], p["p_A"], p["p_u"], [seed, p["realization"]])
    r = msteep.msteep_secrecy_rate_ue1(net)
    row = dict(
        C_user=r.R_A, C_eve=r.C_E, R_s=r.R_s, gamma_1=r.gamma_1,
        R_tilde_sum=msteep.total_secrecy_terms(net).R_tilde_s,
    )
    if net.n_A == 1:
        row["S_A1_threshold"] = msteep.positivity_threshold_ue1(net)
    return row


def _classic(p, seed):
    ch = sample_channels(p["n_A"], p["n_B"], p["n_E"], [seed, p["realization"]])
    i_b, i_e = classic_wtc_terms(ch, PowerConfig(p["p_A"], p["p_A"]), np.eye(ch.n_A))
    row = dict(C_user=i_b, C_eve=i_e, R_s=max(0.0, i_b - i_e))
    try:
        row["alpha_ratio"] = channel_strength_ratio_alpha(ch.H_EA, ch.H_BA)
    except RatioUndefinedError:
        pass
    return row


_COMPUTE = {
    ("gsteep", "siso"): _gsteep_siso,
    ("gsteep", "mimo"): _gsteep_mimo,
    ("psteep", "siso"): _psteep,
    ("msteep", "symmetric"): _msteep_symmetric,
    ("msteep", "random"): _msteep_random,
    ("classic", "mimo"): _classic,
}


def compute_row(scheme, mode, seed, point):
    """Results for one grid point; library errors land in the ``error`` field."""
    row = {"scheme": scheme, **point}
    try:
        row.update(_COMPUTE[(scheme, mode)](point, seed))
        row["error"] = ""
    except (ValueError, ArithmeticError, UnsupportedConfigurationError, np.linalg.LinAlgError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _compute_star(args):
    return compute_row(*args)


def run_sweep(spec: SweepSpec, jobs=1):
    """All rows of the sweep, in grid order regardless of ``jobs``."""
    tasks = [(spec.scheme, spec.mode, spec.seed, pt) for pt in spec.points()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_compute_star, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_compute_star(t) for t in tasks]
    cols = columns(spec)
    return [{c: r.get(c) for c in cols} for r in rows]


def format_value(v):
    """CSV cell text; floats keep 17 significant digits."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def render(rows, cols, fmt):
    """Serialize rows as CSV (header line first) or JSON lines."""
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([format_value(r[c]) for c in cols])
    else:
        for r in rows:
            buf.write(json.dumps({c: _json_value(r[c]) for c in cols}) + "\n")
    return buf.getvalue()


__all__ = ["RESULT_COLUMNS", "columns", "compute_row", "random_network", "render", "run_sweep", "format_value"]
