"""Monte Carlo protocol simulation used as ground truth for the closed forms.

The Gaussian schemes are linear in their random inputs (probes, noises,
messages). Each signal is stored as a matrix acting on one latent CN(0, I)
vector that stacks those inputs, so a simulated batch is a single matrix
product. The same matrices give the exact LMMSE filters, which are applied
to the simulated data; they never come from the closed-form modules.

The PSK scheme is nonlinear and is simulated symbol by symbol.

Every report carries a batch-means standard error over 100 independent
batches, each with its own counter-based (Philox) stream.
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from . import gsteep, msteep, psteep
from ._linalg import hermitian, logdet2_pd
from .channel_model import ChannelSet, PowerConfig, classic_wtc_difference, scale_channels
from .errors import InvalidArgumentError

N_BATCHES = 100
Z_GATE = 3.0
MIN_SAMPLES = 10_000
MIN_SYMBOLS = 100_000


@dataclass(frozen=True)
class McReport:
    """One analytic value against its simulated estimate.

    ``passed`` is ``|z| <= 3``. Reports with ``gated = False`` are
    informational and do not count towards a validation verdict.
    """

    name: str
    analytic: float
    empirical: float
    n_samples: int
    std_error: float
    z: float
    passed: bool
    gated: bool = True

    def as_dict(self):
        return {
            "name": self.name,
            "analytic": self.analytic,
            "empirical": self.empirical,
            "n_samples": self.n_samples,
            "std_error": self.std_error,
            "z": self.z,
            "passed": self.passed,
            "gated": self.gated,
        }


def make_report(name, analytic, batch_values, n_samples, gated=True, empirical=None, se_floor=0.0):
    """Build a report from per-batch estimates of one scalar.

    ``se_floor`` bounds the standard error from below; error-rate reports
    pass the binomial SE under the analytic rate so that a run with no
    errors at all still gets a finite z-score.
    """
    vals = np.asarray(batch_values, dtype=float)
    emp = float(np.mean(vals)) if empirical is None else float(empirical)
    se = max(float(np.std(vals, ddof=1) / np.sqrt(vals.size)), float(se_floor))
    diff = emp - float(analytic)
    if se > 0:
        z = diff / se
    else:
        z = 0.0 if diff == 0 else float(np.copysign(np.inf, diff))
    return McReport(name, float(analytic), emp, int(n_samples), se, float(z), bool(abs(z) <= Z_GATE), gated)


def batch_generators(seed, n_batches=N_BATCHES):
    """One independent Philox generator per batch, derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n_batches)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _batch_sizes(n, n_batches):
    base, extra = divmod(int(n), n_batches)
    return [base + (1 if k < extra else 0) for k in range(n_batches)]


def cn(rng, shape, var=1.0):
    """CN(0, var) samples."""
    return np.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class LatentSpace:
    """Layout of the stacked CN(0, I) latent vector."""

    def __init__(self, dims: Dict[str, int]):
        self.slices = {}
        pos = 0
        for name, d in dims.items():
            self.slices[name] = slice(pos, pos + int(d))
            pos += int(d)
        self.size = pos

    def select(self, name):
        sl = self.slices[name]
        out = np.zeros((sl.stop - sl.start, self.size), dtype=complex)
        out[:, sl] = np.eye(sl.stop - sl.start)
        return out

    def sample(self, rng, n):
        return cn(rng, (self.size, n))


def lmmse(target, obs):
    """Exact LMMSE filter and error covariance for signals given as latent maps.

    Returns ``W`` with ``W @ obs`` the estimate of ``target`` and the error
    covariance ``(T - W O)(T - W O)^H``.
    """
    R_y = hermitian(obs @ obs.conj().T)
    R_ty = target @ obs.conj().T
    W = np.linalg.solve(R_y, R_ty.conj().T).conj().T
    E = target - W @ obs
    return W, hermitian(E @ E.conj().T)


def _accumulate(space, maps, rngs, sizes):
    """Per-batch second moments ``E{m m^H}`` of each latent map in ``maps``."""
    out = {k: [] for k in maps}
    stacked = np.vstack(list(maps.values()))
    offsets = np.cumsum([0] + [m.shape[0] for m in maps.values()])
    for rng, n in zip(rngs, sizes):
        z = space.sample(rng, n)
        sig = stacked @ z
        for k, (a, b) in zip(maps, zip(offsets[:-1], offsets[1:])):
            blk = sig[a:b]
            out[k].append(blk @ blk.conj().T / n)
    return {k: np.array(v) for k, v in out.items()}


def _logdet_reports(name, analytic, covs, n, gated=True):
    """Capacity ``-log2 |error cov|`` from pooled covariance; SE from batch spread."""
    per_batch = [-logdet2_pd(c) for c in covs]
    pooled = -logdet2_pd(np.mean(covs, axis=0))
    return make_report(name, analytic, per_batch, n, gated=gated, empirical=pooled)


# -- G-STEEP -----------------------------------------------------------------


class GsteepModel:
    """Latent-map description of one G-STEEP round trip."""

    def __init__(self, channels: ChannelSet, powers: PowerConfig):
        sc = scale_channels(channels, powers)
        n_A, n_B, n_E = channels.n_A, channels.n_B, channels.n_E
        L = LatentSpace({"x": n_A, "w_B": n_B, "s": n_B, "w_A": n_A, "w_EA": n_E, "w_EB": n_E})
        x, s = L.select("x"), L.select("s")
        _, _, Vh = np.linalg.svd(channels.H_BA, full_matrices=False)
        self.p = Vh @ x
        self.y_B = sc.Hp_BA @ x + L.select("w_B")
        F_B, _ = lmmse(self.p, self.y_B)
        self.p_hat = F_B @ self.y_B
        # part of p_hat that Alice cannot predict from p
        K, _ = lmmse(self.p_hat, self.p)
        self.dp_prime = self.p_hat - K @ self.p
        self.y_A = sc.Hpp_AB @ (self.p_hat + s) + L.select("w_A")
        self.y_EA = sc.Hp_EA @ x + L.select("w_EA")
        self.y_EB = sc.Hpp_EB @ (self.p_hat + s) + L.select("w_EB")
        self.x, self.s, self.space = x, s, L

        self.W_A, self.R_ds_A = lmmse(s, np.vstack([self.y_A, x]))
        self.W_E, self.R_ds_E = lmmse(s, np.vstack([self.y_EA, self.y_EB]))
        self.W_pE, self.R_dphat_E = lmmse(self.p_hat, self.y_EA)
        self.err_p = self.p_hat - self.p
        self.err_A = s - self.W_A @ np.vstack([self.y_A, x])
        self.err_E = s - self.W_E @ np.vstack([self.y_EA, self.y_EB])
        self.err_pE = self.p_hat - self.W_pE @ self.y_EA

    def exact(self):
        """Exact covariances implied by the latent maps."""
        def cov(a):
            return hermitian(a @ a.conj().T)
        return {
            "R_dp": cov(self.err_p),
            "R_phat": cov(self.p_hat),
            "R_dp_prime": cov(self.dp_prime),
            "R_dphat_E": self.R_dphat_E,
            "R_ds_A": self.R_ds_A,
            "R_ds_E": self.R_ds_E,
            "C_user": -logdet2_pd(self.R_ds_A),
            "C_eve": -logdet2_pd(self.R_ds_E),
        }


def mc_gsteep(channels: ChannelSet, powers: PowerConfig, n_samples=1_000_000, seed=0) -> List[McReport]:
    """Simulate G-STEEP and compare against the closed forms.

    Reports the diagonals of the probe MSE, probe-estimate variance,
    residual ``Delta p'`` covariance, Eve's probe MSE and both message MSE
    matrices, plus ``C_user`` and ``C_eve``. A final ungated pair repeats the
    two capacities with filters fitted to the simulated data.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidArgumentError(f"n_samples must be >= {MIN_SAMPLES}")
    model = GsteepModel(channels, powers)
    sc = scale_channels(channels, powers)
    stats = gsteep.effective_probe_stats(sc.Hp_BA)
    c_user, _, _ = gsteep.alice_capacity(sc.Hpp_AB, stats)
    c_eve, _, _, R_e = gsteep.eve_capacity(sc.Hpp_EB, sc.Hp_EA, stats)
    # message MSE matrices in the closed form's own terms
    G_A = hermitian(sc.Hpp_AB.conj().T @ sc.Hpp_AB)
    G_E = hermitian(sc.Hpp_EB.conj().T @ sc.Hpp_EB)
    n_B = stats.n_B
    I = np.eye(n_B)

    def msg_mse(G, X):
        return np.linalg.solve(G @ (X + I) + I, G @ X + I)

    analytic = {
        "R_dp": stats.r_dp,
        "R_phat": stats.r_phat,
        "R_dp_prime": stats.r_dp_prime,
        "R_dphat_E": np.real(np.diag(R_e)),
        "R_ds_A": np.real(np.diag(msg_mse(G_A, stats.R_dp_prime))),
        "R_ds_E": np.real(np.diag(msg_mse(G_E, R_e))),
    }
    maps = {
        "R_dp": model.err_p,
        "R_phat": model.p_hat,
        "R_dp_prime": model.dp_prime,
        "R_dphat_E": model.err_pE,
        "R_ds_A": model.err_A,
        "R_ds_E": model.err_E,
        "raw_A": np.vstack([model.s, model.y_A, model.x]),
        "raw_E": np.vstack([model.s, model.y_EA, model.y_EB]),
    }
    rngs = batch_generators(seed)
    sizes = _batch_sizes(n_samples, N_BATCHES)
    mom = _accumulate(model.space, maps, rngs, sizes)

    reports = []
    for key in ("R_dp", "R_phat", "R_dp_prime", "R_dphat_E", "R_ds_A", "R_ds_E"):
        diag = np.real(np.diagonal(mom[key], axis1=1, axis2=2))
        for k in range(n_B):
            reports.append(make_report(f"{key}[{k}]", analytic[key][k], diag[:, k], n_samples))
    reports.append(_logdet_reports("C_user", c_user, mom["R_ds_A"], n_samples))
    reports.append(_logdet_reports("C_eve", c_eve, mom["R_ds_E"], n_samples))

    # end-to-end path: MMSE from the sample covariance of (s, observations)
    for name, key, ref in (("C_user[sample-cov]", "raw_A", c_user), ("C_eve[sample-cov]", "raw_E", c_eve)):
        per = [_schur_capacity(c, n_B) for c in mom[key]]
        pooled = _schur_capacity(np.mean(mom[key], axis=0), n_B)
        reports.append(make_report(name, ref, per, n_samples, gated=False, empirical=pooled))
    return reports


def _schur_capacity(joint, n_t):
    """``log2 |R_t| - log2 |R_t|y|`` from a joint sample covariance of (target, obs)."""
    R_t = joint[:n_t, :n_t]
    R_ty = joint[:n_t, n_t:]
    R_y = joint[n_t:, n_t:]
    cond = R_t - R_ty @ np.linalg.solve(R_y, R_ty.conj().T)
    return logdet2_pd(R_t) - logdet2_pd(cond)


# -- classic wiretap baseline -----------------------------------------------


def mc_classic_wtc(channels: ChannelSet, powers: PowerConfig, K_x, n_samples=1_000_000, seed=0) -> McReport:
    """Mutual-information difference estimated from Gaussian samples.

    Compared with the unclamped log-det difference so that instances with
    a stronger Eve remain informative.

    ``I(x; y)`` is estimated as ``log2 |S_y| - log2 |S_{y - Hx}|`` from sample
    covariances, once for Bob and once for Eve.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidArgumentError(f"n_samples must be >= {MIN_SAMPLES}")
    n_A = channels.n_A
    K = hermitian(np.asarray(K_x, dtype=complex))
    w, v = np.linalg.eigh(K)
    Kh = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    g = np.sqrt(powers.p_A / n_A)
    per = []
    for rng, n in zip(batch_generators(seed), _batch_sizes(n_samples, N_BATCHES)):
        x = Kh @ cn(rng, (n_A, n))
        vals = []
        for H in (channels.H_BA, channels.H_EA):
            noise = cn(rng, (H.shape[0], n))
            y = g * H @ x + noise
            vals.append(logdet2_pd(y @ y.conj().T / n) - logdet2_pd(noise @ noise.conj().T / n))
        per.append(vals[0] - vals[1])
    return make_report("classic_wtc_difference", classic_wtc_difference(channels, powers, K), per, n_samples)


# -- P-STEEP -----------------------------------------------------------------


def detect_psk(r, M):
    """Nearest M-PSK index for each sample; exact ties go to the lower index."""
    k = np.angle(r) / (2.0 * np.pi / M)
    idx = np.mod(np.ceil(k - 0.5), M).astype(np.int64)
    # the only tie ceil does not already send to the lower index is the
    # wrap-around one between M - 1 and 0
    return np.where(np.mod(k - 0.5, M) == M - 1, 0, idx)


def mc_psteep(M, snr: gsteep.SisoSnr, n_symbols=100_000, seed=0) -> List[McReport]:
    """Simulate P-STEEP symbol by symbol.

    Alice's error rate is gated against the Q-function formula. Eve's rate
    is simulated twice: from the exact product of her two observations
    (ungated, the closed form drops the second-order noise terms) and from
    the first-order linearization the closed form describes (gated for BPSK
    only, where the formula is exact).
    """
    if n_symbols < MIN_SYMBOLS:
        raise InvalidArgumentError(f"n_symbols must be >= {MIN_SYMBOLS}")
    cfg = psteep.PskConfig(M) if not isinstance(M, psteep.PskConfig) else M
    ep = psteep.psk_error_params(cfg, snr)
    a, b = snr.a, snr.b
    s_ea, s_eb = snr.alpha * a, snr.beta * b
    eve_heard = s_ea > 0 and s_eb > 0
    errs = {"p_eA": [], "p_eE[linear]": [], "p_eE[full]": []}
    for rng, n in zip(batch_generators(seed), _batch_sizes(n_symbols, N_BATCHES)):
        theta = rng.integers(0, cfg.M, n)
        phi = rng.integers(0, cfg.M, n)
        x_A = np.exp(2j * np.pi * theta / cfg.M)
        e_phi = np.exp(2j * np.pi * phi / cfg.M)
        v_B = cn(rng, n, 1.0 / a)
        v_A = cn(rng, n, 1.0 / b)
        x_B = e_phi * (x_A + v_B)
        r_A = np.conj(x_A) * (x_B + v_A)
        errs["p_eA"].append(np.mean(detect_psk(r_A, cfg.M) != phi))
        if eve_heard:
            v_EA = cn(rng, n, 1.0 / s_ea)
            v_EB = cn(rng, n, 1.0 / s_eb)
            r_E = np.conj(x_A + v_EA) * (x_B + v_EB)
            lin = e_phi + np.conj(x_A) * e_phi * v_B + np.conj(x_A) * v_EB + np.conj(v_EA) * e_phi * x_A
            errs["p_eE[full]"].append(np.mean(detect_psk(r_E, cfg.M) != phi))
            errs["p_eE[linear]"].append(np.mean(detect_psk(lin, cfg.M) != phi))
    def floor(p):
        return np.sqrt(p * (1.0 - p) / n_symbols)

    reports = [make_report("p_eA", ep.p_eA, errs["p_eA"], n_symbols, se_floor=floor(ep.p_eA))]
    if eve_heard:
        f = floor(min(ep.p_eE, 1.0))
        reports.append(make_report("p_eE[linear]", ep.p_eE, errs["p_eE[linear]"], n_symbols, gated=cfg.M == 2, se_floor=f))
        reports.append(make_report("p_eE[full]", ep.p_eE, errs["p_eE[full]"], n_symbols, gated=False, se_floor=f))
    return reports


def rotation_invariance_check(n_samples=100_000, seed=0, var=1.0, theta=0.7) -> List[McReport]:
    """Compare moments of ``e^{j theta} v`` with those of an independent ``v``.

    Both are CN(0, var) draws; the analytic value of every difference is 0.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidArgumentError(f"n_samples must be >= {MIN_SAMPLES}")
    stats = {"E|v|^2": [], "E|v|^4": [], "E[v^2].real": [], "E[v^2].imag": [], "E[Re(v)^2]": []}
    rot = np.exp(1j * theta)
    for rng, n in zip(batch_generators(seed), _batch_sizes(n_samples, N_BATCHES)):
        u = rot * cn(rng, n, var)
        v = cn(rng, n, var)
        for name, f in (
            ("E|v|^2", lambda z: np.abs(z) ** 2),
            ("E|v|^4", lambda z: np.abs(z) ** 4),
            ("E[v^2].real", lambda z: (z**2).real),
            ("E[v^2].imag", lambda z: (z**2).imag),
            ("E[Re(v)^2]", lambda z: z.real**2),
        ):
            stats[name].append(np.mean(f(u)) - np.mean(f(v)))
    return [make_report(f"rotation:{k}", 0.0, v, n_samples) for k, v in stats.items()]


# -- M-STEEP -----------------------------------------------------------------


class MsteepModel:
    """Latent-map description of one M-STEEP round."""

    def __init__(self, net: msteep.MultiAccessNetwork):
        M, n_A, n_E = net.M, net.n_A, net.n_E
        L = LatentSpace({"x": n_A, "w": M, "s": M, "w_A": M * n_A, "w_E": M * n_E, "w_EA": n_E})
        x, s = L.select("x"), L.select("s")
        w, wA, wE = L.select("w"), L.select("w_A"), L.select("w_E")
        hp = np.sqrt(net.p_A / n_A) * net.h
        norms = np.linalg.norm(net.h, axis=1, keepdims=True)
        h_bar = np.where(norms > 0, net.h / np.where(norms > 0, norms, 1.0), 0.0)
        self.p = h_bar @ x
        y = hp @ x + w
        p_hat = np.empty((M, L.size), dtype=complex)
        for i in range(M):
            f, _ = lmmse(self.p[i:i + 1], y[i:i + 1])
            p_hat[i] = f[0, 0] * y[i]
        self.p_hat = p_hat
        echo = p_hat + s
        self.y_A = [np.sqrt(net.p_u[i] / 2.0) * np.outer(net.h_A[i], echo[i]) + wA[i * n_A:(i + 1) * n_A] for i in range(M)]
        y_E = [np.sqrt(net.p_u[i] / 2.0) * np.outer(net.h_E[i], echo[i]) + wE[i * n_E:(i + 1) * n_E] for i in range(M)]
        y_EA = np.sqrt(net.p_A / n_A) * net.H_EA @ x + L.select("w_EA")
        self.y_E = np.vstack(y_E + [y_EA])
        self.x, self.s, self.space, self.M = x, s, L, M

        self.err_ap = []
        for i in range(M):
            W, _ = lmmse(s[i:i + 1], np.vstack([self.y_A[i], x]))
            self.err_ap.append(s[i:i + 1] - W @ np.vstack([self.y_A[i], x]))
        self.err_eve_cond = []
        for i in range(M):
            obs = np.vstack([self.y_E, s[:i]]) if i else self.y_E
            W, _ = lmmse(s[i:i + 1], obs)
            self.err_eve_cond.append(s[i:i + 1] - W @ obs)


def mc_msteep(net: msteep.MultiAccessNetwork, n_samples=1_000_000, seed=0, symmetric=None) -> List[McReport]:
    """Simulate M-STEEP and compare against the closed forms.

    Reports probe-estimate correlations (real and imaginary parts), the AP's
    message MSE per UE, Eve's MSE for UE 1's message and Eve's MSEs for
    each message given the earlier ones. ``symmetric`` may carry the
    ``(sigma2, sigma2_A, sigma2_E, sigma2_EA)`` of a symmetric network built
    by :func:`steep.msteep.symmetric_network`; its scalar forms are then also
    checked.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidArgumentError(f"n_samples must be >= {MIN_SAMPLES}")
    model = MsteepModel(net)
    st = msteep.ue_stats(net)
    M = net.M
    maps = {"p_hat": model.p_hat}
    for i in range(M):
        maps[f"ap{i}"] = model.err_ap[i]
        maps[f"eve{i}"] = model.err_eve_cond[i]
    mom = _accumulate(model.space, maps, batch_generators(seed), _batch_sizes(n_samples, N_BATCHES))

    reports = []
    eps = st.eps
    for i in range(M):
        for j in range(i, M):
            vals = mom["p_hat"][:, i, j]
            reports.append(make_report(f"E[p_hat{i} p_hat{j}*].real", eps[i, j].real, vals.real, n_samples))
            if i != j:
                reports.append(make_report(f"E[p_hat{i} p_hat{j}*].imag", eps[i, j].imag, vals.imag, n_samples))
    total = msteep.total_secrecy_terms(net)
    eve1 = msteep.eve_joint_mse_ue1(net, st)
    for i in range(M):
        ap = np.real(mom[f"ap{i}"][:, 0, 0])
        reports.append(make_report(f"sigma2_ds[{i}]", 2.0 ** (-total.terms[i].R_A), ap, n_samples))
    reports.append(make_report("sigma2_ds1E", eve1.sigma2, np.real(mom["eve0"][:, 0, 0]), n_samples))
    for i in range(1, M):
        ev = np.real(mom[f"eve{i}"][:, 0, 0])
        reports.append(make_report(f"sigma2_ds[{i}]|E,1:{i}", 2.0 ** (-total.terms[i].R_E), ev, n_samples))
    if symmetric is not None:
        sym = msteep.symmetric_analysis(*symmetric, M)
        # every UE has the same AP-side MSE; pool them per batch
        ap = np.real(np.array([mom[f"ap{i}"][:, 0, 0] for i in range(M)])).mean(axis=0)
        reports.append(make_report("1/sigma2_ds[sym]", 1.0 + 1.0 / sym.g_A, 1.0 / ap, n_samples * M,
                                   empirical=1.0 / ap.mean()))
        ev = np.real(mom[f"eve{M - 1}"][:, 0, 0])
        reports.append(make_report("g_E[sym]", sym.g_E_closed, ev / (1.0 - ev), n_samples,
                                   empirical=ev.mean() / (1.0 - ev.mean())))
    return reports


# -- estimator optimality and scaling ----------------------------------------


def perturbation_check(channels: ChannelSet, powers: PowerConfig, n_samples=200_000, seed=0, delta=0.01) -> List[McReport]:
    """Scale Alice's and Eve's message filters by ``1 +/- delta`` and measure the MSE change.

    Common random numbers are used for the optimal and perturbed filters.
    The exact increase is ``delta^2 tr(W R_y W^H)`` (orthogonality principle),
    which is always >= 0.
    """
    model = GsteepModel(channels, powers)
    specs = {
        "alice": (model.W_A, np.vstack([model.y_A, model.x]), model.s),
        "eve": (model.W_E, np.vstack([model.y_EA, model.y_EB]), model.s),
    }
    reports = []
    for who, (W, obs, tgt) in specs.items():
        est = W @ obs
        R_est = hermitian(est @ est.conj().T)
        for sign in (+1, -1):
            d = sign * delta
            exact = float(np.real(np.trace(R_est))) * d * d
            maps = {"opt": tgt - est, "pert": tgt - (1 + d) * est}
            mom = _accumulate(model.space, maps, batch_generators(seed), _batch_sizes(n_samples, N_BATCHES))
            inc = np.real(np.trace(mom["pert"], axis1=1, axis2=2) - np.trace(mom["opt"], axis1=1, axis2=2))
            reports.append(make_report(f"perturb[{who},{d:+.2%}]", exact, inc, n_samples))
    return reports


def scaled_standard_error(channels: ChannelSet, powers: PowerConfig, n_samples, seed=0):
    """Batch-means SE of the first probe MSE entry at ``n_samples`` draws."""
    reps = mc_gsteep(channels, powers, n_samples, seed)
    return next(r for r in reps if r.name == "R_dp[0]").std_error


__all__ = [
    "N_BATCHES",
    "Z_GATE",
    "McReport",
    "make_report",
    "batch_generators",
    "cn",
    "LatentSpace",
    "lmmse",
    "GsteepModel",
    "MsteepModel",
    "mc_gsteep",
    "mc_classic_wtc",
    "detect_psk",
    "mc_psteep",
    "rotation_invariance_check",
    "mc_msteep",
    "perturbation_check",
    "scaled_standard_error",
]
