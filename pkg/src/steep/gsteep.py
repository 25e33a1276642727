"""Gaussian probing with Gaussian linear encryption over MIMO channels.

Alice sends CN(0, I) probes; Bob forms the MMSE estimate ``p_hat`` of the
effective probe ``p = V_BA^H x_A`` and echoes ``p_hat + s`` with a CN(0, I)
message ``s``. Alice knows ``x_A`` and strips the probe; Eve sees both
phases. All rates are in bits per round-trip symbol interval.

Covariance algebra is kept in the n_B-dimensional domain using
``|G X + I|`` determinant forms.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._linalg import (
    clamp_capacity,
    gram,
    hermitian,
    logdet2_gx_plus_identity,
    logdet2_pd,
    solve_pd,
)
from .channel_model import ChannelSet, PowerConfig, scale_channels
from .errors import InvalidArgumentError, SingularChannelError, UnsupportedConfigurationError

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class ProbeStats:
    """Second-order statistics of Bob's probe estimate.

    The three covariance attributes are diagonal and stored as their
    diagonals: ``r_phat`` (variance of ``p_hat``), ``r_dp`` (MSE of
    ``p_hat``) and ``r_dp_prime = r_phat * r_dp`` (covariance of
    ``p_hat - R_phat p``, the part of Bob's echo Alice cannot strip).
    """

    U_BA: np.ndarray
    V_BA: np.ndarray
    pi_scaled: np.ndarray
    r_phat: np.ndarray
    r_dp: np.ndarray
    r_dp_prime: np.ndarray

    @property
    def n_B(self):
        return self.pi_scaled.shape[0]

    @property
    def R_phat(self):
        return np.diag(self.r_phat)

    @property
    def R_dp(self):
        return np.diag(self.r_dp)

    @property
    def R_dp_prime(self):
        return np.diag(self.r_dp_prime)


class LogDetTerms(NamedTuple):
    """log2 of the four determinants behind a secrecy rate (each >= 0)."""

    log2_N_user: float
    log2_D_user: float
    log2_N_eve: float
    log2_D_eve: float


@dataclass(frozen=True)
class SecrecyBreakdown:
    C_user: float
    C_eve: float
    R_s: float
    log_terms: LogDetTerms


@dataclass(frozen=True)
class SisoSnr:
    """Lumped parameters of the single-antenna link.

    ``a`` and ``b`` are the raw SNRs at Bob (probing) and Alice (echo);
    ``alpha`` and ``beta`` are Eve's SNRs relative to those.
    """

    a: float
    b: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("a", "b", "alpha", "beta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise InvalidArgumentError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)

    @property
    def A1(self):
        return self.a / (self.a + 1.0) ** 2

    @property
    def A2(self):
        aa = self.alpha * self.a
        return self.A1 * (self.a + aa + 1.0) / (aa + 1.0)

    @property
    def S_BA(self):
        return self.a

    @property
    def S_AB(self):
        return self.b

    @property
    def S_EA(self):
        return self.alpha * self.a

    @property
    def S_EB(self):
        return self.beta * self.b


def effective_probe_stats(Hp_BA) -> ProbeStats:
    """Probe-estimate statistics from the scaled forward channel ``H'_BA``.

    Raises
    ------
    UnsupportedConfigurationError
        If ``n_A < n_B``; probing must come from the side with more antennas,
        so swap the roles of Alice and Bob.
    SingularChannelError
        If ``H'_BA`` does not have full row rank.
    """
    H = np.atleast_2d(np.asarray(Hp_BA, dtype=complex))
    n_B, n_A = H.shape
    if n_A < n_B:
        raise UnsupportedConfigurationError(
            f"n_A = {n_A} < n_B = {n_B}: probing must be from the node with more "
            "antennas; swap the roles of Alice and Bob"
        )
    U, s, Vh = np.linalg.svd(H, full_matrices=False)
    if s[-1] <= max(H.shape) * np.finfo(float).eps * s[0] or s[0] == 0.0:
        raise SingularChannelError(f"H'_BA is rank deficient (singular values {s})")
    r_dp = 1.0 / (s**2 + 1.0)
    r_phat = 1.0 - r_dp
    return ProbeStats(
        U_BA=U,
        V_BA=Vh.conj().T,
        pi_scaled=s,
        r_phat=r_phat,
        r_dp=r_dp,
        r_dp_prime=r_phat * r_dp,
    )


def _two_logdets(g, x):
    """(log2|G(X + I) + I|, log2|G X + I|) for Hermitian PSD G and X."""
    n = g.shape[0]
    return (
        logdet2_gx_plus_identity(g, x + np.eye(n)),
        logdet2_gx_plus_identity(g, x),
    )


def alice_capacity(Hpp_AB, stats: ProbeStats, r_dp_prime: Optional[np.ndarray] = None):
    """Capacity of the effective channel from Bob's message to Alice.

    Parameters
    ----------
    Hpp_AB : array_like, shape (n_A, n_B)
        Echo-phase channel including the sqrt(p_B / (2 n_B)) scaling.
    stats : ProbeStats
    r_dp_prime : array_like, optional
        Diagonal of ``R_dp'`` overriding ``stats.r_dp_prime``. Used to feed
        limit cases such as ``p_A -> 0`` or ``p_A -> inf`` where it vanishes.

    Returns
    -------
    C, log2_N, log2_D : float
    """
    H = np.atleast_2d(np.asarray(Hpp_AB, dtype=complex))
    if H.shape[1] != stats.n_B:
        raise InvalidArgumentError(f"Hpp_AB has {H.shape[1]} columns, expected n_B = {stats.n_B}")
    rdp = stats.r_dp_prime if r_dp_prime is None else np.asarray(r_dp_prime, dtype=float)
    if rdp.shape != (stats.n_B,):
        raise InvalidArgumentError("r_dp_prime must have length n_B")
    log_n, log_d = _two_logdets(gram(H), np.diag(rdp))
    return clamp_capacity(log_n - log_d, "C_user"), log_n, log_d


def eve_probe_mse(Hp_EA, stats: ProbeStats):
    """MSE matrix of Eve's MMSE estimate of ``p_hat`` from her probing-phase signal.

    Returns ``(R_e, T)`` with ``R_e = R_phat - T`` and
    ``T = R_phat V^H (W + I)^{-1} W V R_phat``, ``W = H'_EA^H H'_EA``.
    """
    H = np.atleast_2d(np.asarray(Hp_EA, dtype=complex))
    if H.shape[1] != stats.V_BA.shape[0]:
        raise InvalidArgumentError(f"Hp_EA has {H.shape[1]} columns, expected n_A = {stats.V_BA.shape[0]}")
    n_A = H.shape[1]
    W = gram(H)
    VR = stats.V_BA * stats.r_phat[None, :]
    # with (W + I)^{-1} W = I - (W + I)^{-1} and V^H V = I the MSE is a sum
    # of two PSD terms, which avoids cancelling R_phat against T at high power
    R_e = hermitian(np.diag(stats.r_dp_prime) + VR.conj().T @ solve_pd(W + np.eye(n_A), VR))
    # push-through form of T, PSD by construction
    B = H @ VR
    T = hermitian(B.conj().T @ solve_pd(gram(H.conj().T) + np.eye(H.shape[0]), B))
    return R_e, T


def eve_capacity(Hpp_EB, Hp_EA, stats: ProbeStats, r_dphat_e: Optional[np.ndarray] = None):
    """Capacity of the effective channel from Bob's message to Eve.

    Eve combines her probing-phase observation (through ``H'_EA``) with her
    echo-phase observation (through ``H''_EB``).

    Returns
    -------
    C, log2_N, log2_D : float
    R_dphat_E : ndarray, shape (n_B, n_B)
        MSE matrix of Eve's estimate of ``p_hat`` from the probing phase.
    """
    H = np.atleast_2d(np.asarray(Hpp_EB, dtype=complex))
    if H.shape[1] != stats.n_B:
        raise InvalidArgumentError(f"Hpp_EB has {H.shape[1]} columns, expected n_B = {stats.n_B}")
    if r_dphat_e is None:
        R_e, T = eve_probe_mse(Hp_EA, stats)
    else:
        R_e = hermitian(np.asarray(r_dphat_e, dtype=complex))
        T = hermitian(stats.R_phat - R_e)
    gap = np.linalg.eigvalsh(T)
    wr = np.linalg.eigvalsh(R_e)
    if wr.min() < -_PSD_TOL or gap.min() < -_PSD_TOL:
        raise SingularChannelError("Eve's probe MSE matrix left the interval [0, R_phat]")
    log_n, log_d = _two_logdets(gram(H), R_e)
    return clamp_capacity(log_n - log_d, "C_eve"), log_n, log_d, R_e


def gsteep_secrecy_rate(channels: ChannelSet, powers: PowerConfig) -> SecrecyBreakdown:
    """Achievable secrecy rate ``(C_user - C_eve)^+`` of the MIMO scheme."""
    sc = scale_channels(channels, powers)
    stats = effective_probe_stats(sc.Hp_BA)
    c_user, n_u, d_u = alice_capacity(sc.Hpp_AB, stats)
    c_eve, n_e, d_e, _ = eve_capacity(sc.Hpp_EB, sc.Hp_EA, stats)
    return SecrecyBreakdown(
        C_user=c_user,
        C_eve=c_eve,
        R_s=max(c_user - c_eve, 0.0),
        log_terms=LogDetTerms(n_u, d_u, n_e, d_e),
    )


def corollary1_breakdown(channels: ChannelSet, powers: PowerConfig) -> SecrecyBreakdown:
    """Scalar-form secrecy rate for a single-antenna Bob.

    With ``n_B = 1`` the channels enter only through the norms of the
    vector channels and one scalar ``t`` computed in Eve's n_E-dimensional
    domain. This is an evaluation path independent of
    :func:`gsteep_secrecy_rate`.
    """
    if channels.n_B != 1:
        raise UnsupportedConfigurationError(f"requires n_B = 1, got n_B = {channels.n_B}")
    sc = scale_channels(channels, powers)
    S_AB = float(np.sum(np.abs(sc.Hp_AB) ** 2))
    S_BA = float(np.sum(np.abs(sc.Hp_BA) ** 2))
    S_EB = float(np.sum(np.abs(sc.Hp_EB) ** 2))
    if S_BA == 0.0:
        raise SingularChannelError("h_BA is zero")
    var_phat = S_BA / (S_BA + 1.0)
    h_ba = channels.H_BA[0]
    r = var_phat * h_ba.conj() / np.linalg.norm(h_ba)
    He = sc.Hp_EA
    u = He @ r
    t = float(np.real(np.vdot(u, solve_pd(hermitian(He @ He.conj().T) + np.eye(channels.n_E), u))))

    g_user = S_AB / 2.0
    rdp_prime = S_BA / (S_BA + 1.0) ** 2
    log_n_u = np.log2(g_user * (rdp_prime + 1.0) + 1.0)
    log_d_u = np.log2(g_user * rdp_prime + 1.0)

    g_eve = S_EB / 2.0
    r_e = var_phat - t
    log_n_e = np.log2(g_eve * (r_e + 1.0) + 1.0)
    log_d_e = np.log2(g_eve * r_e + 1.0)

    c_user = clamp_capacity(np.log2(1.0 + g_user / (0.5 * S_AB * S_BA / (S_BA + 1.0) ** 2 + 1.0)), "C_user")
    c_eve = clamp_capacity(np.log2(1.0 + g_eve / (r_e * g_eve + 1.0)), "C_eve")
    return SecrecyBreakdown(
        C_user=c_user,
        C_eve=c_eve,
        R_s=max(c_user - c_eve, 0.0),
        log_terms=LogDetTerms(float(log_n_u), float(log_d_u), float(log_n_e), float(log_d_e)),
    )


def corollary1_t(channels: ChannelSet, powers: PowerConfig) -> float:
    """The scalar ``t``: Eve's probing-phase knowledge of Bob's probe estimate (n_B = 1)."""
    if channels.n_B != 1:
        raise UnsupportedConfigurationError(f"requires n_B = 1, got n_B = {channels.n_B}")
    sc = scale_channels(channels, powers)
    S_BA = float(np.sum(np.abs(sc.Hp_BA) ** 2))
    var_phat = S_BA / (S_BA + 1.0)
    h_ba = channels.H_BA[0]
    u = sc.Hp_EA @ (var_phat * h_ba.conj() / np.linalg.norm(h_ba))
    He = sc.Hp_EA
    return float(np.real(np.vdot(u, solve_pd(hermitian(He @ He.conj().T) + np.eye(channels.n_E), u))))


def secret_key_capacity(Hp_BA, Hp_EA) -> float:
    """Secret-key capacity from the probing phase alone, in bits per probe.

    ``log2|I + H'_BA^H H'_BA (H'_EA^H H'_EA + I)^{-1}|``, evaluated as the
    difference of two Hermitian log-determinants.
    """
    Hb = np.atleast_2d(np.asarray(Hp_BA, dtype=complex))
    He = np.atleast_2d(np.asarray(Hp_EA, dtype=complex))
    if Hb.shape[1] != He.shape[1]:
        raise InvalidArgumentError("Hp_BA and Hp_EA must have the same number of columns (n_A)")
    n_A = Hb.shape[1]
    We = gram(He) + np.eye(n_A)
    return clamp_capacity(logdet2_pd(We + gram(Hb)) - logdet2_pd(We), "C_key")


def siso_snr_from_channels(channels: ChannelSet, powers: PowerConfig) -> SisoSnr:
    """Lump a single-antenna Alice/Bob link into ``(a, b, alpha, beta)``."""
    if channels.n_A != 1 or channels.n_B != 1:
        raise UnsupportedConfigurationError("requires n_A = n_B = 1")
    sc = scale_channels(channels, powers)
    a = float(np.abs(sc.Hp_BA[0, 0]) ** 2)
    b = float(np.abs(sc.Hp_AB[0, 0]) ** 2)
    S_EA = float(np.sum(np.abs(sc.Hp_EA) ** 2))
    S_EB = float(np.sum(np.abs(sc.Hp_EB) ** 2))
    if a == 0.0 or b == 0.0:
        raise SingularChannelError("zero user channel")
    return SisoSnr(a=a, b=b, alpha=S_EA / a, beta=S_EB / b)


def siso_secrecy_rate(snr: SisoSnr) -> SecrecyBreakdown:
    """Secrecy rate of the single-antenna link from its four lumped parameters."""
    A1, A2 = snr.A1, snr.A2
    hb = snr.b / 2.0
    hbe = snr.beta * snr.b / 2.0
    log_n_u = np.log2(hb * (A1 + 1.0) + 1.0)
    log_d_u = np.log2(hb * A1 + 1.0)
    log_n_e = np.log2(hbe * (A2 + 1.0) + 1.0)
    log_d_e = np.log2(hbe * A2 + 1.0)
    c_user = float(np.log2(1.0 + hb / (hb * A1 + 1.0)))
    c_eve = float(np.log2(1.0 + hbe / (hbe * A2 + 1.0)))
    return SecrecyBreakdown(
        C_user=c_user,
        C_eve=c_eve,
        R_s=max(c_user - c_eve, 0.0),
        log_terms=LogDetTerms(float(log_n_u), float(log_d_u), float(log_n_e), float(log_d_e)),
    )


def siso_rate_limit_large_b(snr: SisoSnr) -> float:
    """``lim_{b -> inf}`` of the single-antenna secrecy rate (for ``beta > 0``)."""
    A1, A2 = snr.A1, snr.A2
    if A1 == 0.0:
        return 0.0
    return max(0.0, float(np.log2(A2 * (A1 + 1.0) / (A1 * (A2 + 1.0)))))


def siso_threshold_b(a, alpha, beta):
    """Echo SNR above which the single-antenna secrecy rate is positive.

    ``b_bar = 2 (beta - 1) (a + 1)^2 (alpha a + 1) / (beta a^2)``, clamped to 0
    for ``beta <= 1``. Returns ``inf`` when ``a = 0`` and ``beta > 1``.
    """
    if a < 0 or alpha < 0 or beta < 0:
        raise InvalidArgumentError("a, alpha, beta must be >= 0")
    if beta <= 1.0:
        return 0.0
    if a == 0.0:
        return float("inf")
    return 2.0 * (beta - 1.0) * (a + 1.0) ** 2 * (alpha * a + 1.0) / (beta * a**2)


def siso_key_capacity(a, alpha):
    """``log2(1 + a / (alpha a + 1))``; equals ``log2(A2 / A1)``."""
    if a < 0 or alpha < 0:
        raise InvalidArgumentError("a and alpha must be >= 0")
    return float(np.log2(1.0 + a / (alpha * a + 1.0)))


class DofEstimate(NamedTuple):
    slope_rate: float
    slope_key: float
    reference: int


def dof_reference(n_A, n_B, n_E):
    return min(n_B, max(n_A - n_E, 0))


def dof_slope(channels: ChannelSet, eta_p, pA_grid) -> DofEstimate:
    """High-power slopes of the secrecy rate and key capacity in log2(p_A).

    ``p_B = eta_p * p_A`` throughout. Slopes are least-squares fits over the
    upper half of ``pA_grid``.
    """
    grid = np.asarray(pA_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 4:
        raise InvalidArgumentError("pA_grid needs at least 4 points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("pA_grid must be positive and strictly increasing")
    steps = np.diff(np.log(grid))
    if np.max(np.abs(steps - steps[0])) > 1e-6 * abs(steps[0]):
        raise InvalidArgumentError("pA_grid must be log-spaced")
    if grid[-1] < 1e6:
        raise InvalidArgumentError("largest p_A must be >= 1e6")
    if eta_p <= 0:
        raise InvalidArgumentError("eta_p must be > 0")
    rates, keys = [], []
    for p in grid:
        pw = PowerConfig(p_A=p, p_B=eta_p * p)
        rates.append(gsteep_secrecy_rate(channels, pw).R_s)
        sc = scale_channels(channels, pw)
        keys.append(secret_key_capacity(sc.Hp_BA, sc.Hp_EA))
    x = np.log2(grid)
    top = slice(grid.size // 2, None)
    slope_rate = float(np.polyfit(x[top], np.asarray(rates)[top], 1)[0])
    slope_key = float(np.polyfit(x[top], np.asarray(keys)[top], 1)[0])
    return DofEstimate(slope_rate, slope_key, dof_reference(channels.n_A, channels.n_B, channels.n_E))


class HighPowerGap(NamedTuple):
    R_s: float
    C_key: float
    limit: float
    gap_rate: float
    gap_key: float


def highpower_limit(channels: ChannelSet) -> float:
    """Common limit of the secrecy rate and key capacity as ``p_A, p_B/p_A -> inf``.

    ``log2|I + Pi_BA^2 V_BA^H (H_EA^H H_EA)^{-1} V_BA|`` with unscaled
    singular values ``Pi_BA``; needs ``H_EA^H H_EA`` nonsingular.
    """
    n_A, n_B, n_E = channels.n_A, channels.n_B, channels.n_E
    if not n_E >= n_A >= n_B:
        raise UnsupportedConfigurationError(f"requires n_E >= n_A >= n_B, got ({n_A}, {n_B}, {n_E})")
    sv = np.linalg.svd(channels.H_EA, compute_uv=False)
    if sv[-1] <= max(channels.H_EA.shape) * np.finfo(float).eps * max(sv[0], 1e-300):
        raise SingularChannelError("H_EA^H H_EA is singular; the high-power limit needs its inverse")
    _, s, Vh = np.linalg.svd(channels.H_BA, full_matrices=False)
    V = Vh.conj().T
    if not np.any(s):
        return 0.0
    We = gram(channels.H_EA)
    inner = hermitian(V.conj().T @ solve_pd(We, V))
    m = hermitian(s[:, None] * inner * s[None, :]) + np.eye(n_B)
    return clamp_capacity(logdet2_pd(m), "limit")


def highpower_gap(channels: ChannelSet, pA, pB_over_pA) -> HighPowerGap:
    limit = highpower_limit(channels)
    pw = PowerConfig(p_A=pA, p_B=pA * pB_over_pA)
    rs = gsteep_secrecy_rate(channels, pw).R_s
    sc = scale_channels(channels, pw)
    ck = secret_key_capacity(sc.Hp_BA, sc.Hp_EA)
    return HighPowerGap(rs, ck, limit, abs(rs - limit), abs(ck - limit))


__all__ = [
    "ProbeStats",
    "LogDetTerms",
    "SecrecyBreakdown",
    "SisoSnr",
    "effective_probe_stats",
    "alice_capacity",
    "eve_probe_mse",
    "eve_capacity",
    "gsteep_secrecy_rate",
    "corollary1_breakdown",
    "corollary1_t",
    "secret_key_capacity",
    "siso_snr_from_channels",
    "siso_secrecy_rate",
    "siso_rate_limit_large_b",
    "siso_threshold_b",
    "siso_key_capacity",
    "DofEstimate",
    "dof_reference",
    "dof_slope",
    "HighPowerGap",
    "highpower_limit",
    "highpower_gap",
]
