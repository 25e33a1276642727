"""Multiple access: one n_A-antenna access point (AP) probing M single-antenna UEs.

All UEs share the AP's CN(0, I) probes. UE_i estimates its effective
probe ``p_i = h_bar_i^T x`` and echoes ``sqrt(p_ui / 2) (p_hat_i + s_i)`` over
its own orthogonal channel. Eve hears the probes through ``H_EA`` and every
echo through ``h_Ei``.

Eve's joint observation is handled by assembling the full
``(M + 1) n_E`` block covariance and solving it directly. The closed forms
for ``gamma_1``, ``t_{1,M}`` and the symmetric network are evaluated as
separate routes and checked against the matrix path, which is authoritative.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._linalg import hermitian, logdet2_pd, solve_pd
from .errors import (
    BoundNotApplicableError,
    ConsistencyError,
    InvalidArgumentError,
    SingularChannelError,
    UnsupportedConfigurationError,
)

#: Relative tolerance for closed-form vs matrix agreement.
CROSS_TOL = 1e-9


def _rel_close(x, y, tol=CROSS_TOL):
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class MultiAccessNetwork:
    """Channels and powers of an M-UE network.

    Parameters
    ----------
    h : (M, n_A) AP -> UE_i channels, row i is ``h_i``.
    h_A : (M, n_A) UE_i -> AP channels.
    h_E : (M, n_E) UE_i -> Eve channels.
    H_EA : (n_E, n_A) AP -> Eve channel.
    p_A : AP probe power.
    p_u : (M,) UE echo powers.
    """

    h: np.ndarray
    h_A: np.ndarray
    h_E: np.ndarray
    H_EA: np.ndarray
    p_A: float
    p_u: np.ndarray

    def __post_init__(self):
        h = np.atleast_2d(np.asarray(self.h, dtype=complex))
        h_A = np.atleast_2d(np.asarray(self.h_A, dtype=complex))
        h_E = np.atleast_2d(np.asarray(self.h_E, dtype=complex))
        H_EA = np.atleast_2d(np.asarray(self.H_EA, dtype=complex))
        p_u = np.atleast_1d(np.asarray(self.p_u, dtype=float))
        M, n_A = h.shape
        n_E = h_E.shape[1]
        if M < 1:
            raise InvalidArgumentError("need at least one UE")
        if h_A.shape != (M, n_A):
            raise InvalidArgumentError(f"h_A has shape {h_A.shape}, expected {(M, n_A)}")
        if h_E.shape[0] != M:
            raise InvalidArgumentError(f"h_E has {h_E.shape[0]} rows, expected M = {M}")
        if H_EA.shape != (n_E, n_A):
            raise InvalidArgumentError(f"H_EA has shape {H_EA.shape}, expected {(n_E, n_A)}")
        if p_u.shape != (M,):
            raise InvalidArgumentError(f"p_u must have length M = {M}")
        for name, arr in (("h", h), ("h_A", h_A), ("h_E", h_E), ("H_EA", H_EA), ("p_u", p_u)):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError(f"{name} has non-finite entries")
        p_A = float(self.p_A)
        if not np.isfinite(p_A) or p_A <= 0 or np.any(p_u <= 0):
            raise InvalidArgumentError("powers must be finite and > 0")
        for name, val in (("h", h), ("h_A", h_A), ("h_E", h_E), ("H_EA", H_EA), ("p_A", p_A), ("p_u", p_u)):
            object.__setattr__(self, name, val)

    @property
    def M(self):
        return self.h.shape[0]

    @property
    def n_A(self):
        return self.h.shape[1]

    @property
    def n_E(self):
        return self.h_E.shape[1]

    def permuted(self, order: Sequence[int]) -> "MultiAccessNetwork":
        """Relabel UEs so that new UE k is old UE ``order[k]``."""
        order = np.asarray(order, dtype=int)
        if sorted(order.tolist()) != list(range(self.M)):
            raise InvalidArgumentError("order must be a permutation of range(M)")
        return MultiAccessNetwork(
            h=self.h[order], h_A=self.h_A[order], h_E=self.h_E[order],
            H_EA=self.H_EA, p_A=self.p_A, p_u=self.p_u[order],
        )

    def with_uplink_power(self, i, p) -> "MultiAccessNetwork":
        p_u = self.p_u.copy()
        p_u[i] = p
        return MultiAccessNetwork(self.h, self.h_A, self.h_E, self.H_EA, self.p_A, p_u)


@dataclass(frozen=True)
class UeStats:
    """Per-UE SNRs and probe-estimate statistics.

    ``S`` is the probe SNR at each UE, ``S_A`` and ``S_E`` the echo SNRs
    at the AP and at Eve, ``S_EA = ||H'_EA||_F^2``. ``c`` is the variance of
    each probe estimate and ``d = 1 - c`` its MSE; ``phi[i, j]`` is the
    correlation of the effective probes of UEs i and j.
    """

    S: np.ndarray
    S_A: np.ndarray
    S_E: np.ndarray
    S_EA: float
    c: np.ndarray
    d: np.ndarray
    phi: np.ndarray
    h_bar: np.ndarray

    @property
    def eps(self):
        """``E{p_hat_i p_hat_j^*}`` for ``i != j`` (the diagonal is ``c_i``)."""
        e = np.outer(self.c, self.c) * self.phi
        np.fill_diagonal(e, self.c)
        return e

    @property
    def r_x(self):
        """Row i is ``E{x p_hat_i^*} = c_i conj(h_bar_i)``."""
        return self.c[:, None] * self.h_bar.conj()


def ue_stats(net: MultiAccessNetwork) -> UeStats:
    norms = np.linalg.norm(net.h, axis=1)
    h_bar = np.zeros_like(net.h)
    nz = norms > 0
    h_bar[nz] = net.h[nz] / norms[nz, None]
    # a dead probe link has c_i = 0, so any unit direction will do
    h_bar[~nz, 0] = 1.0
    S = (net.p_A / net.n_A) * norms**2
    c = S / (S + 1.0)
    d = 1.0 / (S + 1.0)
    phi = h_bar @ h_bar.conj().T
    np.fill_diagonal(phi, 1.0)
    S_A = net.p_u * np.sum(np.abs(net.h_A) ** 2, axis=1)
    S_E = net.p_u * np.sum(np.abs(net.h_E) ** 2, axis=1)
    S_EA = (net.p_A / net.n_A) * float(np.sum(np.abs(net.H_EA) ** 2))
    return UeStats(S=S, S_A=S_A, S_E=S_E, S_EA=S_EA, c=c, d=d, phi=phi, h_bar=h_bar)


def ue_uplink_rate(S_i, S_Ai) -> float:
    """Rate from UE_i to the AP using only UE_i's echo and the probes.

    ``S_i = inf`` is accepted and gives ``log2(1 + S_Ai / 2)``.
    """
    S_i, S_Ai = float(S_i), float(S_Ai)
    if S_i < 0 or S_Ai < 0 or np.isnan(S_i) or np.isnan(S_Ai):
        raise InvalidArgumentError("SNRs must be >= 0")
    resid = 0.0 if np.isinf(S_i) else S_i / (S_i + 1.0) ** 2
    x = S_Ai / 2.0
    return float(np.log2(1.0 + x / (resid * x + 1.0)))


def _echo_gains(net):
    """``g_i = sqrt(p_ui / 2) h_Ei``, stacked as rows."""
    return np.sqrt(net.p_u / 2.0)[:, None] * net.h_E


def eve_covariance(net: MultiAccessNetwork, stats: UeStats, known=()):
    """Covariance of Eve's stacked observation ``[y_E1; ...; y_EM; y_EA]``.

    UEs listed in ``known`` have their message removed (Eve is told
    ``s_l``), which lowers the diagonal coefficient from ``1 + c_l`` to ``c_l``.
    """
    M, n_E = net.M, net.n_E
    g = _echo_gains(net)
    K = np.outer(stats.c, stats.c) * stats.phi
    diag = 1.0 + stats.c
    for l in known:
        diag[l] = stats.c[l]
    np.fill_diagonal(K, diag)
    top = np.einsum("ij,ia,jb->iajb", K, g, g.conj()).reshape(M * n_E, M * n_E)
    Hp_EA = np.sqrt(net.p_A / net.n_A) * net.H_EA
    u = stats.r_x @ Hp_EA.T  # row i: H'_EA r_x,i
    cross = (g[:, :, None] * u.conj()[:, None, :]).reshape(M * n_E, n_E)
    R = np.empty(((M + 1) * n_E, (M + 1) * n_E), dtype=complex)
    R[: M * n_E, : M * n_E] = top
    R[: M * n_E, M * n_E:] = cross
    R[M * n_E:, : M * n_E] = cross.conj().T
    R[M * n_E:, M * n_E:] = Hp_EA @ Hp_EA.conj().T
    return hermitian(R) + np.eye(R.shape[0])


def _target_vector(net, i):
    r = np.zeros((net.M + 1) * net.n_E, dtype=complex)
    r[i * net.n_E:(i + 1) * net.n_E] = _echo_gains(net)[i]
    return r


def eve_message_mse(net: MultiAccessNetwork, stats: UeStats, i, known=()):
    """Eve's MMSE for ``s_i`` from all her observations (and the ``known`` messages)."""
    if i in known:
        raise InvalidArgumentError("target UE cannot be in the known set")
    R = eve_covariance(net, stats, known)
    r = _target_vector(net, i)
    try:
        val = 1.0 - float(np.real(np.vdot(r, solve_pd(R, r))))
    except np.linalg.LinAlgError as exc:
        raise SingularChannelError(f"Eve covariance is not positive definite: {exc}") from exc
    if not -CROSS_TOL < val <= 1.0 + CROSS_TOL:
        raise ConsistencyError(f"Eve MSE {val} outside (0, 1]")
    return min(max(val, 0.0), 1.0)


class EveUe1(NamedTuple):
    sigma2: float
    gamma_1: float
    C_E: float


def eve_joint_mse_ue1(net: MultiAccessNetwork, stats: UeStats = None) -> EveUe1:
    """Eve's MSE, ``gamma_1`` and capacity for the message of UE index 0.

    ``gamma_1 - 1`` is Eve's MSE for UE_1's probe estimate from everything
    except UE_1's echo. The MSE is computed from the full covariance and
    re-derived from ``gamma_1``; the two must agree.
    """
    st = ue_stats(net) if stats is None else stats
    n_E = net.n_E
    R = eve_covariance(net, st)
    sigma2 = eve_message_mse(net, st, 0)

    g1 = _echo_gains(net)[0]
    # R_{1,rest} = g_1 u^H, so u is the first block-row divided by g_1
    K1 = st.c[0] * st.c * st.phi[0]
    Hp_EA = np.sqrt(net.p_A / net.n_A) * net.H_EA
    u_parts = [np.conj(K1[j]) * _echo_gains(net)[j] for j in range(1, net.M)]
    u_parts.append(Hp_EA @ st.r_x[0])
    u = np.concatenate(u_parts)
    R_rest = R[n_E:, n_E:]
    gamma_1 = 1.0 + st.c[0] - float(np.real(np.vdot(u, solve_pd(R_rest, u))))
    if gamma_1 - 1.0 < -CROSS_TOL:
        raise ConsistencyError(f"gamma_1 - 1 = {gamma_1 - 1.0:.3e} is negative")
    S_E1 = float(np.sum(np.abs(g1) ** 2)) * 2.0
    closed = ((gamma_1 - 1.0) * S_E1 / 2.0 + 1.0) / (gamma_1 * S_E1 / 2.0 + 1.0)
    if not _rel_close(closed, sigma2):
        raise ConsistencyError(f"gamma_1 route gives {closed!r}, direct solve {sigma2!r}")
    return EveUe1(sigma2=sigma2, gamma_1=gamma_1, C_E=float(-np.log2(sigma2)) if sigma2 < 1 else 0.0)


class MsteepRate(NamedTuple):
    R_s: float
    R_A: float
    C_E: float
    gamma_1: float


def msteep_secrecy_rate_ue1(net: MultiAccessNetwork) -> MsteepRate:
    """Secrecy rate for UE index 0, ``(R_A|1 - C_E|1)^+``."""
    st = ue_stats(net)
    r_a = ue_uplink_rate(st.S[0], st.S_A[0])
    eve = eve_joint_mse_ue1(net, st)
    return MsteepRate(max(0.0, r_a - eve.C_E), r_a, eve.C_E, eve.gamma_1)


class T1M(NamedTuple):
    recursion: float
    quadratic_form: float


def _require_single_ap_antenna(net):
    if net.n_A != 1:
        raise UnsupportedConfigurationError(f"requires n_A = 1, got n_A = {net.n_A}")


def t1m_appendix_c(net: MultiAccessNetwork, stats: UeStats = None) -> T1M:
    """How much the other UEs' echoes tell Eve about UE_1's probe estimate.

    For ``n_A = 1`` this is ``v^H B^{-1} v`` with ``v = [c_i g_i]_{i>=2}`` and
    ``B = I + [k_ij g_i g_j^H]``, where ``g_i`` is UE i's echo gain at Eve
    rotated by the phase of its probe channel. Off the diagonal
    ``k_ij = c_i c_j / (S_EA + 1)``; on it
    ``k_ii = 1 + c_i - c_i^2 S_EA / (S_EA + 1)``.

    The value is built both by adding one UE at a time,

        eta_k = c_k^2 |g_k|^2 / ((k_kk - t c_k^2 / (S_EA+1)^2) |g_k|^2 + 1)
        t    <- t + t^2 eta_k / (S_EA+1)^2 - 2 t eta_k / (S_EA+1) + eta_k,

    and by solving with ``B`` directly. The two must agree, and the result
    must satisfy ``0 <= t < min(M - 1, S_EA + 1)``.
    """
    _require_single_ap_antenna(net)
    st = ue_stats(net) if stats is None else stats
    M = net.M
    g = _echo_gains(net) * st.h_bar[:, :1]
    k = st.S_EA + 1.0
    c = st.c
    kappa = 1.0 + c - c**2 * st.S_EA / k

    t = 0.0
    for m in range(1, M):
        gg = float(np.sum(np.abs(g[m]) ** 2))
        eta = c[m] ** 2 * gg / ((kappa[m] - t * c[m] ** 2 / k**2) * gg + 1.0)
        t = t + t**2 * eta / k**2 - 2.0 * t * eta / k + eta

    if M == 1:
        direct = 0.0
    else:
        gs = g[1:]
        n_E = net.n_E
        Kmat = np.outer(c[1:], c[1:]) / k
        np.fill_diagonal(Kmat, kappa[1:])
        B = np.einsum("ij,ia,jb->iajb", Kmat, gs, gs.conj()).reshape((M - 1) * n_E, (M - 1) * n_E)
        B = hermitian(B) + np.eye(B.shape[0])
        v = (c[1:, None] * gs).reshape(-1)
        direct = float(np.real(np.vdot(v, solve_pd(B, v))))
    if not _rel_close(t, direct):
        raise ConsistencyError(f"recursion gives t = {t!r}, quadratic form {direct!r}")
    if direct < -CROSS_TOL or (M > 1 and direct >= min(M - 1.0, k)):
        raise ConsistencyError(f"t = {direct!r} violates 0 <= t < min(M-1, S_EA+1) = {min(M - 1.0, k)}")
    return T1M(recursion=float(t), quadratic_form=max(direct, 0.0))


def gamma1_closed_form(S_1, S_EA, t):
    """``gamma_1 - 1`` for ``n_A = 1`` from ``S_1``, ``S_EA`` and ``t_{1,M}``."""
    c1 = S_1 / (S_1 + 1.0)
    return c1 - c1**2 * S_EA / (S_EA + 1.0) - c1**2 * t / (S_EA + 1.0) ** 2


def positivity_threshold_ue1(net: MultiAccessNetwork) -> float:
    """Smallest ``S_A1`` (UE_1's echo SNR at the AP) with a positive secrecy rate.

    Only the echo power of UE_1 moves ``S_A1``; the threshold itself does
    not depend on it. Returns 0 when ``beta_1 = S_E1 / S_A1 <= 1`` and
    ``inf`` if UE_1's probe link is dead while ``beta_1 > 1``.
    """
    _require_single_ap_antenna(net)
    st = ue_stats(net)
    if st.S_A[0] == 0.0:
        raise SingularChannelError("UE_1 has no uplink channel to the AP")
    t = t1m_appendix_c(net, st).quadratic_form
    eve = eve_joint_mse_ue1(net, st)
    closed = 1.0 + gamma1_closed_form(st.S[0], st.S_EA, t)
    if not _rel_close(closed, eve.gamma_1):
        raise ConsistencyError(f"gamma_1 closed form {closed!r} vs matrix {eve.gamma_1!r}")
    beta1 = st.S_E[0] / st.S_A[0]
    if beta1 <= 1.0:
        return 0.0
    S1 = st.S[0]
    if S1 == 0.0:
        return float("inf")
    aS = st.S_EA  # alpha_1 S_1
    shrink = 1.0 - t / (aS + 1.0)
    if shrink <= 0.0:
        return float("inf")
    return 2.0 * (1.0 - 1.0 / beta1) * (S1 + 1.0) ** 2 * (aS + 1.0) / (S1**2 * shrink)


class SecrecyTerm(NamedTuple):
    R_A: float
    R_E: float
    R_tilde: float


class TotalSecrecy(NamedTuple):
    terms: list
    R_tilde_s: float
    eve_total: float


def total_secrecy_terms(net: MultiAccessNetwork) -> TotalSecrecy:
    """Chain-rule decomposition of the sum secrecy rate.

    Term i pairs UE_i's uplink rate (a lower bound on what the AP can get)
    with Eve's information about ``s_i`` given ``s_1 .. s_{i-1}``. Terms are
    not clamped. ``eve_total`` is ``I(s; y_E)`` and does not depend on the
    UE order.
    """
    st = ue_stats(net)
    terms = []
    for i in range(net.M):
        r_a = ue_uplink_rate(st.S[i], st.S_A[i])
        mse = eve_message_mse(net, st, i, known=tuple(range(i)))
        r_e = float(-np.log2(mse)) if mse < 1.0 else 0.0
        terms.append(SecrecyTerm(r_a, r_e, r_a - r_e))
    return TotalSecrecy(
        terms=terms,
        R_tilde_s=float(sum(t.R_tilde for t in terms)),
        eve_total=float(sum(t.R_E for t in terms)),
    )


def eve_total_information(net: MultiAccessNetwork) -> float:
    """``I(s; y_E)`` from two log-determinants, with no chain rule."""
    st = ue_stats(net)
    R = eve_covariance(net, st)
    R_given_s = eve_covariance(net, st, known=tuple(range(net.M)))
    return logdet2_pd(R) - logdet2_pd(R_given_s)


# -- symmetric single-antenna network ---------------------------------------


def symmetric_network(sigma2, sigma2_A, sigma2_E, sigma2_EA, M) -> MultiAccessNetwork:
    """Express the symmetric noise-variance network as a general network.

    Probe SNR ``1/sigma2`` at each UE and ``1/sigma2_EA`` at Eve; echo SNR
    ``2/sigma2_A`` at the AP and ``2/sigma2_E`` at Eve (the echo carries the
    sum of two unit-variance terms at half power each).
    """
    for name, v in (("sigma2", sigma2), ("sigma2_A", sigma2_A), ("sigma2_E", sigma2_E), ("sigma2_EA", sigma2_EA)):
        if not v > 0 or not np.isfinite(v):
            raise InvalidArgumentError(f"{name} must be finite and > 0")
    M = int(M)
    ones = np.ones((M, 1))
    return MultiAccessNetwork(
        h=ones,
        h_A=ones,
        h_E=np.sqrt(sigma2_A / sigma2_E) * ones,
        H_EA=np.array([[np.sqrt(sigma2 / sigma2_EA)]]),
        p_A=1.0 / sigma2,
        p_u=np.full(M, 2.0 / sigma2_A),
    )


class SymmetricResult(NamedTuple):
    R_terms: np.ndarray
    sigma2_ap: float
    sigma2_eve: np.ndarray
    g_A: float
    g_E: float
    g_E_closed: float
    gap_closed: float
    descending: bool
    last_positive: bool


def _symmetric_mus(sigma2, sigma2_EA):
    mu = sigma2 / (1.0 + sigma2)
    mu_ea = sigma2_EA / (1.0 + sigma2_EA)
    return mu, 1.0 - mu, mu_ea, 1.0 - mu_ea


def _symmetric_g_E(sigma2, sigma2_E, sigma2_EA, M):
    mu, mup, mu_ea, mup_ea = _symmetric_mus(sigma2, sigma2_EA)
    den = sigma2_E / mup + mu + (M - 1) * mu_ea * mup
    return sigma2_E + mup - mup_ea * mup**2 - (M - 1) * mu_ea**2 * mup**3 / den


def symmetric_gap(sigma2, sigma2_A, sigma2_E, sigma2_EA, M) -> float:
    """Closed form of ``g_E - g_A`` for the last UE of the symmetric network.

    Its sign is the sign of the last secrecy term; it costs O(1) for any M.
    """
    mu, mup, mu_ea, _ = _symmetric_mus(sigma2, sigma2_EA)
    den = sigma2_E / mup + mu + (M - 1) * mu_ea * mup
    return sigma2_E - sigma2_A + mup * (mu_ea * sigma2_E + mu_ea * mup * mu) / den


def symmetric_analysis(sigma2, sigma2_A, sigma2_E, sigma2_EA, M) -> SymmetricResult:
    """Per-UE secrecy terms of the symmetric single-antenna network.

    Eve's conditional MSEs come from the M x M matrix ``A_i - c c^T / b``
    (authoritative); ``g_E`` is the last of them in ``1/sigma^2 = 1 + 1/g``
    form and is cross-checked against its closed form. ``gap_closed`` is the
    closed form of ``g_E - g_A``.
    """
    for name, v in (("sigma2", sigma2), ("sigma2_A", sigma2_A), ("sigma2_E", sigma2_E), ("sigma2_EA", sigma2_EA)):
        if not v > 0 or not np.isfinite(v):
            raise InvalidArgumentError(f"{name} must be finite and > 0")
    M = int(M)
    if M < 1:
        raise InvalidArgumentError("M must be >= 1")
    mu, mup, mu_ea, mup_ea = _symmetric_mus(sigma2, sigma2_EA)
    g_A = mu * mup + sigma2_A
    sigma2_ap = g_A / (1.0 + g_A)

    b = 1.0 + sigma2_EA
    cvec = np.full(M, mup)
    base = np.full((M, M), mup**2) - np.outer(cvec, cvec) / b
    eve = np.empty(M)
    for i in range(M):
        A = base.copy()
        diag = np.full(M, 1.0 + mup + sigma2_E)
        diag[:i] = mup + sigma2_E
        A[np.diag_indices(M)] = diag - mup**2 / b
        e = np.zeros(M)
        e[i] = 1.0
        eve[i] = 1.0 - float(e @ np.linalg.solve(A, e))
    g_E = eve[-1] / (1.0 - eve[-1])

    g_E_closed = _symmetric_g_E(sigma2, sigma2_E, sigma2_EA, M)
    if not _rel_close(g_E, g_E_closed):
        raise ConsistencyError(f"g_E closed form {g_E_closed!r} vs matrix {g_E!r}")
    gap = symmetric_gap(sigma2, sigma2_A, sigma2_E, sigma2_EA, M)

    terms = np.log2(eve / sigma2_ap)
    return SymmetricResult(
        R_terms=terms,
        sigma2_ap=sigma2_ap,
        sigma2_eve=eve,
        g_A=g_A,
        g_E=g_E,
        g_E_closed=g_E_closed,
        gap_closed=gap,
        descending=bool(np.all(np.diff(terms) < 0)),
        last_positive=bool(terms[-1] > 0),
    )


class ThresholdCoeffs(NamedTuple):
    c2: float
    c1: float
    c0: float


def symmetric_threshold_coeffs(beta0, sigma2, sigma2_EA, M) -> ThresholdCoeffs:
    """Coefficients of ``c2 x^2 + c1 x - c0 < 0`` in ``x = sigma2_A`` with ``sigma2_E = x / beta0``."""
    mu, mup, mu_ea, _ = _symmetric_mus(sigma2, sigma2_EA)
    c2 = (beta0 - 1.0) / (beta0**2 * mup**2)
    c1 = (beta0 - 1.0) * (mu + (M - 1) * mu_ea * mup) / (beta0 * mup) - mu_ea / beta0
    c0 = mu_ea * mu * mup
    return ThresholdCoeffs(c2, c1, c0)


def symmetric_threshold(beta0, sigma2, sigma2_EA, M) -> float:
    """Largest echo noise variance ``sigma2_A`` keeping the last secrecy term positive.

    Eve's echo noise is ``sigma2_A / beta0``. The positive root of the
    quadratic is taken in a cancellation-free form. As ``beta0 -> 1+`` the
    quadratic coefficient vanishes while the linear one tends to
    ``-mu_EA < 0``, so the threshold grows without bound (``inf`` once the
    quadratic term underflows).

    Raises
    ------
    BoundNotApplicableError
        If ``beta0 <= 1``; the last term is then positive at every power.
    """
    if not beta0 > 1.0:
        raise BoundNotApplicableError("beta0 <= 1: the secrecy term is positive at any power")
    if not (sigma2 > 0 and sigma2_EA > 0) or int(M) < 1:
        raise InvalidArgumentError("variances must be > 0 and M >= 1")
    c2, c1, c0 = symmetric_threshold_coeffs(beta0, sigma2, sigma2_EA, int(M))
    if c2 == 0.0:
        return c0 / c1 if c1 > 0 else float("inf")
    disc = np.sqrt(c1 * c1 + 4.0 * c0 * c2)
    root = 2.0 * c0 / (c1 + disc) if c1 >= 0 else (-c1 + disc) / (2.0 * c2)
    if not root > 0:
        raise ConsistencyError(f"threshold root {root!r} is not positive")
    return float(root)


__all__ = [
    "CROSS_TOL",
    "MultiAccessNetwork",
    "UeStats",
    "ue_stats",
    "ue_uplink_rate",
    "eve_covariance",
    "eve_message_mse",
    "EveUe1",
    "eve_joint_mse_ue1",
    "MsteepRate",
    "msteep_secrecy_rate_ue1",
    "T1M",
    "t1m_appendix_c",
    "gamma1_closed_form",
    "positivity_threshold_ue1",
    "SecrecyTerm",
    "TotalSecrecy",
    "total_secrecy_terms",
    "eve_total_information",
    "symmetric_network",
    "SymmetricResult",
    "symmetric_analysis",
    "symmetric_gap",
    "ThresholdCoeffs",
    "symmetric_threshold_coeffs",
    "symmetric_threshold",
]
