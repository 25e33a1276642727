"""PSK probing with phase-rotation encryption over single-antenna links.

Alice sends a random M-PSK probe ``x_A = e^{j theta}``; Bob keeps the soft
observation ``r_B`` and echoes ``e^{j phi} r_B`` where ``phi`` is the
M-PSK message. Alice detects ``phi`` from ``x_A^* r_A``; Eve detects it
from the product of her two observations.

Symbol error rates use the nearest-neighbour union bound, so the
capacities for M >= 4 are high-SNR approximations.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc, xlogy

from .errors import BoundNotApplicableError, InvalidArgumentError, SingularChannelError
from .gsteep import SisoSnr

#: Symbol error rate above which the M >= 4 capacity approximation is flagged.
APPROX_WARN_PE = 0.3


@dataclass(frozen=True)
class PskConfig:
    """An M-PSK alphabet, ``M = 2**m``."""

    M: int

    def __post_init__(self):
        M = int(self.M)
        if M != self.M or M < 2 or (M & (M - 1)) != 0:
            raise InvalidArgumentError(f"M must be a power of two >= 2, got {self.M}")
        object.__setattr__(self, "M", M)

    @property
    def m(self):
        return self.M.bit_length() - 1

    @property
    def n0(self):
        # BPSK has one nearest neighbour, larger constellations two
        return 1 if self.M == 2 else 2

    @property
    def min_dist_half(self):
        """Half the minimum distance between unit-energy constellation points."""
        return float(np.sin(np.pi / self.M))

    def points(self):
        return np.exp(2j * np.pi * np.arange(self.M) / self.M)


def _cfg(M):
    return M if isinstance(M, PskConfig) else PskConfig(M)


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(N(0,1) > x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def binary_entropy(p):
    """``h2(p)`` in bits, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise InvalidArgumentError("probability outside [0, 1]")
    h = -(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / np.log(2.0)
    return float(h) if h.ndim == 0 else h


@dataclass(frozen=True)
class PskErrorParams:
    eps_A: float
    eps_E: float
    p_eA: float
    p_eE: float


def _pe(cfg: PskConfig, eps):
    if not np.isfinite(eps):
        return min(1.0, cfg.n0 * 0.5)
    return float(min(1.0, cfg.n0 * q_function(cfg.min_dist_half / eps)))


def psk_error_params(M, snr: SisoSnr) -> PskErrorParams:
    """Effective noise levels and symbol error rates at Alice and Eve.

    With no Eve link in either phase (``alpha a = 0`` or ``beta b = 0``) Eve
    is reduced to guessing: ``eps_E = inf`` and ``p_eE = min(1, n0 / 2)``.

    Raises
    ------
    SingularChannelError
        If ``a = 0`` or ``b = 0`` (the user link itself is dead).
    """
    cfg = _cfg(M)
    a, b = snr.a, snr.b
    if a == 0.0 or b == 0.0:
        raise SingularChannelError("degenerate link: a and b must be > 0")
    eps_A = float(np.sqrt(1.0 / (2.0 * a) + 1.0 / (2.0 * b)))
    s_ea, s_eb = snr.alpha * a, snr.beta * b
    if s_ea == 0.0 or s_eb == 0.0:
        eps_E = float("inf")
    else:
        eps_E = float(np.sqrt(1.0 / (2.0 * a) + 1.0 / (2.0 * s_ea) + 1.0 / (2.0 * s_eb)))
    return PskErrorParams(eps_A=eps_A, eps_E=eps_E, p_eA=_pe(cfg, eps_A), p_eE=_pe(cfg, eps_E))


def psk_capacity(M, p_e) -> float:
    """Capacity of the phase channel seen through detection with error rate ``p_e``.

    ``1 - h2(p_e)`` for BPSK. For ``M >= 4`` errors are assumed to hit one
    of the two neighbours with equal probability, giving
    ``m - p_e - h2(p_e)``, clamped to ``[0, m]``.
    """
    cfg = _cfg(M)
    p = float(p_e)
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p_e must lie in [0, 1], got {p}")
    if cfg.M == 2:
        return 1.0 - binary_entropy(p)
    return float(np.clip(cfg.m - p - binary_entropy(p), 0.0, cfg.m))


class PsteepResult(NamedTuple):
    R_s: float
    C_user: float
    C_eve: float
    rate_h2_difference: float
    approx_warning: bool


def psteep_secrecy_rate(M, snr: SisoSnr) -> PsteepResult:
    """Secrecy rate ``(C_user - C_eve)^+`` of the PSK scheme.

    ``rate_h2_difference`` is the simplified ``h2(p_eE) - h2(p_eA)`` (clamped
    at 0), which drops the ``p_eE - p_eA`` term for ``M >= 4``; it coincides
    with ``R_s`` for BPSK. ``approx_warning`` is set when either error rate
    exceeds :data:`APPROX_WARN_PE` with ``M >= 4``.
    """
    cfg = _cfg(M)
    ep = psk_error_params(cfg, snr)
    c_user = psk_capacity(cfg, ep.p_eA)
    c_eve = psk_capacity(cfg, ep.p_eE)
    h2_gap = binary_entropy(ep.p_eE) - binary_entropy(ep.p_eA)
    if cfg.M == 2:
        diff = h2_gap
    elif cfg.m - ep.p_eE - binary_entropy(ep.p_eE) >= 0.0:
        # neither capacity clamped; differencing m - p - h2(p) directly would
        # round tiny error rates away against m
        diff = (ep.p_eE - ep.p_eA) + h2_gap
    else:
        diff = c_user - c_eve
    warn = cfg.M >= 4 and max(ep.p_eA, ep.p_eE) > APPROX_WARN_PE
    return PsteepResult(max(0.0, diff), c_user, c_eve, max(0.0, h2_gap), warn)


def psteep_power_condition(snr: SisoSnr) -> bool:
    """``b / a > alpha (1 - 1/beta)``; this is ``eps_A < eps_E``.

    Always true for ``beta < 1``. With ``beta = 0`` Eve hears nothing in the
    echo phase and the condition holds trivially.
    """
    a, b = snr.a, snr.b
    if a <= 0.0 or b <= 0.0:
        raise SingularChannelError("degenerate link: a and b must be > 0")
    if snr.beta < 1.0:
        return True
    return b / a > snr.alpha * (1.0 - 1.0 / snr.beta)


class ErrorRatioBound(NamedTuple):
    bound: float
    delta_p: float
    P: float
    P_limit_large_b: float


def error_ratio_bound(M, snr: SisoSnr) -> ErrorRatioBound:
    """Upper bound ``(1 + delta_p) exp(-P)`` on ``p_eA / p_eE``.

    Follows from the Gaussian-tail sandwich
    ``x/(1+x^2) phi(x) < Q(x) < phi(x)/x``. Also returns the ``b -> inf``
    limit of ``P``, ``sin^2(pi/M) a / (alpha + 1)``.

    Raises
    ------
    BoundNotApplicableError
        If the power condition fails (then ``p_eA >= p_eE``), or Eve has no
        link in one of the phases.
    """
    cfg = _cfg(M)
    if not psteep_power_condition(snr):
        raise BoundNotApplicableError("power condition b/a > alpha (1 - 1/beta) does not hold")
    a, b, al, be = snr.a, snr.b, snr.alpha, snr.beta
    if al == 0.0 or be == 0.0:
        raise BoundNotApplicableError("Eve must hear both phases (alpha, beta > 0)")
    ep = psk_error_params(cfg, snr)
    s2 = cfg.min_dist_half**2
    delta = ep.eps_A * ep.eps_E / s2
    P = s2 * a**2 * b * (be * b + al * a - al * be * a) / ((a + b) * (al * be * a * b + be * a * b + al * a**2))
    return ErrorRatioBound(
        bound=float((1.0 + delta) * np.exp(-P)),
        delta_p=float(delta),
        P=float(P),
        P_limit_large_b=float(s2 * a / (al + 1.0)),
    )


__all__ = [
    "APPROX_WARN_PE",
    "PskConfig",
    "PskErrorParams",
    "PsteepResult",
    "ErrorRatioBound",
    "q_function",
    "binary_entropy",
    "psk_error_params",
    "psk_capacity",
    "psteep_secrecy_rate",
    "psteep_power_condition",
    "error_ratio_bound",
]
