"""Physical channel model for a three-node link (Alice, Bob, Eve).

Channel naming follows receiver-then-transmitter order: ``H_BA`` carries
Alice's signal to Bob, ``H_EB`` carries Bob's signal to Eve, and so on.
Noise at every receive antenna is CN(0, 1).
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._linalg import check_psd, hermitian, logdet2_pd
from .errors import InvalidArgumentError, RatioUndefinedError


def _as_matrix(h, name):
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h[:, None]
    if h.ndim != 2:
        raise InvalidArgumentError(f"{name} must be a matrix, got ndim={h.ndim}")
    if not np.all(np.isfinite(h)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return h


@dataclass(frozen=True)
class ChannelSet:
    """The four channel matrices of one link realization.

    Shapes are ``H_BA: (n_B, n_A)``, ``H_AB: (n_A, n_B)``,
    ``H_EA: (n_E, n_A)`` and ``H_EB: (n_E, n_B)``.
    """

    H_BA: np.ndarray
    H_AB: np.ndarray
    H_EA: np.ndarray
    H_EB: np.ndarray

    def __post_init__(self):
        for name in ("H_BA", "H_AB", "H_EA", "H_EB"):
            object.__setattr__(self, name, _as_matrix(getattr(self, name), name))
        n_B, n_A = self.H_BA.shape
        n_E = self.H_EA.shape[0]
        expected = {
            "H_AB": (n_A, n_B),
            "H_EA": (n_E, n_A),
            "H_EB": (n_E, n_B),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise InvalidArgumentError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape} "
                    f"for (n_A, n_B, n_E) = ({n_A}, {n_B}, {n_E})"
                )
        if min(n_A, n_B, n_E) < 1:
            raise InvalidArgumentError("antenna counts must be >= 1")

    @property
    def n_A(self):
        return self.H_BA.shape[1]

    @property
    def n_B(self):
        return self.H_BA.shape[0]

    @property
    def n_E(self):
        return self.H_EA.shape[0]


@dataclass(frozen=True)
class PowerConfig:
    """Probe power ``p_A`` (Alice) and echo power bound ``p_B`` (Bob)."""

    p_A: float
    p_B: float

    def __post_init__(self):
        for name in ("p_A", "p_B"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0.0:
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class ScaledChannelSet:
    """Power-scaled channels.

    ``Hp_*`` are the single-primed matrices (per-antenna power folded in);
    ``Hpp_AB`` and ``Hpp_EB`` carry the extra sqrt(1/2) of the echo phase,
    where Bob splits his power between his probe estimate and the message.
    """

    Hp_BA: np.ndarray
    Hp_EA: np.ndarray
    Hp_AB: np.ndarray
    Hp_EB: np.ndarray
    Hpp_AB: np.ndarray
    Hpp_EB: np.ndarray


def sample_channels(n_A, n_B, n_E, seed):
    """Draw a ChannelSet with i.i.d. CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2). The draw order is
    H_BA, H_AB, H_EA, H_EB, so a fixed ``seed`` gives identical matrices.
    """
    for name, n in (("n_A", n_A), ("n_B", n_B), ("n_E", n_E)):
        if int(n) != n or n < 1:
            raise InvalidArgumentError(f"{name} must be a positive integer, got {n}")
    rng = np.random.default_rng(seed)

    def cn(rows, cols):
        return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)

    return ChannelSet(
        H_BA=cn(n_B, n_A),
        H_AB=cn(n_A, n_B),
        H_EA=cn(n_E, n_A),
        H_EB=cn(n_E, n_B),
    )


def scale_channels(channels: ChannelSet, powers: PowerConfig) -> ScaledChannelSet:
    ka = np.sqrt(powers.p_A / channels.n_A)
    kb = np.sqrt(powers.p_B / channels.n_B)
    half = np.sqrt(0.5)
    Hp_AB = kb * channels.H_AB
    Hp_EB = kb * channels.H_EB
    return ScaledChannelSet(
        Hp_BA=ka * channels.H_BA,
        Hp_EA=ka * channels.H_EA,
        Hp_AB=Hp_AB,
        Hp_EB=Hp_EB,
        Hpp_AB=half * Hp_AB,
        Hpp_EB=half * Hp_EB,
    )


def classic_wtc_rate(channels: ChannelSet, powers: PowerConfig, K_x) -> float:
    """Secrecy rate of one-way Gaussian wiretap coding from Alice to Bob.

    Evaluated for the given input covariance ``K_x`` (no maximization):
    ``(log2|I + (p_A/n_A) H_BA K H_BA^H| - log2|I + (p_A/n_A) H_EA K H_EA^H|)^+``.

    Raises
    ------
    InvalidArgumentError
        If ``K_x`` is not Hermitian PSD, has the wrong shape, or its trace
        exceeds ``n_A``.
    """
    n_A = channels.n_A
    K = check_psd(np.asarray(K_x, dtype=complex), "K_x")
    if K.shape != (n_A, n_A):
        raise InvalidArgumentError(f"K_x must be {n_A}x{n_A}, got {K.shape}")
    if np.real(np.trace(K)) > n_A + 1e-9:
        raise InvalidArgumentError(f"trace(K_x) = {np.real(np.trace(K)):.6g} exceeds n_A = {n_A}")
    return max(0.0, classic_wtc_difference(channels, powers, K))


def classic_wtc_terms(channels: ChannelSet, powers: PowerConfig, K_x):
    """``(I(x; y_B), I(x; y_E))`` in bits for Gaussian input ``x ~ CN(0, K_x)``."""
    n_A = channels.n_A
    K = check_psd(np.asarray(K_x, dtype=complex), "K_x")
    if K.shape != (n_A, n_A):
        raise InvalidArgumentError(f"K_x must be {n_A}x{n_A}, got {K.shape}")
    g = powers.p_A / n_A
    bob = hermitian(g * channels.H_BA @ K @ channels.H_BA.conj().T) + np.eye(channels.n_B)
    eve = hermitian(g * channels.H_EA @ K @ channels.H_EA.conj().T) + np.eye(channels.n_E)
    return logdet2_pd(bob), logdet2_pd(eve)


def classic_wtc_difference(channels: ChannelSet, powers: PowerConfig, K_x) -> float:
    """``I(x; y_B) - I(x; y_E)`` for Gaussian input ``x ~ CN(0, K_x)``, without clamping."""
    i_b, i_e = classic_wtc_terms(channels, powers, K_x)
    return i_b - i_e


def channel_strength_ratio_alpha(H_EA, H_BA, return_vector=False):
    """Smallest ratio ``||H_EA v||^2 / ||H_BA v||^2`` over nonzero ``v``.

    Classic one-way wiretap coding from Alice has a positive secrecy
    capacity iff this ratio is below one.

    Parameters
    ----------
    H_EA : array_like, shape (n_E, n_A)
    H_BA : array_like, shape (n_B, n_A)
        Must have full column rank (so ``n_B >= n_A``).
    return_vector : bool
        Also return a unit-norm minimizing ``v``.

    Raises
    ------
    RatioUndefinedError
        If ``H_BA^H H_BA`` is singular; then ``H_BA v = 0`` for some ``v`` and
        the one-way condition cannot be met, which is exactly the regime
        where the echoed-probe schemes are of interest.
    """
    H_EA = _as_matrix(H_EA, "H_EA")
    H_BA = _as_matrix(H_BA, "H_BA")
    if H_EA.shape[1] != H_BA.shape[1]:
        raise InvalidArgumentError("H_EA and H_BA must have the same number of columns")
    n_A = H_BA.shape[1]
    if H_BA.shape[0] < n_A:
        raise RatioUndefinedError(
            f"H_BA^H H_BA is singular (n_B = {H_BA.shape[0]} < n_A = {n_A}); ratio undefined"
        )
    sv = np.linalg.svd(H_BA, compute_uv=False)
    if sv[-1] <= max(H_BA.shape) * np.finfo(float).eps * max(sv[0], 1e-300):
        raise RatioUndefinedError("H_BA^H H_BA is singular; ratio undefined")
    num = hermitian(H_EA.conj().T @ H_EA)
    den = hermitian(H_BA.conj().T @ H_BA)
    L = linalg.cholesky(den, lower=True)
    Linv_num = linalg.solve_triangular(L, num, lower=True)
    whitened = hermitian(linalg.solve_triangular(L, Linv_num.conj().T, lower=True))
    w, u = np.linalg.eigh(whitened)
    alpha = max(float(w[0]), 0.0)
    if not return_vector:
        return alpha
    v = linalg.solve_triangular(L.conj().T, u[:, 0], lower=False)
    return alpha, v / np.linalg.norm(v)
