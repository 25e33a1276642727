"""Small dense linear-algebra helpers shared by the closed-form modules.

All logarithms are base 2.
"""

import numpy as np
from scipy import linalg

from .errors import ConsistencyError, InvalidArgumentError

#: Slack allowed before a slightly negative capacity is treated as an error.
CLAMP_TOL = 1e-9


def hermitian(a):
    """Return the Hermitian part of a square matrix."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def gram(h):
    """``h^H h`` as an exactly Hermitian matrix."""
    h = np.asarray(h)
    return hermitian(h.conj().T @ h)


def logdet2_pd(a):
    """log2 of the determinant of a Hermitian positive-definite matrix.

    Uses a Cholesky factorization; raises ``LinAlgError`` if ``a`` is not PD.
    """
    a = hermitian(np.atleast_2d(a))
    c = linalg.cholesky(a, lower=True, check_finite=True)
    return float(2.0 * np.sum(np.log2(np.abs(np.diag(c)))))


def psd_sqrt(x):
    """Principal square root of a Hermitian PSD matrix (tiny negatives clipped)."""
    w, v = np.linalg.eigh(hermitian(np.atleast_2d(x)))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def logdet2_gx_plus_identity(g, x):
    """log2 |G X + I| for Hermitian PSD ``g`` and ``x``.

    The product ``G X`` is not Hermitian, but it is similar to
    ``X^{1/2} G X^{1/2}``, so the determinant is taken from the Cholesky
    factor of ``X^{1/2} G X^{1/2} + I``.
    """
    g = np.atleast_2d(g)
    x = np.atleast_2d(x)
    if _is_diagonal(x):
        s = np.sqrt(np.clip(np.real(np.diag(x)), 0.0, None))
        m = s[:, None] * g * s[None, :]
    else:
        r = psd_sqrt(x)
        m = r @ g @ r
    return logdet2_pd(m + np.eye(m.shape[0]))


def _is_diagonal(x):
    return np.count_nonzero(x - np.diag(np.diag(x))) == 0


def clamp_capacity(value, name="capacity"):
    """Clamp floating-point cancellation below zero; reject real negatives."""
    if value < 0.0:
        if value < -CLAMP_TOL:
            raise ConsistencyError(f"{name} is negative ({value:.3e}); expected >= 0")
        return 0.0
    return float(value)


def check_psd(a, name, tol=1e-9):
    """Raise ``InvalidArgumentError`` unless ``a`` is Hermitian PSD within ``tol``."""
    a = np.atleast_2d(np.asarray(a))
    if a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise InvalidArgumentError(f"{name} is not Hermitian")
    wmin = float(np.min(np.linalg.eigvalsh(hermitian(a))))
    if wmin < -tol * scale:
        raise InvalidArgumentError(f"{name} is not PSD (min eigenvalue {wmin:.3e})")
    return hermitian(a)


def solve_pd(a, b):
    """Solve ``a x = b`` for Hermitian PD ``a`` via Cholesky."""
    return linalg.cho_solve(linalg.cho_factor(hermitian(a), lower=True), b)
