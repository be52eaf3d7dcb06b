"""Bernstein and Mellin transforms built on the Jackson measure.

The Jackson measure ``d_q t = (1-q) sum_{k>=0} q^k delta_{q^k}`` has Bernstein
transform

    f_q(z) = (1-q) * (z + sum_{k>=1} q^k (1 - q^{kz}) / (1 - q^k)),

which is evaluated here for complex ``z`` with ``Re z > 0``.  All complex
powers are taken as ``q^w = exp(-w log(1/q))``.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .qkernel import DEFAULT_BUDGET, QParam, Truncated, TruncationBudget, _as_qparam, psi_q

__all__ = [
    "f_q",
    "f_q_via_psi",
    "mellin_nu_q",
    "h_q",
    "fourier_symbol",
    "real_part_bounds",
    "lambert_weights",
]

_ZCHUNK = 4096


def lambert_weights(qp: QParam, K: int) -> np.ndarray:
    """``q^k / (1 - q^k)`` for ``k = 1..K``."""
    k = np.arange(1, K + 1, dtype=float)
    return np.exp(-k * qp.L) / -np.expm1(-k * qp.L)


def _f_q_terms(qp: QParam, b: TruncationBudget, min_re: float) -> int:
    q, L = qp.q, qp.L
    # |1 - q^{kz}| <= 1 + q^{k Re z}; after the (1-q) prefactor the tail is
    # at most (1 + q^{(K+1)Re z}) q^{K+1} / (1-q)
    return b.cutoff(
        lambda K: (1.0 + math.exp(-(K + 1) * L * min_re)) * math.exp(-(K + 1) * L) / (1.0 - q),
        "f_q",
    )


def f_q(z, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET, with_bound: bool = False):
    """Bernstein transform of the Jackson measure.

    Parameters
    ----------
    z : complex or array_like
        Points with ``Re z > 0``.  Real input gives real output.
    qp : QParam
    b : TruncationBudget

    Returns
    -------
    complex, float or ndarray
        ``f_q(z)``; a :class:`Truncated` when ``with_bound`` is set.
    """
    qp = _as_qparam(qp)
    z_arr = np.asarray(z)
    real_input = np.isrealobj(z_arr)
    z_arr = z_arr.astype(float if real_input else complex)
    if z_arr.size and not np.all(np.isfinite(z_arr)):
        raise DomainError("f_q needs finite arguments")
    min_re = float(np.min(z_arr.real)) if z_arr.size else 1.0
    if not min_re > 0:
        raise DomainError(f"f_q needs Re z > 0, got min Re z = {min_re!r}")
    K = _f_q_terms(qp, b, min_re)
    w = lambert_weights(qp, K)
    kL = np.arange(1, K + 1, dtype=float) * qp.L

    flat = z_arr.reshape(-1)
    out = np.empty_like(flat)
    for a in range(0, flat.size, _ZCHUNK):
        zc = flat[a:a + _ZCHUNK]
        # 1 - q^{kz} via expm1 keeps small z free of cancellation
        s = (-np.expm1(-np.outer(zc, kL))) @ w
        out[a:a + _ZCHUNK] = (1.0 - qp.q) * (zc + s)
    out = out.reshape(z_arr.shape)
    value = out[()] if out.ndim == 0 else out
    if np.ndim(value) == 0:
        value = float(value) if real_input else complex(value)
    if with_bound:
        tail = (1.0 + math.exp(-(K + 1) * qp.L * min_re)) * math.exp(-(K + 1) * qp.L) / (1.0 - qp.q)
        return Truncated(value, tail, K)
    return value


def f_q_via_psi(z: float, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET) -> float:
    """``f_q`` for real ``z > 0`` through the q-digamma function.

    ``f_q(z) = (1-q) (z + (gamma_q + psi_q(z+1)) / log(1/q))``
    """
    qp = _as_qparam(qp)
    z = float(z)
    if not z > 0:
        raise DomainError(f"f_q_via_psi needs z > 0, got {z!r}")
    # psi_q errors are divided by L on the way out
    inner = TruncationBudget(b.tol * qp.L / 2, b.max_terms)
    gq = -psi_q(1.0, qp, inner)
    return (1.0 - qp.q) * (z + (gq + psi_q(z + 1.0, qp, inner)) / qp.L)


def mellin_nu_q(z, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET):
    """Mellin transform of nu_q, ``1 / f_q(z + 1)``, for ``Re z >= 0``.

    At a non-negative integer ``n`` this is the n-th moment ``1 / H_{n+1}^(q)``.
    """
    qp = _as_qparam(qp)
    z_arr = np.asarray(z)
    if z_arr.size and not np.min(z_arr.real) >= 0:
        raise DomainError("mellin_nu_q needs Re z >= 0")
    f = np.asarray(f_q(z_arr + 1, qp, b))
    if np.any(np.abs(f) < 1e-14):
        raise ZeroDivisionError("f_q(z+1) vanishes numerically; reciprocal undefined")
    out = 1.0 / f
    return out[()] if out.ndim == 0 else out


def _lattice_index(t: np.ndarray, L: float) -> np.ndarray:
    """``floor(t / L)`` robust to rounding at exact multiples ``n * L``."""
    n = np.floor(t / L).astype(np.int64)
    n = np.where((n + 1) * L <= t, n + 1, n)
    n = np.where(n * L > t, n - 1, n)
    return n


def h_q(t, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET):
    """Step kernel ``(1-q) sum_{k > t/L} q^k / (1 - q^k)`` for ``t >= 0``.

    On ``[nL, (n+1)L)`` the sum runs over ``k >= n+1`` (strict inequality, so
    the function is right-continuous).
    """
    qp = _as_qparam(qp)
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and not np.min(t_arr) >= 0:
        raise DomainError("h_q needs t >= 0")
    q, L = qp.q, qp.L
    n = _lattice_index(t_arr, L)
    n_max = int(np.max(n)) if n.size else 0
    # suffix beyond K: sum_{k>K} q^k/(1-q^k) <= q^{K+1}/((1-q)(1-q^{K+1}))
    K_tail = b.cutoff(lambda K: (1.0 - q) * math.exp(-(K + 1) * L)
                      / ((1.0 - q) * -math.expm1(-(K + 1) * L)), "h_q")
    K = max(n_max + 1, K_tail)
    w = lambert_weights(qp, K)
    suffix = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    out = (1.0 - q) * suffix[np.minimum(n, K)]
    return out[()] if out.ndim == 0 else out


def fourier_symbol(y, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET):
    """``f_q(1 + iy)`` on the line ``Re z = 1``."""
    y_arr = np.asarray(y, dtype=float)
    return f_q(1.0 + 1j * y_arr, qp, b)


def real_part_bounds(qp: QParam) -> tuple[float, float]:
    """Lower and upper bounds for ``Re f_q(1+iy)`` valid for every real y.

    The upper bound ``1 - q + sum_{k>=1} q^k (1 + q^k)`` is summed in closed
    form.
    """
    q = _as_qparam(qp).q
    return 1.0, 1.0 - q + q / (1.0 - q) + q * q / (1.0 - q * q)
