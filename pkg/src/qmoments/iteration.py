"""The sequence map ``T(x)_n = 1 / (1 + x_1 + ... + x_n)`` and its fixed point.

Sequences in ``K = [0, 1]^N`` are handled as finite prefixes ``(x_1..x_N)``.
Entry n of ``T(x)`` only depends on ``x_1..x_n``, so working on prefixes is
exact.  Normalized moment sequences carry the extra leading ``a_0 = 1`` and
are stored as 1-D float arrays ``(a_0, a_1, ..., a_N)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .qkernel import QParam, _as_qparam

__all__ = [
    "as_sequence_k",
    "check_moment_sequence",
    "apply_T",
    "fixed_point_m",
    "orbit_from_delta_q",
    "KDistance",
    "k_distance",
    "lipschitz_ratio",
    "hankel_minors",
]


def as_sequence_k(x) -> np.ndarray:
    """Validate a nonempty finite prefix with entries in [0, 1]."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("a sequence in K must be a nonempty 1-D array")
    if not np.all((x >= 0.0) & (x <= 1.0)):
        raise DomainError("sequence entries must lie in [0, 1]")
    return x


def check_moment_sequence(a, atol: float = 0.0) -> np.ndarray:
    """Validate ``(a_0..a_N)``: ``a_0 = 1``, positive, non-increasing."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0 or a[0] != 1.0:
        raise DomainError("a moment sequence must start with a_0 = 1")
    if not np.all(a > 0) or np.any(a > 1.0):
        raise DomainError("moments must lie in (0, 1]")
    if np.any(np.diff(a) > atol):
        raise DomainError("moments of a measure on [0, 1] are non-increasing")
    return a


def apply_T(x) -> np.ndarray:
    """Apply ``T`` to a prefix ``(x_1..x_N)``; the result has the same length."""
    x = as_sequence_k(x)
    return 1.0 / (1.0 + np.cumsum(x))


def fixed_point_m(N: int) -> np.ndarray:
    """The fixed point ``(m_0 = 1, m_1, ..., m_N)`` of ``T``.

    ``m_n`` is the positive root of ``m^2 + S m - 1 = 0`` with
    ``S = 1 + m_1 + ... + m_{n-1} = 1 / m_{n-1}``, taken in the
    cancellation-free form ``2 / (S + sqrt(S^2 + 4))``.
    """
    N = int(N)
    if N < 1:
        raise DomainError(f"fixed_point_m needs N >= 1, got {N}")
    m = np.empty(N + 1)
    m[0] = 1.0
    S = 1.0
    for n in range(1, N + 1):
        mn = 2.0 / (S + math.sqrt(S * S + 4.0))
        m[n] = mn
        S += mn
    return m


def orbit_from_delta_q(qp: QParam, steps: int, N: int) -> np.ndarray:
    """Moments ``(a_0..a_N)`` after ``steps`` applications of T to ``a_n = q^n``.

    One step gives the Jackson moments ``(1-q)/(1-q^{n+1})``; two steps give
    ``1 / H_{n+1}^(q)``.
    """
    qp = _as_qparam(qp)
    steps, N = int(steps), int(N)
    if steps < 0:
        raise DomainError("steps must be non-negative")
    if N < 1:
        raise DomainError("N must be positive")
    x = np.exp(-np.arange(1, N + 1) * qp.L)
    for _ in range(steps):
        x = apply_T(x)
    return np.concatenate([[1.0], x])


class KDistance(NamedTuple):
    """Truncated weighted distance and the bound ``2^-N`` on the omitted tail."""

    value: float
    tail_bound: float


def k_distance(x, y) -> KDistance:
    """``d(x, y) = sum_n 2^-n |x_n - y_n|`` over a common prefix of length N."""
    x, y = as_sequence_k(x), as_sequence_k(y)
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    w = np.ldexp(1.0, -np.arange(1, x.size + 1))
    return KDistance(math.fsum(w * np.abs(x - y)), math.ldexp(1.0, -x.size))


def lipschitz_ratio(x, y) -> float:
    """Empirical ratio ``d(Tx, Ty) / d(x, y)``; ``nan`` when ``x == y``."""
    d0 = k_distance(x, y).value
    if d0 == 0.0:
        return float("nan")
    return k_distance(apply_T(x), apply_T(y)).value / d0


def hankel_minors(a, order: int = 6) -> np.ndarray:
    """Determinants of the Hankel matrices ``(a_{i+j})_{i,j<r}``, r = 1..order.

    A Hausdorff moment sequence has all of them non-negative.  Intended as a
    low-order diagnostic: deep minors are badly conditioned.
    """
    a = np.asarray(a, dtype=float)
    if a.size < 2 * order - 1:
        raise DomainError(f"need at least {2 * order - 1} moments for order {order}")
    out = np.empty(order)
    for r in range(1, order + 1):
        H = np.array([[a[i + j] for j in range(r)] for i in range(r)])
        out[r - 1] = np.linalg.det(H)
    return out
