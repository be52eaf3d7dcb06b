"""Scalar q-series primitives with certified truncation.

Every infinite series here is cut at the smallest index whose rigorous tail
bound is below the requested absolute tolerance.  The bound is reported
alongside the value when ``with_bound=True`` is passed.  Floating-point
rounding is not part of the bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import BudgetExceededError, DomainError

__all__ = [
    "EULER_GAMMA",
    "Q_MIN",
    "Q_MAX",
    "QParam",
    "TruncationBudget",
    "Truncated",
    "log_pochhammer_inf",
    "c_q",
    "gamma_q",
    "psi_q",
    "euler_gamma_q",
    "q_harmonic",
    "harmonic",
    "digamma_int",
    "divisor_counts",
]

EULER_GAMMA = 0.57721566490153286061

Q_MIN = 1e-8
Q_MAX = 1.0 - 1e-6

_CHUNK = 1 << 20


class Truncated(NamedTuple):
    """A truncated series value with its certified tail bound."""

    value: float
    bound: float
    terms: int


@dataclass(frozen=True)
class TruncationBudget:
    """Absolute tolerance and hard term cap for a truncated series."""

    tol: float = 1e-13
    max_terms: int = 10**6

    def __post_init__(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise DomainError(f"tol must be positive and finite, got {self.tol!r}")
        if int(self.max_terms) < 1:
            raise DomainError(f"max_terms must be positive, got {self.max_terms!r}")

    def cutoff(self, tail: Callable[[int], float], what: str = "series") -> int:
        """Smallest ``K >= 0`` with ``tail(K) <= tol``.

        ``tail`` must be non-increasing.  Raises BudgetExceededError when the
        answer would exceed ``max_terms``.
        """
        if tail(0) <= self.tol:
            return 0
        if tail(self.max_terms) > self.tol:
            raise BudgetExceededError(
                f"{what}: tail bound {tail(self.max_terms):.3g} still above "
                f"tol={self.tol:.3g} after max_terms={self.max_terms}"
            )
        lo, hi = 0, 1
        while tail(hi) > self.tol:
            lo, hi = hi, min(2 * hi, self.max_terms)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if tail(mid) <= self.tol:
                hi = mid
            else:
                lo = mid
        return hi


DEFAULT_BUDGET = TruncationBudget()


def _one_minus_qpow(x, L):
    # 1 - q**x without cancellation for small x*L
    return -np.expm1(-np.asarray(x, dtype=float) * L)


def _chunked_sum(term: Callable[[np.ndarray], np.ndarray], start: int, stop: int) -> float:
    """Sum ``term(k)`` for integer k in [start, stop) in fixed-size chunks."""
    parts = []
    for a in range(start, stop, _CHUNK):
        k = np.arange(a, min(a + _CHUNK, stop), dtype=float)
        parts.append(float(np.sum(term(k))))
    return math.fsum(parts)


@dataclass(frozen=True)
class QParam:
    """Validated deformation parameter ``0 < q < 1`` with cached constants.

    Attributes
    ----------
    q : float
        The base, restricted to ``[Q_MIN, Q_MAX]``.
    L : float
        ``log(1/q)``, the lattice step of every measure built from ``q``.
    c_q : float
        Lambert series ``sum_{k>=1} q^k / (1 - q^k)``.
    gamma_q : float
        The q-Euler constant ``-psi_q(1) = log(1-q) + L * c_q``.
    """

    q: float
    L: float = field(init=False, repr=False)
    c_q: float = field(init=False, repr=False)
    gamma_q: float = field(init=False, repr=False)

    def __post_init__(self):
        q = self.q
        try:
            q = float(q)
        except (TypeError, ValueError):
            raise DomainError(f"q must be a real number, got {self.q!r}") from None
        if not math.isfinite(q) or not (0.0 < q < 1.0):
            raise DomainError(f"q must lie in the open interval (0, 1), got {q!r}")
        if not (Q_MIN <= q <= Q_MAX):
            raise DomainError(f"q={q!r} outside the supported band [{Q_MIN}, {Q_MAX}]")
        object.__setattr__(self, "q", q)
        L = -math.log(q)
        object.__setattr__(self, "L", L)
        cq = c_q(self, self.constants_budget())
        object.__setattr__(self, "c_q", cq)
        object.__setattr__(self, "gamma_q", math.log1p(-q) + L * cq)

    def constants_budget(self) -> TruncationBudget:
        """Budget used for the cached constants; the term cap grows as q -> 1."""
        cap = max(DEFAULT_BUDGET.max_terms, int(80.0 / (1.0 - self.q)))
        return TruncationBudget(DEFAULT_BUDGET.tol, cap)

    @property
    def mu_mass(self) -> float:
        """Total mass ``c_q - q/(1-q)`` of the atomic driver measure."""
        return self.c_q - self.q / (1.0 - self.q)


def _as_qparam(qp) -> QParam:
    return qp if isinstance(qp, QParam) else QParam(qp)


def log_pochhammer_inf(a: float, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET,
                       with_bound: bool = False):
    """``log (a; q)_inf = sum_{k>=0} log(1 - a q^k)`` for ``0 <= a < 1``.

    The tail after K factors is bounded by ``a q^K / ((1-q)(1-a))``.
    """
    qp = _as_qparam(qp)
    a = float(a)
    if not (0.0 <= a < 1.0):
        raise DomainError(f"log_pochhammer_inf needs 0 <= a < 1, got a={a!r}")
    if a == 0.0:
        out = Truncated(0.0, 0.0, 0)
        return out if with_bound else out.value
    q, L = qp.q, qp.L

    def tail(K):
        return a * math.exp(-K * L) / ((1.0 - q) * (1.0 - a))

    K = b.cutoff(tail, "log_pochhammer_inf")
    value = _chunked_sum(lambda k: np.log1p(-a * np.exp(-k * L)), 0, K)
    out = Truncated(value, tail(K), K)
    return out if with_bound else out.value


def divisor_counts(n_max: int) -> np.ndarray:
    """``d(n)`` for ``n = 0..n_max`` (``d(0)`` set to 0), by a divisor sieve."""
    d = np.zeros(n_max + 1, dtype=np.int64)
    for i in range(1, n_max + 1):
        d[i::i] += 1
    return d


def _c_q_lambert(qp, b):
    q, L = qp.q, qp.L

    # sum_{k>K} q^k/(1-q^k) <= q^{K+1} / ((1-q)(1-q^{K+1}))
    def tail(K):
        qk = math.exp(-(K + 1) * L)
        return qk / ((1.0 - q) * -math.expm1(-(K + 1) * L))

    K = b.cutoff(tail, "c_q (Lambert series)")
    value = _chunked_sum(lambda k: np.exp(-k * L) / _one_minus_qpow(k, L), 1, K + 1)
    return Truncated(value, tail(K), K)


def _c_q_divisor(qp, b):
    q, L = qp.q, qp.L

    # d(n) <= n, and sum_{n>N} n q^n = q^{N+1} ((N+1)(1-q) + q) / (1-q)^2
    def tail(N):
        return math.exp(-(N + 1) * L) * ((N + 1) * (1.0 - q) + q) / (1.0 - q) ** 2

    N = b.cutoff(tail, "c_q (divisor sum)")
    n = np.arange(N + 1, dtype=float)
    d = divisor_counts(N).astype(float)
    value = math.fsum(d[1:] * np.exp(-n[1:] * L))
    return Truncated(value, tail(N), N)


def _c_q_pochhammer(qp, b):
    q, L = qp.q, qp.L

    # 1 - (q^n; q)_inf <= q^n/(1-q): outer tail <= q^{N+1}/(1-q)^2, spend tol/2
    half = TruncationBudget(b.tol / 2, b.max_terms)
    N = half.cutoff(lambda N: math.exp(-(N + 1) * L) / (1.0 - q) ** 2, "c_q (Pochhammer sum)")
    if N == 0:
        return Truncated(0.0, math.exp(-L) / (1.0 - q) ** 2, 0)
    # each product truncated so its log error is below tol / (2N)
    per = TruncationBudget(b.tol / (2 * N), b.max_terms)
    Kp = per.cutoff(lambda K: math.exp(-(K + 1) * L) / (1.0 - q) ** 2, "c_q (Pochhammer product)")
    Kp = max(Kp, N)
    k = np.arange(1, Kp + 1, dtype=float)
    logs = np.log1p(-np.exp(-k * L))
    # log (q^n; q)_inf truncated at Kp, for n = 1..N
    tails = np.cumsum(logs[::-1])[::-1][:N]
    value = math.fsum(-np.expm1(tails))
    bound = math.exp(-(N + 1) * L) / (1.0 - q) ** 2 + b.tol / 2
    return Truncated(value, bound, N)


_C_Q_METHODS = {
    "lambert": _c_q_lambert,
    "divisor": _c_q_divisor,
    "pochhammer": _c_q_pochhammer,
}


def c_q(qp, b: TruncationBudget = DEFAULT_BUDGET, method: str = "lambert",
        with_bound: bool = False):
    """The Lambert series ``c_q = sum_{k>=1} q^k / (1 - q^k)``.

    Three independent routes are available:

    ``"lambert"``
        the defining series;
    ``"divisor"``
        ``sum_n d(n) q^n`` with ``d`` the divisor-counting function;
    ``"pochhammer"``
        ``sum_n (1 - (q^n; q)_inf)``.
    """
    try:
        impl = _C_Q_METHODS[method]
    except KeyError:
        raise DomainError(f"unknown c_q method {method!r}; choose from {sorted(_C_Q_METHODS)}") from None
    out = impl(_as_qparam(qp), b)
    return out if with_bound else out.value


def gamma_q(z: float, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET,
            with_bound: bool = False):
    """Jackson's q-Gamma function for real ``z > 0``."""
    qp = _as_qparam(qp)
    z = float(z)
    if not (z > 0 and math.isfinite(z)):
        raise DomainError(f"gamma_q is implemented for real z > 0 only, got z={z!r}")
    half = TruncationBudget(b.tol / 2, b.max_terms)
    num = log_pochhammer_inf(qp.q, qp, half, with_bound=True)
    den = log_pochhammer_inf(math.exp(-z * qp.L), qp, half, with_bound=True)
    log_value = num.value - den.value + (1.0 - z) * math.log1p(-qp.q)
    value = math.exp(log_value)
    # log error below num.bound + den.bound
    bound = value * math.expm1(num.bound + den.bound)
    out = Truncated(value, bound, max(num.terms, den.terms))
    return out if with_bound else out.value


def psi_q(z: float, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET,
          with_bound: bool = False):
    """q-digamma function, the logarithmic derivative of ``gamma_q``.

    ``psi_q(z) = -log(1-q) + log(q) * sum_{k>=0} q^{k+z} / (1 - q^{k+z})``
    """
    qp = _as_qparam(qp)
    z = float(z)
    if not (z > 0 and math.isfinite(z)):
        raise DomainError(f"psi_q is implemented for real z > 0 only, got z={z!r}")
    q, L = qp.q, qp.L
    one_minus_qz = -math.expm1(-z * L)

    def tail(K):
        return L * math.exp(-(K + z) * L) / ((1.0 - q) * one_minus_qz)

    K = b.cutoff(tail, "psi_q")
    s = _chunked_sum(lambda k: np.exp(-(k + z) * L) / _one_minus_qpow(k + z, L), 0, K)
    out = Truncated(-math.log1p(-q) - L * s, tail(K), K)
    return out if with_bound else out.value


def euler_gamma_q(qp: QParam, b: TruncationBudget = DEFAULT_BUDGET, with_bound: bool = False):
    """The q-analogue of Euler's constant, ``-psi_q(1)``."""
    out = psi_q(1.0, qp, b, with_bound=True)
    out = Truncated(-out.value, out.bound, out.terms)
    return out if with_bound else out.value


def q_harmonic(n: int, qp: QParam) -> float:
    """``H_n^(q) = sum_{k=1}^n (1-q)/(1-q^k)``; tends to ``H_n`` as q -> 1."""
    qp = _as_qparam(qp)
    n = int(n)
    if n < 1:
        raise DomainError(f"q_harmonic needs n >= 1, got {n}")
    k = np.arange(1, n + 1, dtype=float)
    return math.fsum((1.0 - qp.q) / _one_minus_qpow(k, qp.L))


def harmonic(n: int) -> float:
    """Classical harmonic number ``H_n``."""
    return math.fsum(1.0 / k for k in range(1, int(n) + 1))


def digamma_int(n: int) -> float:
    """Classical digamma at a positive integer, ``psi(n) = -gamma + H_{n-1}``."""
    if int(n) < 1:
        raise DomainError(f"digamma_int needs a positive integer, got {n!r}")
    return -EULER_GAMMA + harmonic(int(n) - 1)
