"""Exact piecewise evaluation of the density tau_q.

``(1-q) tau_q`` is the sum over ``n`` of ``rho^{*(n+1)} * mu^{*n}``, where
``rho(x) = exp(-(1+c_q) x)`` on ``x >= 0`` and ``mu`` is the atomic measure with
mass ``q^{2k} / (1 - q^k)`` at ``kL``.  Both ``mu^{*k}`` and the Gamma
densities ``rho^{*(k+1)}`` are explicit, so on ``[nL, (n+1)L)``

    (1-q) tau_q(x) = sum_{j<=n} sum_{k<=j} exp(-c u_j) u_j^k / k! * M[k][j],
    u_j = x - jL,  c = 1 + c_q,  M[k][j] = mu^{*k}({jL}).

``M`` grows like ``||mu||^k`` and overflows for q near 1 well before the
table depth needed for a Laplace check.  The table therefore stores
``R[k][j] = M[k][j] / m^k`` (a probability table, m the mass of the atoms in
use) and each term is evaluated as

    exp(-(c - m) u) * PoissonPmf(k; m u) * R[k][j],

where every factor is at most one.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import DomainError, OutOfTableError
from .qkernel import DEFAULT_BUDGET, QParam, TruncationBudget, _as_qparam
from .transforms import _lattice_index

__all__ = [
    "AtomicMeasure",
    "ConvPowerTable",
    "PiecewiseExpPolyDensity",
    "build_mu",
    "conv_power_table",
    "tau_scaled",
    "tau_density",
    "nu_density_haar",
    "series_terms",
    "jump",
    "jump_haar",
    "density_for_window",
]


def _mu_weights(q: float, L: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return np.exp(-2.0 * k * L) / -np.expm1(-k * L)


@dataclass(frozen=True)
class AtomicMeasure:
    """Atoms ``w_k = q^{2k}/(1-q^k)`` at ``k * lattice_step``, ``k = 1..K``.

    ``tail_bound`` bounds the mass of the omitted atoms ``k > K``.
    """

    q: float
    lattice_step: float
    weights: np.ndarray
    tail_bound: float

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def weights_upto(self, J: int) -> np.ndarray:
        """Exact weights ``w_1..w_J``, extending past the stored atoms if needed."""
        if J <= self.weights.size:
            return self.weights[:J]
        return _mu_weights(self.q, self.lattice_step, J)


def build_mu(qp: QParam, b: TruncationBudget = DEFAULT_BUDGET) -> AtomicMeasure:
    """The atomic measure, truncated once its omitted mass is below ``b.tol``."""
    qp = _as_qparam(qp)
    q, L = qp.q, qp.L
    # sum_{k>K} q^{2k}/(1-q^k) <= q^{2(K+1)} / ((1-q)(1-q^2))
    tail = lambda K: math.exp(-2.0 * (K + 1) * L) / ((1.0 - q) * (1.0 - q * q))  # noqa: E731
    K = max(b.cutoff(tail, "atomic measure"), 1)
    w = _mu_weights(q, L, K)
    w.flags.writeable = False
    return AtomicMeasure(q, L, w, tail(K))


@dataclass(frozen=True)
class ConvPowerTable:
    """Convolution powers ``M[k][j] = mu^{*k}({jL})`` for ``0 <= k <= j <= J_max``.

    Stored normalized: ``R[k][j] = M[k][j] / mass**k``.
    """

    q: float
    lattice_step: float
    J_max: int
    mass: float
    R: np.ndarray

    def M(self, k: int, j: int) -> float:
        """Unnormalized entry ``mu^{*k}({jL})``; may overflow for large k."""
        if not (0 <= k <= self.J_max and 0 <= j <= self.J_max):
            raise OutOfTableError(f"({k}, {j}) outside table of depth {self.J_max}")
        r = self.R[k, j]
        if r == 0.0:
            return 0.0
        return math.exp(k * math.log(self.mass) + math.log(r))

    def log_M(self, k: int, j: int) -> float:
        r = self.R[k, j]
        return k * math.log(self.mass) + math.log(r) if r > 0 else -math.inf


def conv_power_table(mu: AtomicMeasure, J_max: int) -> ConvPowerTable:
    """Build the table by ``M[k][j] = sum_p w_p M[k-1][j-p]``.

    The weights used are exact up to ``p = J_max``, so every entry is exact
    (no dependence on the truncation of ``mu``).
    """
    J = int(J_max)
    if J < 1:
        raise DomainError(f"J_max must be positive, got {J_max!r}")
    w = mu.weights_upto(J)
    m = math.fsum(w)
    wn = np.concatenate([[0.0], w / m])
    R = np.zeros((J + 1, J + 1))
    R[0, 0] = 1.0
    for k in range(1, J + 1):
        # row k-1 lives on j >= k-1; row k on j >= k
        prev = R[k - 1, k - 1:]
        R[k, k - 1:] = np.convolve(prev, wn)[: J - k + 2]
        R[k, k - 1] = 0.0
    R.flags.writeable = False
    return ConvPowerTable(mu.q, mu.lattice_step, J, m, R)


def _check_table(qp: QParam, table: ConvPowerTable):
    if table.q != qp.q:
        raise DomainError(f"table built for q={table.q}, evaluated with q={qp.q}")


def _piece_terms(xs: np.ndarray, n: int, qp: QParam, table: ConvPowerTable) -> np.ndarray:
    """Terms ``[point, j, k]`` of the piece-n expression, as a dense array."""
    L = qp.L
    c = 1.0 + qp.c_q
    m = table.mass
    j = np.arange(n + 1)
    u = xs[:, None] - j[None, :] * L
    active = u >= 0.0
    u = np.where(active, u, 0.0)
    k = np.arange(n + 1)
    mu_ = m * u[:, :, None]
    expo = -c * u[:, :, None] + xlogy(k[None, None, :], mu_) - gammaln(k + 1.0)[None, None, :]
    R = table.R[: n + 1, : n + 1].T  # [j, k]
    vals = np.exp(expo) * R[None, :, :]
    return np.where(active[:, :, None], vals, 0.0)


def tau_scaled(x, qp: QParam, table: ConvPowerTable, piece=None):
    """``(1-q) tau_q(x)`` for ``x >= 0``.

    ``piece`` forces the closed form of a given piece; by default the piece
    owning ``x`` is used (piece n owns ``[nL, (n+1)L)``).  Forcing piece
    ``n-1`` at ``x = nL`` gives the left limit there.
    """
    qp = _as_qparam(qp)
    _check_table(qp, table)
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.reshape(-1)
    if flat.size and not (np.all(np.isfinite(flat)) and np.min(flat) >= 0):
        raise DomainError("tau_q is evaluated on x >= 0 only")
    if piece is None:
        pieces = _lattice_index(flat, qp.L)
    else:
        pieces = np.broadcast_to(np.asarray(piece, dtype=np.int64), flat.shape)
        if np.any(pieces < 0):
            raise DomainError("piece index must be non-negative")
    if flat.size and int(np.max(pieces)) > table.J_max:
        raise OutOfTableError(
            f"x up to {float(np.max(flat)):.6g} needs table depth {int(np.max(pieces))}, "
            f"have {table.J_max}"
        )
    out = np.zeros_like(flat)
    # bound the dense [point, j, k] block to a few million entries
    for n in np.unique(pieces):
        idx = np.nonzero(pieces == n)[0]
        chunk = max(1, 4_000_000 // ((n + 1) * (n + 1)))
        for a in range(0, idx.size, chunk):
            sel = idx[a:a + chunk]
            out[sel] = _piece_terms(flat[sel], int(n), qp, table).sum(axis=(1, 2))
    out = out.reshape(x_arr.shape)
    return out[()] if out.ndim == 0 else out


def tau_density(x, qp: QParam, table: ConvPowerTable, piece=None):
    """The density ``tau_q(x)``; see :func:`tau_scaled`."""
    qp = _as_qparam(qp)
    return tau_scaled(x, qp, table, piece) / (1.0 - qp.q)


def series_terms(x: float, qp: QParam, table: ConvPowerTable) -> np.ndarray:
    """Contribution of each convolution power ``k`` to ``(1-q) tau_q(x)``.

    Entry k is ``(rho^{*(k+1)} * mu^{*k})(x)``; terms beyond the piece index
    vanish identically.
    """
    qp = _as_qparam(qp)
    _check_table(qp, table)
    x = float(x)
    n = int(_lattice_index(np.array([x]), qp.L)[0])
    if n > table.J_max:
        raise OutOfTableError(f"x={x} beyond table depth {table.J_max}")
    return _piece_terms(np.array([x]), n, qp, table)[0].sum(axis=0)


def nu_density_haar(t, qp: QParam, table: ConvPowerTable):
    """Density of nu_q with respect to ``dt/t`` on ``(0, 1]``: ``tau_q(log(1/t))``."""
    qp = _as_qparam(qp)
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and not (np.all(t_arr > 0) and np.all(t_arr <= 1)):
        raise DomainError("nu_density_haar needs 0 < t <= 1")
    return tau_density(-np.log(t_arr), qp, table)


def jump(n: int, qp: QParam) -> float:
    """Jump ``tau_q'(nL+) - tau_q'(nL-) = q^{2n} / ((1-q^n)(1-q))``."""
    qp = _as_qparam(qp)
    n = int(n)
    if n < 1:
        raise DomainError(f"jump is defined for n >= 1, got {n}")
    return math.exp(-2 * n * qp.L) / (-math.expm1(-n * qp.L) * (1.0 - qp.q))


def jump_haar(n: int, qp: QParam) -> float:
    """Size of the derivative jump of the dt/t-density of nu_q at ``t = q^n``.

    Since ``t = exp(-x)``, ``d/dt = -(1/t) d/dx``; at ``t = q^n`` the x-jump is
    divided by ``q^n``, giving ``q^n / ((1-q^n)(1-q))``.  The sign flips with
    the orientation of the change of variable.
    """
    qp = _as_qparam(qp)
    return jump(n, qp) * math.exp(int(n) * qp.L)


class PiecewiseExpPolyDensity:
    """``(1-q) tau_q`` on ``[0, (J_max+1) L)`` as a callable.

    On ``[nL, (n+1)L)`` the value is ``sum_{j<=n} exp(-c (x-jL)) P_j(x-jL)``
    with ``P_j(u) = sum_{k<=j} u^k / k! * M[k][j]`` and ``c = 1 + c_q``.
    """

    def __init__(self, qp: QParam, table: ConvPowerTable):
        self.qp = _as_qparam(qp)
        _check_table(self.qp, table)
        self.table = table

    @property
    def rate(self) -> float:
        return 1.0 + self.qp.c_q

    @property
    def x_limit(self) -> float:
        return (self.table.J_max + 1) * self.qp.L

    def polynomial(self, j: int) -> np.ndarray:
        """Coefficients of ``P_j`` in increasing powers of u (small j only)."""
        k = np.arange(j + 1)
        return np.array([self.table.M(int(kk), j) for kk in k]) / np.exp(gammaln(k + 1.0))

    def __call__(self, x, piece=None):
        return tau_scaled(x, self.qp, self.table, piece)

    def tau(self, x, piece=None):
        return tau_density(x, self.qp, self.table, piece)


@functools.lru_cache(maxsize=32)
def _cached_window(q: float, J: int, tol: float, max_terms: int):
    qp = QParam(q)
    mu = build_mu(qp, TruncationBudget(tol, max_terms))
    return PiecewiseExpPolyDensity(qp, conv_power_table(mu, J))


def density_for_window(qp: QParam, x_max: float, b: TruncationBudget = DEFAULT_BUDGET
                       ) -> PiecewiseExpPolyDensity:
    """Density object whose table covers ``[0, x_max]``; cached per window.

    Depth is ``ceil(x_max / L) + 1``.
    """
    qp = _as_qparam(qp)
    J = max(1, int(math.ceil(x_max / qp.L)) + 1)
    return _cached_window(qp.q, J, b.tol, b.max_terms)
