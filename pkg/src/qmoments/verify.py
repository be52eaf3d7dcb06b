"""Independent numerical oracles for the closed forms.

None of these routines reuses the series that they check:

* :func:`laplace_by_quadrature` integrates the constructed density with
  per-piece Gauss-Legendre rules and is compared against ``1/f_q(z+1)``;
* :func:`fourier_inversion_oracle` rebuilds ``tau_q`` from ``f_q(1+iy)``
  alone;
* :func:`one_sided_derivative` differentiates the density numerically;
* :func:`compositions_bruteforce` enumerates compositions for the
  convolution-power table;
* :func:`h_q_laplace` integrates the step kernel ``h_q`` exactly.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .density import (
    ConvPowerTable,
    _mu_weights,
    density_for_window,
    tau_density,
)
from .errors import DomainError, OutOfTableError
from .qkernel import DEFAULT_BUDGET, QParam, TruncationBudget, _as_qparam
from .transforms import _lattice_index, f_q, h_q, real_part_bounds

__all__ = [
    "QuadratureResult",
    "laplace_by_quadrature",
    "default_laplace_window",
    "fourier_inversion_oracle",
    "one_sided_derivative",
    "compositions_bruteforce",
    "h_q_laplace",
]


@dataclass(frozen=True)
class QuadratureResult:
    """Quadrature value with its error estimate and tail bound.

    Fields are floats for scalar input and arrays for array input.
    """

    value: object
    error_estimate: object
    pieces_used: int
    tail_bound: object

    @property
    def total_error(self):
        return np.asarray(self.error_estimate) + np.asarray(self.tail_bound)


def _scalarize(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def default_laplace_window(qp: QParam) -> float:
    """``x_max`` for the Laplace oracle: whole pieces, at least 25 of them,
    reaching ``x = 30`` where the ``e^{-x}`` decay of tau_q is below 1e-13."""
    qp = _as_qparam(qp)
    return max(25, math.ceil(30.0 / qp.L)) * qp.L


def laplace_by_quadrature(z, qp: QParam, table: ConvPowerTable | None = None,
                          x_max: float | None = None, order: int = 30) -> QuadratureResult:
    """``int_0^{x_max} e^{-zx} tau_q(x) dx`` by Gauss-Legendre on every piece.

    The density is smooth inside ``[nL, (n+1)L]``, so a fixed rule per piece
    converges spectrally.  ``error_estimate`` compares rules of order
    ``order`` and ``order - 10``.  ``tail_bound`` is the envelope estimate
    ``sup_{last piece} tau_q * e^{-z x_max} / (1 + z)`` for the omitted
    ``[x_max, inf)``, using the ``e^{-x}`` asymptotic decay of tau_q.
    """
    qp = _as_qparam(qp)
    z_arr = np.asarray(z, dtype=float)
    if z_arr.size and not np.min(z_arr) >= 0:
        raise DomainError("laplace_by_quadrature needs z >= 0")
    if order < 20:
        raise DomainError("use a Gauss-Legendre order of at least 20")
    if x_max is None:
        x_max = default_laplace_window(qp)
    n_pieces = int(round(x_max / qp.L))
    if n_pieces < 1:
        raise DomainError("x_max must cover at least one piece")
    if table is None:
        table = density_for_window(qp, n_pieces * qp.L).table
    if n_pieces - 1 > table.J_max:
        raise OutOfTableError(f"{n_pieces} pieces requested, table depth {table.J_max}")
    L = qp.L
    zs = z_arr.reshape(-1)
    results = []
    for p in (order, order - 10):
        t, w = leggauss(p)
        left = np.arange(n_pieces)[:, None] * L
        nodes = left + (t[None, :] + 1.0) * (L / 2)
        pieces = np.broadcast_to(np.arange(n_pieces)[:, None], nodes.shape)
        tau = tau_density(nodes.ravel(), qp, table, piece=pieces.ravel()).reshape(nodes.shape)
        if not np.all(np.isfinite(tau)):
            raise FloatingPointError("non-finite density value inside the window")
        weighted = tau * (w * (L / 2))[None, :]
        per_z = [math.fsum((weighted * np.exp(-zz * nodes)).sum(axis=1)) for zz in zs]
        results.append((np.array(per_z), tau[-1].max()))
    (hi, tau_last), (lo, _) = results
    X = n_pieces * L
    tail = tau_last * np.exp(-zs * X) / (1.0 + zs)
    shape = z_arr.shape
    return QuadratureResult(
        value=_scalarize(hi.reshape(shape)),
        error_estimate=_scalarize(np.abs(hi - lo).reshape(shape)),
        pieces_used=n_pieces,
        tail_bound=_scalarize(tail.reshape(shape)),
    )


def _near_lattice(x: np.ndarray, L: float, eps: float = 1e-6) -> np.ndarray:
    r = x / L
    return np.abs(r - np.round(r)) * L < eps


def fourier_inversion_oracle(x, qp: QParam, y_max: float = 1e5,
                             b: TruncationBudget = TruncationBudget(1e-12),
                             order: int = 16) -> QuadratureResult:
    """Rebuild ``tau_q(x)`` from the symbol ``f_q(1+iy)``.

    The even extension of tau_q is the Fourier transform of
    ``2 Re f_q(1+iy) / |f_q(1+iy)|^2``, so

        tau_q(x) = (1/pi) int_0^Y cos(xy) 2 Re f / |f|^2 dy  + tail.

    ``f_q(1+iy) - (1-q)(1+iy)`` has period ``2 pi / L`` in y; it is evaluated
    on the Gauss nodes of one period and reused on every other period, so
    ``Y`` is ``y_max`` rounded up to whole periods.  The tail bound uses
    ``|Im f| >= (1-q)(y - ||mu||)`` and ignores the oscillation of the cosine.
    """
    qp = _as_qparam(qp)
    x_arr = np.asarray(x, dtype=float)
    xs = x_arr.reshape(-1)
    if xs.size and not np.min(xs) >= 0:
        raise DomainError("fourier_inversion_oracle needs x >= 0")
    if np.any(_near_lattice(xs[xs > 0], qp.L)):
        warnings.warn("x lies within 1e-6 of a lattice point; inversion converges slowly there",
                      RuntimeWarning, stacklevel=2)
    q, L = qp.q, qp.L
    period = 2 * math.pi / L
    x_top = float(np.max(xs)) if xs.size else 0.0
    h = min(0.5, 1.5 / x_top) if x_top > 0 else 0.5
    m = max(1, math.ceil(period / h))
    t, w = leggauss(order)
    edges = np.arange(m)[:, None] * (period / m)
    y_loc = (edges + (t[None, :] + 1.0) * (period / m / 2)).ravel()
    w_loc = np.tile(w * (period / m / 2), m)
    periodic = f_q(1.0 + 1j * y_loc, qp, b) - (1.0 - q) * (1.0 + 1j * y_loc)

    n_periods = max(1, math.ceil(y_max / period))
    Y = n_periods * period
    shifts = np.arange(n_periods)[:, None] * period
    y = shifts + y_loc[None, :]
    f = periodic[None, :] + (1.0 - q) * (1.0 + 1j * y)
    g = (2.0 * f.real / (f.real ** 2 + f.imag ** 2)) * w_loc[None, :]
    g = g.ravel()
    y = y.ravel()
    vals = np.array([math.fsum(np.cos(xx * y) * g) for xx in xs]) / math.pi

    _, re_max = real_part_bounds(qp)
    mass = qp.mu_mass
    if Y > mass:
        tail = 2.0 * re_max / ((1.0 - q) ** 2 * (Y - mass) * math.pi)
    else:
        tail = math.inf
    shape = x_arr.shape
    return QuadratureResult(
        value=_scalarize(vals.reshape(shape)),
        error_estimate=_scalarize(np.zeros(shape)),
        pieces_used=n_periods * m,
        tail_bound=tail,
    )


def one_sided_derivative(x0: float, side: str, qp: QParam, table: ConvPowerTable,
                         h: float | None = None, levels: int = 4) -> float:
    """Richardson-extrapolated one-sided derivative of ``tau_q`` at ``x0``.

    Difference quotients with steps ``h, h/2, ..., h/2^(levels-1)`` stay on the
    chosen side; at a lattice point the left side uses the closed form of the
    piece to the left, so the kink is never straddled.
    """
    qp = _as_qparam(qp)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    x0 = float(x0)
    L = qp.L
    if h is None:
        h = L / 64
    if side == "left" and x0 - h <= 0:
        raise DomainError("left step would cross x = 0")
    if h < 1e-300 or h / 2 ** (levels - 1) < 1e-12 * max(1.0, x0):
        raise FloatingPointError("difference step underflows")
    r = round(x0 / L)
    on_lattice = abs(x0 - r * L) <= 1e-12 * max(1.0, x0) and r >= 1
    if side == "right":
        piece = r if on_lattice else int(_lattice_index(np.array([x0]), L)[0])
        sign = 1.0
    else:
        piece = r - 1 if on_lattice else int(_lattice_index(np.array([x0]), L)[0])
        sign = -1.0
    steps = h / 2.0 ** np.arange(levels)
    pts = np.concatenate([[x0], x0 + sign * steps])
    vals = tau_density(pts, qp, table, piece=piece)
    D = sign * (vals[1:] - vals[0]) / steps
    # Richardson on an expansion in integer powers of the step
    for lev in range(1, levels):
        D = (2.0 ** lev * D[1:] - D[:-1]) / (2.0 ** lev - 1.0)
    return float(D[0])


def compositions_bruteforce(k: int, j: int, qp: QParam) -> float:
    """``mu^{*k}({jL})`` by enumerating every composition of j into k parts."""
    qp = _as_qparam(qp)
    k, j = int(k), int(j)
    if k < 1 or j < k:
        raise DomainError(f"need 1 <= k <= j, got k={k}, j={j}")
    if j > 14:
        raise DomainError(f"enumeration limited to j <= 14, got j={j}")
    w = _mu_weights(qp.q, qp.L, j)
    total = []
    for cuts in itertools.combinations(range(1, j), k - 1):
        bounds = (0,) + cuts + (j,)
        parts = [bounds[i + 1] - bounds[i] for i in range(k)]
        total.append(math.prod(w[p - 1] for p in parts))
    return math.fsum(total)


def h_q_laplace(z: float, qp: QParam, b: TruncationBudget = DEFAULT_BUDGET) -> float:
    """``int_0^inf e^{-tz} h_q(t) dt`` step by step, in closed form."""
    qp = _as_qparam(qp)
    z = float(z)
    if not z > 0:
        raise DomainError("h_q_laplace needs z > 0")
    L = qp.L
    q = qp.q
    # on step n, h_q <= q^{n+1}/(1-q); the steps after N add at most
    # q^{N+2} q^{(N+1)z} / ((1-q) z (1 - q^{1+z}))
    n_stop = b.cutoff(
        lambda N: math.exp(-(N + 2) * L - (N + 1) * L * z) / ((1.0 - q) * z * -math.expm1(-L * (1.0 + z))),
        "h_q Laplace",
    )
    n = np.arange(n_stop + 1)
    steps = h_q(n * L + 0.5 * L, qp, b)
    # int_{nL}^{(n+1)L} e^{-tz} dt = e^{-nLz} (1 - e^{-Lz}) / z
    seg = np.exp(-n * L * z) * (-np.expm1(-L * z)) / z
    return math.fsum(steps * seg)
