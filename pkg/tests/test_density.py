import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from qmoments import DomainError, OutOfTableError, QParam, TruncationBudget
from qmoments.density import (
    build_mu,
    conv_power_table,
    density_for_window,
    jump,
    jump_haar,
    nu_density_haar,
    series_terms,
    tau_density,
    tau_scaled,
)
from qmoments.verify import compositions_bruteforce

C_HALF = 1.60669515241529176378330152319


def delay_ode_density(qp, n_pieces, rtol=1e-12):
    """Independent route: g = (1-q) tau_q solves the delay equation

        g'(x) = -(1 + c_q) g(x) + sum_k w_k g(x - kL),  g(0) = 1,

    with g = 0 on x < 0.  Integrated piece by piece (method of steps).
    """
    L, c = qp.L, 1 + qp.c_q
    w = [qp.q ** (2 * k) / (1 - qp.q ** k) for k in range(1, n_pieces + 1)]
    sols = []

    def g(x):
        n = int(math.floor(x / L + 1e-13))
        if x < 0:
            return 0.0
        n = min(n, len(sols) - 1)
        return float(sols[n].sol(x)[0])

    y0 = 1.0
    for n in range(n_pieces):
        def rhs(x, y, n=n):
            delayed = sum(w[k - 1] * g(x - k * L) for k in range(1, n + 1) if x - k * L >= 0)
            return [-c * y[0] + delayed]
        s = solve_ivp(rhs, (n * L, (n + 1) * L), [y0], method="DOP853",
                      rtol=rtol, atol=1e-14, dense_output=True)
        sols.append(s)
        y0 = s.y[0, -1]
    return g


def test_build_mu_examples(qp05):
    mu = build_mu(qp05)
    assert mu.weights[0] == pytest.approx(0.5, rel=1e-15)
    assert mu.weights.size == 22
    assert mu.total_mass == pytest.approx(C_HALF - 1, abs=1e-13)
    assert mu.tail_bound <= 1e-13
    assert np.all(mu.weights > 0)


def test_mu_mass_matches_c_q(qp):
    assert build_mu(qp).total_mass == pytest.approx(qp.c_q - qp.q / (1 - qp.q), abs=1e-12)


def test_table_small_entries(qp05):
    t = conv_power_table(build_mu(qp05), 6)
    assert t.M(0, 0) == 1.0
    assert all(t.M(0, j) == 0.0 for j in range(1, 7))
    assert t.M(2, 2) == pytest.approx(0.25, rel=1e-14)
    w1, w2 = 0.25 / 0.5, 0.0625 / 0.75
    assert t.M(2, 3) == pytest.approx(2 * w1 * w2, rel=1e-14)


def test_table_structure(qp):
    t = conv_power_table(build_mu(qp), 40)
    assert np.all(t.R >= 0)
    for k in range(1, 41):
        assert np.all(t.R[k, :k] == 0)
    for k in range(1, 10):
        assert t.M(k, k) == pytest.approx((qp.q ** 2 / (1 - qp.q)) ** k, rel=1e-13)


def test_table_vs_enumeration(qp):
    t = conv_power_table(build_mu(qp), 10)
    for j in range(1, 9):
        for k in range(1, j + 1):
            ref = compositions_bruteforce(k, j, qp)
            assert t.M(k, j) == pytest.approx(ref, rel=1e-14)


def test_table_deep_no_overflow():
    qp = QParam(0.9)
    t = density_for_window(qp, 300 * qp.L).table
    assert np.all(np.isfinite(t.R))
    assert np.isfinite(t.log_M(250, 280))


def test_tau_first_piece(qp05):
    d = density_for_window(qp05, 3 * qp05.L)
    assert d.tau(0.0) == 2.0
    x = 0.5 * qp05.L
    assert d.tau(x) == pytest.approx(2 * math.exp(-(1 + C_HALF) * x), rel=1e-13)


def test_tau_second_and_third_piece(qp05):
    q, L, c = 0.5, qp05.L, qp05.c_q
    d = density_for_window(qp05, 3 * L)
    x = 1.5 * L
    expected = math.exp(-(1 + c) * x) * (1 + q ** (1 - c) * (x - L) / (1 - q)) / (1 - q)
    assert d.tau(x) == pytest.approx(expected, rel=1e-13)
    x = 2.5 * L
    expected = math.exp(-(1 + c) * x) * (
        1 + q ** (1 - c) / (1 - q) * (x - L)
        + q ** (2 * (1 - c)) / (1 - q * q) * (x - 2 * L)
        + q ** (2 * (1 - c)) / (2 * (1 - q) ** 2) * (x - 2 * L) ** 2
    ) / (1 - q)
    assert d.tau(x) == pytest.approx(expected, rel=1e-13)


def test_polynomial_coefficients(qp05):
    d = density_for_window(qp05, 3 * qp05.L)
    w1, w2 = 0.5, 0.0625 / 0.75
    np.testing.assert_allclose(d.polynomial(2), [0.0, w2, w1 * w1 / 2], rtol=1e-14)


def test_delay_equation_oracle(qp):
    n = 6
    d = density_for_window(qp, n * qp.L)
    g = delay_ode_density(qp, n)
    x = np.linspace(0.01, n - 0.01, 37) * qp.L
    np.testing.assert_allclose(d(x), [g(v) for v in x], rtol=0, atol=1e-9)


def test_continuity_at_breakpoints(qp):
    d = density_for_window(qp, 11 * qp.L)
    for n in range(1, 11):
        left = d.tau(n * qp.L, piece=n - 1)
        right = d.tau(n * qp.L, piece=n)
        assert abs(left - right) <= 1e-12
        assert abs(d.tau(n * qp.L) - d.tau(n * qp.L * (1 - 1e-13))) < 1e-9


def test_positivity_and_decay(qp):
    d = density_for_window(qp, 10 * qp.L)
    x = np.linspace(0, 10 * qp.L, 2001)[:-1]
    assert np.all(d.tau(x) > 0)


@pytest.mark.parametrize("q", [0.3, 0.5])
def test_decay_far_out(q):
    qp = QParam(q)
    d = density_for_window(qp, 31 * qp.L)
    assert d.tau(30 * qp.L) < 1e-6


def test_series_terms_uniform_bound(qp):
    d = density_for_window(qp, 12 * qp.L)
    ratio = qp.mu_mass / (1 + qp.c_q)
    assert ratio < qp.c_q / (1 + qp.c_q)
    for x in np.linspace(0.1, 11.9, 25) * qp.L:
        terms = series_terms(x, qp, d.table)
        n = int(x / qp.L)
        assert terms.size == n + 1
        assert math.fsum(terms) == pytest.approx(float(d(x)), rel=1e-12)
        for k, t in enumerate(terms):
            assert t <= ratio ** k * (1 + 1e-12)


def test_interior_smoothness(qp):
    # second differences converge at the rate of a C^2 function inside a piece
    d = density_for_window(qp, 4 * qp.L)
    x0 = 2.4 * qp.L
    sd = []
    for h in (qp.L / 40, qp.L / 80, qp.L / 160):
        v = d.tau(np.array([x0 - h, x0, x0 + h]))
        sd.append((v[0] - 2 * v[1] + v[2]) / h ** 2)
    r = abs(sd[0] - sd[1]) / abs(sd[1] - sd[2])
    assert 3.5 < r < 4.5


def test_jump_values(qp05):
    assert jump(1, qp05) == pytest.approx(1.0, rel=1e-15)
    assert jump(2, qp05) == pytest.approx(1 / 6, rel=1e-15)
    js = [jump(n, qp05) for n in range(1, 40)]
    assert all(b < a for a, b in zip(js, js[1:]))
    with pytest.raises(DomainError):
        jump(0, qp05)


def test_jump_haar(qp):
    for n in (1, 2, 5):
        expected = qp.q ** n / ((1 - qp.q ** n) * (1 - qp.q))
        assert jump_haar(n, qp) == pytest.approx(expected, rel=1e-13)


def test_nu_density_haar(qp05):
    d = density_for_window(qp05, 40 * qp05.L)
    assert nu_density_haar(1.0, qp05, d.table) == 2.0
    t = 0.5 ** 0.5
    assert nu_density_haar(t, qp05, d.table) == pytest.approx(
        2 * math.exp(-(1 + C_HALF) * 0.5 * qp05.L), rel=1e-13)
    eps = 1e-9
    assert abs(nu_density_haar(0.5 * (1 + eps), qp05, d.table)
               - nu_density_haar(0.5 * (1 - eps), qp05, d.table)) < 1e-7
    assert nu_density_haar(0.5 ** 39, qp05, d.table) < 1e-6
    with pytest.raises(DomainError):
        nu_density_haar(0.0, qp05, d.table)
    with pytest.raises(DomainError):
        nu_density_haar(1.5, qp05, d.table)


def test_out_of_table(qp05):
    t = conv_power_table(build_mu(qp05), 3)
    with pytest.raises(OutOfTableError):
        tau_density(4.5 * qp05.L, qp05, t)
    with pytest.raises(DomainError):
        tau_density(-1.0, qp05, t)


def test_table_q_mismatch(qp05):
    t = conv_power_table(build_mu(QParam(0.3)), 3)
    with pytest.raises(DomainError):
        tau_scaled(0.1, qp05, t)


def test_truncated_mu_does_not_change_window(qp05):
    # the table extends the atoms it needs, so a coarse mu gives the same density
    coarse = build_mu(qp05, TruncationBudget(1e-2))
    fine = build_mu(qp05)
    x = np.linspace(0, 29.9, 50) * qp05.L
    a = tau_scaled(x, qp05, conv_power_table(coarse, 30))
    b = tau_scaled(x, qp05, conv_power_table(fine, 30))
    np.testing.assert_allclose(a, b, rtol=1e-13)


@settings(max_examples=25, deadline=None)
@given(q=st.floats(0.05, 0.95), frac=st.floats(0.0, 5.999))
def test_density_positive_and_below_intercept(q, frac):
    qp = QParam(q)
    d = density_for_window(qp, 6 * qp.L)
    v = float(d(frac * qp.L))
    assert 0 < v <= 1.0


@settings(max_examples=25, deadline=None)
@given(q=st.floats(0.05, 0.95), n=st.integers(1, 5))
def test_density_continuous_any_q(q, n):
    qp = QParam(q)
    d = density_for_window(qp, 6 * qp.L)
    x = n * qp.L
    assert abs(float(d(x, piece=n - 1)) - float(d(x, piece=n))) <= 1e-12
