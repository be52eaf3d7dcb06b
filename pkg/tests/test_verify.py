import math
import warnings

import numpy as np
import pytest

from qmoments import DomainError, QParam
from qmoments.density import build_mu, conv_power_table, density_for_window
from qmoments.transforms import f_q, h_q, mellin_nu_q
from qmoments.verify import (
    compositions_bruteforce,
    fourier_inversion_oracle,
    h_q_laplace,
    laplace_by_quadrature,
    one_sided_derivative,
)


def test_laplace_mass(qp05):
    r = laplace_by_quadrature(0.0, qp05)
    assert r.value == pytest.approx(1.0, abs=1e-10)
    assert r.total_error < 1e-10


def test_laplace_first_moment_q05(qp05):
    # 1/f_q(2) at q = 0.5 is 3/5
    r = laplace_by_quadrature(1.0, qp05)
    assert r.value == pytest.approx(0.6, abs=1e-10)


def test_laplace_q09():
    qp = QParam(0.9)
    r = laplace_by_quadrature(5.0, qp)
    assert r.value == pytest.approx(float(mellin_nu_q(5.0, qp)), abs=1e-8)


def test_laplace_times_symbol_is_one(qp):
    z = np.array([0.5, 1.0, 2.0, 7.0])
    r = laplace_by_quadrature(z, qp)
    np.testing.assert_allclose(f_q(z + 1.0, qp) * r.value, 1.0, rtol=0, atol=1e-10)


def test_laplace_vectorized(qp05):
    z = np.array([0.0, 1.0, 3.0])
    r = laplace_by_quadrature(z, qp05)
    assert r.value.shape == (3,)
    np.testing.assert_allclose(r.value, [float(mellin_nu_q(v, qp05)) for v in z], atol=1e-10)


def test_laplace_rejects(qp05):
    with pytest.raises(DomainError):
        laplace_by_quadrature(-1.0, qp05)
    with pytest.raises(DomainError):
        laplace_by_quadrature(1.0, qp05, order=10)


@pytest.mark.parametrize("frac", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("q", [0.3, 0.5])
def test_fourier_inversion(q, frac):
    qp = QParam(q)
    x = frac * qp.L
    d = density_for_window(qp, 4 * qp.L)
    r = fourier_inversion_oracle(x, qp)
    assert r.value == pytest.approx(float(d.tau(x)), abs=1e-3)
    assert abs(r.value - float(d.tau(x))) <= r.tail_bound


def test_fourier_at_origin(qp05):
    # the even extension tau(|x|) is continuous at 0
    r = fourier_inversion_oracle(0.0, qp05)
    assert r.value == pytest.approx(2.0, abs=1e-3)


def test_fourier_warns_near_lattice(qp05):
    with pytest.warns(RuntimeWarning):
        fourier_inversion_oracle(qp05.L + 1e-9, qp05, y_max=1e3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fourier_inversion_oracle(0.5 * qp05.L, qp05, y_max=1e3)


def test_derivative_interior(qp):
    d = density_for_window(qp, 4 * qp.L)
    x0 = 1.3 * qp.L
    left = one_sided_derivative(x0, "left", qp, d.table)
    right = one_sided_derivative(x0, "right", qp, d.table)
    assert left == pytest.approx(right, abs=1e-8)


def test_derivative_first_piece(qp05):
    d = density_for_window(qp05, 3 * qp05.L)
    c = 1 + qp05.c_q
    x0 = 0.4 * qp05.L
    expected = -c * 2 * math.exp(-c * x0)
    assert one_sided_derivative(x0, "right", qp05, d.table) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_derivative_jump_haar_scale(qp05, n):
    d = density_for_window(qp05, 5 * qp05.L)
    x0 = n * qp05.L
    jump = (one_sided_derivative(x0, "right", qp05, d.table)
            - one_sided_derivative(x0, "left", qp05, d.table))
    # the atom of weight w_n at nL shifts tau' by w_n tau(0)
    w = qp05.q ** (2 * n) / (1 - qp05.q ** n)
    assert jump == pytest.approx(w * d.tau(0.0), rel=1e-6)


def test_derivative_rejects(qp05):
    d = density_for_window(qp05, 3 * qp05.L)
    with pytest.raises(DomainError):
        one_sided_derivative(1.0, "up", qp05, d.table)
    with pytest.raises(DomainError):
        one_sided_derivative(1e-4, "left", qp05, d.table)


def test_bruteforce_examples(qp05):
    assert compositions_bruteforce(1, 1, qp05) == pytest.approx(0.5, rel=1e-15)
    assert compositions_bruteforce(2, 2, qp05) == pytest.approx(0.25, rel=1e-15)
    assert compositions_bruteforce(2, 3, qp05) == pytest.approx(2 * 0.5 * 0.0625 / 0.75, rel=1e-15)


def test_bruteforce_matches_table_deep(qp05):
    t = conv_power_table(build_mu(qp05), 14)
    for k in (1, 3, 7, 14):
        assert t.M(k, 14) == pytest.approx(compositions_bruteforce(k, 14, qp05), rel=1e-13)


def test_bruteforce_limits(qp05):
    with pytest.raises(DomainError):
        compositions_bruteforce(2, 15, qp05)
    with pytest.raises(DomainError):
        compositions_bruteforce(3, 2, qp05)


@pytest.mark.parametrize("z", [0.5, 1.0, 3.0])
def test_h_q_laplace_identity(qp, z):
    # int e^{-tz} h_q dt against the relation with f_q
    val = h_q_laplace(z, qp)
    steps = np.arange(2000)
    direct = math.fsum(
        h_q((steps + 0.5) * qp.L, qp) * np.exp(-steps * qp.L * z) * -np.expm1(-qp.L * z) / z
    )
    assert val == pytest.approx(direct, rel=1e-12)
