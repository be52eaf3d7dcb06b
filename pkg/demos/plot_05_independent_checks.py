"""
Checking the density against independent routes
===============================================

The density is never trusted on its own: its Laplace transform is
integrated by Gauss-Legendre and compared with 1/f_q(z+1), and the
density is rebuilt from f_q on the line Re z = 1 by Fourier inversion.
"""

import numpy as np

from qmoments import QParam, density_for_window, f_q, q_harmonic
from qmoments.verify import (
    compositions_bruteforce,
    fourier_inversion_oracle,
    laplace_by_quadrature,
)

qp = QParam(0.5)

n = np.arange(6.0)
r = laplace_by_quadrature(n, qp)
ref = [1 / q_harmonic(k + 1, qp) for k in range(6)]
print("moments by quadrature:", np.round(r.value, 12))
print("1/H_(n+1)^(q)        :", np.round(ref, 12))
print("f_q(z+1) * Laplace   :", f_q(n + 1, qp) * r.value)

# the lattice table against plain enumeration of compositions
d = density_for_window(qp, 8 * qp.L)
print("M[3][7] table vs enumeration:", d.table.M(3, 7), compositions_bruteforce(3, 7, qp))

# Fourier inversion converges slowly, so only a few points
x = np.array([0.5, 1.5, 2.5]) * qp.L
rec = fourier_inversion_oracle(x, qp, y_max=2e4)
print("tau_q direct :", d.tau(x))
print("tau_q Fourier:", rec.value, " tail bound", f"{rec.tail_bound:.1e}")
