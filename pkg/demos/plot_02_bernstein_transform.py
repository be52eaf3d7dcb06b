"""
The transform f_q and its reciprocal
====================================

f_q is a Bernstein function: positive and increasing on the positive axis,
with positive real part on the right half plane.  Its reciprocal at z + 1
is the Laplace transform of the density built later.
"""

import numpy as np

from qmoments import QParam, f_q, mellin_nu_q
from qmoments.transforms import f_q_via_psi, fourier_symbol, real_part_bounds

qp = QParam(0.5)
z = np.array([0.25, 0.5, 1.0, 2.0, 5.0])

# two independent routes: the series and the digamma formula
print("z        f_q(z)              via psi_q")
for zz, a in zip(z, f_q(z, qp)):
    print(f"{zz:<6}  {a:.15f}  {f_q_via_psi(zz, qp):.15f}")

# integer arguments give q-harmonic numbers, so 1/f_q(n+1) are moments
print("1/f_q(2) =", mellin_nu_q(1.0, qp), "(3/5 at q = 1/2)")

# on the line Re z = 1 the real part stays between two explicit bounds
lo, hi = real_part_bounds(qp)
y = np.linspace(-200, 200, 4001)
re = fourier_symbol(y, qp).real
print(f"Re f_q(1+iy) in [{re.min():.6f}, {re.max():.6f}], bounds [{lo}, {hi:.6f}]")

# and f_q(1+iy) / ((1-q)(1+iy)) -> 1 as |y| grows
for Y in (1e2, 1e3, 1e4):
    print(f"|y| = {Y:g}: ratio - 1 = {abs(fourier_symbol(Y, qp) / ((1 - qp.q) * (1 + 1j * Y)) - 1):.2e}")
