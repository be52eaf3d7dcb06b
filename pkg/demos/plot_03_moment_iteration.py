"""
The moment map T and its fixed point
====================================

T sends a sequence x to 1 / (1 + x_1 + ... + x_n).  Starting from the
moments q^n of a point mass, two steps give the reciprocals of q-harmonic
numbers, and the orbit converges to the unique fixed point.
"""

import numpy as np

from qmoments import QParam, q_harmonic
from qmoments.iteration import (
    apply_T,
    fixed_point_m,
    hankel_minors,
    k_distance,
    lipschitz_ratio,
    orbit_from_delta_q,
)

qp = QParam(0.5)
N = 8

a1 = orbit_from_delta_q(qp, 1, N)
print("one step :", np.round(a1, 6))
a2 = orbit_from_delta_q(qp, 2, N)
print("two steps:", np.round(a2, 6))
print("1/H_n^(q):", np.round([1.0] + [1 / q_harmonic(n + 1, qp) for n in range(1, N + 1)], 6))

m = fixed_point_m(40)
print("m_1 =", m[1], " (sqrt5 - 1)/2 =", (5 ** 0.5 - 1) / 2)

# the orbit approaches m; the weighted distance drops every step
x = orbit_from_delta_q(qp, 0, 40)[1:]
for s in range(1, 31):
    x = apply_T(x)
    if s % 5 == 0:
        print(f"after {s:2d} steps  d(x, m) = {k_distance(x, m[1:]).value:.3e}")

# T never expands the distance
rng = np.random.default_rng(0)
ratios = [lipschitz_ratio(rng.random(40), rng.random(40)) for _ in range(200)]
print("largest d(Tx,Ty)/d(x,y) over 200 random pairs:", max(ratios))

# a Hausdorff moment sequence has non-negative Hankel minors
print("Hankel minors of the fixed point:", hankel_minors(m, order=4))
