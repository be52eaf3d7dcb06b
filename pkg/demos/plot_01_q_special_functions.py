"""
q-special functions with certified truncation
=============================================

Every series in the kernel stops at the first index whose tail bound is
below the requested tolerance, and can report that bound.
"""

import numpy as np

from qmoments import QParam, TruncationBudget, c_q, euler_gamma_q, gamma_q, psi_q

qp = QParam(0.5)
print("q =", qp.q, " L = log(1/q) =", qp.L)

# c_q three ways: Lambert series, divisor sum, derivative of a Pochhammer symbol
for method in ("lambert", "divisor", "pochhammer"):
    r = c_q(qp, method=method, with_bound=True)
    print(f"c_q ({method:10s}) = {r.value:.15f}  bound {r.bound:.1e}  terms {r.terms}")

# Gamma_q(n + 1) is the q-factorial [n]_q!
for n in range(1, 5):
    qfact = np.prod([(1 - qp.q ** k) / (1 - qp.q) for k in range(1, n + 1)])
    print(f"Gamma_q({n + 1}) = {gamma_q(n + 1, qp):.15f}   [{n}]_q! = {qfact:.15f}")

# the q-Euler constant is -psi_q(1)
print("gamma_q       =", euler_gamma_q(qp))
print("-psi_q(1)     =", -psi_q(1.0, qp))

# a looser budget stops sooner and says so
loose = psi_q(2.5, qp, TruncationBudget(1e-6), with_bound=True)
tight = psi_q(2.5, qp, with_bound=True)
print(f"psi_q(2.5): loose {loose.value:.12f} (bound {loose.bound:.1e}, {loose.terms} terms)")
print(f"            tight {tight.value:.12f} (bound {tight.bound:.1e}, {tight.terms} terms)")

# as q -> 1 the constants approach their classical values
for q in (0.9, 0.99, 0.999):
    print(f"q = {q}: gamma_q = {euler_gamma_q(QParam(q)):.8f}")
print("Euler gamma    =", 0.5772156649015329)
