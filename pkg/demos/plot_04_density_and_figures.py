"""
The piecewise density and its figures
=====================================

On each interval [nL, (n+1)L) the density is an exponential times a
polynomial.  It is continuous everywhere and its slope jumps at every nL.
The CLI renders the graph of (1-q) tau_q on [0, 3L] as SVG.
"""

import math
import pathlib
import tempfile

import numpy as np

from qmoments import QParam, density_for_window, jump
from qmoments.cli import main
from qmoments.verify import one_sided_derivative

for q in (0.5, 0.9):
    qp = QParam(q)
    d = density_for_window(qp, 3 * qp.L)
    print(f"q = {q}: decay rate 1 + c_q = {d.rate:.6f}")
    x = np.linspace(0, 3, 7) * qp.L
    print("  (1-q) tau_q at x/L = 0, .5, ..., 3:", np.round(d(x), 6))
    for n in (1, 2):
        xn = n * qp.L
        gap = abs(d(xn, piece=n - 1) - d(xn, piece=n))
        kink = (one_sided_derivative(xn, "right", qp, d.table)
                - one_sided_derivative(xn, "left", qp, d.table))
        print(f"  at {n}L: value gap {gap:.1e}, slope jump {kink:.10f}, predicted {jump(n, qp):.10f}")

# polynomial coefficients of the third piece, in powers of (x - jL)
print("piece 2 polynomial:", density_for_window(QParam(0.5), 3 * math.log(2)).polynomial(2))

out = pathlib.Path(tempfile.mkdtemp())
for q, name in ((0.5, "figure1.svg"), (0.9, "figure2.svg")):
    main(["figure", "--q", str(q), "--out", str(out / name)])
    main(["density", "--q", str(q), "--grid", "61", "--out", str(out / name.replace("svg", "csv"))])
print("figures and tables written to", out)
print((out / "figure1.csv").read_text().splitlines()[:4])
