"""q-analogue tools for a moment iteration on probability measures on [0, 1].

Submodules
----------
qkernel     q-Pochhammer, Gamma_q, psi_q, c_q, q-harmonic numbers
transforms  Bernstein transform f_q of the Jackson measure and relatives
iteration   the sequence map T, its fixed point and the delta_q orbit
density     exact piecewise evaluation of the density tau_q
verify      independent quadrature / inversion / enumeration oracles
"""
from .density import (
    AtomicMeasure,
    ConvPowerTable,
    PiecewiseExpPolyDensity,
    build_mu,
    conv_power_table,
    density_for_window,
    jump,
    jump_haar,
    nu_density_haar,
    tau_density,
    tau_scaled,
)
from .errors import BudgetExceededError, DomainError, OutOfTableError
from .iteration import apply_T, fixed_point_m, k_distance, orbit_from_delta_q
from .qkernel import (
    QParam,
    TruncationBudget,
    c_q,
    euler_gamma_q,
    gamma_q,
    log_pochhammer_inf,
    psi_q,
    q_harmonic,
)
from .transforms import f_q, f_q_via_psi, fourier_symbol, h_q, mellin_nu_q

__version__ = "0.1.0"
