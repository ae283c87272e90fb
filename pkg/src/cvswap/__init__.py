"""Continuous-variable entanglement swapping: symbolic quadrature engine,
fidelity closed forms and inseparability witnesses."""

from .criteria import (
    FidelityReport,
    db_to_r,
    duan_sum,
    fidelity_closed_form,
    fidelity_from_exprs,
    optimal_fidelity_single_squeezers,
    optimal_fidelity_two_pair,
    optimal_gain,
    optimize_gain_numeric,
    r_to_db,
    tan_product,
)
from .modes import ModeRegister, QuadExpr, QuadKind, new_register
from .protocol import (
    Scenario,
    SwapParams,
    entanglement_swap,
    make_epr_pair,
    run_scenario,
    teleport_coherent,
)

__version__ = "0.1.0"
