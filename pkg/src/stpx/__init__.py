"""Steady states of generalized exclusion processes via probabilistic logical networks."""

from .algebra import (
    LogicalMatrix,
    khatri_rao,
    kronecker,
    stp,
    structure_matrix,
    table1_matrix,
    transition_structure_matrix,
)
from .logic import (
    ConditionSet,
    MValuedFunction,
    build_clear_function,
    build_mv_function,
    build_set_function,
    identity_function,
    sigma_gate,
)
from .montecarlo import SimConfig, simulate, total_variation
from .states import LatticeSpec, booleanize, debooleanize, dec, delta_index, from_digits, state_at
from .steady import (
    Distribution,
    ModelSpec,
    Restriction,
    StochasticMatrix,
    allowable_states,
    assemble,
    density_profile,
    normalize_rates,
    restrict,
    site_current,
    solve_model,
    steady_state,
)
from .transitions import TransitionSpec, custom_transition, standard_transition, tasep

__version__ = "0.1.0"
