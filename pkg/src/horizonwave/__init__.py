"""Characteristic Cauchy problems for wave equations with data on a compact
Cauchy horizon of model spacetimes: horizon jets by transport recursion,
admissibility classification, singular interior evolution, energy
diagnostics and Picard iteration, plus an executable counterexample gallery.
"""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticSolution,
    Cos,
    Exp,
    Nonlinearity,
    Polynomial,
    Sin,
    SourceTerm,
    evaluate_jet,
    linear_asymptotics,
    residual_order_check,
    semilinear_asymptotics,
)
from .energy import EnergyRow, energy, energy_report, fit_energy_constant, norm_equivalence_check
from .errors import (
    DegenerateDivision,
    HorizonWaveError,
    NoConvergence,
    NoFiniteConstant,
    NonPositiveAlpha,
    NotAdmissible,
    OrderShortfallError,
    StepSizeUnderflow,
    ValidationError,
    ZeroState,
)
from .evolution import (
    EvolutionState,
    Trajectory,
    characteristic_solve,
    evolve,
    horizon_limit_study,
    picard_iterate,
)
from .fields import (
    Field,
    derivative,
    directional_derivative,
    l2_norm,
    multiply,
    sobolev_norm,
)
from .flow_oracle import horizon_first_derivative
from .models import (
    HorizonModel,
    make_generalized_misner,
    make_misner,
    make_torus_quotient,
    null_form_data,
)
from .operators import (
    Admissibility,
    OperatorSpec,
    ScalarPerturbation,
    SpatialOperator,
    TimeCoefficient,
    admissibility_check,
    apply_full,
    horizon_transport_family,
    interior_apply,
    operator_preset,
    scalar_operator,
    system_operator,
)
from .torus import SpatialTorus
from .transport import (
    Obstruction,
    TransportProblem,
    TransportResult,
    solve_flow_quadrature,
    solve_spectral,
    solve_system,
    transport_residual,
)
