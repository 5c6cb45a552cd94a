"""Optimal treatment and vaccination for a non-autonomous SEIRS model.

The solver is a forward-backward sweep on a fixed RK4 grid: states are
integrated forward, costates backward, and the controls are re-derived from
the pointwise minimizer of the Hamiltonian until the iterates settle.
"""

from seirs_control.errors import ConfigError, DomainError, IntegrationDiverged
from seirs_control.incidence import IncidenceFunction, make_incidence
from seirs_control.integrator import (
    TimeGrid,
    Trajectory,
    integrate_adjoint_backward,
    integrate_state_forward,
    quadrature_cost,
)
from seirs_control.model import (
    AdjointVector,
    Constant,
    ControlBounds,
    ControlVector,
    CostWeights,
    Cosine,
    ParameterSet,
    StateVector,
    adjoint_rhs,
    control_update,
    hamiltonian,
    state_rhs,
)
from seirs_control.scenario import (
    Scenario,
    SweepSpec,
    expand_sweep,
    parse_scenario,
    serialize_scenario,
    table1_default,
)
from seirs_control.sweep import (
    Solution,
    SweepConfig,
    convergence_metric,
    solve_uncontrolled,
    sweep,
)

__all__ = [
    "AdjointVector",
    "ConfigError",
    "Constant",
    "ControlBounds",
    "ControlVector",
    "Cosine",
    "CostWeights",
    "DomainError",
    "IncidenceFunction",
    "IntegrationDiverged",
    "ParameterSet",
    "Scenario",
    "Solution",
    "StateVector",
    "SweepConfig",
    "SweepSpec",
    "TimeGrid",
    "Trajectory",
    "adjoint_rhs",
    "control_update",
    "convergence_metric",
    "expand_sweep",
    "hamiltonian",
    "integrate_adjoint_backward",
    "integrate_state_forward",
    "make_incidence",
    "parse_scenario",
    "quadrature_cost",
    "serialize_scenario",
    "solve_uncontrolled",
    "state_rhs",
    "sweep",
    "table1_default",
]
