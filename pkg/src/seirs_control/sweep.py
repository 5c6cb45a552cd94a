"""Forward-backward sweep for the optimality system.

Each iteration integrates the state with the current controls, integrates the
costates backward against that state, and replaces the controls by the
clamped Hamiltonian minimizer. Iteration stops once the relative change of
every tracked signal (four states, four costates, two controls) is below the
tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from seirs_control.errors import ConfigError
from seirs_control.integrator import (
    TimeGrid,
    Trajectory,
    integrate_adjoint_backward,
    integrate_state_forward,
    quadrature_cost,
)
from seirs_control.model import control_update_arrays

if TYPE_CHECKING:
    from seirs_control.scenario import Scenario

log = logging.getLogger(__name__)

TRACKED = ("S", "E", "I", "R", "p1", "p2", "p3", "p4", "T", "V")


@dataclass(frozen=True)
class SweepConfig:
    """Solver settings. The grid spans ``[0, scenario.tf]`` with ``n_steps`` steps."""

    n_steps: int = 2500
    tolerance: float = 0.01
    max_iterations: int = 100
    damping: float = 0.0
    floor: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigError(f"tolerance must lie in (0, 1), got {self.tolerance}", key="tolerance")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}", key="max_iterations")
        if not 0.0 <= self.damping < 1.0:
            raise ConfigError(f"damping must lie in [0, 1), got {self.damping}", key="damping")
        if not self.floor > 0.0:
            raise ConfigError(f"floor must be > 0, got {self.floor}", key="floor")

    def grid(self, tf: float) -> TimeGrid:
        return TimeGrid(tf, self.n_steps)


@dataclass(frozen=True, eq=False)
class Solution:
    """Result of a sweep.

    ``trajectory`` holds the last iterate: the state and costates of the final
    pass together with the controls derived from them. ``cost`` is the
    objective of those controls, evaluated on the state they generate.
    ``residuals`` has one row per iteration with the relative change of each
    tracked signal (NaN where no previous iterate existed).
    """

    trajectory: Trajectory
    cost: float
    iterations: int
    converged: bool
    residuals: np.ndarray = field(repr=False)

    @property
    def residual(self) -> float:
        return float(np.nanmax(self.residuals[-1])) if len(self.residuals) else float("nan")


def convergence_metric(old, new, floor: float = 1e-12) -> float:
    """Relative l1 change ``|new - old|_1 / max(|new|_1, floor)``."""
    old = np.asarray(old, dtype=float)
    new = np.asarray(new, dtype=float)
    if old.shape != new.shape:
        raise ValueError(f"shape mismatch: {old.shape} vs {new.shape}")
    return float(np.abs(new - old).sum() / max(np.abs(new).sum(), floor))


def _initial_controls(grid: TimeGrid, initial) -> np.ndarray:
    n = grid.n_steps + 1
    if initial is None:
        return np.zeros((n, 2))
    arr = np.asarray(initial, dtype=float)
    if arr.shape == (2,):
        return np.tile(arr, (n, 1))
    if arr.shape != (n, 2):
        raise ValueError(f"initial controls must have shape (2,) or ({n}, 2), got {arr.shape}")
    return arr.copy()


def sweep(cfg: SweepConfig, scenario: "Scenario", initial_controls=None) -> Solution:
    """Solve the optimality system by forward-backward sweeping.

    ``initial_controls`` defaults to zero; a constant pair or a full
    (n+1, 2) array may be given instead.
    """
    grid = cfg.grid(scenario.tf)
    params = scenario.parameters
    inc = scenario.incidence_function
    w = scenario.weights
    bounds = scenario.bounds
    x0 = scenario.initial
    theta = cfg.damping

    u = _initial_controls(grid, initial_controls)
    prev_x = prev_p = None
    history = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        x = integrate_state_forward(grid, x0, u, params, inc)
        p = integrate_adjoint_backward(grid, x, u, params, inc, w)
        u_raw = control_update_arrays(x, p, w, bounds)
        u_new = (1.0 - theta) * u_raw + theta * u if theta else u_raw

        row = np.full(len(TRACKED), np.nan)
        if prev_x is not None:
            for k in range(4):
                row[k] = convergence_metric(prev_x[:, k], x[:, k], cfg.floor)
                row[4 + k] = convergence_metric(prev_p[:, k], p[:, k], cfg.floor)
        for k in range(2):
            # measured on the undamped update so damping cannot mask a large residual
            row[8 + k] = convergence_metric(u[:, k], u_raw[:, k], cfg.floor)
        history.append(row)
        log.debug("iteration %d: max relative change %.3e", it, np.nanmax(row))

        prev_x, prev_p, u = x, p, u_new
        if not np.isnan(row).any() and row.max() < cfg.tolerance:
            converged = True
            break

    if not converged:
        log.warning("sweep stopped after %d iterations without converging", it)
    x_final = integrate_state_forward(grid, x0, u, params, inc)
    traj = Trajectory(grid, prev_x, prev_p, u)
    return Solution(
        trajectory=traj,
        cost=quadrature_cost(grid, x_final, u, w),
        iterations=it,
        converged=converged,
        residuals=np.array(history),
    )


def solve_uncontrolled(cfg: SweepConfig, scenario: "Scenario") -> Solution:
    """Single forward run with both controls held at zero."""
    grid = cfg.grid(scenario.tf)
    u = np.zeros((grid.n_steps + 1, 2))
    x = integrate_state_forward(grid, scenario.initial, u, scenario.parameters, scenario.incidence_function)
    traj = Trajectory(grid, x, np.zeros((grid.n_steps + 1, 4)), u)
    return Solution(
        trajectory=traj,
        cost=quadrature_cost(grid, x, u, scenario.weights),
        iterations=1,
        converged=True,
        residuals=np.zeros((1, len(TRACKED))),
    )
