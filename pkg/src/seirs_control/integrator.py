"""Fixed-step RK4 on a shared uniform grid.

State, costate and control all live on the same nodes ``t_i = i*h``. RK4's
midpoint stages need signals at ``t_i + h/2``; grid-sampled signals (controls,
and the frozen state during the backward pass) are linearly interpolated
there, while the time-dependent coefficients are evaluated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seirs_control.errors import ConfigError, IntegrationDiverged
from seirs_control.incidence import IncidenceFunction
from seirs_control.model import (
    CostWeights,
    ParameterSet,
    StateVector,
    _adjoint_kernel,
    _state_kernel,
)


@dataclass(frozen=True)
class TimeGrid:
    tf: float = 25.0
    n_steps: int = 2500

    t0 = 0.0

    def __post_init__(self):
        if not self.tf > 0.0:
            raise ConfigError(f"tf must be > 0, got {self.tf}", key="tf")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ConfigError(f"n_steps must be an integer >= 2, got {self.n_steps}", key="n_steps")

    @property
    def h(self) -> float:
        return self.tf / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.h

    @property
    def half_nodes(self) -> np.ndarray:
        """Nodes and midpoints interleaved: index ``2i`` is node i, ``2i+1`` its midpoint."""
        return np.arange(2 * self.n_steps + 1) * (0.5 * self.h)

    def refine(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.tf, self.n_steps * factor)


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray
    adjoints: np.ndarray
    controls: np.ndarray

    def __post_init__(self):
        n = self.grid.n_steps + 1
        for name, arr, width in (("states", self.states, 4), ("adjoints", self.adjoints, 4), ("controls", self.controls, 2)):
            if np.shape(arr) != (n, width):
                raise ValueError(f"{name} must have shape ({n}, {width}), got {np.shape(arr)}")

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def S(self):
        return self.states[:, 0]

    @property
    def E(self):
        return self.states[:, 1]

    @property
    def I(self):
        return self.states[:, 2]

    @property
    def R(self):
        return self.states[:, 3]

    @property
    def N(self):
        return self.states.sum(axis=1)

    @property
    def T(self):
        return self.controls[:, 0]

    @property
    def V(self):
        return self.controls[:, 1]


def _on_half_grid(values: np.ndarray) -> np.ndarray:
    """Interleave node values with midpoint averages, shape (2n+1, k)."""
    values = np.asarray(values, dtype=float)
    out = np.empty((2 * len(values) - 1,) + values.shape[1:])
    out[0::2] = values
    out[1::2] = 0.5 * (values[:-1] + values[1:])
    return out


def _check_grid_array(name: str, arr, grid: TimeGrid, width: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.shape != (grid.n_steps + 1, width):
        raise ValueError(f"{name} must have shape ({grid.n_steps + 1}, {width}), got {arr.shape}")
    return arr


def _rk4(rhs, y0, n: int, h: float, what: str) -> np.ndarray:
    """Classic RK4 for a 4-component system; ``rhs(j, a, b, c, d)`` gets the half-grid index j."""
    y0_, y1_, y2_, y3_ = (float(v) for v in y0)
    rows = [(y0_, y1_, y2_, y3_)]
    hh = 0.5 * h
    h6 = h / 6.0
    isfinite = math.isfinite
    for i in range(n):
        j = 2 * i
        a0, a1, a2, a3 = rhs(j, y0_, y1_, y2_, y3_)
        b0, b1, b2, b3 = rhs(j + 1, y0_ + hh * a0, y1_ + hh * a1, y2_ + hh * a2, y3_ + hh * a3)
        c0, c1, c2, c3 = rhs(j + 1, y0_ + hh * b0, y1_ + hh * b1, y2_ + hh * b2, y3_ + hh * b3)
        d0, d1, d2, d3 = rhs(j + 2, y0_ + h * c0, y1_ + h * c1, y2_ + h * c2, y3_ + h * c3)
        y0_ = y0_ + h6 * (a0 + 2.0 * (b0 + c0) + d0)
        y1_ = y1_ + h6 * (a1 + 2.0 * (b1 + c1) + d1)
        y2_ = y2_ + h6 * (a2 + 2.0 * (b2 + c2) + d2)
        y3_ = y3_ + h6 * (a3 + 2.0 * (b3 + c3) + d3)
        if not isfinite(y0_ + y1_ + y2_ + y3_):
            raise IntegrationDiverged(i + 1, what)
        rows.append((y0_, y1_, y2_, y3_))
    return np.array(rows)


def integrate_state_forward(
    grid: TimeGrid,
    x0: StateVector,
    controls: np.ndarray,
    params: ParameterSet,
    inc: IncidenceFunction,
) -> np.ndarray:
    """Integrate (S, E, I, R) from ``x0`` over the grid; returns shape (n+1, 4)."""
    controls = _check_grid_array("controls", controls, grid, 2)
    coef = params.sample(grid.half_nodes)
    Lam = coef["Lambda"].tolist()
    beta = coef["beta"].tolist()
    mu = coef["mu"].tolist()
    eta = coef["eta"].tolist()
    eps = coef["epsilon"].tolist()
    gam = coef["gamma"].tolist()
    u = _on_half_grid(controls)
    T = u[:, 0].tolist()
    V = u[:, 1].tolist()
    phi = inc.value
    kernel = _state_kernel

    def rhs(j, S, E, I, R):
        return kernel(S, E, I, R, T[j], V[j], Lam[j], beta[j], mu[j], eta[j], eps[j], gam[j], phi)

    return _rk4(rhs, x0, grid.n_steps, grid.h, "state")


def integrate_adjoint_backward(
    grid: TimeGrid,
    states: np.ndarray,
    controls: np.ndarray,
    params: ParameterSet,
    inc: IncidenceFunction,
    w: CostWeights,
) -> np.ndarray:
    """Integrate the costates from the zero terminal condition back to t = 0.

    Works in reversed time s = tf - t, where the system becomes an initial
    value problem with negated right-hand side; the result is flipped back so
    row i belongs to node t_i and the last row is exactly zero.
    """
    states = _check_grid_array("states", states, grid, 4)
    controls = _check_grid_array("controls", controls, grid, 2)
    rev = slice(None, None, -1)
    coef = params.sample(grid.half_nodes)
    beta = coef["beta"][rev].tolist()
    mu = coef["mu"][rev].tolist()
    eta = coef["eta"][rev].tolist()
    eps = coef["epsilon"][rev].tolist()
    gam = coef["gamma"][rev].tolist()
    x = _on_half_grid(states)[rev]
    S, E, I, R = (x[:, k].tolist() for k in range(4))
    u = _on_half_grid(controls)[rev]
    T = u[:, 0].tolist()
    V = u[:, 1].tolist()
    k1 = w.k1
    kernel = _adjoint_kernel

    def rhs(j, p1, p2, p3, p4):
        d = kernel(p1, p2, p3, p4, S[j], E[j], I[j], R[j], T[j], V[j], beta[j], mu[j], eta[j], eps[j], gam[j], k1, inc)
        return -d[0], -d[1], -d[2], -d[3]

    reversed_p = _rk4(rhs, (0.0, 0.0, 0.0, 0.0), grid.n_steps, grid.h, "adjoint")
    return np.ascontiguousarray(reversed_p[::-1])


def quadrature_cost(grid: TimeGrid, states: np.ndarray, controls: np.ndarray, w: CostWeights) -> float:
    """Composite trapezoid rule for the running cost k1*I + k2*T^2 + k3*V^2."""
    states = _check_grid_array("states", states, grid, 4)
    controls = _check_grid_array("controls", controls, grid, 2)
    f = w.k1 * states[:, 2] + w.k2 * controls[:, 0] ** 2 + w.k3 * controls[:, 1] ** 2
    return float(grid.h * (f.sum() - 0.5 * (f[0] + f[-1])))
