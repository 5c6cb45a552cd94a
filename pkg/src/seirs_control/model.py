"""State and costate dynamics of the controlled SEIRS model.

The right-hand sides are written twice over: a public form taking the small
named vectors below, and scalar kernels (``_state_kernel``, ``_adjoint_kernel``)
that the integrator calls with pre-sampled coefficients. The public functions
are thin wrappers around the kernels, so testing one tests the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from seirs_control.errors import ConfigError, DomainError
from seirs_control.incidence import IncidenceFunction

TWO_PI = 2.0 * math.pi


class StateVector(NamedTuple):
    S: float
    E: float
    I: float
    R: float

    @property
    def N(self) -> float:
        return self.S + self.E + self.I + self.R


class AdjointVector(NamedTuple):
    p1: float
    p2: float
    p3: float
    p4: float


class ControlVector(NamedTuple):
    T: float
    V: float


@dataclass(frozen=True)
class CostWeights:
    k1: float = 1.0
    k2: float = 0.01
    k3: float = 0.01

    def __post_init__(self):
        if not self.k1 >= 0.0:
            raise ConfigError(f"k1 must be >= 0, got {self.k1}", key="k1")
        for name in ("k2", "k3"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}", key=name)


@dataclass(frozen=True)
class ControlBounds:
    tau_max: float = 0.1
    nu_max: float = 0.4

    def __post_init__(self):
        if not self.tau_max > 0.0:
            raise ConfigError(f"tau_max must be > 0, got {self.tau_max}", key="tau_max")
        if not self.nu_max > 0.0:
            raise ConfigError(f"v_max must be > 0, got {self.nu_max}", key="v_max")


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t: float) -> float:
        return self.value

    def sample(self, times: np.ndarray) -> np.ndarray:
        return np.full(np.shape(times), float(self.value))

    def bounds(self) -> tuple[float, float]:
        return self.value, self.value


@dataclass(frozen=True)
class Cosine:
    """``mean * (1 + sign * per * cos(omega * t + phase))``."""

    mean: float
    per: float
    omega: float = TWO_PI
    phase: float = 0.0
    sign: float = 1.0

    def __call__(self, t: float) -> float:
        return self.mean * (1.0 + self.sign * self.per * math.cos(self.omega * t + self.phase))

    def sample(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        return self.mean * (1.0 + self.sign * self.per * np.cos(self.omega * times + self.phase))

    def bounds(self) -> tuple[float, float]:
        lo = self.mean * (1.0 - abs(self.per))
        hi = self.mean * (1.0 + abs(self.per))
        return (lo, hi) if self.mean >= 0 else (hi, lo)

    @property
    def period(self) -> float:
        return TWO_PI / self.omega


Coefficient = Union[Constant, Cosine]

PARAMETER_NAMES = ("Lambda", "beta", "mu", "eta", "epsilon", "gamma")


@dataclass(frozen=True)
class ParameterSet:
    Lambda: Coefficient
    beta: Coefficient
    mu: Coefficient
    eta: Coefficient
    epsilon: Coefficient
    gamma: Coefficient

    def at(self, t: float) -> tuple[float, float, float, float, float, float]:
        return (self.Lambda(t), self.beta(t), self.mu(t), self.eta(t), self.epsilon(t), self.gamma(t))

    def sample(self, times: np.ndarray) -> dict[str, np.ndarray]:
        return {name: getattr(self, name).sample(times) for name in PARAMETER_NAMES}

    def population_bound(self, N0: float) -> float:
        """Upper bound N0 + sup Lambda / inf mu on the total population.

        Returns ``inf`` when mu can reach zero.
        """
        mu_lo = self.mu.bounds()[0]
        if mu_lo <= 0.0:
            return math.inf
        return N0 + self.Lambda.bounds()[1] / mu_lo


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"non-finite input {v!r}")


def _state_kernel(S, E, I, R, T, V, Lam, beta, mu, eta, eps, gam, phi):
    force = beta * phi(S, S + E + I + R, I)
    return (
        Lam - force - mu * S + eta * R - V * S,
        force - (mu + eps) * E,
        eps * E - (mu + gam) * I - T * I,
        gam * I - (mu + eta) * R + T * I + V * S,
    )


def _adjoint_kernel(p1, p2, p3, p4, S, E, I, R, T, V, beta, mu, eta, eps, gam, k1, inc):
    N = S + E + I + R
    a = inc.d1(S, N, I)
    b = inc.d2(S, N, I)
    c = inc.d3(S, N, I)
    gap = (p1 - p2) * beta
    return (
        gap * (a + b) + p1 * (mu + V) - p4 * V,
        gap * b + p2 * (mu + eps) - p3 * eps,
        p3 * (mu + gam + T) + gap * (b + c) - p4 * (gam + T) - k1,
        gap * b + mu * p4 - eta * p1 + eta * p4,
    )


def state_rhs(
    t: float, x: StateVector, u: ControlVector, params: ParameterSet, inc: IncidenceFunction
) -> StateVector:
    """Time derivative of (S, E, I, R) under controls ``u`` at time ``t``."""
    _check_finite(t, *x, *u)
    Lam, beta, mu, eta, eps, gam = params.at(t)
    return StateVector(*_state_kernel(*x, *u, Lam, beta, mu, eta, eps, gam, inc.value))


def adjoint_rhs(
    t: float,
    p: AdjointVector,
    x: StateVector,
    u: ControlVector,
    params: ParameterSet,
    inc: IncidenceFunction,
    w: CostWeights,
) -> AdjointVector:
    """Costate derivative, i.e. minus the state gradient of the Hamiltonian."""
    _check_finite(t, *p, *x, *u)
    _, beta, mu, eta, eps, gam = params.at(t)
    return AdjointVector(*_adjoint_kernel(*p, *x, *u, beta, mu, eta, eps, gam, w.k1, inc))


def control_update(x: StateVector, p: AdjointVector, w: CostWeights, b: ControlBounds) -> ControlVector:
    """Pointwise minimizer of the Hamiltonian over the control box."""
    T = min(max(0.0, x.I * (p.p3 - p.p4) / (2.0 * w.k2)), b.tau_max)
    V = min(max(0.0, x.S * (p.p1 - p.p4) / (2.0 * w.k3)), b.nu_max)
    return ControlVector(T, V)


def control_update_arrays(
    states: np.ndarray, adjoints: np.ndarray, w: CostWeights, b: ControlBounds
) -> np.ndarray:
    """Vectorized :func:`control_update` over grid-shaped arrays, returning (n, 2)."""
    T = states[:, 2] * (adjoints[:, 2] - adjoints[:, 3]) / (2.0 * w.k2)
    V = states[:, 0] * (adjoints[:, 0] - adjoints[:, 3]) / (2.0 * w.k3)
    out = np.empty((len(states), 2))
    # maximum(0, -0.0) keeps the sign bit; adding 0.0 clears it
    out[:, 0] = np.minimum(np.maximum(T, 0.0), b.tau_max) + 0.0
    out[:, 1] = np.minimum(np.maximum(V, 0.0), b.nu_max) + 0.0
    return out


def hamiltonian(
    t: float,
    x: StateVector,
    p: AdjointVector,
    u: ControlVector,
    params: ParameterSet,
    inc: IncidenceFunction,
    w: CostWeights,
) -> float:
    dx = state_rhs(t, x, u, params, inc)
    running = w.k1 * x.I + w.k2 * u.T**2 + w.k3 * u.V**2
    return running + sum(pi * di for pi, di in zip(p, dx))
