"""Scenario definitions and their INI-style config documents.

A config document has up to six sections; every key is optional and falls
back to the reference defaults::

    [initial]
    S0 = 0.98
    E0 = 0
    I0 = 0.01
    R0 = 0.01

    [rates]
    mu = 0.05
    epsilon = 0.03
    gamma = 0.05
    eta = 0.041

    [weights]
    k1 = 1
    k2 = 0.01
    k3 = 0.01

    [bounds]
    tau_max = 0.1
    v_max = 0.4
    tf = 25

    [forcing]
    per = 0
    phase = 0.26
    beta = 0.56
    Lambda = 0.05

    [incidence]
    kind = mass_action
    alpha = 0
    p = 1
    q = 1

With forcing amplitude ``per`` the transmission coefficient is
``beta * (1 - per * cos(2 pi t + phase))`` and the recruitment rate is
``Lambda * (1 + per * cos(2 pi t))``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from functools import cached_property

from seirs_control.errors import ConfigError
from seirs_control.incidence import KINDS, IncidenceFunction, make_incidence
from seirs_control.model import (
    TWO_PI,
    Constant,
    ControlBounds,
    Cosine,
    CostWeights,
    ParameterSet,
    StateVector,
)

# section -> ordered (config key, Scenario attribute)
LAYOUT: dict[str, tuple[tuple[str, str], ...]] = {
    "initial": (("S0", "S0"), ("E0", "E0"), ("I0", "I0"), ("R0", "R0")),
    "rates": (("mu", "mu"), ("epsilon", "epsilon"), ("gamma", "gamma"), ("eta", "eta")),
    "weights": (("k1", "k1"), ("k2", "k2"), ("k3", "k3")),
    "bounds": (("tau_max", "tau_max"), ("v_max", "v_max"), ("tf", "tf")),
    "forcing": (("per", "per"), ("phase", "phase"), ("beta", "beta"), ("Lambda", "Lambda")),
    "incidence": (("kind", "incidence"), ("alpha", "alpha"), ("p", "p"), ("q", "q")),
}

SWEEPABLE = ("mu", "gamma", "epsilon", "eta")


@dataclass(frozen=True)
class Scenario:
    S0: float = 0.98
    E0: float = 0.0
    I0: float = 0.01
    R0: float = 0.01
    mu: float = 0.05
    epsilon: float = 0.03
    gamma: float = 0.05
    eta: float = 0.041
    k1: float = 1.0
    k2: float = 0.01
    k3: float = 0.01
    tau_max: float = 0.1
    v_max: float = 0.4
    tf: float = 25.0
    per: float = 0.0
    phase: float = 0.26
    beta: float = 0.56
    Lambda: float = 0.05
    incidence: str = "mass_action"
    alpha: float = 0.0
    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name == "incidence":
                continue
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
                raise ConfigError(f"{f.name} must be a finite number, got {val!r}", key=f.name)
            object.__setattr__(self, f.name, float(val))
        for name in ("S0", "E0", "I0", "R0"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}", key=name)
        if not self.S0 + self.E0 + self.I0 + self.R0 > 0.0:
            raise ConfigError("initial population S0+E0+I0+R0 must be > 0", key="S0")
        if not 0.0 <= self.per < 1.0:
            raise ConfigError(f"per must lie in [0, 1), got {self.per}", key="per")
        if not self.tf > 0.0:
            raise ConfigError(f"tf must be > 0, got {self.tf}", key="tf")
        for name in ("mu", "epsilon", "gamma", "eta", "beta", "Lambda"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}", key=name)
        # constructing these runs their own validation
        self.weights
        self.bounds
        self.incidence_function

    @property
    def initial(self) -> StateVector:
        return StateVector(self.S0, self.E0, self.I0, self.R0)

    @property
    def N0(self) -> float:
        return self.S0 + self.E0 + self.I0 + self.R0

    @property
    def weights(self) -> CostWeights:
        return CostWeights(self.k1, self.k2, self.k3)

    @property
    def bounds(self) -> ControlBounds:
        return ControlBounds(self.tau_max, self.v_max)

    @cached_property
    def incidence_function(self) -> IncidenceFunction:
        return make_incidence(self.incidence, alpha=self.alpha, p=self.p, q=self.q)

    @property
    def parameters(self) -> ParameterSet:
        if self.per == 0.0:
            Lam, beta = Constant(self.Lambda), Constant(self.beta)
        else:
            Lam = Cosine(self.Lambda, self.per, TWO_PI, 0.0, 1.0)
            beta = Cosine(self.beta, self.per, TWO_PI, self.phase, -1.0)
        return ParameterSet(
            Lambda=Lam,
            beta=beta,
            mu=Constant(self.mu),
            eta=Constant(self.eta),
            epsilon=Constant(self.epsilon),
            gamma=Constant(self.gamma),
        )

    @property
    def population_bound(self) -> float:
        return self.parameters.population_bound(self.N0)


def table1_default() -> Scenario:
    return Scenario()


def _locate(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].split(":", 1)[0].strip() == key:
            return lineno
    return None


def parse_scenario(text: str) -> Scenario:
    """Parse a config document into a validated :class:`Scenario`."""
    cp = configparser.ConfigParser(interpolation=None, default_section="\x00", inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", line=getattr(exc, "lineno", None)) from exc

    values: dict[str, object] = {}
    for section in cp.sections():
        if section not in LAYOUT:
            raise ConfigError(
                f"unknown section [{section}]; expected one of {', '.join(LAYOUT)}",
                key=section,
                line=_locate_section(text, section),
            )
        known = dict(LAYOUT[section])
        for key, raw in cp.items(section):
            line = _locate(text, section, key)
            if key not in known:
                raise ConfigError(
                    f"unknown key {section}.{key} (line {line}); allowed: {', '.join(known)}", key=key, line=line
                )
            attr = known[key]
            if attr == "incidence":
                values[attr] = raw.strip()
                continue
            try:
                values[attr] = float(raw)
            except ValueError:
                raise ConfigError(f"{section}.{key} (line {line}) is not a number: {raw!r}", key=key, line=line) from None

    try:
        return Scenario(**values)
    except ConfigError as exc:
        if exc.key is not None and exc.line is None:
            for section, pairs in LAYOUT.items():
                for key, attr in pairs:
                    if exc.key in (key, attr):
                        exc.line = _locate(text, section, key)
        raise


def _locate_section(text: str, section: str) -> int | None:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == f"[{section}]":
            return lineno
    return None


def serialize_scenario(s: Scenario) -> str:
    """Render every field of ``s`` as a config document; floats use repr so they round-trip."""
    out = []
    for section, pairs in LAYOUT.items():
        out.append(f"[{section}]")
        for key, attr in pairs:
            val = getattr(s, attr)
            out.append(f"{key} = {val if isinstance(val, str) else repr(float(val))}")
        out.append("")
    return "\n".join(out)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(
                f"cannot sweep {self.parameter!r}; choose one of {', '.join(SWEEPABLE)}", key="parameter"
            )
        if not self.start <= self.stop:
            raise ConfigError(f"sweep start {self.start} exceeds stop {self.stop}", key="start")
        if not self.step > 0.0:
            raise ConfigError(f"sweep step must be > 0, got {self.step}", key="step")
        n = (self.stop - self.start) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ConfigError(
                f"sweep range [{self.start}, {self.stop}] is not a whole number of steps of {self.step}", key="step"
            )

    @property
    def values(self) -> list[float]:
        n = round((self.stop - self.start) / self.step)
        # rounding strips the accumulated float noise from start + i*step
        return [round(self.start + i * self.step, 12) for i in range(n + 1)]


def expand_sweep(spec: SweepSpec, base: Scenario) -> list[tuple[float, Scenario]]:
    """One scenario per lattice value, with only ``spec.parameter`` replaced."""
    return [(v, replace(base, **{spec.parameter: v})) for v in spec.values]


__all__ = [
    "KINDS",
    "LAYOUT",
    "SWEEPABLE",
    "Scenario",
    "SweepSpec",
    "expand_sweep",
    "parse_scenario",
    "serialize_scenario",
    "table1_default",
]
