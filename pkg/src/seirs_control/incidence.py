"""Built-in incidence functions phi(S, N, I) with analytic partial derivatives.

Every kind vanishes when S = 0 or I = 0, and phi / I stays bounded as
I -> 0. The ``ratio`` attribute is that quotient, with its limit filled in
at I = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from seirs_control.errors import ConfigError

KINDS = ("mass_action", "saturated", "power", "ratio")

Fn = Callable[[float, float, float], float]


def _pow(x: float, a: float) -> float:
    # integer exponents keep the polynomial smooth through tiny negative values
    if a == int(a):
        return x ** int(a)
    return x**a if x > 0.0 else 0.0


@dataclass(frozen=True)
class IncidenceFunction:
    """An incidence law and its partials in (S, N, I) argument order.

    ``d1``, ``d2`` and ``d3`` are the derivatives with respect to S, N and I.
    """

    kind: str
    alpha: float = 0.0
    p: float = 1.0
    q: float = 1.0
    value: Fn = field(repr=False, compare=False, default=None)
    d1: Fn = field(repr=False, compare=False, default=None)
    d2: Fn = field(repr=False, compare=False, default=None)
    d3: Fn = field(repr=False, compare=False, default=None)
    ratio: Fn = field(repr=False, compare=False, default=None)

    def __call__(self, S: float, N: float, I: float) -> float:
        return self.value(S, N, I)

    def gradient(self, S: float, N: float, I: float) -> tuple[float, float, float]:
        return self.d1(S, N, I), self.d2(S, N, I), self.d3(S, N, I)

    def __reduce__(self):
        # closures do not pickle; rebuild from the declarative fields instead
        return make_incidence, (self.kind, self.alpha, self.p, self.q)


def _zero(S, N, I):
    return 0.0


def _mass_action() -> dict[str, Fn]:
    return dict(
        value=lambda S, N, I: S * I,
        d1=lambda S, N, I: I,
        d2=_zero,
        d3=lambda S, N, I: S,
        ratio=lambda S, N, I: S,
    )


def _saturated(alpha: float) -> dict[str, Fn]:
    def value(S, N, I):
        return S * I / (1.0 + alpha * I)

    def d1(S, N, I):
        return I / (1.0 + alpha * I)

    def d3(S, N, I):
        den = 1.0 + alpha * I
        return S / (den * den)

    def ratio(S, N, I):
        return S / (1.0 + alpha * I)

    return dict(value=value, d1=d1, d2=_zero, d3=d3, ratio=ratio)


def _power(p: float, q: float) -> dict[str, Fn]:
    def value(S, N, I):
        return _pow(I, p) * _pow(S, q)

    def d1(S, N, I):
        return q * _pow(I, p) * _pow(S, q - 1.0)

    def d3(S, N, I):
        return p * _pow(I, p - 1.0) * _pow(S, q)

    def ratio(S, N, I):
        if I == 0.0:
            return _pow(S, q) if p == 1.0 else 0.0
        return _pow(I, p - 1.0) * _pow(S, q)

    return dict(value=value, d1=d1, d2=_zero, d3=d3, ratio=ratio)


def _ratio(p: float, q: float, alpha: float) -> dict[str, Fn]:
    def value(S, N, I):
        return S * _pow(I, p) / (1.0 + alpha * _pow(I, q))

    def d1(S, N, I):
        return _pow(I, p) / (1.0 + alpha * _pow(I, q))

    def d3(S, N, I):
        den = 1.0 + alpha * _pow(I, q)
        num = p * _pow(I, p - 1.0) * den - _pow(I, p) * alpha * q * _pow(I, q - 1.0)
        return S * num / (den * den)

    def ratio(S, N, I):
        if I == 0.0:
            return S if p == 1.0 else 0.0
        return S * _pow(I, p - 1.0) / (1.0 + alpha * _pow(I, q))

    return dict(value=value, d1=d1, d2=_zero, d3=d3, ratio=ratio)


def make_incidence(
    kind: str = "mass_action", alpha: float = 0.0, p: float = 1.0, q: float = 1.0
) -> IncidenceFunction:
    """Build one of the built-in incidence laws.

    mass_action: S*I; saturated: S*I/(1 + alpha*I); power: I**p * S**q;
    ratio: S * I**p / (1 + alpha * I**q). Exponents below 1 are rejected since
    their derivatives blow up at the boundary of the population box.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown incidence kind {kind!r}; expected one of {', '.join(KINDS)}", key="kind")
    if not alpha >= 0.0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}", key="alpha")
    if kind in ("power", "ratio"):
        for name, val in (("p", p), ("q", q)):
            if not val >= 1.0:
                raise ConfigError(f"{name} must be >= 1 for the {kind} incidence, got {val}", key=name)

    if kind == "mass_action":
        fns = _mass_action()
    elif kind == "saturated":
        fns = _saturated(alpha)
    elif kind == "power":
        fns = _power(p, q)
    else:
        fns = _ratio(p, q, alpha)
    return IncidenceFunction(kind=kind, alpha=float(alpha), p=float(p), q=float(q), **fns)
