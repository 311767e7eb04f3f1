"""Soil-carbon model: physical constants, respiration, right-hand sides, equilibria.

Units are rescaled throughout: temperature in degrees C, carbon in kg m^-2,
time in years. ``eps = mu/A`` and ``k = lambda/A`` are stored as derived fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class RespirationKind(str, Enum):
    MONOTONE = "Monotone"
    MODIFIED = "Modified"
    MODIFIED_CLAMPED = "ModifiedClampedBelowZero"


class ParamError(ValueError):
    """Raised for an invalid parameter set or parameter file."""


@dataclass(frozen=True)
class SoilParams:
    mu: float = 2.5e6
    lam: float = 5.049e6
    A: float = 3.9e7
    Pi: float = 1.055
    alpha: float = math.log(2.5) / 10.0
    Rs0: float = 0.01
    c: float = 10.0
    Tstar: float = 70.0
    respiration_kind: RespirationKind = RespirationKind.MODIFIED
    eps: float = field(init=False, repr=False)
    k: float = field(init=False, repr=False)
    b: float = field(init=False, repr=False)
    _log_norm: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("mu", "lam", "A", "Pi", "alpha", "Rs0", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParamError(f"{name} must be finite and strictly positive, got {v!r}")
        if not math.isfinite(self.Tstar):
            raise ParamError("Tstar must be finite")
        kind = RespirationKind(self.respiration_kind)
        object.__setattr__(self, "respiration_kind", kind)
        b = self.Tstar + math.log(self.c) / (self.alpha + self.c * self.alpha)
        object.__setattr__(self, "eps", self.mu / self.A)
        object.__setattr__(self, "k", self.lam / self.A)
        object.__setattr__(self, "b", b)
        # log(e^{alpha b} + e^{-c alpha b})
        ab = self.alpha * b
        object.__setattr__(self, "_log_norm", float(np.logaddexp(ab, -self.c * ab)))

    def with_(self, **changes) -> "SoilParams":
        return replace(self, **changes)


# parameter file keys -> dataclass field names
PARAM_KEYS = {
    "mu": "mu",
    "lambda": "lam",
    "A": "A",
    "Pi": "Pi",
    "alpha": "alpha",
    "Rs0": "Rs0",
    "c": "c",
    "Tstar": "Tstar",
    "respiration_kind": "respiration_kind",
}


def params_to_text(p: SoilParams) -> str:
    lines = []
    for key, attr in PARAM_KEYS.items():
        v = getattr(p, attr)
        lines.append(f"{key}={v.value if isinstance(v, Enum) else repr(float(v))}")
    return "\n".join(lines) + "\n"


def params_from_mapping(values: dict) -> SoilParams:
    kwargs = {}
    for key, v in values.items():
        if key not in PARAM_KEYS:
            raise ParamError(f"unknown parameter key {key!r}")
        attr = PARAM_KEYS[key]
        if attr == "respiration_kind":
            try:
                kwargs[attr] = RespirationKind(v)
            except ValueError:
                opts = ", ".join(k.value for k in RespirationKind)
                raise ParamError(f"respiration_kind must be one of {opts}") from None
        else:
            try:
                kwargs[attr] = float(v)
            except (TypeError, ValueError):
                raise ParamError(f"{key} must be a number, got {v!r}") from None
    return SoilParams(**kwargs)


def _log_rs_modified(T, p: SoilParams):
    x = np.asarray(T, dtype=float) - p.b
    return math.log(p.Rs0) + p._log_norm - np.logaddexp(-p.alpha * x, p.c * p.alpha * x)


def _check_finite(T):
    T = np.asarray(T, dtype=float)
    if not np.all(np.isfinite(T)):
        raise ValueError("temperature must be finite")
    return T


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def respiration(T, p: SoilParams):
    """Soil respiration rate Rs(T) in 1/y. Accepts scalars or arrays."""
    Ta = _check_finite(T)
    kind = p.respiration_kind
    if kind is RespirationKind.MONOTONE:
        val = p.Rs0 * np.exp(p.alpha * Ta)
    else:
        val = np.exp(_log_rs_modified(Ta, p))
        if kind is RespirationKind.MODIFIED_CLAMPED:
            val = np.where(Ta <= 0.0, 0.0, val)
    return _out(val, T)


def respiration_log_derivative(T, p: SoilParams):
    """g(T) = Rs'(T)/Rs(T). For the clamped kind this is the unclamped value."""
    Ta = _check_finite(T)
    if p.respiration_kind is RespirationKind.MONOTONE:
        val = np.full_like(Ta, p.alpha)
    else:
        z = (1.0 + p.c) * p.alpha * (Ta - p.b)
        w = 0.5 * (1.0 + np.tanh(0.5 * z))  # logistic(z), overflow-free
        val = p.alpha * ((1.0 - w) - p.c * w)
    return _out(val, T)


def respiration_derivative(T, p: SoilParams):
    Ta = _check_finite(T)
    val = np.asarray(respiration(Ta, p)) * np.asarray(respiration_log_derivative(Ta, p))
    return _out(val, T)


def rhs(T, C, Ta, p: SoilParams):
    """Return (f1, f2) with eps dT/dt = f1 and dC/dt = f2."""
    R = respiration(T, p)
    CR = C * R
    return -p.k * (T - Ta) + CR, p.Pi - CR


@dataclass(frozen=True)
class State:
    T: float
    C: float


def equilibrium(Ta: float, p: SoilParams) -> State:
    """The unique equilibrium of the frozen system at air temperature Ta."""
    T = Ta + p.Pi / p.k
    R = float(respiration(T, p))
    if R <= 0.0:
        raise ParamError(f"no equilibrium at Ta={Ta}: respiration vanishes at T={T}")
    return State(T, p.Pi / R)


def frozen_jacobian(T: float, C: float, Ta: float, p: SoilParams) -> np.ndarray:
    """Jacobian of (f1/eps, f2) with respect to (T, C)."""
    R = respiration(T, p)
    dR = respiration_derivative(T, p)
    if p.respiration_kind is RespirationKind.MODIFIED_CLAMPED and T <= 0.0:
        dR = 0.0
    return np.array(
        [[(-p.k + C * dR) / p.eps, R / p.eps], [-C * dR, -R]],
        dtype=float,
    )


def t_a_inst(p: SoilParams) -> float:
    """Air temperature whose F1 threshold passes through e(0), monotone approximation."""
    q = p.alpha * p.Pi / p.k
    return -(1.0 + math.log(q) - q) / p.alpha


def scalar_kernels(p: SoilParams):
    """Fast math-only (Rs, g) closures for use inside ODE right-hand sides."""
    alpha, c, b, Rs0 = p.alpha, p.c, p.b, p.Rs0
    kind = p.respiration_kind
    log_pref = math.log(Rs0) + p._log_norm
    ca = c * alpha
    ga = (1.0 + c) * alpha
    exp, log1p, tanh = math.exp, math.log1p, math.tanh

    if kind is RespirationKind.MONOTONE:
        def rs(T):
            return Rs0 * exp(alpha * T)

        def g(T):
            return alpha
        return rs, g

    def rs_mod(T):
        x = T - b
        u, v = -alpha * x, ca * x
        m = u if u > v else v
        return exp(log_pref - m - log1p(exp(-abs(u - v))))

    def g(T):
        w = 0.5 * (1.0 + tanh(0.5 * ga * (T - b)))
        return alpha * ((1.0 - w) - c * w)

    if kind is RespirationKind.MODIFIED_CLAMPED:
        def rs(T):
            return 0.0 if T <= 0.0 else rs_mod(T)
        return rs, g
    return rs_mod, g


__all__ = [
    "RespirationKind",
    "ParamError",
    "SoilParams",
    "State",
    "PARAM_KEYS",
    "params_to_text",
    "params_from_mapping",
    "respiration",
    "respiration_derivative",
    "respiration_log_derivative",
    "rhs",
    "equilibrium",
    "frozen_jacobian",
    "t_a_inst",
    "scalar_kernels",
]
