"""External air-temperature inputs Ta(rt) and their compactified forms Ta^nu(s).

With s = tanh(nu r t / 2) put a = (1+s)^(1/nu) and b = (1-s)^(1/nu), so that
e^{rt} = a/b. Then tanh(rt) = (a^2 - b^2)/(a^2 + b^2) and
sech(rt) = 2ab/(a^2 + b^2). Both are exact at s = +-1, which gives the
continuous extension to the invariant planes without special-casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class ForcingKind(str, Enum):
    TANH_SHIFT = "TanhShift"
    SECH_PULSE = "SechPulse"
    SEASONAL_HEATWAVE = "SeasonalHeatwave"
    CLIMATE_SHIFT = "ClimateShift"
    KHV_SHIFT = "KhvShift"
    FROZEN = "Frozen"


_SHIFT_KINDS = (ForcingKind.TANH_SHIFT, ForcingKind.CLIMATE_SHIFT, ForcingKind.KHV_SHIFT)
_DECAY = {
    ForcingKind.TANH_SHIFT: 2.0,
    ForcingKind.CLIMATE_SHIFT: 2.0,
    ForcingKind.KHV_SHIFT: 2.0,
    ForcingKind.SECH_PULSE: 1.0,
}


@dataclass(frozen=True)
class Forcing:
    """A canonical or scenario air-temperature input.

    Shift kinds move from ``ta_minus`` to ``ta_plus`` around ``center``; the
    pulse rises from ``ta_minus`` (its baseline, also its future limit) to
    ``ta_minus + ta_max``. The seasonal heatwave adds a pulse of height
    ``ta_plus`` at ``center`` on top of a January/July sinusoid. ``Frozen``
    holds ``ta_minus`` fixed.
    """

    kind: ForcingKind
    r: float = 1.0
    ta_minus: float = 0.0
    ta_plus: float = 0.0
    ta_max: float = 0.0
    ta_jan: float = -33.1
    ta_jul: float = 12.9
    center: float = 0.0
    nu: float | None = None

    def __post_init__(self):
        kind = ForcingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError("rate r must be positive")
        if self.nu is None:
            default = {ForcingKind.SECH_PULSE: 0.5}.get(kind, 1.0)
            object.__setattr__(self, "nu", default)
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        rho = self.rho
        if rho is not None and self.nu > rho:
            raise ValueError(f"nu={self.nu} exceeds the decay coefficient {rho}")

    @property
    def rho(self) -> float | None:
        return _DECAY.get(self.kind)

    @property
    def past_limit(self) -> float:
        if self.kind is ForcingKind.SEASONAL_HEATWAVE:
            raise ValueError("seasonal input has no past limit")
        return self.ta_minus

    @property
    def future_limit(self) -> float:
        if self.kind in _SHIFT_KINDS:
            return self.ta_plus
        if self.kind is ForcingKind.SEASONAL_HEATWAVE:
            raise ValueError("seasonal input has no future limit")
        return self.ta_minus

    @property
    def amplitude(self) -> float:
        return self.ta_max if self.kind is ForcingKind.SECH_PULSE else self.ta_plus

    def with_(self, **changes) -> "Forcing":
        return replace(self, **changes)


def tanh_shift(ta_plus: float, r: float, ta_minus: float = 0.0, nu: float = 1.0) -> Forcing:
    return Forcing(ForcingKind.TANH_SHIFT, r=r, ta_minus=ta_minus, ta_plus=ta_plus, nu=nu)


def sech_pulse(ta_max: float, r: float, ta_min: float = 0.0, nu: float = 0.5) -> Forcing:
    return Forcing(ForcingKind.SECH_PULSE, r=r, ta_minus=ta_min, ta_max=ta_max, nu=nu)


def _sech(x):
    x = np.abs(x)
    e = np.exp(-x)
    return 2.0 * e / (1.0 + e * e)


def forcing_value(f: Forcing, t):
    """Ta at time t (years). Vectorised over t."""
    t = np.asarray(t, dtype=float)
    kind = f.kind
    if kind is ForcingKind.FROZEN:
        val = np.full_like(t, f.ta_minus)
    elif kind in _SHIFT_KINDS:
        val = 0.5 * (f.ta_plus - f.ta_minus) * (np.tanh(f.r * (t - f.center)) + 1.0) + f.ta_minus
    elif kind is ForcingKind.SECH_PULSE:
        val = f.ta_minus + f.ta_max * _sech(f.r * (t - f.center))
    else:
        seasonal = 0.5 * (f.ta_jul - f.ta_jan) * (np.sin(2.0 * np.pi * t) + 1.0) + f.ta_jan
        val = seasonal + f.ta_plus * _sech(f.r * (t - f.center))
    return float(val) if val.ndim == 0 else val


def forcing_rate(f: Forcing, t):
    """dTa/dt at time t."""
    t = np.asarray(t, dtype=float)
    kind = f.kind
    if kind is ForcingKind.FROZEN:
        val = np.zeros_like(t)
    elif kind in _SHIFT_KINDS:
        val = 0.5 * (f.ta_plus - f.ta_minus) * f.r * _sech(f.r * (t - f.center)) ** 2
    else:
        u = f.r * (t - f.center)
        amp = f.ta_max if kind is ForcingKind.SECH_PULSE else f.ta_plus
        val = -amp * f.r * _sech(u) * np.tanh(u)
        if kind is ForcingKind.SEASONAL_HEATWAVE:
            val = val + np.pi * (f.ta_jul - f.ta_jan) * np.cos(2.0 * np.pi * t)
    return float(val) if val.ndim == 0 else val


def compactify(nu: float, r: float, t):
    """s = tanh(nu r t / 2)."""
    if r <= 0 or nu <= 0:
        raise ValueError("nu and r must be positive")
    return np.tanh(0.5 * nu * r * np.asarray(t, dtype=float))


def decompactify(nu: float, r: float, s):
    """Inverse of :func:`compactify`; needs |s| < 1."""
    if r <= 0 or nu <= 0:
        raise ValueError("nu and r must be positive")
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0) or not np.all(np.isfinite(s)):
        raise ValueError("decompactify needs |s| < 1")
    out = 2.0 * np.arctanh(s) / (nu * r)
    return float(out) if out.ndim == 0 else out


def ds_dt(nu: float, r: float, s):
    return 0.5 * nu * r * (1.0 - np.asarray(s, dtype=float) ** 2)


def _ab(f: Forcing, s):
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1.0):
        raise ValueError("s must lie in [-1, 1]")
    if f.center != 0.0:
        raise ValueError("compactified inputs are centred at t = 0")
    inv = 1.0 / f.nu
    return s, (1.0 + s) ** inv, (1.0 - s) ** inv


def _require_compactifiable(f: Forcing):
    if f.kind not in _SHIFT_KINDS and f.kind not in (ForcingKind.SECH_PULSE, ForcingKind.FROZEN):
        raise ValueError(f"{f.kind.value} has no compactified form")


def forcing_in_s(f: Forcing, s):
    """Continuously extended input Ta^nu(s) on [-1, 1]."""
    _require_compactifiable(f)
    s, a, b = _ab(f, s)
    a2, b2 = a * a, b * b
    if f.kind is ForcingKind.FROZEN:
        val = np.full_like(s, f.ta_minus)
    elif f.kind is ForcingKind.SECH_PULSE:
        val = f.ta_minus + f.ta_max * 2.0 * a * b / (a2 + b2)
    else:
        val = f.ta_minus + (f.ta_plus - f.ta_minus) * a2 / (a2 + b2)
    return float(val) if val.ndim == 0 else val


def forcing_rate_in_s(f: Forcing, s):
    """dTa/dt written as a function of s. Vanishes at s = +-1."""
    _require_compactifiable(f)
    s, a, b = _ab(f, s)
    a2, b2 = a * a, b * b
    den = a2 + b2
    if f.kind is ForcingKind.FROZEN:
        val = np.zeros_like(s)
    elif f.kind is ForcingKind.SECH_PULSE:
        val = -f.ta_max * f.r * (2.0 * a * b / den) * ((a2 - b2) / den)
    else:
        val = 0.5 * (f.ta_plus - f.ta_minus) * f.r * 4.0 * a2 * b2 / (den * den)
    return float(val) if val.ndim == 0 else val


def forcing_s_derivative(f: Forcing, s):
    """dTa^nu/ds for |s| < 1, via dTa/dt divided by ds/dt."""
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0):
        raise ValueError("derivative in s is evaluated on the open interval")
    val = np.asarray(forcing_rate_in_s(f, s)) / ds_dt(f.nu, f.r, s)
    return float(val) if val.ndim == 0 else val


# Scenario presets from the worked examples of the model.
def fig2_heatwave() -> Forcing:
    return Forcing(ForcingKind.SEASONAL_HEATWAVE, r=10.0, ta_plus=20.0, ta_jan=-33.1, ta_jul=12.9, center=10.25)


def fig3_climate_shift() -> Forcing:
    return Forcing(ForcingKind.CLIMATE_SHIFT, r=0.025, ta_minus=-10.1, ta_plus=-6.0, center=140.0)


def fig4_khv_shift() -> Forcing:
    return Forcing(ForcingKind.KHV_SHIFT, r=0.025, ta_minus=-5.0, ta_plus=2.0, center=2050.0)


def scalar_in_s(f: Forcing):
    """Math-only closures (Ta(s), dTa/dt(s)) for ODE right-hand sides."""
    _require_compactifiable(f)
    if f.center != 0.0:
        raise ValueError("compactified inputs are centred at t = 0")
    inv, lo, r = 1.0 / f.nu, f.ta_minus, f.r
    if f.kind is ForcingKind.FROZEN:
        return (lambda s: lo), (lambda s: 0.0)
    if f.kind is ForcingKind.SECH_PULSE:
        amp = f.ta_max

        def ta(s):
            a, b = (1.0 + s) ** inv, (1.0 - s) ** inv
            return lo + 2.0 * amp * a * b / (a * a + b * b)

        def rate(s):
            a, b = (1.0 + s) ** inv, (1.0 - s) ** inv
            d = a * a + b * b
            return -2.0 * amp * r * a * b * (a * a - b * b) / (d * d)
        return ta, rate

    jump = f.ta_plus - f.ta_minus

    def ta(s):
        a2, b2 = (1.0 + s) ** (2 * inv), (1.0 - s) ** (2 * inv)
        return lo + jump * a2 / (a2 + b2)

    def rate(s):
        a2, b2 = (1.0 + s) ** (2 * inv), (1.0 - s) ** (2 * inv)
        d = a2 + b2
        return 2.0 * jump * r * a2 * b2 / (d * d)
    return ta, rate


def scalar_in_t(f: Forcing):
    """Math-only Ta(t) closure for the nonautonomous right-hand side."""
    kind = f.kind
    lo, hi, r, c = f.ta_minus, f.ta_plus, f.r, f.center
    if kind is ForcingKind.FROZEN:
        return lambda t: lo
    if kind in _SHIFT_KINDS:
        half = 0.5 * (hi - lo)
        return lambda t: half * (math.tanh(r * (t - c)) + 1.0) + lo

    def sech(x):
        x = abs(x)
        e = math.exp(-x)
        return 2.0 * e / (1.0 + e * e)

    if kind is ForcingKind.SECH_PULSE:
        amp = f.ta_max
        return lambda t: lo + amp * sech(r * (t - c))
    half = 0.5 * (f.ta_jul - f.ta_jan)
    jan, two_pi = f.ta_jan, 2.0 * math.pi
    return lambda t: half * (math.sin(two_pi * t) + 1.0) + jan + hi * sech(r * (t - c))
