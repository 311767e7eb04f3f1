"""Adaptive integration of the model systems, event location and bisection.

Stepping is delegated to scipy's DOP853 (explicit Runge-Kutta 8(5,3) with
dense output and event root refinement). This module only adds the model
systems, a blow-up guard and the trajectory container.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .forcing import Forcing, scalar_in_s, scalar_in_t
from .soil_model import SoilParams, equilibrium, scalar_kernels

T_LIMIT = 500.0
C_LIMIT = 1.0e4


class NumericalError(RuntimeError):
    """An integration or root-finding step failed."""


class BracketError(ValueError):
    """Bisection ends carry the same class."""


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    dense: bool = False
    event_tol: float = 1e-10

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-6):
            raise ValueError("rel_tol must lie in (0, 1e-6]")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")

    def halved(self) -> "IntegratorConfig":
        return IntegratorConfig(self.rel_tol / 2, self.abs_tol / 2, self.max_step, self.dense, self.event_tol)


@dataclass
class System:
    """An ODE system y' = rhs(t, y) plus metadata for output and guards."""

    name: str
    rhs: Callable[[float, Sequence[float]], list]
    labels: tuple[str, ...]
    params: SoilParams
    forcing: Forcing | None = None
    guard_T: int | None = 0
    guard_C: int | None = 1
    extra: dict = field(default_factory=dict)

    def air_temperature(self, t: np.ndarray, y: np.ndarray) -> np.ndarray | None:
        """Ta along a sampled solution, when it is defined by the system."""
        f = self.forcing
        if f is None:
            return None
        if "s" in self.labels:
            ta, _ = scalar_in_s(f)
            return np.array([ta(v) for v in y[:, self.labels.index("s")]])
        ta = scalar_in_t(f)
        return np.array([ta(v) for v in t])


def nonautonomous_system(p: SoilParams, f: Forcing) -> System:
    rs, _ = scalar_kernels(p)
    ta = scalar_in_t(f)
    k, Pi, eps = p.k, p.Pi, p.eps

    def rhs(t, y):
        T, C = y[0], y[1]
        R = rs(T)
        return [(-k * (T - ta(t)) + C * R) / eps, Pi - C * R]

    return System("nonautonomous", rhs, ("T", "C"), p, f)


def frozen_system(p: SoilParams, Ta: float) -> System:
    from .forcing import ForcingKind

    return nonautonomous_system(p, Forcing(ForcingKind.FROZEN, ta_minus=Ta))


def compactified_system(p: SoilParams, f: Forcing) -> System:
    rs, _ = scalar_kernels(p)
    ta, _ = scalar_in_s(f)
    k, Pi, eps = p.k, p.Pi, p.eps
    half = 0.5 * f.nu * f.r

    def rhs(t, y):
        T, C, s = y[0], y[1], y[2]
        R = rs(T)
        return [(-k * (T - ta(s)) + C * R) / eps, Pi - C * R, half * (1.0 - s * s)]

    return System("compactified", rhs, ("T", "C", "s"), p, f)


def layer_system(p: SoilParams, f: Forcing, C_frozen: float | None = None) -> System:
    """Fast-time layer problem with C frozen (default C^e at the pulse baseline)."""
    rs, _ = scalar_kernels(p)
    ta, _ = scalar_in_s(f)
    C0 = equilibrium(f.past_limit, p).C if C_frozen is None else C_frozen
    k = p.k
    srate = 0.5 * p.eps * f.nu * f.r

    def rhs(tau, y):
        T, s = y[0], y[1]
        return [-k * (T - ta(s)) + C0 * rs(T), srate * (1.0 - s * s)]

    return System("layer", rhs, ("T", "s"), p, f, guard_C=None, extra={"C": C0})


def desing_system(p: SoilParams, f: Forcing, reverse: bool = False) -> System:
    """Desingularised reduced flow in (T, s); see :mod:`soiltip.desing`."""
    rs, g = scalar_kernels(p)
    ta, rate = scalar_in_s(f)
    k, Pi = p.k, p.Pi
    half = 0.5 * f.nu * f.r
    sign = -1.0 if reverse else 1.0

    def rhs(t, y):
        T, s = y[0], y[1]
        a = ta(s)
        dT = rs(T) * (Pi - k * (T - a)) + k * rate(s)
        dS = k * (1.0 - (T - a) * g(T)) * half * (1.0 - s * s)
        return [sign * dT, sign * dS]

    return System("reduced-desingularized", rhs, ("T", "s"), p, f, guard_C=None)


SYSTEMS = {
    "nonautonomous": nonautonomous_system,
    "compactified": compactified_system,
    "layer": layer_system,
    "reduced-desingularized": desing_system,
}


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # shape (n, dim)
    labels: tuple[str, ...]
    termination: str  # "t_end" | "event" | "blow-up"
    events: dict = field(default_factory=dict)
    message: str = ""
    dense: Callable | None = None
    system: System | None = None

    def __getitem__(self, key: str) -> np.ndarray:
        return self.y[:, self.labels.index(key)]

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    def air_temperature(self) -> np.ndarray | None:
        return None if self.system is None else self.system.air_temperature(self.t, self.y)

    def to_csv(self, path, include_air: bool = True) -> None:
        write_trajectory_csv(self, path, include_air)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, path, include_air: bool = True) -> None:
    cols = {"t": traj.t}
    for i, lab in enumerate(traj.labels):
        cols[lab] = traj.y[:, i]
    if "C" not in cols and traj.system is not None and "C" in traj.system.extra:
        cols["C"] = np.full_like(traj.t, traj.system.extra["C"])
    order = [c for c in ("t", "T", "C", "s") if c in cols]
    if include_air:
        air = traj.air_temperature()
        if air is not None:
            cols["Ta"] = air
            order.append("Ta")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(order)
        for row in zip(*(cols[c] for c in order)):
            w.writerow([_fmt(v) for v in row])


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


def _guard_events(system: System):
    evs = []
    if system.guard_T is not None:
        i = system.guard_T

        def hot(t, y):
            return T_LIMIT - abs(y[i])
        hot.terminal = True
        evs.append(hot)
    if system.guard_C is not None:
        j = system.guard_C

        def carbon(t, y):
            return C_LIMIT - abs(y[j])
        carbon.terminal = True
        evs.append(carbon)
    return evs


def _wrap_event(ev: Callable, terminal: bool, direction: float):
    def fn(t, y):
        return ev(t, y)
    fn.terminal = getattr(ev, "terminal", terminal)
    fn.direction = getattr(ev, "direction", direction)
    return fn


def integrate(
    system: System,
    x0: Sequence[float],
    t_span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
    events: Sequence[Callable] = (),
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Integrate ``system`` from ``x0`` over ``t_span``.

    User events keep their ``terminal``/``direction`` attributes. The result
    records every event under its position in ``events`` and the reason the
    run stopped.
    """
    cfg = cfg or IntegratorConfig()
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state must be finite")
    if not t_span[1] > t_span[0]:
        raise ValueError("t_span must be increasing")
    user = [_wrap_event(e, False, 0.0) for e in events]
    guards = _guard_events(system)
    sol = solve_ivp(
        system.rhs,
        t_span,
        x0,
        method="DOP853",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=cfg.dense,
        events=user + guards or None,
        t_eval=t_eval,
    )
    t, y = sol.t, sol.y.T
    termination = "t_end"
    ev_times: dict = {}
    if sol.t_events is not None:
        for i in range(len(user)):
            ev_times[i] = (sol.t_events[i], sol.y_events[i])
        if any(len(sol.t_events[len(user) + j]) for j in range(len(guards))):
            termination = "blow-up"
        elif any(len(sol.t_events[i]) and user[i].terminal for i in range(len(user))):
            termination = "event"
    if sol.status == -1:
        termination = "blow-up"
    if sol.status == 1 and termination == "t_end":
        termination = "event"
    finite = np.all(np.isfinite(y), axis=1)
    if not finite.all():
        keep = np.argmax(~finite)
        t, y = t[:keep], y[:keep]
        termination = "blow-up"
    if len(t) == 0:
        t, y = np.array([t_span[0]]), x0[None, :]
    return Trajectory(t, y, system.labels, termination, ev_times, sol.message, sol.sol, system)


@dataclass
class Crossing:
    t: float
    state: np.ndarray


def integrate_to_event(
    system: System,
    x0: Sequence[float],
    event: Callable[[float, np.ndarray], float],
    t_span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
    direction: float = 0.0,
) -> tuple[Trajectory, Crossing | None]:
    """Integrate until ``event`` changes sign; ``None`` crossing means no event."""

    def ev(t, y):
        return event(t, y)
    ev.terminal = True
    ev.direction = direction
    traj = integrate(system, x0, t_span, cfg, events=[ev])
    times, states = traj.events[0]
    if len(times) == 0:
        return traj, None
    return traj, Crossing(float(times[0]), np.asarray(states[0], dtype=float))


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    class_lo: object
    class_hi: object
    iterations: int
    widths: tuple[float, ...] = ()

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def bisect_bracket(
    classifier: Callable[[float], object],
    lo: float,
    hi: float,
    tol: float,
    max_iter: int = 200,
    class_lo=None,
    class_hi=None,
) -> Bracket:
    """Shrink [lo, hi] around a change in ``classifier`` until width <= tol."""
    if not hi > lo:
        raise BracketError("bracket must satisfy lo < hi")
    c_lo = classifier(lo) if class_lo is None else class_lo
    c_hi = classifier(hi) if class_hi is None else class_hi
    if c_lo == c_hi:
        raise BracketError(f"classifier gives {c_lo!r} at both ends of [{lo}, {hi}]")
    widths = [hi - lo]
    n = 0
    while hi - lo > tol and n < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        c = classifier(mid)
        if c == c_lo:
            lo = mid
        elif c == c_hi:
            hi = mid
        else:
            # a third class inside the bracket: keep the half that still changes
            hi, c_hi = mid, c
        widths.append(hi - lo)
        n += 1
    return Bracket(lo, hi, c_lo, c_hi, n, tuple(widths))


def bisect_parameter(classifier: Callable[[float], object], bracket: tuple[float, float], tol: float) -> float:
    """Midpoint of the final bisection bracket around a class change."""
    return bisect_bracket(classifier, bracket[0], bracket[1], tol).mid
