"""Tracking / critical range / R-tipping for eps > 0, plus the shooting searches.

A trajectory of the compactified system is classified by tube tests around
the instantaneous critical manifold at air temperature Ta(s):

* it R-tips if it ever comes within ``delta3`` of the hot branch S3;
* it is in the critical range if it stays within ``delta2`` of the repelling
  branch S2 for at least ``t_min`` years without reaching S3;
* otherwise it tracks.

Both tube tests are vectorised through the monotonicity of C_S on each
branch: T_S3(C) lies within delta of T exactly when C lies between C_S at
the two ends of the window (clipped to the branch).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import IntEnum

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline

from .forcing import (
    Forcing,
    ForcingKind,
    fig2_heatwave,
    fig3_climate_shift,
    fig4_khv_shift,
    forcing_in_s,
    forcing_value,
    sech_pulse,
    tanh_shift,
)
from .geometry import carbon_on_manifold, fold_temperatures, layer_equilibria
from .integrator import (
    BracketError,
    IntegratorConfig,
    NumericalError,
    Trajectory,
    bisect_bracket,
    compactified_system,
    frozen_system,
    integrate,
    integrate_to_event,
    layer_system,
    nonautonomous_system,
)
from .soil_model import RespirationKind, SoilParams, equilibrium, frozen_jacobian

SEED = 1e-6
S_END = 1.0 - 1e-6
SETTLE = 1e-4


class TippingClass(IntEnum):
    TRACKING = 0
    CRITICAL_RANGE = 1
    RTIPPING = 2


@dataclass(frozen=True)
class TubeConfig:
    delta2: float = 1.0
    delta3: float = 1.0
    t_min: float | None = None  # None: 0.5 for shifts, 0.5 eps for pulses

    def min_residence(self, f: Forcing, p: SoilParams) -> float:
        if self.t_min is not None:
            return self.t_min
        return 0.5 * p.eps if f.kind is ForcingKind.SECH_PULSE else 0.5


class FoldTable:
    """Cubic interpolants of T_F1(Ta), T_F2(Ta) over an air-temperature range."""

    def __init__(self, p: SoilParams, lo: float, hi: float, n: int = 241):
        if hi - lo < 1e-9:
            hi = lo + 1e-3
        pad = 0.01 * (hi - lo) + 1e-6
        self.grid = np.linspace(lo - pad, hi + pad, n)
        pairs = [fold_temperatures(a, p) for a in self.grid]
        self.f1 = CubicSpline(self.grid, [q[0] for q in pairs])
        self.f2 = CubicSpline(self.grid, [q[1] for q in pairs])

    def __call__(self, Ta):
        Ta = np.asarray(Ta, dtype=float)
        return self.f1(Ta), self.f2(Ta)


_TABLES: dict = {}


def fold_table(p: SoilParams, lo: float, hi: float) -> FoldTable:
    key = (p, round(lo, 9), round(hi, 9))
    tab = _TABLES.get(key)
    if tab is None:
        if len(_TABLES) > 64:
            _TABLES.clear()
        tab = _TABLES[key] = FoldTable(p, lo, hi)
    return tab


def _forcing_range(f: Forcing) -> tuple[float, float]:
    if f.kind is ForcingKind.SECH_PULSE:
        vals = (f.ta_minus, f.ta_minus + f.ta_max)
    elif f.kind is ForcingKind.SEASONAL_HEATWAVE:
        vals = (f.ta_jan, f.ta_jul + f.ta_plus)
    elif f.kind is ForcingKind.FROZEN:
        vals = (f.ta_minus, f.ta_minus)
    else:
        vals = (f.ta_minus, f.ta_plus)
    return min(vals), max(vals)


def tube_masks(T, C, Ta, p: SoilParams, tubes: TubeConfig, table: FoldTable):
    """Boolean masks (in S2 tube, in S3 tube) for sampled states."""
    T, C, Ta = (np.asarray(x, dtype=float) for x in (T, C, Ta))
    F1, F2 = table(Ta)
    d3, d2 = tubes.delta3, tubes.delta2
    lo3 = np.maximum(T - d3, F2)
    hi3 = T + d3
    ok3 = hi3 > F2
    with np.errstate(invalid="ignore", over="ignore"):
        in3 = ok3 & (carbon_on_manifold(lo3, Ta, p) < C) & (C < carbon_on_manifold(np.maximum(hi3, F2), Ta, p))
        lo2 = np.maximum(T - d2, F1)
        hi2 = np.minimum(T + d2, F2)
        # on the repelling side of the lower fold, so S1 passages near F1 do not count
        ok2 = (hi2 > lo2) & (T > F1) & (T < F2)
        in2 = ok2 & (carbon_on_manifold(hi2, Ta, p) < C) & (C < carbon_on_manifold(lo2, Ta, p))
    return in2 & ~in3, in3


@dataclass
class Classification:
    cls: TippingClass
    s2_residence: float
    first_s3_time: float | None
    max_T: float


def _fine_samples(traj: Trajectory, per_step: int = 8):
    if traj.dense is None or len(traj.t) < 2:
        return traj.t, traj.y
    t = traj.t
    frac = np.linspace(0.0, 1.0, per_step, endpoint=False)
    fine = (t[:-1, None] + np.diff(t)[:, None] * frac[None, :]).ravel()
    fine = np.append(fine, t[-1])
    return fine, traj.dense(fine).T


def classify_detail(traj: Trajectory, f: Forcing, p: SoilParams, tubes: TubeConfig | None = None) -> Classification:
    tubes = tubes or TubeConfig()
    t, y = _fine_samples(traj)
    labels = traj.labels
    T = y[:, labels.index("T")]
    C = y[:, labels.index("C")]
    if "s" in labels:
        Ta = forcing_in_s(f, np.clip(y[:, labels.index("s")], -1.0, 1.0))
    else:
        Ta = forcing_value(f, t)
    table = fold_table(p, *_forcing_range(f))
    in2, in3 = tube_masks(T, C, Ta, p, tubes, table)
    first3 = float(t[np.argmax(in3)]) if in3.any() else None
    both = in2[:-1] & in2[1:]
    residence = float(np.sum(np.diff(t)[both]))
    if first3 is not None:
        cls = TippingClass.RTIPPING
    elif residence >= tubes.min_residence(f, p):
        cls = TippingClass.CRITICAL_RANGE
    else:
        cls = TippingClass.TRACKING
    return Classification(cls, residence, first3, float(T.max()))


def classify(traj: Trajectory, f: Forcing, p: SoilParams, tubes: TubeConfig | None = None) -> TippingClass:
    return classify_detail(traj, f, p, tubes).cls


def _require_analysis_kind(f: Forcing):
    if f.kind not in (ForcingKind.TANH_SHIFT, ForcingKind.SECH_PULSE):
        raise ValueError("unstable manifolds are computed for TanhShift or SechPulse inputs")


def unstable_direction(f: Forcing, p: SoilParams) -> np.ndarray:
    """Unit eigenvector of the past equilibrium for eigenvalue nu r (s-direction)."""
    e = equilibrium(f.past_limit, p)
    J = frozen_jacobian(e.T, e.C, f.past_limit, p)
    h = 1e-7
    slope = (forcing_in_s(f, -1.0 + h) - forcing_in_s(f, -1.0)) / h
    col = np.array([p.k * slope / p.eps, 0.0])
    lam = f.nu * f.r
    vTC = np.linalg.solve(J - lam * np.eye(2), -col)
    v = np.array([vTC[0], vTC[1], 1.0])
    return v / np.linalg.norm(v)


def unstable_manifold(
    f: Forcing,
    r: float | None,
    p: SoilParams,
    cfg: IntegratorConfig | None = None,
    extra_time: float = 5000.0,
) -> Trajectory:
    """W^u of the past equilibrium, run until it settles at the future equilibrium."""
    _require_analysis_kind(f)
    if r is not None:
        f = f.with_(r=r)
    cfg = cfg or IntegratorConfig(dense=True)
    if not cfg.dense:
        cfg = IntegratorConfig(cfg.rel_tol, cfg.abs_tol, cfg.max_step, True, cfg.event_tol)
    e_minus = equilibrium(f.past_limit, p)
    e_plus = equilibrium(f.future_limit, p)
    v = unstable_direction(f, p)
    x0 = np.array([e_minus.T, e_minus.C, -1.0]) + SEED * v
    sysm = compactified_system(p, f)

    def settled(t, y):
        d = math.hypot(y[0] - e_plus.T, y[1] - e_plus.C)
        return max(S_END - y[2], d - SETTLE)
    settled.terminal, settled.direction = True, -1
    t_end = 2.0 * math.atanh(S_END) / (f.nu * f.r) + extra_time
    return integrate(sysm, x0, (0.0, t_end), cfg, events=[settled])


def classify_rate(f: Forcing, r: float, p: SoilParams, cfg: IntegratorConfig | None = None, tubes: TubeConfig | None = None) -> TippingClass:
    traj = unstable_manifold(f, r, p, cfg)
    if traj.termination == "blow-up":
        raise NumericalError(f"blow-up at r={r}")
    return classify(traj, f.with_(r=r), p, tubes)


@dataclass(frozen=True)
class CanardBracket:
    r_lo: float
    r_hi: float
    class_lo: TippingClass
    class_hi: TippingClass
    kind: str

    @property
    def mid(self) -> float:
        return 0.5 * (self.r_lo + self.r_hi)


def _to_bracket(br, kind: str) -> CanardBracket:
    return CanardBracket(br.lo, br.hi, TippingClass(br.class_lo), TippingClass(br.class_hi), kind)


def _default_rate_range(f: Forcing) -> tuple[float, float]:
    return (1e-3, 1.0) if f.kind is ForcingKind.TANH_SHIFT else (1e-2, 30.0)


def critical_range_bounds(
    f: Forcing,
    amplitude: float,
    p: SoilParams,
    tol: float = 1e-6,
    r_range: tuple[float, float] | None = None,
    n_scan: int = 24,
    which: str = "first",
    cfg: IntegratorConfig | None = None,
    tubes: TubeConfig | None = None,
) -> tuple[CanardBracket, CanardBracket]:
    """Brackets on both sides of a critical range of r at one amplitude.

    A log scan locates a Tracking/RTipping change (``which`` picks the first
    or last one in increasing r); bisection with the three-class classifier
    then isolates the critical-range cells between them and refines each side.
    When the critical range is narrower than ``tol`` both brackets coincide.
    """
    _require_analysis_kind(f)
    f = f.with_(ta_max=amplitude) if f.kind is ForcingKind.SECH_PULSE else f.with_(ta_plus=amplitude)
    lo, hi = r_range or _default_rate_range(f)
    rates = np.geomspace(lo, hi, n_scan)
    cache: dict[float, TippingClass] = {}

    def cls(r):
        if r not in cache:
            cache[r] = classify_rate(f, r, p, cfg, tubes)
        return cache[r]

    classes = [cls(r) for r in rates]
    tip = [c == TippingClass.RTIPPING for c in classes]
    changes = [i for i in range(len(rates) - 1) if tip[i] != tip[i + 1]]
    if not changes:
        raise BracketError(f"no tipping boundary for r in [{lo}, {hi}] at amplitude {amplitude}")
    i = changes[0] if which == "first" else changes[-1]
    # step is +1 when the non-tipping side lies at larger r
    j, step = (i, -1) if tip[i + 1] else (i + 1, 1)
    k = j - step  # the tipping sample

    def refine(r_a, c_a, r_b, c_b):
        lo_r, hi_r, c_lo, c_hi = (r_a, r_b, c_a, c_b) if r_a < r_b else (r_b, r_a, c_b, c_a)
        br = bisect_bracket(cls, lo_r, hi_r, tol, class_lo=c_lo, class_hi=c_hi)
        return _to_bracket(br, f"{TippingClass(br.class_lo).name.lower()}-{TippingClass(br.class_hi).name.lower()}")

    if classes[j] == TippingClass.CRITICAL_RANGE:
        near = refine(rates[k], classes[k], rates[j], classes[j])
        m = j
        while 0 <= m + step < len(rates) and classes[m + step] == TippingClass.CRITICAL_RANGE:
            m += step
        if 0 <= m + step < len(rates):
            far = refine(rates[m], classes[m], rates[m + step], classes[m + step])
        else:
            far = near  # the range runs off the scanned interval
    else:
        # tracking next to tipping: look for a critical-range cell in between
        br = bisect_bracket(cls, min(rates[j], rates[k]), max(rates[j], rates[k]), tol,
                            class_lo=classes[min(j, k)], class_hi=classes[max(j, k)])
        crs = [r for r, c in ((br.lo, br.class_lo), (br.hi, br.class_hi)) if c == TippingClass.CRITICAL_RANGE]
        if not crs:
            edge = _to_bracket(br, "tracking-rtipping")
            return edge, edge
        near = refine(rates[k], classes[k], crs[0], TippingClass.CRITICAL_RANGE)
        far = refine(crs[0], TippingClass.CRITICAL_RANGE, rates[j], classes[j])
    lower, upper = sorted((near, far), key=lambda q: q.r_lo)
    return lower, upper


@dataclass
class TippingDiagram:
    kind: ForcingKind
    amplitudes: np.ndarray
    rates: np.ndarray
    classes: np.ndarray  # shape (n_amp, n_rate), -1 for failed cells
    failures: list = field(default_factory=list)

    def column(self, amplitude: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.amplitudes - amplitude)))
        return self.classes[i]

    def column_transitions(self, amplitude: float) -> list[tuple[float, int, int]]:
        """Changes between maximal runs of tipping and non-tipping cells along r."""
        col = self.column(amplitude)
        tip = col == TippingClass.RTIPPING
        out = []
        for j in range(len(col) - 1):
            if tip[j] != tip[j + 1]:
                out.append((0.5 * (self.rates[j] + self.rates[j + 1]), int(col[j]), int(col[j + 1])))
        return out

    def tipping_clusters(self):
        """Connected components (4-neighbour) of R-tipping cells."""
        labels, n = ndimage.label(self.classes == TippingClass.RTIPPING)
        return labels, n

    def isolated_clusters(self) -> list[dict]:
        """R-tipping clusters other than the largest one, with their extents."""
        labels, n = self.tipping_clusters()
        if n == 0:
            return []
        sizes = ndimage.sum(np.ones_like(labels), labels, index=range(1, n + 1))
        main = int(np.argmax(sizes)) + 1
        out = []
        for lab in range(1, n + 1):
            if lab == main:
                continue
            ia, ir = np.nonzero(labels == lab)
            out.append(
                {
                    "cells": int(len(ia)),
                    "amplitude": (float(self.amplitudes[ia.min()]), float(self.amplitudes[ia.max()])),
                    "rate": (float(self.rates[ir.min()]), float(self.rates[ir.max()])),
                }
            )
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["amplitude", "r", "class"])
            for i, a in enumerate(self.amplitudes):
                for j, r in enumerate(self.rates):
                    w.writerow([format(float(a), ".17g"), format(float(r), ".17g"), int(self.classes[i, j])])


def read_diagram_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    amps = sorted({float(r[0]) for r in rows})
    rates = sorted({float(r[1]) for r in rows})
    grid = np.full((len(amps), len(rates)), -1, dtype=int)
    ai = {a: i for i, a in enumerate(amps)}
    ri = {r: j for j, r in enumerate(rates)}
    for a, r, c in rows:
        grid[ai[float(a)], ri[float(r)]] = int(c)
    return np.array(amps), np.array(rates), grid


def _family_forcing(kind: ForcingKind, amplitude: float, r: float, nu: float | None = None) -> Forcing:
    if kind is ForcingKind.TANH_SHIFT:
        return tanh_shift(amplitude, r, nu=nu or 1.0)
    if kind is ForcingKind.SECH_PULSE:
        return sech_pulse(amplitude, r, nu=nu or 0.5)
    raise ValueError("diagrams are drawn for TanhShift or SechPulse families")


def _cell(args):
    kind, amp, r, p, cfg, tubes = args
    try:
        f = _family_forcing(kind, amp, r)
        return int(classify_rate(f, r, p, cfg, tubes)), None
    except (NumericalError, ValueError, ArithmeticError) as e:
        return -1, f"{amp},{r}: {e}"


def regular_diagram(
    kind: ForcingKind | str,
    amplitude_grid,
    r_grid,
    p: SoilParams,
    jobs: int = 1,
    cfg: IntegratorConfig | None = None,
    tubes: TubeConfig | None = None,
) -> TippingDiagram:
    """Classify every (amplitude, r) cell; ``jobs > 1`` uses a process pool."""
    kind = ForcingKind(kind)
    amps = np.asarray(amplitude_grid, dtype=float)
    rates = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(amps) <= 0) or np.any(np.diff(rates) <= 0):
        raise ValueError("grids must be strictly increasing")
    if np.any(rates <= 0):
        raise ValueError("rates must be positive")
    tasks = [(kind, float(a), float(r), p, cfg, tubes) for a in amps for r in rates]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_cell, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        results = [_cell(t) for t in tasks]
    classes = np.array([c for c, _ in results], dtype=int).reshape(len(amps), len(rates))
    failures = [m for _, m in results if m]
    return TippingDiagram(kind, amps, rates, classes, failures)


# Frozen-system canard search


FROZEN_BRACKET = (53.0, 55.5)


def frozen_outcome(C0: float, Ta: float, T0: float, p: SoilParams, cfg: IntegratorConfig | None = None, t_end: float = 400.0) -> bool:
    """True when the frozen trajectory from (T0, C0) jumps past the upper fold (with head)."""
    T_F2 = fold_temperatures(Ta, p)[1]
    sysm = frozen_system(p, Ta)
    _, hit = integrate_to_event(sysm, [T0, C0], lambda t, y: y[0] - T_F2, (0.0, t_end), cfg, direction=1)
    return hit is not None


def frozen_canard_search(
    Ta: float = 0.0,
    T0: float = 0.0,
    p: SoilParams | None = None,
    tol: float = 1e-10,
    bracket: tuple[float, float] = FROZEN_BRACKET,
    cfg: IntegratorConfig | None = None,
):
    """Boundary C(0) between canards without head and with head at fixed Ta."""
    p = p or SoilParams()
    br = bisect_bracket(lambda c: frozen_outcome(c, Ta, T0, p, cfg), bracket[0], bracket[1], tol)
    return br


# Fast heatwave: layer problem


def layer_outcome(Ta_max: float, r: float, p: SoilParams, cfg: IntegratorConfig | None = None, nu: float = 0.5) -> str:
    """Terminal attractor of the layer orbit from the past saddle: 'e_plus' or 'm3_plus'."""
    f = sech_pulse(Ta_max, r, nu=nu)
    eq = layer_equilibria(f, p)
    sysm = layer_system(p, f, eq.C)
    seed = eq["e_minus"]
    # eigenvector of the s-eigenvalue; pure s-direction when dTa/ds vanishes at s = -1
    k = int(np.argmax(seed.eigenvalues.real))
    v = seed.eigenvectors[:, k].real
    if v[1] < 0:
        v = -v
    x0 = np.array([seed.T, -1.0]) + SEED * v / abs(v[1])
    cfg = cfg or IntegratorConfig()
    s_stop = 1.0 - 1e-10

    def end(t, y):
        return y[1] - s_stop
    end.terminal = True
    t_max = 4.0 * (math.atanh(s_stop) + 10.0) / (p.eps * f.nu * r) + 1e3
    traj = integrate(sysm, x0, (0.0, t_max), cfg, events=[end])
    if traj.termination == "blow-up":
        raise NumericalError(f"layer orbit blew up at r={r}")
    T_end = traj.y[-1, 0]
    return "m3_plus" if T_end > eq["m2_plus"].T else "e_plus"


def layer_critical_rate(Ta_max: float, p: SoilParams, tol: float = 1e-8, bracket: tuple[float, float] = (1.0, 100.0)) -> float:
    """Rate at which the layer orbit from the past saddle meets the saddle m2+."""
    return bisect_bracket(lambda r: layer_outcome(Ta_max, r, p), bracket[0], bracket[1], tol).mid


# Scenario reproductions


@dataclass
class ScenarioSummary:
    onset_year: float | None
    duration_years: float
    peak_T: float
    mean_warming_at_tip: float | None
    hot_mean_T: float | None
    threshold_year: float | None
    mean_warming_at_threshold: float | None
    final_T: float
    final_Ta: float

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)


@dataclass
class ScenarioResult:
    name: str
    trajectory: Trajectory
    forcing: Forcing
    params: SoilParams
    summary: ScenarioSummary


SCENARIOS = ("fig2", "fig3", "fig4")
FIG4_START = 2000.0


def scenario_setup(name: str, p: SoilParams | None = None, tstar_fig4: float = 35.0, fig4_start: float = FIG4_START):
    """(forcing, params, x0, t_span) for a named scenario."""
    name = name.lower()
    base = p or SoilParams()
    if name == "fig2":
        return fig2_heatwave(), base, (-10.0, 120.0), (0.0, 60.0)
    if name == "fig3":
        f = fig3_climate_shift()
        return f, base, (equilibrium(f.ta_minus, base).T, 120.0), (0.0, 500.0)
    if name == "fig4":
        q = base.with_(Pi=0.09, respiration_kind=RespirationKind.MODIFIED_CLAMPED, Tstar=tstar_fig4)
        return fig4_khv_shift(), q, (-6.0, 396.0), (fig4_start, 2300.0)
    raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


def _first_up(t, x):
    """Linearly interpolated time of the first upward zero of x, or None."""
    idx = np.nonzero((x[:-1] <= 0) & (x[1:] > 0))[0]
    if len(idx) == 0:
        return None
    i = idx[0]
    return float(t[i] - x[i] * (t[i + 1] - t[i]) / (x[i + 1] - x[i]))


def scenario_run(name: str, p: SoilParams | None = None, cfg: IntegratorConfig | None = None, **kw) -> ScenarioResult:
    """Integrate a worked scenario and summarise its hot-state episode.

    Onset is the first upward crossing of the upper fold temperature T_F2 at
    the instantaneous Ta. Duration is the time spent in the S3 tube, and its
    mean temperature is reported as ``hot_mean_T``. ``mean_warming_at_tip``
    is Ta at the first S3-tube entry minus the starting Ta; the threshold
    pair records the first crossing of the lower fold T_F1 instead.
    """
    f, q, x0, span = scenario_setup(name, p, **kw)
    cfg = cfg or IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10, dense=True)
    max_step = min(cfg.max_step, 0.01) if f.kind is ForcingKind.SEASONAL_HEATWAVE else cfg.max_step
    cfg = IntegratorConfig(cfg.rel_tol, cfg.abs_tol, max_step, True, cfg.event_tol)
    traj = integrate(nonautonomous_system(q, f), x0, span, cfg)
    if traj.termination == "blow-up":
        raise NumericalError(f"scenario {name} blew up: {traj.message}")
    t, y = _fine_samples(traj)
    T, C = y[:, 0], y[:, 1]
    Ta = forcing_value(f, t)
    table = fold_table(q, *_forcing_range(f))
    F1, F2 = table(Ta)
    _, in3 = tube_masks(T, C, Ta, q, TubeConfig(), table)
    ta0 = forcing_value(f, span[0])
    onset = _first_up(t, T - F2)
    threshold = _first_up(t, T - F1)
    both = in3[:-1] & in3[1:]
    duration = float(np.sum(np.diff(t)[both]))
    if in3.any():
        entry = float(t[np.argmax(in3)])
        warming = float(forcing_value(f, entry) - ta0)
        hot_T = float(np.mean(T[in3]))
    else:
        warming = hot_T = None
    summary = ScenarioSummary(
        onset_year=onset,
        duration_years=duration,
        peak_T=float(T.max()),
        mean_warming_at_tip=warming,
        hot_mean_T=hot_T,
        threshold_year=threshold,
        mean_warming_at_threshold=None if threshold is None else float(forcing_value(f, threshold) - ta0),
        final_T=float(T[-1]),
        final_Ta=float(Ta[-1]),
    )
    return ScenarioResult(name, traj, f, q, summary)


def env_output_dir(default: str = ".") -> str:
    return os.environ.get("SOILTIP_OUTPUT_DIR", default)
