"""Reduced slow flow on the critical manifold for the tanh warming shift.

On S the carbon level is slaved to (T, s), so the reduced problem lives in the
(T, s) plane. With the fold function phi = 1 - (T - Ta) g(T), the projected
flow is k phi dT/dt = N(T, s) and the time change dt = k phi dt_hat removes
the fold singularity:

    dT/dt_hat = N = Rs(T) (Pi - k (T - Ta(s))) + k dTa/dt(s)
    ds/dt_hat = k phi (nu r / 2) (1 - s^2)

Orientation is preserved on S1 (phi > 0) and reversed on S2 (phi < 0).
Folded singularities are equilibria of this flow on F1 (phi = 0, N = 0).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .forcing import scalar_in_s, tanh_shift
from .geometry import fold_kernels
from .integrator import (
    BracketError,
    IntegratorConfig,
    NumericalError,
    Trajectory,
    bisect_bracket,
    desing_system,
    integrate,
)
from .soil_model import SoilParams, equilibrium, scalar_kernels, t_a_inst


class FoldedKind(str, Enum):
    FS = "FS"
    FN = "FN"
    FDN = "FDN"
    FF = "FF"
    FSN_I = "FSN_I"


class NotFoundError(ValueError):
    """A requested rate or point does not exist in the searched range."""


S_SEED = 1e-6  # offset from s = -1 for the seed of W^u
FN_BALL = 1e-6  # capture radius around a folded node, scaled coordinates
T_SCALE = 10.0  # T is divided by this when measuring distances in (T, s)


class ReducedModel:
    """Scalar kernels of the reduced problem at fixed (Ta_plus, params).

    The numerator is affine in r: N = a(s) + r * q1(s) on F1, which is what
    makes the saddle-node rate a direct minimisation.
    """

    def __init__(self, Ta_plus: float, p: SoilParams):
        if not Ta_plus > 0:
            raise ValueError("Ta_plus must be positive")
        self.Ta_plus = Ta_plus
        self.p = p
        self.rs, self.g = scalar_kernels(p)
        self.t_f1, self.phi_T = fold_kernels(p)
        f1 = tanh_shift(Ta_plus, r=1.0)
        self.ta, rate1 = scalar_in_s(f1)
        self.rate1 = rate1  # dTa/dt at r = 1
        self._fsn = None

    def forcing(self, r: float):
        return tanh_shift(self.Ta_plus, r=r)

    def phi(self, T: float, s: float) -> float:
        return 1.0 - (T - self.ta(s)) * self.g(T)

    def numerator(self, T: float, s: float, r: float) -> float:
        p = self.p
        return self.rs(T) * (p.Pi - p.k * (T - self.ta(s))) + p.k * r * self.rate1(s)

    def rhs(self, T: float, s: float, r: float) -> tuple[float, float]:
        ds = self.p.k * self.phi(T, s) * 0.5 * r * (1.0 - s * s)
        return self.numerator(T, s, r), ds

    def fold_T(self, s: float) -> float:
        return self.t_f1(self.ta(s))

    def fold_numerator(self, s: float, r: float) -> float:
        return self.numerator(self.fold_T(s), s, r)

    def fold_split(self, s: float) -> tuple[float, float]:
        """(a, q1) with N on F1 equal to a + r q1."""
        T = self.fold_T(s)
        return self.numerator(T, s, 0.0), self.p.k * self.rate1(s)

    def critical_ratio(self, s: float) -> float:
        a, q1 = self.fold_split(s)
        return -a / q1 if q1 > 0 else math.inf

    def fsn_location(self) -> tuple[float, float]:
        """Cached (r_sn, s) from minimising the critical ratio along F1."""
        if self._fsn is None:
            self._fsn = _ratio_minimum(self)
        return self._fsn

    def jacobian(self, T: float, s: float, r: float, h: float = 1e-6) -> np.ndarray:
        J = np.empty((2, 2))
        hs = min(h, 0.5 * (1.0 - abs(s))) if abs(s) < 1 else h
        fp, fm = self.rhs(T + h, s, r), self.rhs(T - h, s, r)
        J[0, 0], J[1, 0] = (fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)
        fp, fm = self.rhs(T, s + hs, r), self.rhs(T, s - hs, r)
        J[0, 1], J[1, 1] = (fp[0] - fm[0]) / (2 * hs), (fp[1] - fm[1]) / (2 * hs)
        return J


_MODELS: dict = {}


def reduced_model(Ta_plus: float, p: SoilParams) -> ReducedModel:
    key = (Ta_plus, p)
    m = _MODELS.get(key)
    if m is None:
        if len(_MODELS) > 256:
            _MODELS.clear()
        m = _MODELS[key] = ReducedModel(Ta_plus, p)
    return m


def desing_rhs(T: float, s: float, r: float, Ta_plus: float, p: SoilParams) -> tuple[float, float]:
    """(dT/dt_hat, ds/dt_hat) of the desingularised reduced flow."""
    return reduced_model(Ta_plus, p).rhs(T, s, r)


@dataclass
class FoldedSingularity:
    T: float
    s: float
    r: float
    Ta_plus: float
    kind: FoldedKind
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: tuple[float, float] = (0.0, 0.0)

    @property
    def ratio(self) -> float | None:
        """Eigenvalue ratio in (0, 1) for a folded node."""
        if self.kind is not FoldedKind.FN:
            return None
        w = np.sort(np.abs(self.eigenvalues.real))
        return float(w[0] / w[1])

    def strong_direction(self) -> np.ndarray:
        i = int(np.argmax(np.abs(self.eigenvalues.real)))
        return self.eigenvectors[:, i].real

    def weak_direction(self) -> np.ndarray:
        i = int(np.argmin(np.abs(self.eigenvalues.real)))
        return self.eigenvectors[:, i].real


def classify_eigenvalues(w: np.ndarray, zero_tol: float = 1e-6, equal_tol: float = 1e-9) -> FoldedKind:
    scale = max(np.max(np.abs(w)), 1e-300)
    if np.any(np.abs(w.imag) > equal_tol * scale):
        return FoldedKind.FF
    re = np.sort(w.real)
    if np.min(np.abs(re)) < zero_tol * scale:
        return FoldedKind.FSN_I
    if re[0] * re[1] < 0:
        return FoldedKind.FS
    if abs(re[1] - re[0]) < equal_tol * scale:
        return FoldedKind.FDN
    return FoldedKind.FN


def _make_fs(m: ReducedModel, s: float, r: float, kind: FoldedKind | None = None) -> FoldedSingularity:
    T = m.fold_T(s)
    J = m.jacobian(T, s, r)
    w, V = np.linalg.eig(J)
    order = np.argsort(w.real)
    w, V = w[order], V[:, order]
    res = (abs(m.phi(T, s)), abs(m.numerator(T, s, r)))
    return FoldedSingularity(T, s, r, m.Ta_plus, kind or classify_eigenvalues(w), w, V, res)


def folded_equilibria(r: float, Ta_plus: float, p: SoilParams, n_scan: int = 200) -> list[FoldedSingularity]:
    """Folded singularities on F1 at rate r, ordered by s."""
    if not r > 0:
        raise ValueError("r must be positive")
    m = reduced_model(Ta_plus, p)
    # the saddle-node location is where a root pair is born; with it on the
    # grid every pair is bracketed however close to r_sn the rate is
    ss = np.union1d(np.linspace(-1.0, 1.0, n_scan + 2)[1:-1], [m.fsn_location()[1]])
    vals = [m.fold_numerator(s, r) for s in ss]
    out = []
    for i in range(len(ss) - 1):
        if vals[i] * vals[i + 1] < 0:
            s0 = brentq(m.fold_numerator, ss[i], ss[i + 1], args=(r,), xtol=1e-15, rtol=4 * np.finfo(float).eps)
            out.append(_make_fs(m, s0, r))
    return out


def _ratio_minimum(m: ReducedModel, n_scan: int = 400) -> tuple[float, float]:
    ss = np.linspace(-1.0, 1.0, n_scan + 2)[1:-1]
    vals = np.array([m.critical_ratio(s) for s in ss])
    i = int(np.argmin(vals))
    lo, hi = ss[max(i - 1, 0)], ss[min(i + 1, len(ss) - 1)]
    res = minimize_scalar(m.critical_ratio, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return float(res.fun), float(res.x)


def _exists_at(m: ReducedModel, r: float, n_scan: int = 400) -> bool:
    """Does the numerator on F1 change sign anywhere at rate r (max over s > 0)?"""
    ss = np.linspace(-1.0, 1.0, n_scan + 2)[1:-1]
    vals = np.array([m.fold_numerator(s, r) for s in ss])
    if vals.max() > 0:
        return True
    i = int(np.argmax(vals))
    lo, hi = ss[max(i - 1, 0)], ss[min(i + 1, len(ss) - 1)]
    res = minimize_scalar(lambda s: -m.fold_numerator(s, r), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return -res.fun > 0


def r_sn(Ta_plus: float, p: SoilParams, method: str = "ratio", tol: float = 1e-8) -> float:
    """Rate at which an FS/FN pair is born on F1 through a folded saddle-node.

    ``ratio`` minimises -a(s)/q1(s) directly; ``bisect`` bisects in r on
    whether any folded singularity exists. The two are independent routes to
    the same number.
    """
    m = reduced_model(Ta_plus, p)
    lo, hi = 1e-4, 10.0
    if method == "ratio":
        r, _ = m.fsn_location()
        if not (lo <= r <= hi):
            raise NotFoundError(f"saddle-node rate {r} outside [{lo}, {hi}]")
        return r
    if method == "bisect":
        if _exists_at(m, lo) or not _exists_at(m, hi):
            raise NotFoundError(f"no existence change for r in [{lo}, {hi}]")
        return bisect_bracket(lambda r: _exists_at(m, r), lo, hi, tol).mid
    raise ValueError(f"unknown method {method!r}")


def fsn_point(Ta_plus: float, p: SoilParams) -> FoldedSingularity:
    """The folded saddle-node at r = r_sn(Ta_plus)."""
    m = reduced_model(Ta_plus, p)
    r, s = m.fsn_location()
    return _make_fs(m, s, r, FoldedKind.FSN_I)


class CanardKind(str, Enum):
    GAMMA_S = "gamma_S"
    GAMMA_S_FAUX = "gamma_S_faux"
    GAMMA_N_STRONG = "gamma_N_strong"
    GAMMA_SN = "gamma_SN"


@dataclass
class SingularCanard:
    kind: CanardKind
    T: np.ndarray
    s: np.ndarray
    fs: FoldedSingularity
    params: SoilParams = field(repr=False)
    halves: tuple[np.ndarray, np.ndarray] = field(repr=False, default=())

    def branch_labels(self) -> np.ndarray:
        m = reduced_model(self.fs.Ta_plus, self.params)
        return np.array(["S1" if m.phi(T, s) > 0 else "S2" for T, s in zip(self.T, self.s)])


def _stop_events(m: ReducedModel, s_lo: float = -1 + 1e-7, s_hi: float = 1 - 1e-7, T_hot: float | None = None):
    def low(t, y):
        return y[1] - s_lo
    low.terminal = True

    def high(t, y):
        return s_hi - y[1]
    high.terminal = True
    evs = [low, high]
    if T_hot is not None:
        def hot(t, y):
            return T_hot - y[0]
        hot.terminal = True
        evs.append(hot)
    return evs


def _flow(m: ReducedModel, r: float, y0, reverse: bool, t_max: float, cfg: IntegratorConfig, events=()) -> Trajectory:
    sys = desing_system(m.p, m.forcing(r), reverse=reverse)
    return integrate(sys, y0, (0.0, t_max), cfg, events=list(events))


def singular_canard(
    fs: FoldedSingularity,
    which: CanardKind,
    p: SoilParams,
    delta: float = 1e-5,
    t_max: float = 2e5,
    cfg: IntegratorConfig | None = None,
) -> SingularCanard:
    """The singular canard through ``fs`` along the eigendirection ``which`` selects.

    Each half starts at fs +- delta * v and is integrated in reversed
    desingularised time for stable directions (gamma_S, gamma_N_strong,
    gamma_SN) and in forward time for the faux canard. Reversal is what
    makes the S2 half run forward in physical time.
    """
    which = CanardKind(which)
    m = reduced_model(fs.Ta_plus, p)
    cfg = cfg or IntegratorConfig()
    w = fs.eigenvalues.real
    if which is CanardKind.GAMMA_S or which is CanardKind.GAMMA_S_FAUX:
        if fs.kind is not FoldedKind.FS:
            raise ValueError("saddle canards need a folded saddle")
        idx = 0 if which is CanardKind.GAMMA_S else 1  # eigenvalues sorted ascending
        reverse = which is CanardKind.GAMMA_S
    elif which is CanardKind.GAMMA_N_STRONG:
        if fs.kind not in (FoldedKind.FN, FoldedKind.FDN):
            raise ValueError("strong canard needs a folded node")
        idx, reverse = int(np.argmax(np.abs(w))), w[np.argmax(np.abs(w))] < 0
    else:
        if fs.kind is not FoldedKind.FSN_I:
            raise ValueError("gamma_SN needs a folded saddle-node")
        idx = int(np.argmax(np.abs(w)))
        reverse = w[idx] < 0
    v = fs.eigenvectors[:, idx].real
    scale = np.array([T_SCALE, 1.0])
    v = v / np.linalg.norm(v / scale)
    if not np.all(np.isfinite(v)):
        raise ValueError("degenerate eigenvector")
    halves = []
    for sign in (+1.0, -1.0):
        y0 = np.array([fs.T, fs.s]) + sign * delta * v
        tr = _flow(m, fs.r, y0, reverse, t_max, cfg, _stop_events(m, T_hot=m.p.b))
        halves.append(np.vstack([[fs.T, fs.s], tr.y]))
    # S1 half first, judged by the side of F1 the half starts on
    a, b = halves
    if m.phi(*a[1]) < m.phi(*b[1]):
        a, b = b, a
    path = np.vstack([a[::-1], b[1:]])
    return SingularCanard(which, path[:, 0], path[:, 1], fs, p, (a, b))


class ReducedOutcome(str, Enum):
    TRACKING = "tracking"
    JUMP = "jump"
    FOLDED_NODE = "folded-node"
    FAILED = "failed"


@dataclass
class ReducedManifold:
    r: float
    Ta_plus: float
    outcome: ReducedOutcome
    trajectory: Trajectory
    end: np.ndarray
    singularities: list[FoldedSingularity]
    end_numerator: float | None = None


def seed_point(Ta_plus: float, p: SoilParams) -> np.ndarray:
    """W^u of the past equilibrium leaves along the s-direction."""
    return np.array([equilibrium(0.0, p).T, -1.0 + S_SEED])


def reduced_unstable_manifold(
    r: float,
    Ta_plus: float,
    p: SoilParams,
    cfg: IntegratorConfig | None = None,
    t_max: float = 1e9,
    ball: float = FN_BALL,
    events=(),
) -> ReducedManifold:
    """Follow W^u of the past equilibrium until tracking, a jump, or capture by a folded node."""
    cfg = cfg or IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    m = reduced_model(Ta_plus, p)
    sings = folded_equilibria(r, Ta_plus, p)
    nodes = [fs for fs in sings if fs.kind in (FoldedKind.FN, FoldedKind.FDN, FoldedKind.FF) and np.all(fs.eigenvalues.real < 0)]

    def fold(t, y):
        return m.phi(y[0], y[1])
    fold.terminal, fold.direction = True, -1

    def done(t, y):
        return y[1] - (1.0 - S_SEED)
    done.terminal = True

    evs = [fold, done]
    for fs in nodes:
        def near(t, y, fs=fs):
            return ((y[0] - fs.T) / T_SCALE) ** 2 + (y[1] - fs.s) ** 2 - ball * ball
        near.terminal = True
        evs.append(near)
    evs.extend(events)
    tr = _flow(m, r, seed_point(Ta_plus, p), False, t_max, cfg, evs)
    n_user = len(events)
    fired = [len(tr.events[i][0]) > 0 for i in range(len(evs))]
    end = tr.y[-1]
    if fired[0]:
        end = tr.events[0][1][0]
        return ReducedManifold(r, Ta_plus, ReducedOutcome.JUMP, tr, end, sings, m.numerator(end[0], end[1], r))
    if fired[1]:
        return ReducedManifold(r, Ta_plus, ReducedOutcome.TRACKING, tr, tr.events[1][1][0], sings)
    if any(fired[2:len(evs) - n_user]):
        return ReducedManifold(r, Ta_plus, ReducedOutcome.FOLDED_NODE, tr, end, sings, m.numerator(end[0], end[1], r))
    return ReducedManifold(r, Ta_plus, ReducedOutcome.FAILED, tr, end, sings)


def _outcome(r: float, Ta_plus: float, p: SoilParams) -> ReducedOutcome:
    res = reduced_unstable_manifold(r, Ta_plus, p)
    if res.outcome is ReducedOutcome.FAILED:
        raise NumericalError(f"reduced manifold unresolved at r={r}, Ta_plus={Ta_plus}: {res.trajectory.message}")
    return res.outcome


def _upper_jump_rate(Ta_plus: float, p: SoilParams, start: float, r_max: float = 1e3) -> float:
    r = start
    while _outcome(r, Ta_plus, p) is not ReducedOutcome.JUMP:
        r *= 1.25
        if r > r_max:
            raise BracketError(f"no jump below r={r_max} at Ta_plus={Ta_plus}")
    return r


def critical_rate_simple(Ta_plus: float, p: SoilParams, tol: float = 1e-8) -> float:
    """Rate at which W^u coalesces with the folded-saddle canard (simple case).

    Bisects between tracking (below) and a jump at F1 (above).
    """
    lo = r_sn(Ta_plus, p) * (1.0 - 1e-9)
    if _outcome(lo, Ta_plus, p) is not ReducedOutcome.TRACKING:
        raise BracketError(f"W^u does not track at r_sn for Ta_plus={Ta_plus}; not the simple case")
    hi = _upper_jump_rate(Ta_plus, p, lo * 1.02)
    return bisect_bracket(lambda r: _outcome(r, Ta_plus, p) is ReducedOutcome.JUMP, lo, hi, tol).mid


def section_distance(r: float, Ta_plus: float, p: SoilParams, canard: SingularCanard, s_section: float) -> float:
    """Signed T offset (W^u minus canard) on the section s = s_section."""
    m = reduced_model(Ta_plus, p)
    # first crossing of the section walking back from the folded point
    half = canard.halves[0]
    d = half[:, 1] - s_section
    idx = np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
    if len(idx) == 0:
        raise ValueError("section outside the traced canard")
    i = int(idx[0])
    w = d[i] / (d[i] - d[i + 1])
    T_can = float(half[i, 0] + w * (half[i + 1, 0] - half[i, 0]))

    def sec(t, y):
        return y[1] - s_section
    sec.terminal, sec.direction = True, 1

    def fold(t, y):
        return m.phi(y[0], y[1])
    fold.terminal, fold.direction = True, -1
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    tr = _flow(m, r, seed_point(Ta_plus, p), False, 1e9, cfg, [sec, fold])
    hits = tr.events[0]
    if len(tr.events[1][0]):
        return math.inf  # reached F1 before the section: on the jump side
    if len(hits[0]) == 0:
        raise NumericalError("W^u never reached the section")
    return float(hits[1][0][0] - T_can)


def critical_rate_simple_by_section(Ta_plus: float, p: SoilParams, tol: float = 1e-8, offset: float = 0.005) -> float:
    """Second route to the simple-case rate: sign of the section offset to gamma_S."""
    lo = r_sn(Ta_plus, p) * (1.0 + 1e-6)

    def side(r):
        fss = [fs for fs in folded_equilibria(r, Ta_plus, p) if fs.kind is FoldedKind.FS]
        if not fss:
            raise NumericalError("no folded saddle")
        fs = fss[0]
        can = singular_canard(fs, CanardKind.GAMMA_S, p, delta=1e-7)
        return section_distance(r, Ta_plus, p, can, fs.s - offset) > 0

    hi = lo * 1.02
    s_lo = side(lo)
    while side(hi) == s_lo:
        hi *= 1.25
        if hi > 1e3:
            raise BracketError("no side change")
    return bisect_bracket(side, lo, hi, tol, class_lo=s_lo).mid


@dataclass
class ComplicatedRange:
    r_sn: float
    r_ns: float
    lower_outcome: ReducedOutcome

    @property
    def width(self) -> float:
        return self.r_ns - self.r_sn


def critical_range_complicated(Ta_plus: float, p: SoilParams, tol: float = 1e-8) -> ComplicatedRange:
    """(r_SN, r_Ns): W^u is captured by the folded node for r in between."""
    rsn = r_sn(Ta_plus, p)
    below = _outcome(rsn * (1 - 1e-9), Ta_plus, p)
    just_above = rsn * (1.0 + 1e-6)
    lo_class = _outcome(just_above, Ta_plus, p)
    if lo_class is not ReducedOutcome.FOLDED_NODE:
        raise BracketError(f"W^u is not captured by the folded node just above r_sn at Ta_plus={Ta_plus}")
    hi = _upper_jump_rate(Ta_plus, p, just_above * 1.01)
    br = bisect_bracket(lambda r: _outcome(r, Ta_plus, p), just_above, hi, tol, class_lo=lo_class)
    return ComplicatedRange(rsn, br.mid, below)


def degenerate_offset(Ta_plus: float, p: SoilParams, offset: float = 0.005) -> float:
    """Signed section offset between W^u and gamma_SN at r = r_sn(Ta_plus)."""
    fs = fsn_point(Ta_plus, p)
    can = singular_canard(fs, CanardKind.GAMMA_SN, p, delta=1e-7)
    return section_distance(fs.r, Ta_plus, p, can, fs.s - offset)


def degenerate_point(p: SoilParams, bracket: tuple[float, float] = (1.5, 3.5), tol: float = 1e-5) -> tuple[float, float]:
    """(Ta_plus_c, r_c) where the simple and complicated cases meet."""
    lo, hi = bracket
    br = bisect_bracket(lambda a: degenerate_offset(a, p) > 0, lo, hi, tol)
    Ta_c = br.mid
    return Ta_c, r_sn(Ta_c, p)


def real_faux_bookkeeping(r: float, Ta_plus: float, p: SoilParams, capture: float = 1e-3) -> list[str]:
    """Branch sequence of W^u inside the complicated range.

    W^u is captured by the folded node from S1. The S2 half of the folded
    saddle's faux canard runs, in desingularised time, from FS into the same
    node, so in physical time the continuation through FN along S2 is drawn
    back to FS and leaves onto S1 along the other faux half. A full real-faux
    passage returns ``["S1", "FN", "S2", "FS", "S1"]``; a shorter list says
    where the chain broke.
    """
    res = reduced_unstable_manifold(r, Ta_plus, p)
    labels = ["S1"]
    if res.outcome is not ReducedOutcome.FOLDED_NODE:
        labels.append(res.outcome.value)
        return labels
    labels.append("FN")
    node = min(
        (fs for fs in res.singularities if fs.kind in (FoldedKind.FN, FoldedKind.FDN, FoldedKind.FF)),
        key=lambda fs: abs(fs.T - res.end[0]) / T_SCALE + abs(fs.s - res.end[1]),
    )
    saddles = [fs for fs in res.singularities if fs.kind is FoldedKind.FS]
    if not saddles:
        return labels
    faux = singular_canard(saddles[0], CanardKind.GAMMA_S_FAUX, p, delta=1e-7, t_max=1e6)
    m = reduced_model(Ta_plus, p)
    for half in faux.halves:
        if m.phi(*half[1]) < 0:
            d = np.hypot((half[:, 0] - node.T) / T_SCALE, half[:, 1] - node.s)
            on_s2 = all(m.phi(T, s) < 1e-6 for T, s in half[1:-1])
            if d[-1] < capture and on_s2:
                labels += ["S2", "FS"]
    if labels[-1] == "FS" and any(m.phi(*h[1]) > 0 for h in faux.halves):
        labels.append("S1")
    return labels


@dataclass
class SingularDiagram:
    rows: list[tuple[float, str, float]]  # (Ta_plus, curve_id, r)
    degenerate: tuple[float, float] | None
    failures: list[tuple[float, str, str]]
    singularities: list[FoldedSingularity] = field(default_factory=list)

    def curve(self, curve_id: str) -> tuple[np.ndarray, np.ndarray]:
        pts = [(a, r) for a, c, r in self.rows if c == curve_id]
        return np.array([q[0] for q in pts]), np.array([q[1] for q in pts])


REGION_BELOW = {"FSN-I": "tracking", "e-to-FS": "tracking", "e-to-FSN-I_c": "tracking", "e-to-FN_s": "critical-range"}


def singular_diagram(Ta_plus_grid, p: SoilParams, degenerate: tuple[float, float] | None = None, tol: float = 1e-6) -> SingularDiagram:
    """Curves of the singular R-tipping diagram over a grid of shift amplitudes."""
    grid = np.asarray(Ta_plus_grid, dtype=float)
    low = t_a_inst(p) + 0.05
    if np.any(grid < low - 1e-12) or np.any(grid > 10):
        raise ValueError(f"grid must lie in [{low:.6f}, 10]")
    if degenerate is None:
        try:
            degenerate = degenerate_point(p)
        except (BracketError, NumericalError, ValueError):
            degenerate = None
    rows, failures, sings = [], [], []
    for a in grid:
        try:
            rsn = r_sn(float(a), p)
            rows.append((float(a), "FSN-I", rsn))
            sings.append(fsn_point(float(a), p))
        except (NotFoundError, NumericalError, ValueError) as e:
            failures.append((float(a), "FSN-I", str(e)))
            continue
        simple = degenerate is None or a < degenerate[0]
        try:
            if simple:
                rows.append((float(a), "e-to-FS", critical_rate_simple(float(a), p, tol)))
            else:
                cr = critical_range_complicated(float(a), p, tol)
                rows.append((float(a), "e-to-FSN-I_c", cr.r_sn))
                rows.append((float(a), "e-to-FN_s", cr.r_ns))
        except (BracketError, NumericalError, NotFoundError) as e:
            failures.append((float(a), "e-to-FS" if simple else "e-to-FN_s", str(e)))
    if degenerate is not None:
        rows.append((degenerate[0], "degenerate", degenerate[1]))
    return SingularDiagram(rows, degenerate, failures, sings)


def write_singular_diagram_csv(path, diagram: SingularDiagram) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["Ta_plus", "curve_id", "r"])
        for a, c, r in diagram.rows:
            w.writerow([format(a, ".17g"), c, format(r, ".17g")])


def write_folded_csv(path, items: list[FoldedSingularity]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["Ta_plus", "r", "T", "s", "kind", "eig1", "eig2"])
        for fs in items:
            e1, e2 = (complex(x) for x in fs.eigenvalues)
            fmt = lambda z: format(z.real, ".17g") if abs(z.imag) == 0 else f"{z.real:.17g}{z.imag:+.17g}j"  # noqa: E731
            w.writerow([format(fs.Ta_plus, ".17g"), format(fs.r, ".17g"), format(fs.T, ".17g"), format(fs.s, ".17g"), fs.kind.value, fmt(e1), fmt(e2)])
