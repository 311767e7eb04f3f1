"""Critical manifolds, folds, layer equilibria and the heatwave manifold branches."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .forcing import Forcing, ForcingKind, forcing_in_s, sech_pulse
from .soil_model import (
    RespirationKind,
    SoilParams,
    equilibrium,
    respiration,
    respiration_derivative,
    respiration_log_derivative,
    scalar_kernels,
)


class RangeError(ValueError):
    """A fold or root expected inside a temperature range was not found."""


class DegeneracyError(ValueError):
    """Root count on an invariant plane differs from the generic value."""


def carbon_on_manifold(T, Ta: float, p: SoilParams):
    """C_S(T) = k (T - Ta) / Rs(T), the carbon level that zeroes f1."""
    T = np.asarray(T, dtype=float)
    R = np.asarray(respiration(T, p))
    with np.errstate(divide="ignore", invalid="ignore"):
        C = np.where(R > 0, p.k * (T - Ta) / np.where(R > 0, R, 1.0), np.inf)
    return float(C) if C.ndim == 0 else C


def fold_function(T, Ta: float, p: SoilParams):
    """1 - (T - Ta) g(T); zero at folds, positive on attracting branches."""
    T = np.asarray(T, dtype=float)
    val = 1.0 - (T - Ta) * np.asarray(respiration_log_derivative(T, p))
    return float(val) if val.ndim == 0 else val


def df1_dT_on_manifold(T, Ta: float, p: SoilParams):
    return -p.k * np.asarray(fold_function(T, Ta, p))


def _scan_roots(fn, lo: float, hi: float, step: float, xtol: float = 1e-12) -> list[float]:
    grid = np.arange(lo, hi + 0.5 * step, step)
    vals = np.array([fn(x) for x in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(brentq(fn, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
    return roots


def fold_temperatures(Ta: float, p: SoilParams, T_range: tuple[float, float] | None = None):
    """(T_F1, T_F2) by a 0.1 degree scan of the fold function then Brent refinement.

    T_F2 is ``None`` for the monotone respiration kind, which has one fold.
    """
    lo, hi = T_range if T_range is not None else (Ta + 1e-9, max(Ta, p.b) + 100.0)
    lo = max(lo, Ta + 1e-9)
    if p.respiration_kind is RespirationKind.MODIFIED_CLAMPED:
        lo = max(lo, 1e-9)
    roots = _scan_roots(lambda T: fold_function(T, Ta, p), lo, hi, 0.1)
    if not roots:
        raise RangeError(f"no fold in [{lo}, {hi}] at Ta={Ta}")
    if p.respiration_kind is RespirationKind.MONOTONE:
        return roots[0], None
    if len(roots) < 2:
        raise RangeError(f"second fold missing in [{lo}, {hi}] at Ta={Ta}")
    return roots[0], roots[1]


def fold_kernels(p: SoilParams):
    """Fast fold locator T_F1(Ta) for repeated use inside shooting loops."""
    _, g = scalar_kernels(p)
    span = 1.5 / p.alpha

    def phi(T, Ta):
        return 1.0 - (T - Ta) * g(T)

    def t_f1(Ta: float) -> float:
        lo, hi = Ta + 1e-9, Ta + span
        if p.respiration_kind is RespirationKind.MODIFIED_CLAMPED:
            lo = max(lo, 1e-9)
        if phi(hi, Ta) >= 0:
            return fold_temperatures(Ta, p)[0]
        return brentq(phi, lo, hi, args=(Ta,), xtol=1e-13, rtol=4 * np.finfo(float).eps)

    return t_f1, phi


@dataclass
class CriticalManifold:
    Ta: float
    T_F1: float
    T_F2: float | None
    T: np.ndarray
    C: np.ndarray
    labels: np.ndarray
    stability: np.ndarray
    params: SoilParams = field(repr=False)

    @property
    def C_F1(self) -> float:
        return carbon_on_manifold(self.T_F1, self.Ta, self.params)

    @property
    def C_F2(self) -> float | None:
        return None if self.T_F2 is None else carbon_on_manifold(self.T_F2, self.Ta, self.params)

    def branch_of(self, T: float) -> str:
        return branch_label(T, self.T_F1, self.T_F2)

    def residual(self) -> np.ndarray:
        R = np.asarray(respiration(self.T, self.params))
        return -self.params.k * (self.T - self.Ta) + self.C * R


def branch_label(T: float, T_F1: float, T_F2: float | None) -> str:
    if T < T_F1:
        return "S1"
    if T_F2 is None or T < T_F2:
        return "S2"
    return "S3"


def critical_manifold(Ta: float, p: SoilParams, T_range: tuple[float, float] = (None, None), n: int = 2001) -> CriticalManifold:
    """Sample f1 = 0 at fixed air temperature as C = C_S(T) for T > Ta."""
    lo, hi = T_range
    lo = Ta + 1e-6 if lo is None else max(lo, Ta + 1e-6)
    hi = p.b + 80.0 if hi is None else hi
    T_F1, T_F2 = fold_temperatures(Ta, p, (lo, hi))
    T = np.linspace(lo, hi, n)
    if p.respiration_kind is RespirationKind.MODIFIED_CLAMPED:
        T = T[T > 0]
    C = carbon_on_manifold(T, Ta, p)
    labels = np.array([branch_label(x, T_F1, T_F2) for x in T])
    slope = df1_dT_on_manifold(T, Ta, p)
    stability = np.where(slope < 0, "attracting", "repelling")
    return CriticalManifold(Ta, T_F1, T_F2, T, C, labels, stability, p)


def branch_temperature(C: float, Ta: float, branch: str, p: SoilParams, folds=None) -> float | None:
    """Temperature on one branch of the critical manifold at carbon level C."""
    T_F1, T_F2 = folds if folds is not None else fold_temperatures(Ta, p)
    fn = lambda T: carbon_on_manifold(T, Ta, p) - C  # noqa: E731
    if branch == "S1":
        lo, hi = Ta + 1e-12, T_F1
        if p.respiration_kind is RespirationKind.MODIFIED_CLAMPED:
            lo = max(lo, 1e-12)
    elif branch == "S2":
        lo, hi = T_F1, T_F2
    else:
        lo, hi = T_F2, T_F2 + 1.0
        while fn(hi) < 0:
            hi = T_F2 + 2.0 * (hi - T_F2)
            if hi > 1e4:
                return None
    try:
        if fn(lo) * fn(hi) > 0:
            return None
    except ZeroDivisionError:
        return None
    return brentq(fn, lo, hi, xtol=1e-13)


@dataclass
class LayerPoint:
    name: str
    T: float
    s: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    stability: str
    residual: float


@dataclass
class LayerEquilibria:
    points: dict[str, LayerPoint]
    C: float

    def __getitem__(self, key: str) -> LayerPoint:
        return self.points[key]


def _layer_roots(C: float, Ta: float, p: SoilParams, hi: float = 300.0) -> list[float]:
    rs, _ = scalar_kernels(p)
    f1 = lambda T: -p.k * (T - Ta) + C * rs(T)  # noqa: E731
    return _scan_roots(f1, Ta + 1e-6, hi, 0.05, xtol=1e-13)


def _endpoint_slope(f: Forcing, s: float, h: float = 1e-7) -> float:
    """One-sided dTa/ds at an invariant plane."""
    inner = s - h if s > 0 else s + h
    return (forcing_in_s(f, inner) - forcing_in_s(f, s)) / (inner - s)


def layer_equilibria(f: Forcing, p: SoilParams) -> LayerEquilibria:
    """The six equilibria of the heatwave layer problem on the planes s = -1, +1."""
    if f.kind is not ForcingKind.SECH_PULSE:
        raise ValueError("layer equilibria are defined for the pulse input")
    C = equilibrium(f.past_limit, p).C
    names = {-1.0: ("e_minus", "m2_minus", "m3_minus"), 1.0: ("e_plus", "m2_plus", "m3_plus")}
    points = {}
    for s, labels in names.items():
        Ta = forcing_in_s(f, s)
        roots = _layer_roots(C, Ta, p)
        if len(roots) != 3:
            raise DegeneracyError(f"expected three roots on s={s:+.0f}, found {len(roots)}")
        for name, T in zip(labels, roots):
            dR = respiration_derivative(T, p)
            J = np.array(
                [[-p.k + C * dR, p.k * _endpoint_slope(f, s)], [0.0, -p.eps * f.nu * f.r * s]]
            )
            w, V = np.linalg.eig(J)
            order = np.argsort(w.real)
            w, V = w[order], V[:, order]
            signs = np.sign(w.real)
            kind = "sink" if np.all(signs < 0) else "source" if np.all(signs > 0) else "saddle"
            resid = abs(-p.k * (T - Ta) + C * respiration(T, p))
            points[name] = LayerPoint(name, T, s, w, V, kind, resid)
    return LayerEquilibria(points, C)


@dataclass
class BranchSet:
    Ta_max: float
    s: np.ndarray
    roots: list[np.ndarray]  # roots at each s, ascending
    branches: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]  # name -> (s, T, stability)
    folds: list[tuple[float, float]]

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def lower_gap(self) -> np.ndarray:
        """T distance between the two lowest roots where both exist, NaN elsewhere."""
        return np.array([r[1] - r[0] if len(r) >= 3 else np.nan for r in self.roots])


def m_tilde_branches(Ta_max: float, p: SoilParams, s_grid, nu: float = 0.5) -> BranchSet:
    """Roots of f1(T, C^e(0), Ta^nu(s)) over s, grouped into connected branches."""
    f = sech_pulse(Ta_max, r=1.0, nu=nu)
    C = equilibrium(0.0, p).C
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(np.abs(s_grid) > 1):
        raise ValueError("s grid must lie in [-1, 1]")
    roots = [np.array(_layer_roots(C, forcing_in_s(f, s), p)) for s in s_grid]
    counts = np.array([len(r) for r in roots])
    branches: dict[str, list] = {}

    def stab(T, Ta):
        return "attracting" if df1_dT_on_manifold(T, Ta, p) < 0 else "repelling"

    top = [(s, r[-1], stab(r[-1], forcing_in_s(f, s))) for s, r in zip(s_grid, roots)]
    segments = []
    i = 0
    while i < len(s_grid):
        if counts[i] >= 3:
            j = i
            while j + 1 < len(s_grid) and counts[j + 1] >= 3:
                j += 1
            segments.append((i, j))
            i = j + 1
        else:
            i += 1
    folds = []
    for n_seg, (i, j) in enumerate(segments):
        if len(segments) == 1:
            tag = ""
        else:
            tag = "-" if n_seg == 0 else "+" if n_seg == len(segments) - 1 else f"_{n_seg}"
        for level, base in ((0, "M1"), (1, "M2")):
            pts = [(s_grid[q], roots[q][level], stab(roots[q][level], forcing_in_s(f, s_grid[q]))) for q in range(i, j + 1)]
            branches[base + tag] = pts
        if i > 0:
            folds.append((float(s_grid[i]), float(0.5 * (roots[i][0] + roots[i][1]))))
        if j < len(s_grid) - 1:
            folds.append((float(s_grid[j]), float(0.5 * (roots[j][0] + roots[j][1]))))
    branches["M3"] = top
    packed = {
        name: (np.array([q[0] for q in pts]), np.array([q[1] for q in pts]), np.array([q[2] for q in pts]))
        for name, pts in branches.items()
    }
    return BranchSet(Ta_max, s_grid, roots, packed, folds)


def write_manifold_csv(path, axis_name: str, rows) -> None:
    """Rows of (axis value, T, C, branch_label, stability) at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([axis_name, "T", "C", "branch_label", "stability"])
        for a, T, C, lab, st in rows:
            w.writerow([format(float(a), ".17g"), format(float(T), ".17g"), format(float(C), ".17g"), lab, st])


def manifold_rows(cm: CriticalManifold):
    for T, C, lab, st in zip(cm.T, cm.C, cm.labels, cm.stability):
        yield cm.Ta, T, C, lab, st


def branch_rows(bs: BranchSet, C: float):
    for name, (s, T, st) in bs.branches.items():
        for a, b, c in zip(s, T, st):
            yield a, b, C, name, c

