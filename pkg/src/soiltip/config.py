"""Flat key=value run configuration.

One ``key = value`` per line; ``#`` starts a comment. Recognised keys:

* model parameters: mu, lambda, A, Pi, alpha, Rs0, c, Tstar, respiration_kind
* forcing: forcing_kind (TanhShift | SechPulse), r, ta_minus, ta_plus, ta_max, center, nu
* integration: rel_tol, abs_tol, max_step
* output_dir

Missing model keys take their default values. Anything else is an error
reported with its line number.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .forcing import Forcing, ForcingKind
from .integrator import IntegratorConfig
from .soil_model import PARAM_KEYS, ParamError, SoilParams, params_from_mapping

FORCING_KEYS = ("forcing_kind", "r", "ta_minus", "ta_plus", "ta_max", "center", "nu")
TOLERANCE_KEYS = ("rel_tol", "abs_tol", "max_step")
OTHER_KEYS = ("output_dir",)
OUTPUT_ENV = "SOILTIP_OUTPUT_DIR"


class ConfigError(ValueError):
    """Malformed or invalid configuration input."""


@dataclass
class RunConfig:
    params: SoilParams = field(default_factory=SoilParams)
    forcing: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output_dir: str | None = None
    source: str | None = None

    def integrator(self, dense: bool = False) -> IntegratorConfig:
        try:
            return IntegratorConfig(dense=dense, **self.tolerances)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def build_forcing(self, **overrides) -> Forcing:
        values = {**self.forcing, **{k: v for k, v in overrides.items() if v is not None}}
        kind = values.pop("forcing_kind", None)
        if kind is None:
            raise ConfigError("forcing_kind is required")
        try:
            return Forcing(ForcingKind(kind), **values)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def resolve_output_dir(self, flag: str | None = None) -> str:
        """Flag, then environment variable, then config file, then the cwd."""
        return flag or os.environ.get(OUTPUT_ENV) or self.output_dir or "."


def _number(text: str, key: str, lineno: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    return v


def parse_config_text(text: str, source: str | None = None) -> RunConfig:
    params: dict = {}
    forcing: dict = {}
    tolerances: dict = {}
    output_dir = None
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        if key in PARAM_KEYS:
            params[key] = value if key == "respiration_kind" else _number(value, key, lineno)
        elif key == "forcing_kind":
            try:
                forcing[key] = ForcingKind(value).value
            except ValueError:
                raise ConfigError(f"line {lineno}: unknown forcing_kind {value!r}") from None
        elif key in FORCING_KEYS:
            forcing[key] = _number(value, key, lineno)
        elif key in TOLERANCE_KEYS:
            tolerances[key] = _number(value, key, lineno)
        elif key == "output_dir":
            output_dir = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    try:
        p = params_from_mapping(params)
    except (ParamError, ValueError) as e:
        bad = next((k for k in params if k in str(e)), None)
        where = f"line {seen[bad]}: " if bad else ""
        raise ConfigError(f"{where}{e}") from e
    cfg = RunConfig(p, forcing, tolerances, output_dir, source)
    cfg.integrator()  # validate tolerances early
    return cfg


def load_config(path: str | None) -> RunConfig:
    """Parse a config file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from e
    return parse_config_text(text, source=path)


def parse_grid(grid: str) -> np.ndarray:
    """``lo:hi:n`` (inclusive, linear) or ``log:lo:hi:n`` (geometric)."""
    text = grid.strip()
    log = text.startswith("log:")
    if log:
        text = text[4:]
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid {grid!r} must look like lo:hi:n")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid {grid!r} has a non-numeric field") from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"grid {grid!r} needs finite ends and n >= 1")
    if n > 1 and not hi > lo:
        raise ConfigError(f"grid {grid!r} needs hi > lo")
    if log:
        if lo <= 0:
            raise ConfigError(f"log grid {grid!r} needs lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)
