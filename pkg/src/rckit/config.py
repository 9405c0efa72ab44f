"""Tool configuration: built-in defaults for the bundled robot-arm study,
JSON ingestion with field-level diagnostics, and construction of the typed
objects the library works with.

A configuration file is a complete document: every section and field must be
present (use --seed-defaults to write one and edit from there). Running
without a file uses the built-in defaults unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .arm import PlantParams, SignalSpec
from .design import RcDesign, synthesize
from .simulation import SimConfig

__all__ = ["ConfigError", "ToolConfig", "default_config_dict", "load_config", "validate"]


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


def default_config_dict() -> dict:
    """The bundled case study: elastic-joint arm, Ts = 0.1 s, N = 209."""
    return {
        "plant": {
            "J_l": 2.0, "J_m": 0.5, "K": 0.05, "M": 0.5, "g": 9.8, "l": 0.5,
            "F_l": 0.2, "F_m": 0.2,
            "p": [-2.10, -1.295, -9.36, 3.044],
            "x0": [0.05, 0.0, 0.05, 0.0],
        },
        "signals": {
            "r_amp": 0.05, "r_offset": 0.1,
            "d1_amp": 0.04, "d2_amp": 0.02,
            "T_nominal": 20.0 * math.pi / 3.0,
            "alpha": 0.0,
        },
        "design": {
            "Ts": 0.1,
            "q_taps": [0.5, 0.2, 0.2, 0.1],
            "w_weights": [2.0, -1.0],
            "w_variants": [[1.0], [2.0, -1.0]],
            "grid_size": 8192,
            "split_threshold": 1.0 - 1e-6,
        },
        "sim": {
            "h_int": 1e-3, "T_ss": 0.01,
            "horizon_periods": 30, "bound_window_periods": 5,
            "require_certified": False,
        },
        "sweep": {"alphas": [-0.02, -0.01, 0.0, 0.01, 0.02]},
        "freqresp": {"n_points": 2000},
    }


def _need(doc: dict, section: str, field: str, kind):
    if field not in doc:
        raise ConfigError(f"missing field {section}.{field}")
    value = doc[field]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{field} must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{section}.{field} must be an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{section}.{field} must be true/false, got {value!r}")
        return value
    if kind == "floats":
        if (not isinstance(value, list) or not value
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
            raise ConfigError(f"{section}.{field} must be a non-empty list of numbers")
        return [float(v) for v in value]
    raise AssertionError(kind)


def _check_sections(doc: dict) -> None:
    expected = default_config_dict()
    for section in expected:
        if section not in doc:
            raise ConfigError(f"missing section {section}")
        if not isinstance(doc[section], dict):
            raise ConfigError(f"section {section} must be an object")
        for key in doc[section]:
            if key not in expected[section]:
                raise ConfigError(f"unknown field {section}.{key}")
    for section in doc:
        if section not in expected:
            raise ConfigError(f"unknown section {section}")


@dataclass(frozen=True)
class ToolConfig:
    """Validated configuration plus the objects built from it."""

    plant: PlantParams
    signals: SignalSpec
    Ts: float
    q_taps: tuple
    w_weights: tuple
    w_variants: tuple
    grid_size: int
    split_threshold: float
    h_int: float
    T_ss: float
    horizon_periods: int
    bound_window_periods: int
    require_certified: bool
    sweep_alphas: tuple
    freqresp_points: int

    def plant_tf(self):
        return self.plant.discretized_tf(self.Ts)

    def synthesize(self, weights, exact_check: bool = False) -> RcDesign:
        return synthesize(self.plant_tf(), self.Ts, self.signals.T_nominal,
                          self.q_taps, weights, grid_size=self.grid_size,
                          split_threshold=self.split_threshold,
                          exact_check=exact_check)

    def sim_config(self, design: RcDesign, alpha: float | None = None) -> SimConfig:
        signals = self.signals
        if alpha is not None:
            signals = SignalSpec(
                r_amp=signals.r_amp, r_offset=signals.r_offset,
                d1_amp=signals.d1_amp, d2_amp=signals.d2_amp,
                T_nominal=signals.T_nominal, alpha=alpha)
        return SimConfig(
            plant=self.plant, signals=signals, design=design, Ts=self.Ts,
            h_int=self.h_int, T_ss=self.T_ss,
            horizon_periods=self.horizon_periods,
            bound_window_periods=self.bound_window_periods,
            require_certified=self.require_certified)


def validate(doc: dict) -> ToolConfig:
    """Schema-check a config document and build the typed objects.

    Raises ConfigError with the field path on the first violation; the
    cross-field step-size contracts are checked here too so commands fail
    before any computation starts.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_sections(doc)
    p = doc["plant"]
    plant_kwargs = {k: _need(p, "plant", k, float)
                    for k in ("J_l", "J_m", "K", "M", "g", "l", "F_l", "F_m")}
    pvec = _need(p, "plant", "p", "floats")
    x0 = _need(p, "plant", "x0", "floats")
    if len(pvec) != 4 or len(x0) != 4:
        raise ConfigError("plant.p and plant.x0 must be 4-vectors")
    try:
        plant = PlantParams(p=tuple(pvec), x0=tuple(x0), **plant_kwargs)
    except ValueError as exc:
        raise ConfigError(f"plant: {exc}") from exc

    s = doc["signals"]
    try:
        signals = SignalSpec(
            r_amp=_need(s, "signals", "r_amp", float),
            r_offset=_need(s, "signals", "r_offset", float),
            d1_amp=_need(s, "signals", "d1_amp", float),
            d2_amp=_need(s, "signals", "d2_amp", float),
            T_nominal=_need(s, "signals", "T_nominal", float),
            alpha=_need(s, "signals", "alpha", float))
    except ValueError as exc:
        raise ConfigError(f"signals: {exc}") from exc

    d = doc["design"]
    Ts = _need(d, "design", "Ts", float)
    if Ts <= 0:
        raise ConfigError("design.Ts must be positive")
    q_taps = _need(d, "design", "q_taps", "floats")
    w_weights = _need(d, "design", "w_weights", "floats")
    if "w_variants" not in d:
        raise ConfigError("missing field design.w_variants")
    variants = d["w_variants"]
    if (not isinstance(variants, list) or len(variants) != 2
            or any(not isinstance(v, list) or not v for v in variants)):
        raise ConfigError("design.w_variants must be a list of exactly two weight lists")
    for i, v in enumerate(variants):
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise ConfigError(f"design.w_variants[{i}] must contain numbers")
        if abs(sum(float(x) for x in v) - 1.0) > 1e-12:
            raise ConfigError(f"design.w_variants[{i}] weights must sum to 1")
    if abs(sum(w_weights) - 1.0) > 1e-12:
        raise ConfigError("design.w_weights must sum to 1")
    grid_size = _need(d, "design", "grid_size", int)
    if grid_size < 16:
        raise ConfigError("design.grid_size must be at least 16")
    split_threshold = _need(d, "design", "split_threshold", float)
    if not 0 < split_threshold <= 1:
        raise ConfigError("design.split_threshold must lie in (0, 1]")

    m = doc["sim"]
    h_int = _need(m, "sim", "h_int", float)
    T_ss = _need(m, "sim", "T_ss", float)
    horizon = _need(m, "sim", "horizon_periods", int)
    window = _need(m, "sim", "bound_window_periods", int)
    require_certified = _need(m, "sim", "require_certified", bool)
    if not 0 < h_int <= T_ss <= Ts:
        raise ConfigError("sim: need 0 < h_int <= T_ss <= design.Ts")
    for name, num in (("Ts/h_int", Ts), ("T_ss/h_int", T_ss)):
        ratio = num / h_int
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(f"sim: {name} must be an integer, got {ratio}")
    if horizon < 1 or window < 1 or window > horizon:
        raise ConfigError("sim: need 1 <= bound_window_periods <= horizon_periods")

    sw = doc["sweep"]
    alphas = _need(sw, "sweep", "alphas", "floats")
    if any(1.0 + a <= 0 for a in alphas):
        raise ConfigError("sweep.alphas must keep the period positive")

    fr = doc["freqresp"]
    n_points = _need(fr, "freqresp", "n_points", int)
    if n_points < 2:
        raise ConfigError("freqresp.n_points must be at least 2")

    return ToolConfig(
        plant=plant, signals=signals, Ts=Ts,
        q_taps=tuple(q_taps), w_weights=tuple(w_weights),
        w_variants=tuple(tuple(v) for v in variants),
        grid_size=grid_size, split_threshold=split_threshold,
        h_int=h_int, T_ss=T_ss, horizon_periods=horizon,
        bound_window_periods=window, require_certified=require_certified,
        sweep_alphas=tuple(alphas), freqresp_points=n_points)


def load_config(path: str | None) -> ToolConfig:
    """Load and validate a JSON config file; None means built-in defaults."""
    if path is None:
        return validate(default_config_dict())
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config file {path} is not valid JSON: line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}") from exc
    return validate(doc)
