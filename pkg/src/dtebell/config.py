"""Scenario configuration: an INI-style file of ``key = value`` sections.

Example::

    [params]
    mass = 9.988e-27
    v_rel = 0.02
    T_cm = 2.0            # or sigma_p_cm = ...
    T_rel = 2.0           # or sigma_p_rel = ...
    tau = 1.0
    phi_tau = 0.0

    [engine]
    name = closed-form    # or quadrature
    threshold = 0.01

    [quadrature]
    tolerance = 1e-9
    max_depth = 12
    order = 7

    [dte-fringe]
    ell2 = -0.01
    ell1 = 0.009999, 0.010001, 201

Sweep values are ``start, stop, count``.  Unknown sections or keys are errors.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .oracle import QuadratureSpec
from .params import DteParams, InvalidParameterError
from .validation import LI6_MASS, LI6_V_REL

__all__ = ["ConfigError", "Sweep", "ScenarioConfig", "load_config", "parse_config", "DEFAULT_PARAMS"]

# Li-6 scenario with tau = 1 s and tau/T_cm = tau/T_rel = 0.5.
DEFAULT_PARAMS = DteParams.from_dispersion_times(LI6_MASS, LI6_V_REL, T_cm=2.0, T_rel=2.0, tau=1.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"sweep count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ConfigError(f"sweep needs start < stop, got [{self.start}, {self.stop}]")

    def as_tuple(self) -> tuple[float, float, int]:
        return self.start, self.stop, self.count


@dataclass(frozen=True)
class ScenarioConfig:
    params: DteParams = DEFAULT_PARAMS
    engine: str = "closed_form"
    threshold: float = 0.01
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    # tbe-correlation
    tbe_phi_tau: float = 0.0
    tbe_theta1: float = math.pi / 4
    tbe_theta2: float = math.pi / 4
    tbe_phi1: Sweep = Sweep(0.0, 2 * math.pi, 100)
    tbe_phi2: Sweep = Sweep(0.0, 2 * math.pi, 100)
    # dte-fringe; None means "around the matched point"
    fringe_ell2: float | None = None
    fringe_ell1: Sweep | None = None
    # chsh
    chsh_mode: str = "dte"
    chsh_optimize: bool = True
    chsh_settings: tuple[float, float, float, float] | None = None
    # validate
    validate_draws: int = 100
    validate_tolerance: float = 1e-6
    seed: int = 42
    # output
    out: str | None = None
    format: str | None = None

    def fringe_scan_range(self) -> tuple[float, tuple[float, float, int]]:
        """``(ell2, (start, stop, count))``; default is +-5 fringe periods about the matched point."""
        l1c, l2c = self.params.matched_ell
        ell2 = l2c if self.fringe_ell2 is None else self.fringe_ell2
        if self.fringe_ell1 is not None:
            return ell2, self.fringe_ell1.as_tuple()
        centre = ell2 + self.params.tau * self.params.v_rel
        half = 5 * 2 * math.pi * self.params.lambdabar_rel
        return ell2, (centre - half, centre + half, 401)


_SCHEMA = {
    "params": {"mass", "v_rel", "sigma_p_cm", "sigma_p_rel", "T_cm", "T_rel", "tau", "phi_tau"},
    "engine": {"name", "threshold"},
    "quadrature": {"tolerance", "max_depth", "order", "max_panel_phase"},
    "tbe-correlation": {"phi_tau", "theta1", "theta2", "phi1", "phi2"},
    "dte-fringe": {"ell1", "ell2"},
    "chsh": {"mode", "optimize", "a", "a_prime", "b", "b_prime"},
    "validate": {"draws", "tolerance", "seed"},
    "output": {"path", "format"},
}


def _float(section, key) -> float:
    raw = section[key]
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section.name}] {key}: must be finite, got {raw!r}")
    return value


def _int(section, key) -> int:
    raw = section[key]
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key}: not an integer: {raw!r}") from None


def _sweep(section, key) -> Sweep:
    parts = [p.strip() for p in section[key].split(",")]
    if len(parts) != 3:
        raise ConfigError(f"[{section.name}] {key}: expected 'start, stop, count', got {section[key]!r}")
    try:
        return Sweep(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: {exc}") from None


def _engine_name(raw: str) -> str:
    name = raw.strip().replace("-", "_")
    if name not in ("closed_form", "quadrature"):
        raise ConfigError(f"engine must be closed-form or quadrature, got {raw!r}")
    return name


def _params(section) -> DteParams:
    keys = set(section)
    for a, b in (("sigma_p_cm", "T_cm"), ("sigma_p_rel", "T_rel")):
        if a in keys and b in keys:
            raise ConfigError(f"[params] give either {a} or {b}, not both")
    base = DEFAULT_PARAMS
    mass = _float(section, "mass") if "mass" in keys else base.mass
    v_rel = _float(section, "v_rel") if "v_rel" in keys else base.v_rel
    tau = _float(section, "tau") if "tau" in keys else base.tau
    phi_tau = _float(section, "phi_tau") if "phi_tau" in keys else base.phi_tau
    try:
        if "T_cm" in keys:
            s_cm = DteParams.from_dispersion_times(mass, 1.0, _float(section, "T_cm"), 1.0).sigma_p_cm
        else:
            s_cm = _float(section, "sigma_p_cm") if "sigma_p_cm" in keys else base.sigma_p_cm
        if "T_rel" in keys:
            s_rel = DteParams.from_dispersion_times(mass, 1.0, 1.0, _float(section, "T_rel")).sigma_p_rel
        else:
            s_rel = _float(section, "sigma_p_rel") if "sigma_p_rel" in keys else base.sigma_p_rel
        return DteParams(mass, v_rel, s_cm, s_rel, tau, phi_tau)
    except InvalidParameterError as exc:
        raise ConfigError(f"[params] {exc}") from None


def parse_config(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str  # keys are case sensitive (T_cm)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for name in cp.sections():
        if name not in _SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(cp[name]) - _SCHEMA[name]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")

    cfg = ScenarioConfig()
    changes: dict = {}
    if cp.has_section("params"):
        changes["params"] = _params(cp["params"])
    if cp.has_section("engine"):
        sec = cp["engine"]
        if "name" in sec:
            changes["engine"] = _engine_name(sec["name"])
        if "threshold" in sec:
            changes["threshold"] = _float(sec, "threshold")
    if cp.has_section("quadrature"):
        sec = cp["quadrature"]
        q = {}
        for key in ("tolerance", "max_panel_phase"):
            if key in sec:
                q[key] = _float(sec, key)
        for key in ("max_depth", "order"):
            if key in sec:
                q[key] = _int(sec, key)
        try:
            changes["quadrature"] = QuadratureSpec(**q)
        except ValueError as exc:
            raise ConfigError(f"[quadrature] {exc}") from None
    if cp.has_section("tbe-correlation"):
        sec = cp["tbe-correlation"]
        for key in ("phi_tau", "theta1", "theta2"):
            if key in sec:
                changes[f"tbe_{key}"] = _float(sec, key)
        for key in ("phi1", "phi2"):
            if key in sec:
                changes[f"tbe_{key}"] = _sweep(sec, key)
    if cp.has_section("dte-fringe"):
        sec = cp["dte-fringe"]
        if "ell2" in sec:
            changes["fringe_ell2"] = _float(sec, "ell2")
        if "ell1" in sec:
            changes["fringe_ell1"] = _sweep(sec, "ell1")
    if cp.has_section("chsh"):
        sec = cp["chsh"]
        if "mode" in sec:
            mode = sec["mode"].strip()
            if mode not in ("tbe", "dte"):
                raise ConfigError(f"[chsh] mode must be tbe or dte, got {mode!r}")
            changes["chsh_mode"] = mode
        if "optimize" in sec:
            try:
                changes["chsh_optimize"] = sec.getboolean("optimize")
            except ValueError:
                raise ConfigError(f"[chsh] optimize: not a boolean: {sec['optimize']!r}") from None
        given = [k for k in ("a", "a_prime", "b", "b_prime") if k in sec]
        if given:
            if len(given) != 4:
                raise ConfigError("[chsh] give all of a, a_prime, b, b_prime or none")
            changes["chsh_settings"] = tuple(_float(sec, k) for k in ("a", "a_prime", "b", "b_prime"))
    if cp.has_section("validate"):
        sec = cp["validate"]
        if "draws" in sec:
            changes["validate_draws"] = _int(sec, "draws")
        if "tolerance" in sec:
            changes["validate_tolerance"] = _float(sec, "tolerance")
        if "seed" in sec:
            changes["seed"] = _int(sec, "seed")
    if cp.has_section("output"):
        sec = cp["output"]
        if "path" in sec:
            changes["out"] = sec["path"].strip()
        if "format" in sec:
            changes["format"] = sec["format"].strip()

    try:
        cfg = replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _check(cfg)
    return cfg


def _check(cfg: ScenarioConfig) -> None:
    if cfg.format not in (None, "csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.validate_draws < 1:
        raise ConfigError("validate draws must be >= 1")
    if not cfg.validate_tolerance > 0:
        raise ConfigError("validate tolerance must be > 0")
    if not cfg.threshold > 0:
        raise ConfigError("threshold must be > 0")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    for name in ("tbe_theta1", "tbe_theta2"):
        if not 0 <= getattr(cfg, name) <= math.pi / 2:
            raise ConfigError(f"{name} must lie in [0, pi/2]")


def load_config(path: str | Path | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
