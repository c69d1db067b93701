"""Closed-form port probabilities for a Gaussian dissociation-time entangled pair.

For symmetric beam splitters and a Gaussian momentum distribution the joint
probability of detecting the pair in ports ``(s1, s2)`` is::

    P = 1/4 [1 + s1 s2 V cos(chi)]

with the modulation amplitude ``V`` (two Lorentzian dispersion factors times a
Gaussian envelope-mismatch factor) and the chirped fringe argument ``chi``.
The sub-expressions are evaluated in dimensionless groups: ``tau/T``,
``ell/lambdabar_rel`` and ``ell**2 / (2 v_rel lambdabar_rel T)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DteParams
from .tbe import OUTCOMES, PortOutcome

__all__ = [
    "UnsupportedSplittingRatioError",
    "DteSettings",
    "DteProbabilityBreakdown",
    "global_phase",
    "modulation_and_argument",
    "dte_probability_gaussian",
    "dte_probabilities_gaussian",
    "dte_visibility",
    "FringeRow",
    "dte_fringe_scan",
]

SYMMETRIC = math.pi / 4


class UnsupportedSplittingRatioError(ValueError):
    pass


@dataclass(frozen=True)
class DteSettings:
    """Arm-length offsets ``ell1, ell2`` [m] and splitting angles [rad]."""

    ell1: float = 0.0
    ell2: float = 0.0
    theta1: float = SYMMETRIC
    theta2: float = SYMMETRIC

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            theta = getattr(self, name)
            if not (0.0 <= theta <= math.pi / 2):
                raise ValueError(f"{name} must lie in [0, pi/2], got {theta}")

    @property
    def symmetric(self) -> bool:
        return self.theta1 == SYMMETRIC and self.theta2 == SYMMETRIC

    def swapped(self) -> "DteSettings":
        return DteSettings(self.ell2, self.ell1, self.theta2, self.theta1)


@dataclass(frozen=True)
class DteProbabilityBreakdown:
    total: float
    modulation_amplitude: float
    cosine_argument: float
    phi0: float


def global_phase(params: DteParams) -> float:
    """``tau v_rel / lambdabar_rel + arctan(tau/T_cm) + arctan(tau/T_rel) + 2 phi_tau``."""
    tau = params.tau
    return (
        tau * params.v_rel / params.lambdabar_rel
        + math.atan(tau / params.T_cm)
        + math.atan(tau / params.T_rel)
        + 2.0 * params.phi_tau
    )


def modulation_and_argument(params: DteParams, ell1, ell2):
    """Return ``(V, chi)`` for arm offsets; broadcasts over numpy arrays."""
    ell1 = np.asarray(ell1, dtype=float)
    ell2 = np.asarray(ell2, dtype=float)
    tau, v, lam = params.tau, params.v_rel, params.lambdabar_rel
    a_cm = tau / params.T_cm
    a_rel = tau / params.T_rel

    # (ell1 - ell2 - tau v)^2 / (2 v lambdabar T) and (ell1 + ell2)^2 / (2 v lambdabar T)
    mismatch_rel = (ell1 - ell2 - tau * v) ** 2 / (2.0 * v * lam * params.T_rel)
    mismatch_cm = (ell1 + ell2) ** 2 / (2.0 * v * lam * params.T_cm)

    lorentz = (1.0 + a_cm**2) ** -0.25 * (1.0 + a_rel**2) ** -0.25
    envelope = np.exp(-mismatch_rel / (1.0 + a_rel**2) - mismatch_cm / (1.0 + a_cm**2))
    chirp = a_rel * mismatch_rel / (1.0 + a_rel**2) + a_cm * mismatch_cm / (1.0 + a_cm**2)
    argument = (ell1 - ell2) / lam + chirp - 0.5 * global_phase(params)
    return lorentz * envelope, argument


def _require_symmetric(settings: DteSettings) -> None:
    if not settings.symmetric:
        raise UnsupportedSplittingRatioError(
            "the closed form holds for symmetric beam splitters only "
            f"(theta = pi/4); got theta1={settings.theta1}, theta2={settings.theta2}. "
            "Use the quadrature engine for other splitting ratios."
        )


def dte_probability_gaussian(
    params: DteParams, settings: DteSettings, outcome: PortOutcome
) -> DteProbabilityBreakdown:
    _require_symmetric(settings)
    amp, arg = modulation_and_argument(params, settings.ell1, settings.ell2)
    amp, arg = float(amp), float(arg)
    total = 0.25 * (1.0 + outcome.product * amp * math.cos(arg))
    return DteProbabilityBreakdown(
        total=total, modulation_amplitude=amp, cosine_argument=arg, phi0=global_phase(params)
    )


def dte_probabilities_gaussian(params: DteParams, settings: DteSettings) -> tuple[float, ...]:
    """All four probabilities, ordered ``++, +-, -+, --``."""
    return tuple(dte_probability_gaussian(params, settings, o).total for o in OUTCOMES)


def dte_visibility(params: DteParams, ell_sum: float, ell_diff: float) -> float:
    """Analytic fringe visibility at ``ell1 + ell2 = ell_sum``, ``ell1 - ell2 = ell_diff``."""
    amp, _ = modulation_and_argument(params, 0.5 * (ell_sum + ell_diff), 0.5 * (ell_sum - ell_diff))
    return float(amp)


@dataclass(frozen=True)
class FringeRow:
    ell1: float
    P_pp: float
    P_pm: float
    P_mp: float
    P_mm: float
    visibility: float
    cosine_argument: float


def dte_fringe_scan(
    params: DteParams, ell2: float, ell1_range: tuple[float, float, int]
) -> list[FringeRow]:
    """Evaluate the closed form on ``count`` evenly spaced ``ell1`` values."""
    start, stop, count = ell1_range
    if int(count) != count or count < 2:
        raise ValueError(f"scan count must be an integer >= 2, got {count}")
    if not start < stop:
        raise ValueError(f"scan range must satisfy start < stop, got [{start}, {stop}]")
    ell1 = np.linspace(start, stop, int(count))
    amp, arg = modulation_and_argument(params, ell1, ell2)
    mod = amp * np.cos(arg)
    plus = 0.25 * (1.0 + mod)
    minus = 0.25 * (1.0 - mod)
    return [
        FringeRow(float(l1), float(p), float(m), float(m), float(p), float(a), float(c))
        for l1, p, m, a, c in zip(ell1, plus, minus, amp, arg)
    ]
