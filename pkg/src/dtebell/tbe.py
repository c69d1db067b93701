"""Idealised time-bin entangled pair behind two switched Mach-Zehnder interferometers.

Each interferometer maps the early and late time bins onto its output ports::

    |E> -> e^{i phi} (cos(theta) |+> + sin(theta) |->)
    |L> ->            sin(theta) |+> - cos(theta) |->

and the pair starts in ``(|EE> + e^{i phi_tau} |LL>) / sqrt(2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "PortOutcome",
    "OUTCOMES",
    "TbeSettings",
    "MeasurementAxis",
    "NonUnitAxisError",
    "tbe_amplitude",
    "tbe_probability",
    "tbe_probabilities",
    "tbe_correlation",
    "spin_correlation",
    "PAULI",
]


@dataclass(frozen=True)
class PortOutcome:
    sigma1: int
    sigma2: int

    def __post_init__(self):
        if self.sigma1 not in (1, -1) or self.sigma2 not in (1, -1):
            raise ValueError(f"port labels must be +1 or -1, got ({self.sigma1}, {self.sigma2})")

    @property
    def product(self) -> int:
        return self.sigma1 * self.sigma2

    def swapped(self) -> "PortOutcome":
        return PortOutcome(self.sigma2, self.sigma1)

    def __iter__(self) -> Iterator[int]:
        yield self.sigma1
        yield self.sigma2


# Fixed order used everywhere a quadruple of probabilities appears: ++, +-, -+, --.
OUTCOMES = (PortOutcome(1, 1), PortOutcome(1, -1), PortOutcome(-1, 1), PortOutcome(-1, -1))


def _check_theta(theta: float, name: str) -> None:
    if not (0.0 <= theta <= math.pi / 2):
        raise ValueError(f"{name} must lie in [0, pi/2], got {theta}")


@dataclass(frozen=True)
class TbeSettings:
    phi1: float = 0.0
    phi2: float = 0.0
    theta1: float = math.pi / 4
    theta2: float = math.pi / 4

    def __post_init__(self):
        _check_theta(self.theta1, "theta1")
        _check_theta(self.theta2, "theta2")


def early_port_amplitude(theta: float, sigma: int) -> float:
    return math.cos(theta) if sigma == 1 else math.sin(theta)


def late_port_amplitude(theta: float, sigma: int) -> float:
    return math.sin(theta) if sigma == 1 else -math.cos(theta)


def tbe_amplitude(outcome: PortOutcome, settings: TbeSettings, phi_tau: float) -> complex:
    s1, s2 = outcome
    early = (
        np.exp(1j * (settings.phi1 + settings.phi2))
        * early_port_amplitude(settings.theta1, s1)
        * early_port_amplitude(settings.theta2, s2)
    )
    late = (
        np.exp(1j * phi_tau)
        * late_port_amplitude(settings.theta1, s1)
        * late_port_amplitude(settings.theta2, s2)
    )
    return complex((early + late) / math.sqrt(2.0))


def tbe_probability(outcome: PortOutcome, settings: TbeSettings, phi_tau: float) -> float:
    return abs(tbe_amplitude(outcome, settings, phi_tau)) ** 2


def tbe_probabilities(settings: TbeSettings, phi_tau: float) -> tuple[float, float, float, float]:
    """Joint port probabilities in the order ``++, +-, -+, --``."""
    return tuple(tbe_probability(o, settings, phi_tau) for o in OUTCOMES)


def tbe_correlation(settings: TbeSettings, phi_tau: float) -> float:
    return sum(o.product * p for o, p in zip(OUTCOMES, tbe_probabilities(settings, phi_tau)))


# Pauli analogues in the (E, L) basis with E as "spin up".
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class NonUnitAxisError(ValueError):
    pass


@dataclass(frozen=True)
class MeasurementAxis:
    """Bloch-sphere direction ``n``; the interferometer measures ``n . sigma``."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > 1e-12:
            raise NonUnitAxisError(f"measurement axis must be a unit vector, |n| = {norm!r}")

    @classmethod
    def from_interferometer(cls, theta: float, phi: float) -> "MeasurementAxis":
        """Axis ``(sin 2theta cos phi, sin 2theta sin phi, cos 2theta)``."""
        s = math.sin(2 * theta)
        return cls(s * math.cos(phi), s * math.sin(phi), math.cos(2 * theta))

    def operator(self) -> np.ndarray:
        return self.x * PAULI[0] + self.y * PAULI[1] + self.z * PAULI[2]


def bell_spin_state(phi_tau: float) -> np.ndarray:
    """``(|EE> + e^{i phi_tau} |LL>) / sqrt(2)`` in the basis EE, EL, LE, LL."""
    return np.array([1.0, 0.0, 0.0, np.exp(1j * phi_tau)]) / math.sqrt(2.0)


def spin_correlation(axis1: MeasurementAxis, axis2: MeasurementAxis, phi_tau: float) -> float:
    # <psi| A (x) B |psi> with psi reshaped to a 2x2 matrix M is tr(M^+ A M B^T)
    m = bell_spin_state(phi_tau).reshape(2, 2)
    return float(np.real(np.vdot(m, axis1.operator() @ m @ axis2.operator().T)))
