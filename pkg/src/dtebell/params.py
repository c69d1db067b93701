"""Physical parameters of a dissociation-time entangled pair and derived scales.

All public quantities are SI.  Derived scales:

* ``p0_rel = m v_rel / 2`` -- mean relative momentum
* ``lambdabar_rel = hbar / p0_rel`` -- reduced relative de Broglie wavelength
* ``T_cm = 2 m hbar / sigma_p_cm**2`` and ``T_rel = m hbar / (2 sigma_p_rel**2)``
  -- dispersion times of centre-of-mass and relative motion
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar as HBAR

__all__ = [
    "HBAR",
    "InvalidParameterError",
    "DteParams",
    "derived_scales",
    "switch_distinguishability",
]


class InvalidParameterError(ValueError):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


@dataclass(frozen=True)
class DteParams:
    """Scenario for a pair of equal-mass particles dissociated at two times.

    Attributes are SI: ``mass`` [kg], ``v_rel`` [m/s], ``sigma_p_cm`` and
    ``sigma_p_rel`` [kg m/s], ``tau`` [s], ``phi_tau`` [rad].
    """

    mass: float
    v_rel: float
    sigma_p_cm: float
    sigma_p_rel: float
    tau: float = 0.0
    phi_tau: float = 0.0

    def __post_init__(self):
        for name in ("mass", "v_rel", "sigma_p_cm", "sigma_p_rel", "tau", "phi_tau"):
            value = getattr(self, name)
            _require(
                isinstance(value, (int, float)) and math.isfinite(value),
                f"{name} must be a finite number, got {value!r}",
            )
        _require(self.mass > 0, f"mass must be > 0, got {self.mass}")
        _require(self.v_rel > 0, f"v_rel must be > 0, got {self.v_rel}")
        _require(self.sigma_p_cm > 0, f"sigma_p_cm must be > 0, got {self.sigma_p_cm}")
        _require(self.sigma_p_rel > 0, f"sigma_p_rel must be > 0, got {self.sigma_p_rel}")
        _require(self.tau >= 0, f"tau must be >= 0, got {self.tau}")

    @classmethod
    def from_dispersion_times(
        cls,
        mass: float,
        v_rel: float,
        T_cm: float,
        T_rel: float,
        tau: float = 0.0,
        phi_tau: float = 0.0,
    ) -> "DteParams":
        """Build parameters from dispersion times instead of momentum spreads."""
        _require(T_cm > 0 and T_rel > 0, "dispersion times must be > 0")
        _require(mass > 0, f"mass must be > 0, got {mass}")
        return cls(
            mass=mass,
            v_rel=v_rel,
            sigma_p_cm=math.sqrt(2.0 * mass * HBAR / T_cm),
            sigma_p_rel=math.sqrt(mass * HBAR / (2.0 * T_rel)),
            tau=tau,
            phi_tau=phi_tau,
        )

    def replace(self, **changes) -> "DteParams":
        fields = dict(
            mass=self.mass,
            v_rel=self.v_rel,
            sigma_p_cm=self.sigma_p_cm,
            sigma_p_rel=self.sigma_p_rel,
            tau=self.tau,
            phi_tau=self.phi_tau,
        )
        fields.update(changes)
        return DteParams(**fields)

    @property
    def p0_rel(self) -> float:
        return self.mass * self.v_rel / 2.0

    @property
    def lambdabar_rel(self) -> float:
        return HBAR / self.p0_rel

    @property
    def T_cm(self) -> float:
        return 2.0 * self.mass * HBAR / self.sigma_p_cm**2

    @property
    def T_rel(self) -> float:
        return self.mass * HBAR / (2.0 * self.sigma_p_rel**2)

    @property
    def separation(self) -> float:
        """Early/late separation of a single particle, (v_rel/2) tau."""
        return 0.5 * self.v_rel * self.tau

    @property
    def matched_ell(self) -> tuple[float, float]:
        """Arm offsets (ell1, ell2) with ell1 - ell2 = tau v_rel and ell1 + ell2 = 0."""
        return self.separation, -self.separation


def derived_scales(params: DteParams) -> tuple[float, float, float]:
    """Return ``(T_cm, T_rel, lambdabar_rel)`` in seconds, seconds, metres."""
    return params.T_cm, params.T_rel, params.lambdabar_rel


def switch_distinguishability(params: DteParams, t_arrival: float) -> float:
    """Early/late separation in units of the dispersed single-particle width.

    The width model is a minimum-uncertainty packet with momentum spread
    ``sigma_p_rel``: ``sigma_x0 = hbar / (2 sigma_p_rel)``, spreading as
    ``sigma_x0 * sqrt(1 + (t/T)**2)`` with ``T = 2 m sigma_x0**2 / hbar``,
    which coincides with ``T_rel``.  Values much larger than one mean the
    switch can cleanly separate the early from the late packet.
    """
    _require(math.isfinite(t_arrival) and t_arrival >= 0, "t_arrival must be >= 0")
    sigma_x0 = HBAR / (2.0 * params.sigma_p_rel)
    sigma_x = sigma_x0 * math.hypot(1.0, t_arrival / params.T_rel)
    return params.separation / sigma_x
