"""Seeded closed-form vs. quadrature agreement draws."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import envelope_widths
from .dte import DteSettings, dte_probabilities_gaussian
from .oracle import QuadratureSpec, dte_probabilities_quadrature, gaussian_distribution
from .params import DteParams

GENERATOR = "PCG64 (numpy.random.default_rng)"

# Li-6 pair receding at 2 cm/s: (v_rel/2) tau = 1 cm for tau = 1 s.
LI6_MASS = 9.988e-27
LI6_V_REL = 2e-2


@dataclass(frozen=True)
class AgreementDraw:
    index: int
    tau_over_T_cm: float
    tau_over_T_rel: float
    params: DteParams
    settings: DteSettings
    closed_form: tuple[float, float, float, float]
    quadrature: tuple[float, float, float, float]
    error_estimate: float

    @property
    def max_abs_diff(self) -> float:
        return max(abs(a - b) for a, b in zip(self.closed_form, self.quadrature))


def random_scenario(
    rng: np.random.Generator,
    max_tau_over_T: float = 3.0,
    ell_widths: float = 4.0,
    mass: float = LI6_MASS,
    v_rel: float = LI6_V_REL,
) -> tuple[float, float, DteParams, DteSettings]:
    """Gaussian scenario with ``tau/T`` uniform in ``[0, max]`` and offsets near the matched point.

    The arm offsets are displaced from the matched point by up to
    ``ell_widths`` envelope widths in both ``ell1 - ell2`` and ``ell1 + ell2``.
    """
    tau = float(rng.uniform(0.2, 2.0))
    r_cm, r_rel = (float(x) for x in rng.uniform(0.0, max_tau_over_T, size=2))
    phi_tau = float(rng.uniform(0.0, 2.0 * math.pi))
    u_diff, u_sum = (float(x) for x in rng.uniform(-ell_widths, ell_widths, size=2))
    # tau/T = 0 means no dispersion at all; keep T finite.
    params = DteParams.from_dispersion_times(
        mass, v_rel, T_cm=tau / max(r_cm, 1e-6), T_rel=tau / max(r_rel, 1e-6), tau=tau, phi_tau=phi_tau
    )
    w_diff, w_sum = envelope_widths(params)
    ell_diff = tau * v_rel + u_diff * w_diff
    ell_sum = u_sum * w_sum
    settings = DteSettings(0.5 * (ell_sum + ell_diff), 0.5 * (ell_sum - ell_diff))
    return r_cm, r_rel, params, settings


def agreement_draws(
    draws: int = 100,
    seed: int = 42,
    spec: QuadratureSpec | None = None,
    max_tau_over_T: float = 3.0,
    ell_widths: float = 4.0,
) -> list[AgreementDraw]:
    spec = spec or QuadratureSpec()
    rng = np.random.default_rng(seed)
    out = []
    for k in range(draws):
        r_cm, r_rel, params, settings = random_scenario(rng, max_tau_over_T, ell_widths)
        closed = dte_probabilities_gaussian(params, settings)
        quad, err, _ = dte_probabilities_quadrature(gaussian_distribution(params), params, settings, spec)
        out.append(AgreementDraw(k, r_cm, r_rel, params, settings, closed, quad, err))
    return out
