"""Brute-force port probabilities from the two-particle momentum distribution.

Both interferometer branches act diagonally in momentum, so for any splitting
angles the port probabilities depend on the state only through the overlap::

    I = ∬ dp1 dp2 pr(p1, p2) exp(i [p.ell - |p|^2 tau / 2m] / hbar)

and read::

    P(s1, s2) = 1/2 [f1^2 f2^2 + g1^2 g2^2 + 2 f1 f2 g1 g2 Re(e^{-i phi_tau} I)]

with ``f(+) = cos theta, f(-) = sin theta, g(+) = sin theta, g(-) = -cos theta``.
At ``theta = pi/4`` this is ``1/4 [1 + s1 s2 Re(e^{-i phi_tau} I)]``.

Arm offsets follow the translation convention ``exp(i p ell / hbar)`` acting on
the early (switched) branch, which is the convention the closed form assumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cubature import ToleranceNotReachedError, adaptive_cubature
from .dte import DteSettings
from .params import HBAR, DteParams
from .tbe import OUTCOMES, PortOutcome, early_port_amplitude, late_port_amplitude

__all__ = [
    "MomentumAmplitude",
    "FRAMES",
    "QuadratureSpec",
    "NormalizationError",
    "ToleranceNotReachedError",
    "OverlapResult",
    "gaussian_distribution",
    "gaussian_amplitude",
    "mixture",
    "momentum_overlap",
    "dte_probability_quadrature",
    "dte_probabilities_quadrature",
    "momentum_phase_invariance_check",
    "parity_symmetry_check",
]

ArrayFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]


class NormalizationError(ValueError):
    pass


FRAMES = {
    # (p1, p2) = A (u, v)
    "particle": ((1.0, 0.0), (0.0, 1.0)),
    # u = p1 + p2 (total momentum), v = (p1 - p2) / 2 (relative momentum)
    "cm_rel": ((0.5, 1.0), (0.5, -1.0)),
}


@dataclass(frozen=True)
class MomentumAmplitude:
    """Two-particle momentum wave function, or distribution, on a finite box.

    ``func(p1, p2)`` takes SI momenta as broadcastable numpy arrays.  With
    ``is_distribution`` set it returns the nonnegative density ``pr(p1, p2)``;
    otherwise it returns the complex amplitude ``<p1, p2|Psi>``.

    The support box is given in integration coordinates ``(u, v)`` selected by
    ``frame``: ``"particle"`` integrates over ``(p1, p2)`` directly and
    ``"cm_rel"`` over total and relative momentum ``(p1 + p2, (p1 - p2)/2)``
    (unit Jacobian).  Strongly correlated states should use ``"cm_rel"`` so
    the box hugs the distribution and the integrand phase stays resolvable.
    """

    func: ArrayFunc
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    is_distribution: bool = False
    frame: str = "particle"

    def __post_init__(self):
        for name in ("u_range", "v_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ValueError(f"{name} must be finite and nonempty, got {(lo, hi)}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {sorted(FRAMES)}, got {self.frame!r}")

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (*self.u_range, *self.v_range)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(FRAMES[self.frame])

    def to_momenta(self, u, v):
        (a11, a12), (a21, a22) = FRAMES[self.frame]
        return a11 * u + a12 * v, a21 * u + a22 * v

    @property
    def center(self) -> tuple[float, float]:
        """Box centre as particle momenta ``(p1, p2)``."""
        return self.to_momenta(0.5 * sum(self.u_range), 0.5 * sum(self.v_range))

    def corners(self) -> list[tuple[float, float]]:
        """Box corners as particle momenta."""
        return [self.to_momenta(u, v) for u in self.u_range for v in self.v_range]

    def density(self, p1, p2) -> np.ndarray:
        values = self.func(p1, p2)
        if self.is_distribution:
            return np.real(values)
        return np.abs(values) ** 2

    def with_phase(self, xi: ArrayFunc) -> "MomentumAmplitude":
        """Amplitude multiplied by ``exp(i xi(p1, p2))``."""
        if self.is_distribution:
            raise ValueError("a momentum phase is only defined for an amplitude, not a distribution")
        base = self.func
        return MomentumAmplitude(
            lambda p1, p2: base(p1, p2) * np.exp(1j * xi(p1, p2)), self.u_range, self.v_range, False, self.frame
        )

    def exchanged(self) -> "MomentumAmplitude":
        """Particle labels swapped: ``(p1, p2) -> (p2, p1)``."""
        base = self.func
        if self.frame == "particle":
            u_range, v_range = self.v_range, self.u_range
        else:
            u_range, v_range = self.u_range, (-self.v_range[1], -self.v_range[0])
        return MomentumAmplitude(lambda p1, p2: base(p2, p1), u_range, v_range, self.is_distribution, self.frame)


@dataclass(frozen=True)
class QuadratureSpec:
    """Cubature controls; ``tolerance`` is absolute, on the momentum overlap."""

    tolerance: float = 1e-9
    max_depth: int = 12
    order: int = 7
    max_panel_phase: float = 2.0 * math.pi
    max_initial_panels: int = 1024

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if not self.max_panel_phase > 0:
            raise ValueError("max_panel_phase must be > 0")


def gaussian_distribution(params: DteParams, width: float = 8.0) -> MomentumAmplitude:
    """Gaussian ``pr(p1, p2)`` with centre-of-mass and relative spreads from ``params``.

    The support box, in centre-of-mass and relative coordinates, is the mean
    plus/minus ``width`` standard deviations along each.
    """
    s_cm, s_rel, m, v = params.sigma_p_cm, params.sigma_p_rel, params.mass, params.v_rel
    norm = 1.0 / (2.0 * math.pi * s_cm * s_rel)

    def pr(p1, p2):
        return norm * np.exp(
            -((p1 + p2) ** 2) / (2.0 * s_cm**2) - (p1 - p2 - m * v) ** 2 / (8.0 * s_rel**2)
        )

    q0 = 0.5 * m * v
    return MomentumAmplitude(
        pr, (-width * s_cm, width * s_cm), (q0 - width * s_rel, q0 + width * s_rel), True, "cm_rel"
    )


def gaussian_amplitude(params: DteParams, width: float = 8.0) -> MomentumAmplitude:
    """Real, pure-state amplitude ``sqrt(pr)`` on the same box as ``gaussian_distribution``."""
    dist = gaussian_distribution(params, width)
    return MomentumAmplitude(
        lambda p1, p2: np.sqrt(dist.func(p1, p2)).astype(complex), dist.u_range, dist.v_range, False, dist.frame
    )


def mixture(components: Sequence[MomentumAmplitude], weights: Sequence[float]) -> MomentumAmplitude:
    """Convex combination of densities on the bounding box of all components.

    Components sharing a frame keep it; otherwise the box is the particle-frame
    bounding box of every component's corners.
    """
    if len(components) != len(weights) or not components:
        raise ValueError("need one weight per component")
    w = np.asarray(weights, dtype=float)
    if (w < 0).any() or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    comps = list(components)

    def pr(p1, p2):
        return sum(wi * c.density(p1, p2) for wi, c in zip(w, comps))

    frames = {c.frame for c in comps}
    if len(frames) == 1:
        boxes = np.array([c.box for c in comps])
        frame = frames.pop()
    else:
        corners = np.array([pt for c in comps for pt in c.corners()])
        boxes = np.column_stack([corners[:, 0], corners[:, 0], corners[:, 1], corners[:, 1]])
        frame = "particle"
    u = (boxes[:, 0].min(), boxes[:, 1].max())
    v = (boxes[:, 2].min(), boxes[:, 3].max())
    return MomentumAmplitude(pr, (float(u[0]), float(u[1])), (float(v[0]), float(v[1])), True, frame)


@dataclass(frozen=True)
class OverlapResult:
    value: complex
    error: float
    norm: float
    norm_error: float
    panels: int = field(default=0, compare=False)


def _initial_splits(psi: MomentumAmplitude, params: DteParams, settings: DteSettings, spec: QuadratureSpec):
    """Panels per axis so the integrand phase turns by at most ``max_panel_phase`` per panel."""
    A = psi.matrix
    ell = np.array([settings.ell1, settings.ell2])
    # grad_p(phase) = (ell - p tau / m) / hbar is linear in p, so its extremes
    # along each integration axis sit at box corners.
    grads = [(ell - np.array(pt) * params.tau / params.mass) / HBAR for pt in psi.corners()]
    splits = []
    for axis, (lo, hi) in enumerate((psi.u_range, psi.v_range)):
        slope = max(abs(float(A[:, axis] @ g)) for g in grads)
        turn = slope * (hi - lo)
        n = max(1, math.ceil(turn / spec.max_panel_phase))
        if n > spec.max_initial_panels:
            raise ToleranceNotReachedError(
                f"integrand phase turns by {turn:.3e} rad across the support box; "
                f"resolving it needs {n} panels per axis (limit {spec.max_initial_panels})",
                estimate=None,
                error_estimate=math.inf,
            )
        splits.append(n)
    return tuple(splits)


def momentum_overlap(
    psi: MomentumAmplitude, params: DteParams, settings: DteSettings, spec: QuadratureSpec
) -> OverlapResult:
    """Cubature of the early/late overlap ``I`` together with the normalisation of ``pr``.

    The integrand phase is expanded about the box centre ``c`` so that large
    common phases (``c.ell / hbar`` can be ~1e4 rad at SI scales) are split off
    analytically and the cubature only sees the residual variation.
    """
    c1, c2 = psi.center
    m, tau = params.mass, params.tau
    k1 = (settings.ell1 - c1 * tau / m) / HBAR
    k2 = (settings.ell2 - c2 * tau / m) / HBAR
    q = tau / (2.0 * m * HBAR)
    central = (c1 * settings.ell1 + c2 * settings.ell2) / HBAR - (c1 * c1 + c2 * c2) * q

    def integrand(u, v):
        p1, p2 = psi.to_momenta(u, v)
        d1 = p1 - c1
        d2 = p2 - c2
        pr = psi.density(p1, p2)
        phase = k1 * d1 + k2 * d2 - q * (d1 * d1 + d2 * d2)
        return np.stack([pr * np.exp(1j * phase), pr.astype(complex)])

    splits = _initial_splits(psi, params, settings, spec)
    try:
        res = adaptive_cubature(
            integrand,
            psi.box,
            tol=spec.tolerance,
            max_depth=spec.max_depth,
            order=spec.order,
            initial_splits=splits,
            ncomp=2,
        )
    except ToleranceNotReachedError as exc:
        rotated = None
        if exc.estimate is not None:
            rotated = complex(exc.estimate[0]) * complex(np.exp(1j * central))
        raise ToleranceNotReachedError(str(exc), rotated, float(exc.error_estimate[0])) from None

    value = complex(res.value[0]) * complex(np.exp(1j * central))
    norm = float(res.value[1].real)
    norm_error = float(res.error[1])
    if abs(norm - 1.0) > 1e-6 + norm_error:
        raise NormalizationError(
            f"momentum distribution integrates to {norm:.9f} over its support box (expected 1)"
        )
    return OverlapResult(value, float(res.error[0]), norm, norm_error, res.panels)


def _branch_weights(settings: DteSettings, outcome: PortOutcome):
    s1, s2 = outcome
    f = early_port_amplitude(settings.theta1, s1) * early_port_amplitude(settings.theta2, s2)
    g = late_port_amplitude(settings.theta1, s1) * late_port_amplitude(settings.theta2, s2)
    return f, g


def _probability_from_overlap(overlap: complex, phi_tau: float, settings: DteSettings, outcome: PortOutcome):
    f, g = _branch_weights(settings, outcome)
    cross = (overlap * complex(np.exp(-1j * phi_tau))).real
    return 0.5 * (f * f + g * g + 2.0 * f * g * cross), abs(f * g)


def dte_probability_quadrature(
    psi: MomentumAmplitude,
    params: DteParams,
    settings: DteSettings,
    outcome: PortOutcome,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """Port probability and a bound on its quadrature error.

    Only ``mass``, ``tau`` and ``phi_tau`` are read from ``params``; the momentum
    content comes from ``psi``.  Any splitting angles are accepted.
    """
    spec = spec or QuadratureSpec()
    ov = momentum_overlap(psi, params, settings, spec)
    p, scale = _probability_from_overlap(ov.value, params.phi_tau, settings, outcome)
    return p, scale * ov.error


def dte_probabilities_quadrature(
    psi: MomentumAmplitude,
    params: DteParams,
    settings: DteSettings,
    spec: QuadratureSpec | None = None,
) -> tuple[tuple[float, float, float, float], float, OverlapResult]:
    """All four probabilities (``++, +-, -+, --``) from one cubature.

    Returns ``(probabilities, max_error_estimate, overlap)``.
    """
    spec = spec or QuadratureSpec()
    ov = momentum_overlap(psi, params, settings, spec)
    probs, errs = [], []
    for o in OUTCOMES:
        p, scale = _probability_from_overlap(ov.value, params.phi_tau, settings, o)
        probs.append(p)
        errs.append(scale * ov.error)
    return tuple(probs), max(errs), ov


def momentum_phase_invariance_check(
    psi: MomentumAmplitude,
    phase: ArrayFunc,
    params: DteParams,
    settings: DteSettings,
    outcome: PortOutcome,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """``|P(psi) - P(psi e^{i xi})|`` and the larger of the two error estimates.

    A rigid source displacement ``d`` is ``xi = (p1 + p2) d / hbar``; extra
    free flight for time ``t`` is ``xi = (p1^2 + p2^2) t / (2 m hbar)``.
    """
    spec = spec or QuadratureSpec()
    p_a, e_a = dte_probability_quadrature(psi, params, settings, outcome, spec)
    p_b, e_b = dte_probability_quadrature(psi.with_phase(phase), params, settings, outcome, spec)
    return abs(p_a - p_b), max(e_a, e_b)


def parity_symmetry_check(
    psi: MomentumAmplitude,
    params: DteParams,
    settings: DteSettings,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """Compare the directed state with its particle-exchanged partner.

    The partner has particle 1 travelling into interferometer 2 and vice versa,
    so its probability for ports ``(s1, s2)`` of interferometers ``(1, 2)`` is
    computed with the exchanged momentum distribution, the interferometer
    settings routed accordingly and the port labels swapped.  Returns the
    maximum deviation over the four outcomes and the combined error estimate.
    """
    spec = spec or QuadratureSpec()
    direct, e_a, _ = dte_probabilities_quadrature(psi, params, settings, spec)
    partner_probs, e_b, _ = dte_probabilities_quadrature(psi.exchanged(), params, settings.swapped(), spec)
    partner = dict(zip(OUTCOMES, partner_probs))
    deviation = max(abs(p - partner[o.swapped()]) for o, p in zip(OUTCOMES, direct))
    return deviation, e_a + e_b
