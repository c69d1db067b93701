"""CHSH analysis for time-bin and dissociation-time entangled pairs.

Settings are a pair per side, ``(a, a')`` for interferometer 1 and ``(b, b')``
for interferometer 2: phases for the idealised time-bin model, arm-length
offsets in metres for the dissociation-time model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .dte import DteSettings, dte_probabilities_gaussian, modulation_and_argument
from .oracle import MomentumAmplitude, QuadratureSpec, dte_probabilities_quadrature, gaussian_distribution
from .params import DteParams
from .tbe import OUTCOMES, TbeSettings, tbe_correlation

__all__ = [
    "TSIRELSON",
    "ChshSettings",
    "ChshResult",
    "OptimizationWindowError",
    "FeasibilityReport",
    "correlation_from_probabilities",
    "chsh_value",
    "quoted_tbe_settings",
    "quoted_dte_settings",
    "chsh_tbe",
    "chsh_dte",
    "chsh_optimize_dte",
    "feasibility_conditions",
    "envelope_widths",
]

TSIRELSON = 2.0 * math.sqrt(2.0)

Engine = Literal["closed_form", "quadrature"]


def _engine(name: str) -> str:
    key = name.replace("-", "_")
    if key not in ("closed_form", "quadrature"):
        raise ValueError(f"unknown engine {name!r}; expected 'closed_form' or 'quadrature'")
    return key


@dataclass(frozen=True)
class ChshSettings:
    mode: Literal["tbe", "dte"]
    a: float
    a_prime: float
    b: float
    b_prime: float
    theta1: float = math.pi / 4
    theta2: float = math.pi / 4

    def __post_init__(self):
        if self.mode not in ("tbe", "dte"):
            raise ValueError(f"mode must be 'tbe' or 'dte', got {self.mode!r}")

    def pairs(self) -> tuple[tuple[float, float], ...]:
        """Setting pairs in CHSH order: (a,b), (a,b'), (a',b), (a',b')."""
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )


@dataclass(frozen=True)
class ChshResult:
    correlations: tuple[float, float, float, float]
    S: float
    settings: ChshSettings
    engine_error: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def violated(self) -> bool:
        return self.S > 2.0

    def as_dict(self) -> dict:
        s = self.settings
        return {
            "mode": s.mode,
            "settings": {
                "a": s.a,
                "a_prime": s.a_prime,
                "b": s.b,
                "b_prime": s.b_prime,
                "theta1": s.theta1,
                "theta2": s.theta2,
            },
            "C_ab": self.correlations[0],
            "C_ab_prime": self.correlations[1],
            "C_a_prime_b": self.correlations[2],
            "C_a_prime_b_prime": self.correlations[3],
            "S": self.S,
            "violated": self.violated,
            "engine_error": self.engine_error,
        }


def correlation_from_probabilities(P: Sequence[float], atol: float = 1e-9) -> float:
    """``sum s1 s2 P(s1, s2)`` for probabilities ordered ``++, +-, -+, --``."""
    P = np.asarray(P, dtype=float)
    if P.shape != (4,):
        raise ValueError(f"expected four outcome probabilities, got shape {P.shape}")
    if (P < -atol).any() or abs(P.sum() - 1.0) > atol:
        raise ValueError(f"outcome probabilities must be nonnegative and sum to 1, got {P.tolist()}")
    return float(P[0] - P[1] - P[2] + P[3])


def chsh_value(c_ab: float, c_abp: float, c_apb: float, c_apbp: float) -> float:
    return abs(c_ab + c_abp + c_apb - c_apbp)


def quoted_tbe_settings(phi: float) -> ChshSettings:
    """Maximally violating phases for the time-bin state with relative phase ``phi``."""
    return ChshSettings(
        "tbe", phi / 2, phi / 2 + math.pi / 2, phi / 2 - math.pi / 4, phi / 2 + math.pi / 4
    )


def chsh_tbe(phi_tau: float, settings: ChshSettings) -> ChshResult:
    if settings.mode != "tbe":
        raise ValueError("chsh_tbe needs settings in 'tbe' mode")
    cs = tuple(
        tbe_correlation(TbeSettings(p1, p2, settings.theta1, settings.theta2), phi_tau)
        for p1, p2 in settings.pairs()
    )
    return ChshResult(cs, chsh_value(*cs), settings)


def _residual_phase(params: DteParams) -> float:
    # Fringe offset relative to the matched point, reduced to (-pi, pi].
    lam = params.lambdabar_rel
    offset = (
        -0.5 * params.tau * params.v_rel / lam
        + 0.5 * math.atan(params.tau / params.T_cm)
        + 0.5 * math.atan(params.tau / params.T_rel)
        + params.phi_tau
    )
    return math.remainder(offset, 2.0 * math.pi)


def quoted_dte_settings(params: DteParams) -> ChshSettings:
    """Map the ideal time-bin CHSH phases onto arm offsets around the matched point.

    Near ``ell1 - ell2 = tau v_rel`` the fringe argument is approximately
    ``(u1 - u2)/lambdabar_rel - psi`` for offsets ``u_i`` from the matched
    point, so the time-bin phases become ``u1 = lambdabar phi1`` and
    ``u2 = -lambdabar phi2`` with ``phi_tau -> psi``.
    """
    t = quoted_tbe_settings(_residual_phase(params))
    lam = params.lambdabar_rel
    l1c, l2c = params.matched_ell
    return ChshSettings("dte", l1c + lam * t.a, l1c + lam * t.a_prime, l2c - lam * t.b, l2c - lam * t.b_prime)


def _dte_correlations(params, settings, engine, psi, spec):
    cs, errs = [], []
    for ell1, ell2 in settings.pairs():
        s = DteSettings(ell1, ell2, settings.theta1, settings.theta2)
        if engine == "closed_form":
            probs = dte_probabilities_gaussian(params, s)
            err = 0.0
        else:
            probs, err, _ = dte_probabilities_quadrature(psi, params, s, spec)
        cs.append(correlation_from_probabilities(probs))
        errs.append(err)
    return tuple(cs), errs


def chsh_dte(
    params: DteParams,
    settings: ChshSettings,
    engine: Engine = "closed_form",
    psi: MomentumAmplitude | None = None,
    spec: QuadratureSpec | None = None,
) -> ChshResult:
    """CHSH value from dissociation-time probabilities at four arm-offset pairs.

    The quadrature engine defaults to the Gaussian distribution of ``params``.
    ``engine_error`` bounds the error of S (four correlations, each a sum of
    four probabilities).
    """
    if settings.mode != "dte":
        raise ValueError("chsh_dte needs settings in 'dte' mode")
    engine = _engine(engine)
    if engine == "quadrature":
        psi = psi or gaussian_distribution(params)
        spec = spec or QuadratureSpec()
    cs, errs = _dte_correlations(params, settings, engine, psi, spec)
    return ChshResult(cs, chsh_value(*cs), settings, engine_error=4.0 * sum(errs))


class OptimizationWindowError(ValueError):
    pass


def envelope_widths(params: DteParams) -> tuple[float, float]:
    """1/e widths of the Gaussian envelope in ``ell1 - ell2`` and ``ell1 + ell2``."""
    vl = 2.0 * params.v_rel * params.lambdabar_rel
    a_rel = params.tau / params.T_rel
    a_cm = params.tau / params.T_cm
    return (
        math.sqrt(vl * params.T_rel * (1.0 + a_rel**2)),
        math.sqrt(vl * params.T_cm * (1.0 + a_cm**2)),
    )


def _best_on_grid(C: np.ndarray, chunk: int = 16):
    """Maximise |C[i,j] + C[i,j'] + C[i',j] - C[i',j']| over index quadruples.

    For fixed (j, j') the i and i' terms separate, so the search is cubic.
    """
    G = C.shape[0]
    best = (-1.0, None)
    for j0 in range(0, G, chunk):
        cj = C[:, j0 : j0 + chunk]
        plus = cj[:, :, None] + C[:, None, :]  # C[i,j] + C[i,j']
        minus = cj[:, :, None] - C[:, None, :]  # C[i',j] - C[i',j']
        for sign in (1.0, -1.0):
            a_val = (sign * plus).max(axis=0)
            b_val = (sign * minus).max(axis=0)
            total = a_val + b_val
            flat = int(np.argmax(total))
            if total.flat[flat] > best[0]:
                jj, jp = np.unravel_index(flat, total.shape)
                i = int(np.argmax(sign * plus[:, jj, jp]))
                ip = int(np.argmax(sign * minus[:, jj, jp]))
                best = (float(total.flat[flat]), (i, ip, j0 + int(jj), int(jp)))
    return best


def chsh_optimize_dte(
    params: DteParams,
    engine: Engine = "closed_form",
    psi: MomentumAmplitude | None = None,
    spec: QuadratureSpec | None = None,
    periods: float | None = None,
    step: float | None = None,
    sweeps: int | None = None,
) -> ChshResult:
    """Maximise S over the four arm offsets around the matched point.

    A coarse grid of step ``step * lambdabar_rel`` spanning ``periods`` fringe
    periods either side of the matched point is searched exhaustively.  The
    grid optimum and the quoted-phase settings are then each refined offset by
    offset with bounded scalar maximisation, and the better result is kept.
    Grid copies of the optimum shifted by whole fringes differ only by a tiny
    envelope loss, so the second start keeps the answer near the matched point.

    Defaults are ``periods=3, step=1/8, sweeps=8`` for the closed form.  With
    quadrature every evaluation costs one cubature, so the defaults shrink to
    ``periods=1/2, step=1/2, sweeps=2`` and only the better start is refined.
    """
    engine = _engine(engine)
    if engine == "quadrature":
        psi = psi or gaussian_distribution(params)
        spec = spec or QuadratureSpec()
        periods = 0.5 if periods is None else periods
        step = 0.5 if step is None else step
        sweeps = 2 if sweeps is None else sweeps
        xatol = 1e-4
    else:
        periods = 3.0 if periods is None else periods
        step = 0.125 if step is None else step
        sweeps = 8 if sweeps is None else sweeps
        xatol = 1e-9

    lam = params.lambdabar_rel
    w_diff, w_sum = envelope_widths(params)
    if min(w_diff, w_sum) < lam:
        raise OptimizationWindowError(
            f"envelope widths ({w_diff:.3e} m, {w_sum:.3e} m) are below one reduced "
            f"wavelength ({lam:.3e} m); no fringe fits in the optimisation window"
        )
    l1c, l2c = params.matched_ell
    half = 2.0 * math.pi * periods
    grid = np.linspace(-half, half, int(round(2 * half / step)) + 1)

    cache: dict[tuple[float, float], float] = {}

    def correlation(x1: float, x2: float) -> float:
        key = (x1, x2)
        if key not in cache:
            s = DteSettings(l1c + lam * x1, l2c + lam * x2)
            if engine == "closed_form":
                amp, arg = modulation_and_argument(params, s.ell1, s.ell2)
                cache[key] = float(amp * np.cos(arg))
            else:
                probs, _, _ = dte_probabilities_quadrature(psi, params, s, spec)
                cache[key] = correlation_from_probabilities(probs)
        return cache[key]

    if engine == "closed_form":
        amp, arg = modulation_and_argument(params, l1c + lam * grid[:, None], l2c + lam * grid[None, :])
        C = amp * np.cos(arg)
    else:
        C = np.array([[correlation(float(x1), float(x2)) for x2 in grid] for x1 in grid])
    _, (i, ip, j, jp) = _best_on_grid(C)

    def s_of(v) -> float:
        a, ap, b, bp = v
        return chsh_value(correlation(a, b), correlation(a, bp), correlation(ap, b), correlation(ap, bp))

    def refine(x: list[float]) -> tuple[float, list[float]]:
        current = s_of(x)
        for _ in range(sweeps):
            before = current
            for k in range(4):
                def neg(t, k=k):
                    trial = list(x)
                    trial[k] = float(t)
                    return -s_of(trial)

                res = minimize_scalar(
                    neg, bounds=(x[k] - step, x[k] + step), method="bounded", options={"xatol": xatol}
                )
                if -res.fun > current:
                    x[k] = float(res.x)
                    current = -float(res.fun)
            if current - before < 1e-13:
                break
        return current, x

    quoted = quoted_dte_settings(params)
    starts = [
        [float(grid[i]), float(grid[ip]), float(grid[j]), float(grid[jp])],
        [(quoted.a - l1c) / lam, (quoted.a_prime - l1c) / lam, (quoted.b - l2c) / lam, (quoted.b_prime - l2c) / lam],
    ]
    if engine == "quadrature":
        starts = [max(starts, key=s_of)]
    _, x = max((refine(list(s)) for s in starts), key=lambda r: r[0])

    settings = ChshSettings("dte", l1c + lam * x[0], l1c + lam * x[1], l2c + lam * x[2], l2c + lam * x[3])
    return chsh_dte(params, settings, engine, psi, spec)


@dataclass(frozen=True)
class FeasibilityReport:
    fringe_ratio: float
    fringe_condition: bool
    visibility_product: float
    visibility_condition: bool
    predicted_max_S: float
    threshold: float
    diagnostics: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "fringe_ratio": self.fringe_ratio,
            "fringe_condition": self.fringe_condition,
            "fringe_threshold": self.threshold,
            "visibility_product": self.visibility_product,
            "visibility_condition": self.visibility_condition,
            "matched_visibility": self.visibility_product**-0.25,
            "predicted_max_S": self.predicted_max_S,
            "diagnostics": list(self.diagnostics),
        }


def feasibility_conditions(params: DteParams, threshold: float = 0.01) -> FeasibilityReport:
    """Fringe-compression and visibility conditions for a Bell violation.

    ``fringe_ratio = lambdabar_rel / (tau v_rel)`` must be much smaller than one
    (operationally: below ``threshold``), and the Lorentzian product
    ``(1 + tau^2/T_cm^2)(1 + tau^2/T_rel^2)`` must stay below 4.  The predicted
    maximum of S assumes a matched envelope: ``2 sqrt(2) product^(-1/4)``.
    """
    if not threshold > 0:
        raise ValueError("threshold must be > 0")
    diagnostics = []
    if params.tau == 0:
        ratio = math.inf
        diagnostics.append(
            "tau = 0: early and late components coincide, the fringe ratio is infinite "
            "and the switch cannot separate the time bins"
        )
    else:
        ratio = params.lambdabar_rel / (params.tau * params.v_rel)
    product = (1.0 + (params.tau / params.T_cm) ** 2) * (1.0 + (params.tau / params.T_rel) ** 2)
    if product >= 4.0:
        diagnostics.append("matched-point visibility does not exceed 1/sqrt(2)")
    return FeasibilityReport(
        fringe_ratio=ratio,
        fringe_condition=ratio < threshold,
        visibility_product=product,
        visibility_condition=product < 4.0,
        predicted_max_S=TSIRELSON * product**-0.25,
        threshold=threshold,
        diagnostics=tuple(diagnostics),
    )
