import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import li_params
from dtebell.bell import envelope_widths
from dtebell.dte import DteSettings, dte_probabilities_gaussian, modulation_and_argument
from dtebell.oracle import (
    MomentumAmplitude,
    NormalizationError,
    QuadratureSpec,
    ToleranceNotReachedError,
    dte_probabilities_quadrature,
    dte_probability_quadrature,
    gaussian_amplitude,
    gaussian_distribution,
    mixture,
    momentum_overlap,
    momentum_phase_invariance_check,
    parity_symmetry_check,
)
from dtebell.params import HBAR
from dtebell.tbe import OUTCOMES, PortOutcome, TbeSettings, tbe_probability


def sech2_distribution(c1, c2, a, b, width=25.0):
    """Non-Gaussian product density, normalised analytically."""

    def pr(p1, p2):
        return (1 / np.cosh((p1 - c1) / a)) ** 2 / (2 * a) * (1 / np.cosh((p2 - c2) / b)) ** 2 / (2 * b)

    return MomentumAmplitude(pr, (c1 - width * a, c1 + width * a), (c2 - width * b, c2 + width * b), True)


def skewed(li):
    """Two-component mixture without exchange or reflection symmetry."""
    g = gaussian_distribution(li)
    shifted = gaussian_distribution(li.replace(v_rel=li.v_rel * (1 + 1e-5)))
    return mixture([g, shifted, sech2_distribution(li.p0_rel, -li.p0_rel * 0.99999, li.sigma_p_rel, 2 * li.sigma_p_rel)],
                   [0.5, 0.3, 0.2])


def settings_near_matched(p, u_diff, u_sum):
    w_diff, w_sum = envelope_widths(p)
    diff = p.tau * p.v_rel + u_diff * w_diff
    s = u_sum * w_sum
    return DteSettings(0.5 * (s + diff), 0.5 * (s - diff))


def test_gaussian_normalised(li):
    ov = momentum_overlap(gaussian_distribution(li), li, DteSettings(*li.matched_ell), QuadratureSpec())
    assert ov.norm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "r_cm, r_rel, u_diff, u_sum, phi_tau",
    [(0.5, 0.5, 0.0, 0.0, 0.0), (3.0, 0.1, 1.3, -2.0, 1.0), (0.0, 2.5, -3.9, 3.9, 4.0), (1.0, 1.0, 0.4, 0.2, 2.2)],
)
def test_matches_closed_form(r_cm, r_rel, u_diff, u_sum, phi_tau):
    p = li_params(T_cm=1 / max(r_cm, 1e-6), T_rel=1 / max(r_rel, 1e-6), tau=1.0, phi_tau=phi_tau)
    s = settings_near_matched(p, u_diff, u_sum)
    quad, err, _ = dte_probabilities_quadrature(gaussian_distribution(p), p, s)
    closed = dte_probabilities_gaussian(p, s)
    for q, c in zip(quad, closed):
        assert abs(q - c) < max(1e-6, 10 * err)
        assert abs(q - c) < 1e-9


def test_pure_amplitude_equals_distribution(li):
    s = settings_near_matched(li, 0.3, -0.2)
    a, _, _ = dte_probabilities_quadrature(gaussian_amplitude(li), li, s)
    b, _, _ = dte_probabilities_quadrature(gaussian_distribution(li), li, s)
    np.testing.assert_allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("make", ["gauss", "sech2", "mixture"])
def test_no_delay_no_offset_gives_half(li, make):
    p = li.replace(tau=0.0)
    psi = {
        "gauss": lambda: gaussian_distribution(p),
        "sech2": lambda: sech2_distribution(1e-28, -2e-28, 3e-31, 7e-31),
        "mixture": lambda: skewed(li),
    }[make]()
    prob, err = dte_probability_quadrature(psi, p, DteSettings(0.0, 0.0), PortOutcome(1, 1))
    assert prob == pytest.approx(0.5, abs=1e-9)


def test_plane_wave_limit(li):
    pbar = (li.p0_rel * 1.01, -li.p0_rel * 0.98)
    narrow = 1e-4 * li.sigma_p_rel
    psi = sech2_distribution(pbar[0], pbar[1], narrow, narrow, width=30.0)
    # offsets chosen so the narrow-peak corrections stay far below the tolerance
    s = DteSettings(0.0101, -0.0098)
    phase = (pbar[0] * s.ell1 + pbar[1] * s.ell2) / HBAR - (pbar[0] ** 2 + pbar[1] ** 2) * li.tau / (2 * li.mass * HBAR)
    for o in OUTCOMES:
        prob, _ = dte_probability_quadrature(psi, li.replace(phi_tau=0.7), s, o)
        expected = 0.25 * (1 + o.product * math.cos(phase - 0.7))
        assert prob == pytest.approx(expected, abs=1e-6)


def test_general_theta_plane_wave_matches_tbe(li):
    pbar = (li.p0_rel, -li.p0_rel)
    narrow = 1e-5 * li.sigma_p_rel
    psi = sech2_distribution(pbar[0], pbar[1], narrow, narrow, width=30.0)
    p = li.replace(tau=0.0, phi_tau=0.4)
    s = DteSettings(2.1 * li.lambdabar_rel, 0.3 * li.lambdabar_rel, 0.3, 1.1)
    tbe = TbeSettings(pbar[0] * s.ell1 / HBAR, pbar[1] * s.ell2 / HBAR, 0.3, 1.1)
    for o in OUTCOMES:
        prob, _ = dte_probability_quadrature(psi, p, s, o)
        assert prob == pytest.approx(tbe_probability(o, tbe, 0.4), abs=1e-8)


def test_general_theta_gaussian(li):
    # With theta_i general the cross term still only needs the Gaussian overlap.
    p = li.replace(phi_tau=0.9)
    s = settings_near_matched(p, 0.5, 0.5)
    s = DteSettings(s.ell1, s.ell2, 0.2, 1.3)
    amp, arg = modulation_and_argument(p, s.ell1, s.ell2)
    for o in OUTCOMES:
        f = (math.cos(0.2) if o.sigma1 == 1 else math.sin(0.2)) * (math.cos(1.3) if o.sigma2 == 1 else math.sin(1.3))
        g = (math.sin(0.2) if o.sigma1 == 1 else -math.cos(0.2)) * (math.sin(1.3) if o.sigma2 == 1 else -math.cos(1.3))
        expected = 0.5 * (f * f + g * g + 2 * f * g * amp * math.cos(arg))
        prob, _ = dte_probability_quadrature(gaussian_distribution(p), p, s, o)
        assert prob == pytest.approx(expected, abs=1e-10)


def test_quadrature_outcomes_sum_to_one(li):
    s = settings_near_matched(li, -1.0, 2.0)
    probs, err, _ = dte_probabilities_quadrature(skewed(li), li, DteSettings(s.ell1, s.ell2, 0.4, 0.9))
    assert abs(sum(probs) - 1.0) <= max(4 * err, 1e-15)
    assert all(0.0 <= q <= 1.0 for q in probs)


def test_self_consistency_on_halving_tolerance(li):
    s = settings_near_matched(li, 0.7, -0.4)
    psi = gaussian_distribution(li)
    coarse = momentum_overlap(psi, li, s, QuadratureSpec(tolerance=1e-5, max_panel_phase=50.0))
    fine = momentum_overlap(psi, li, s, QuadratureSpec(tolerance=5e-6, max_panel_phase=50.0))
    assert abs(fine.value - coarse.value) < coarse.error


def test_tolerance_not_reached(li):
    s = settings_near_matched(li, 0.7, -0.4)
    spec = QuadratureSpec(tolerance=1e-15, max_depth=1, max_panel_phase=100.0)
    with pytest.raises(ToleranceNotReachedError) as info:
        dte_probability_quadrature(gaussian_distribution(li), li, s, PortOutcome(1, 1), spec)
    assert info.value.estimate is not None


def test_unnormalised_input_rejected(li):
    g = gaussian_distribution(li)
    doubled = MomentumAmplitude(lambda p1, p2: 2 * g.func(p1, p2), g.u_range, g.v_range, True, g.frame)
    with pytest.raises(NormalizationError):
        dte_probability_quadrature(doubled, li, DteSettings(*li.matched_ell), PortOutcome(1, 1))


def test_momentum_phase_needs_amplitude(li):
    with pytest.raises(ValueError):
        gaussian_distribution(li).with_phase(lambda p1, p2: p1)


def test_phase_invariance_zero_phase(li):
    s = settings_near_matched(li, 0.2, 0.1)
    dev, _ = momentum_phase_invariance_check(
        gaussian_amplitude(li), lambda p1, p2: np.zeros_like(p1), li, s, PortOutcome(1, 1)
    )
    assert dev == 0.0


def test_phase_invariance_source_displacement(li):
    s = settings_near_matched(li, 0.2, 0.1)
    d = 3.7e-3
    dev, err = momentum_phase_invariance_check(
        gaussian_amplitude(li), lambda p1, p2: (p1 + p2) * d / HBAR, li, s, PortOutcome(1, -1)
    )
    assert dev < 1e-8
    assert dev <= 10 * err + 1e-15


def test_phase_invariance_free_flight(li):
    s = settings_near_matched(li, -0.5, 0.3)
    t = 2.5
    dev, err = momentum_phase_invariance_check(
        gaussian_amplitude(li), lambda p1, p2: (p1**2 + p2**2) * t / (2 * li.mass * HBAR), li, s, PortOutcome(-1, -1)
    )
    assert dev < 1e-8


def test_parity_symmetric_gaussian(li):
    s = settings_near_matched(li, 0.8, -1.1)
    dev, err = parity_symmetry_check(gaussian_distribution(li), li, DteSettings(s.ell1, s.ell2, 0.3, 0.6))
    assert dev < 1e-8


def test_parity_equal_offsets(li):
    s = DteSettings(1e-6, 1e-6)
    dev, _ = parity_symmetry_check(gaussian_distribution(li.replace(tau=0.0)), li.replace(tau=0.0), s)
    assert dev < 1e-14


def test_parity_asymmetric_distribution_is_reported(li):
    s = settings_near_matched(li, 0.8, -1.1)
    dev, err = parity_symmetry_check(skewed(li), li, s)
    assert math.isfinite(dev) and dev >= 0.0


def test_unrouted_exchange_differs(li):
    # Negative control: exchanging the particles without rerouting the
    # interferometer settings is not a symmetry.
    p = li.replace(tau=0.0, phi_tau=1.0)
    s = DteSettings(0.7 * li.lambdabar_rel, -0.3 * li.lambdabar_rel)
    direct, _, _ = dte_probabilities_quadrature(gaussian_distribution(p), p, s)
    unrouted, _, _ = dte_probabilities_quadrature(gaussian_distribution(p).exchanged(), p, s)
    assert max(abs(a - b) for a, b in zip(direct, unrouted)) > 1e-3


def test_support_box_validation():
    with pytest.raises(ValueError):
        MomentumAmplitude(lambda a, b: a, (1.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        MomentumAmplitude(lambda a, b: a, (0.0, math.inf), (0.0, 1.0))


def test_mixture_weights():
    g = sech2_distribution(0.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        mixture([g, g], [0.5, 0.6])
