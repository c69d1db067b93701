import math

import pytest
from hypothesis import given, strategies as st

from dtebell.params import HBAR, DteParams, InvalidParameterError, derived_scales, switch_distinguishability

pos = st.floats(min_value=1e-3, max_value=1e3)


def test_unit_dispersion_times():
    p = DteParams(mass=1.0, v_rel=1.0, sigma_p_cm=math.sqrt(2 * HBAR), sigma_p_rel=math.sqrt(HBAR / 2))
    T_cm, T_rel, _ = derived_scales(p)
    assert T_cm == pytest.approx(1.0, rel=1e-15)
    assert T_rel == pytest.approx(1.0, rel=1e-15)


def test_li_reduced_wavelength():
    p = DteParams(mass=9.988e-27, v_rel=2e-2, sigma_p_cm=1e-30, sigma_p_rel=1e-30)
    # 2 hbar / (m v_rel) by hand with hbar = 1.054571817e-34
    assert derived_scales(p)[2] == pytest.approx(1.055838823588306e-06, rel=1e-8)


def test_derived_scales_formulae():
    p = DteParams(mass=2.0, v_rel=3.0, sigma_p_cm=5.0, sigma_p_rel=7.0)
    assert derived_scales(p) == (2 * 2.0 * HBAR / 25.0, 2.0 * HBAR / (2 * 49.0), 2 * HBAR / (2.0 * 3.0))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(mass=0.0, v_rel=1, sigma_p_cm=1, sigma_p_rel=1),
        dict(mass=1, v_rel=-1, sigma_p_cm=1, sigma_p_rel=1),
        dict(mass=1, v_rel=1, sigma_p_cm=0, sigma_p_rel=1),
        dict(mass=1, v_rel=1, sigma_p_cm=1, sigma_p_rel=-2),
        dict(mass=1, v_rel=1, sigma_p_cm=1, sigma_p_rel=1, tau=-1),
        dict(mass=1, v_rel=1, sigma_p_cm=1, sigma_p_rel=1, phi_tau=math.nan),
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        DteParams(**kwargs)


def test_from_dispersion_times_roundtrip():
    p = DteParams.from_dispersion_times(9.988e-27, 2e-2, T_cm=3.0, T_rel=0.7, tau=1.0)
    assert p.T_cm == pytest.approx(3.0, rel=1e-14)
    assert p.T_rel == pytest.approx(0.7, rel=1e-14)
    assert p.matched_ell == (0.01, -0.01)


@given(pos, pos, pos, pos)
def test_spread_scaling(m, v, s_cm, s_rel):
    p = DteParams(m, v, s_cm, s_rel)
    q = DteParams(m, v, 2 * s_cm, 2 * s_rel)
    assert q.T_cm == pytest.approx(p.T_cm / 4, rel=1e-15)
    assert q.T_rel == pytest.approx(p.T_rel / 4, rel=1e-15)


@given(pos, pos)
def test_wavelength_times_momentum_is_hbar(m, v):
    p = DteParams(m, v, 1.0, 1.0)
    assert p.lambdabar_rel * p.p0_rel == pytest.approx(HBAR, rel=4e-16)


def test_switch_zero_delay():
    p = DteParams(9.988e-27, 2e-2, 1e-30, 5e-31, tau=0.0)
    assert switch_distinguishability(p, 1.0) == 0.0


def test_switch_ratio_one_at_definition():
    # tau chosen so the separation equals the minimum-uncertainty width
    sigma_p = 5e-31
    width = HBAR / (2 * sigma_p)
    v = 2e-2
    p = DteParams(9.988e-27, v, 1e-30, sigma_p, tau=2 * width / v)
    assert switch_distinguishability(p, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_switch_li_scenario():
    p = DteParams(9.988e-27, 2e-2, 1e-30, 5e-31, tau=1.0)
    # s = 1 cm, sigma_x0 = hbar/(2 sigma_p), T = m hbar/(2 sigma_p^2), by hand
    assert switch_distinguishability(p, 1.0) == pytest.approx(85.66358371485856, rel=1e-8)


def test_switch_rejects_negative_time():
    p = DteParams(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        switch_distinguishability(p, -1.0)
