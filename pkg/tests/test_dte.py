import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import brentq

from conftest import li_params
from dtebell.dte import (
    DteSettings,
    UnsupportedSplittingRatioError,
    dte_fringe_scan,
    dte_probabilities_gaussian,
    dte_probability_gaussian,
    dte_visibility,
    global_phase,
)
from dtebell.tbe import OUTCOMES, PortOutcome, TbeSettings, tbe_probability

ratio = st.floats(min_value=0.0, max_value=3.0)
offset = st.floats(min_value=-5.0, max_value=5.0)  # in units of envelope widths


def test_no_dispersion_no_offset():
    p = li_params(tau=0.0)
    b = dte_probability_gaussian(p, DteSettings(0.0, 0.0), PortOutcome(1, 1))
    assert b.modulation_amplitude == 1.0
    assert b.cosine_argument == 0.0
    assert b.phi0 == 0.0
    assert b.total == 0.5


def test_threshold_amplitude_at_matched_point():
    p = li_params(T_cm=1.0, T_rel=1.0, tau=1.0)
    b = dte_probability_gaussian(p, DteSettings(*p.matched_ell), PortOutcome(1, -1))
    assert b.modulation_amplitude == pytest.approx(2**-0.5, abs=1e-15)


def test_quarter_when_cosine_vanishes(li):
    # move ell1 until the cosine argument is pi/2 (mod 2 pi)
    l1, l2 = li.matched_ell
    lam = li.lambdabar_rel

    def cosine(x):
        return math.cos(dte_probability_gaussian(li, DteSettings(l1 + x, l2), PortOutcome(1, 1)).cosine_argument)

    grid = np.linspace(0.0, 2 * math.pi * lam, 9)
    i = next(k for k in range(8) if cosine(grid[k]) * cosine(grid[k + 1]) < 0)
    s = DteSettings(l1 + brentq(cosine, grid[i], grid[i + 1], xtol=1e-22), l2)
    for o in OUTCOMES:
        assert dte_probability_gaussian(li, s, o).total == pytest.approx(0.25, abs=1e-9)


def test_rejects_asymmetric_splitter(li):
    with pytest.raises(UnsupportedSplittingRatioError):
        dte_probability_gaussian(li, DteSettings(0, 0, 0.3, math.pi / 4), PortOutcome(1, 1))


def test_global_phase_definition(li):
    expected = li.tau * li.v_rel / li.lambdabar_rel + 2 * math.atan(0.5) + 2 * li.phi_tau
    assert global_phase(li) == pytest.approx(expected, rel=1e-15)


def test_visibility_limits():
    p = li_params(tau=0.0)
    assert dte_visibility(p, 0.0, 0.0) == 1.0
    q = li_params(T_cm=0.8, T_rel=3.0, tau=1.0)
    lorentz = (1 + (1 / 0.8) ** 2) ** -0.25 * (1 + (1 / 3.0) ** 2) ** -0.25
    assert dte_visibility(q, 0.0, q.tau * q.v_rel) == pytest.approx(lorentz, rel=1e-14)
    assert dte_visibility(q, 1.0, q.tau * q.v_rel) == 0.0


@st.composite
def scenarios(draw):
    r_cm, r_rel = draw(ratio), draw(ratio)
    p = li_params(T_cm=1.0 / max(r_cm, 1e-6), T_rel=1.0 / max(r_rel, 1e-6), tau=1.0,
                  phi_tau=draw(st.floats(0, 2 * math.pi)))
    from dtebell.bell import envelope_widths

    w_diff, w_sum = envelope_widths(p)
    u, v = draw(offset), draw(offset)
    diff = p.tau * p.v_rel + u * w_diff
    s = v * w_sum
    return p, DteSettings(0.5 * (s + diff), 0.5 * (s - diff))


@given(scenarios())
def test_normalisation_and_sign_structure(case):
    p, s = case
    pp, pm, mp, mm = dte_probabilities_gaussian(p, s)
    assert abs(pp + pm + mp + mm - 1.0) < 1e-12
    assert pp == mm and pm == mp
    assert 0.0 <= min(pp, pm) and max(pp, pm) <= 0.5


@given(scenarios(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotone_degradation(case, f1, f2):
    p, s = case
    diff = s.ell1 - s.ell2 - p.tau * p.v_rel
    total = s.ell1 + s.ell2
    lo, hi = sorted((f1, f2))
    v_hi = dte_visibility(p, total * hi, p.tau * p.v_rel + diff)
    v_lo = dte_visibility(p, total * lo, p.tau * p.v_rel + diff)
    assert v_hi <= v_lo + 1e-15
    v_hi = dte_visibility(p, total, p.tau * p.v_rel + diff * hi)
    v_lo = dte_visibility(p, total, p.tau * p.v_rel + diff * lo)
    assert v_hi <= v_lo + 1e-15


@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(0, 2 * math.pi))
def test_tbe_limit(x1, x2, phi_tau):
    p = li_params(T_cm=1e6, T_rel=1e6, tau=0.0, phi_tau=phi_tau)
    lam = p.lambdabar_rel
    s = DteSettings(x1 * lam, x2 * lam)
    # phases phi_i -> ell_i/lambdabar with phi1 + phi2 -> (ell1 - ell2)/lambdabar, phi_tau -> phi0/2
    tbe = TbeSettings(x1, -x2)
    for o in OUTCOMES:
        closed = dte_probability_gaussian(p, s, o).total
        assert closed == pytest.approx(tbe_probability(o, tbe, global_phase(p) / 2), abs=1e-9)


def test_fringe_scan_rows_normalised(li):
    rows = dte_fringe_scan(li, -0.01, (0.0099, 0.0101, 2))
    assert len(rows) == 2
    for r in rows:
        assert r.P_pp + r.P_pm + r.P_mp + r.P_mm == pytest.approx(1.0, abs=1e-12)
    assert rows[0].ell1 < rows[1].ell1


def test_fringe_scan_range_errors(li):
    with pytest.raises(ValueError):
        dte_fringe_scan(li, 0.0, (0.0, 1.0, 1))
    with pytest.raises(ValueError):
        dte_fringe_scan(li, 0.0, (1.0, 0.0, 5))


def test_fringe_count_around_matched_point(li):
    assert li.lambdabar_rel / (li.tau * li.v_rel) < 1e-3
    l1, l2 = li.matched_ell
    period = 2 * math.pi * li.lambdabar_rel
    rows = dte_fringe_scan(li, l2, (l1 - 5 * period, l1 + 5 * period, 4001))
    mod = np.array([r.P_pp - r.P_pm for r in rows])
    crossings = int(np.count_nonzero(np.sign(mod[1:]) != np.sign(mod[:-1])))
    assert crossings // 2 >= 5
    assert abs(crossings - 20) <= 1


def test_fringe_spacing_without_delay():
    p = li_params(T_cm=1e6, T_rel=1e6, tau=0.0, phi_tau=0.4)
    lam = p.lambdabar_rel
    period = 2 * math.pi * lam

    def excess(x):
        return dte_probability_gaussian(p, DteSettings(x, 0.0), PortOutcome(1, 1)).total - 0.25

    # each peak sits midway between an upward and the following downward
    # crossing of the quarter level; the crossings are steep and locate well
    grid = np.linspace(-4 * period, 4 * period, 801)
    vals = np.array([excess(x) for x in grid])
    roots = [
        (brentq(excess, grid[k], grid[k + 1], xtol=1e-24), vals[k] < 0)
        for k in range(len(grid) - 1)
        if vals[k] * vals[k + 1] < 0
    ]
    peaks = [0.5 * (a + b) for (a, up), (b, _) in zip(roots, roots[1:]) if up]
    gaps = np.diff(peaks)
    assert len(gaps) >= 6
    np.testing.assert_allclose(gaps, period, rtol=1e-9)
