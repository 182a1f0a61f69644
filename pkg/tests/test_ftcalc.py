import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvsynth import ftcalc
from cvsynth.errors import BudgetExhausted, Infeasible, OutOfRange


@pytest.mark.parametrize("m,expected", [(1, 0.0687), (2, 0.0533), (3, 0.0262), (4, 0.0129), (5, 0.0064), (6, 0.0032)])
def test_zeta(m, expected):
    assert ftcalc.zeta(m) == pytest.approx(expected, abs=1e-4)


def test_zeta_one_near_reference():
    assert abs(ftcalc.zeta(1) - 0.069) < 5e-3


def test_success_probability_conventions():
    assert ftcalc.p_succ(1, 0.1) == pytest.approx(0.97, abs=0.01)
    assert ftcalc.p_succ(1, 0.1, "gaussian_tail") == pytest.approx(0.878, abs=1e-3)


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        ftcalc.p_succ(1, 0.5)


@pytest.mark.parametrize("convention,m_min", [("literal", 5), ("gaussian_tail", 7)])
def test_cviqp_minimal_m(convention, m_min):
    r = ftcalc.cviqp_minimal_m(1e-6, 1e-3, convention)
    assert r.m_min == m_min
    assert abs(r.m_min - 6) <= 1
    assert "convention" in r.caveat
    assert ftcalc.cviqp_failure(r.m_min, 1e-3, convention) < 1e-6
    assert ftcalc.cviqp_failure(r.m_min - 1, 1e-3, convention) >= 1e-6


def test_cviqp_max_y_is_threshold_root():
    y = ftcalc.cviqp_max_y(6, 1e-6)
    assert ftcalc.cviqp_failure(6, y * 0.999) < 1e-6 < ftcalc.cviqp_failure(6, y * 1.001)


def test_cviqp_infeasible():
    with pytest.raises(Infeasible):
        ftcalc.cviqp_minimal_m(1e-6, 0.2)


def test_cviqp_bad_threshold():
    with pytest.raises(OutOfRange):
        ftcalc.cviqp_minimal_m(0.0, 1e-3)


@given(st.floats(1e-3, 2.0), st.floats(-1.0, 1.0), st.sampled_from(ftcalc.CONVENTIONS))
def test_chi_is_probability(sigma, delta, conv):
    assert 0.0 <= ftcalc.chi(sigma, delta, conv) <= 1.0


@given(st.integers(1, 6), st.floats(0, 1e-3), st.floats(0, 1e-3))
def test_failure_increases_with_y(m, y1, y2):
    lo, hi = sorted((y1, y2))
    assert ftcalc.cviqp_failure(m, lo) <= ftcalc.cviqp_failure(m, hi)


def test_chi_saturates():
    assert ftcalc.chi(0.1, math.sqrt(math.pi)) == 1.0


def test_budget_roundtrip():
    b = ftcalc.FTBudget.build(2, 1e-3, 0.01, 0.02, 1e-4)
    assert b.epsilon_m == pytest.approx(ftcalc.zeta(2) + 4e-3)
    assert b.to_json()["epsilon_q"] == 0.01
    assert ftcalc.threshold_ok(b) == (ftcalc.failure_probability(b) < 1e-4)


def test_cviqp_table():
    tab = ftcalc.gate_parameter_table("cviqp", 6, 1e-3)
    assert tab.row("d").computed == pytest.approx(142, abs=1)
    for sym in ("d", "b1", "b2", "c1", "c2"):
        assert tab.row(sym).match, sym
    assert {r.symbol for r in tab.mismatches} == {"s1", "s2"}


def test_universal_table_reports_mismatches():
    tab = ftcalc.gate_parameter_table("universal", 1, 0.1)
    d = tab.row("d")
    assert d.computed == pytest.approx(4.44, abs=5e-3)
    assert d.printed == "5.6" and d.match is False and d.note
    assert {"d", "s1", "s2", "c2"} == {r.symbol for r in tab.mismatches}
    floor = ftcalc.gate_parameter_table("universal", 1, 0.1, p_rounding="floor")
    assert floor.row("c2").match


@pytest.mark.parametrize(
    "value,printed,ok",
    [(0.0846, "0.086", False), (0.08625, "0.086", True), (117.09, "1.2e2", True), (1.595e-6, "1.6e-6", True), (4.44, "5.6", False)],
)
def test_matches_printed(value, printed, ok):
    assert ftcalc.matches_printed(value, printed) is ok


def test_psucc_curve_has_both_conventions():
    rows = ftcalc.psucc_curve([1e-3, 0.1, 0.5])
    assert set(rows[0]) == {"y", "literal", "gaussian_tail"}
    assert math.isnan(rows[-1]["literal"])
    assert rows[0]["literal"] > rows[1]["literal"]
