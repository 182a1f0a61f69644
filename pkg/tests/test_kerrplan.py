import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from cvsynth import kerrplan as kp
from cvsynth.errors import OutOfRange, TooLarge
from cvsynth.symplectic import GateKind


def test_raw_parameters_at_tenth():
    raw = kp.raw_parameters(0.1)
    assert raw["p"] == pytest.approx(17.61, abs=5e-3)
    assert raw["k"] == pytest.approx(1.34, abs=5e-3)
    assert raw["l"] == pytest.approx(7.85, abs=5e-3)


def test_plan_at_tenth():
    plan = kp.plan(0.1)
    assert (plan.p, plan.k, plan.l) == (18, 2, 8)
    assert plan.tau == pytest.approx(math.pi / 18)
    assert plan.per_block_count == 2 * (4 * 64 + 1) * 8 == 4112
    assert plan.total_count == 9 * 4112 * 18


def test_small_angles_match_reference_rounding():
    ang = kp.plan(0.1).derived_angles
    assert round(ang["cz_small"], 3) == 0.011
    assert round(ang["cubic_small"], 3) == 0.011


@pytest.mark.parametrize("rounding,expected", [("ceil", 0.085), ("floor", 0.086)])
def test_big_cubic_angle_depends_on_rounding(rounding, expected):
    assert round(kp.plan(0.1, rounding).derived_angles["cubic_big"], 3) == expected


@pytest.mark.parametrize("y", [0.0, -0.1, math.pi, 4.0])
def test_plan_rejects_out_of_range(y):
    with pytest.raises(OutOfRange):
        kp.plan(y)


@given(st.floats(1e-3, 3.0))
def test_plan_monotone_counts(y):
    a, b = kp.plan(y), kp.plan(y / 2)
    assert b.total_count >= a.total_count
    assert a.tau < 1


def test_count_report_numbers():
    cr = kp.count_report(0.1)
    assert cr.printed_asymptotic == pytest.approx(1.09e3, rel=5e-3)
    assert cr.exact_total_real == pytest.approx(1.9e5, rel=1e-2)
    assert cr.internally_consistent_asymptotic == pytest.approx(cr.exact_total_real, rel=1e-2)
    assert cr.discrepancy_factor == pytest.approx(math.pi**4.5)
    assert len(cr.flags) == 2


def test_splitting_weights_sum_to_tau():
    tau = 0.3
    seq = kp.splitting_sequence(tau)
    totals = {}
    for f in seq:
        totals[f.tag] = totals.get(f.tag, 0.0) + f.strength
    assert totals == pytest.approx({"O1": tau, "O2": tau, "O3": tau, "O4": tau})
    assert [f.tag for f in seq] == [f.tag for f in reversed(seq)]


def test_splitting_error_slope():
    taus = [1e-3, 1e-2, 1e-1]
    errs = [kp.verify_splitting(t, seed=3) for t in taus]
    assert abs(kp.loglog_slope(taus, errs) - 3) < 0.3


def test_rescaling_error_slope():
    taus = [1e-3, 1e-2, 1e-1]
    errs = [kp.verify_rescaling(t, 2, 2) for t in taus]
    assert abs(kp.loglog_slope(taus, errs) - 4 / 3) < 0.2


def test_printed_block_does_not_converge_like_inverse():
    for t in (1e-3, 1e-2):
        assert kp.verify_rescaling(t, 2, 2, variant="printed") > 10 * kp.verify_rescaling(t, 2, 2)


@pytest.mark.parametrize("variant", ["inverse", "printed"])
def test_nested_sequence_matches_matrix_product(variant):
    rng = np.random.default_rng(5)
    ops = {tag: kp.random_hermitian(3, rng) for tag in "ABC"}
    tp, k, l = 0.02, 1, 2
    U = np.eye(3, dtype=complex)
    for f in kp.nested_sequence(tp, k, l, variant=variant):
        U = expm(1j * f.angle * ops[f.tag]) @ U
    ref = kp._product_matrix(tp, k, l, ops["A"], ops["B"], ops["C"], variant)
    assert np.allclose(U, ref, atol=1e-12)


def test_nested_sequence_length():
    seq = kp.nested_sequence(0.01, 2, 3)
    assert len(seq) == (2 + 8 * 9) * 8


def test_materialize_refuses_over_cap():
    with pytest.raises(TooLarge):
        kp.materialize(kp.plan(0.1), cap=10**6)


def test_materialize_small_plan():
    plan = kp.plan_from_integers(4, 1, 1, y=None)
    seq = kp.materialize(plan, cap=10**5)
    assert len(seq) == kp._materialized_length(4, 1, 1)
    assert {g.kind for g in seq} <= {GateKind.CZ, GateKind.CUBIC, GateKind.FOURIER, GateKind.FOURIER_INV}
    # O1+O2+O3+O4 = n1 n2 + (n1 + n2)/2 + const, so one net inverse Fourier per mode remains
    for mode in (0, 1):
        fwd = sum(1 for g in seq if g.kind is GateKind.FOURIER and g.modes == (mode,))
        inv = sum(1 for g in seq if g.kind is GateKind.FOURIER_INV and g.modes == (mode,))
        assert inv - fwd == 1
    cross = sum(1 for g in seq if g.kind in (GateKind.CZ, GateKind.CUBIC))
    assert cross == plan.total_count


def test_materialized_total_in_report():
    assert kp.count_report(0.1).materialized_total == kp._materialized_length(18, 2, 8)


def test_random_hermitian_normalized():
    H = kp.random_hermitian(4, np.random.default_rng(0))
    assert np.allclose(H, H.conj().T)
    assert np.linalg.norm(H, 2) == pytest.approx(1.0)
