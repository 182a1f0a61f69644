import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erfc

from cvsynth import comb, gridsim
from cvsynth import symplectic as sp
from cvsynth.errors import GridTooSmall, TruncationTooSmall

SQRT_PI = math.sqrt(math.pi)


def vacuum(L=12.0, n=1024):
    return gridsim.from_function(lambda x: np.exp(-(x**2) / 2), L, n)


def gaussian_bins_after(gates, K=8):
    V, mu = 0.5 * np.eye(2), np.zeros(2)
    for g in gates:
        S, c = sp.affine_of(g, 1)
        V, mu = S @ V @ S.T, S @ mu + c
    return gridsim.vacuum_bin_masses(gridsim.HomodyneSpec(K), var=V[1, 1], mean=mu[1])


def test_fourier_fourth_power_is_identity():
    s = gridsim.from_function(lambda x: np.exp(-((x - 1.2) ** 2)) * (1 + 0.3j * x), 12, 512)
    t = s
    for _ in range(4):
        t = gridsim.apply_fourier(t)
    assert np.max(np.abs(t.psi - s.psi)) < 1e-9


def test_fourier_maps_position_shift_to_momentum_kick():
    # F: q -> -p, so a state centred at q = 2 ends with momentum centred at 2
    s = gridsim.from_function(lambda x: np.exp(-((x - 2) ** 2) / 2), 14, 1024)
    t = gridsim.apply_fourier(s)
    x, rho = t.x, t.density()
    assert np.sum(x * rho) * t.dq == pytest.approx(0.0, abs=1e-9)
    b = gridsim.homodyne_bins(t, 0, gridsim.HomodyneSpec(8))
    ref = gridsim.vacuum_bin_masses(gridsim.HomodyneSpec(8), mean=2.0)
    assert np.max(np.abs(b.full() - ref.full())) < 1e-8


def test_vacuum_bins_match_erf():
    spec = gridsim.HomodyneSpec(8)
    b = gridsim.homodyne_bins(vacuum(), 0, spec)
    ref = gridsim.vacuum_bin_masses(spec)
    assert np.max(np.abs(b.full() - ref.full())) < 1e-9
    assert b.total == pytest.approx(1, abs=1e-9)


def test_bin_geometry():
    spec = gridsim.HomodyneSpec(10, k_max=5)
    assert spec.K * spec.eta == pytest.approx(SQRT_PI, rel=1e-15)
    assert spec.centers().size == 11
    assert int(spec.bin_of(spec.eta * 0.999)) == 0
    assert int(spec.bin_of(spec.eta * 1.001)) == 1


@given(st.floats(-1.0, 1.0), st.floats(0.3, 2.0), st.floats(-2.0, 2.0))
def test_gaussian_circuits_match_covariance(s, r, d):
    gates = [sp.shear(s), sp.squeeze(r), sp.displacement(d), sp.fourier(), sp.shear(-s / 2)]
    state = gridsim.apply_sequence(vacuum(48, 8192), gates)
    got = gridsim.homodyne_bins(state, 0, gridsim.HomodyneSpec(8))
    ref = gaussian_bins_after(gates)
    assert 0.5 * np.sum(np.abs(got.full() - ref.full())) < 1e-6


def test_shift_q_translates():
    s = vacuum(14, 1024)
    t = gridsim.shift_q(s, 0, 1.5)
    mean = np.sum(t.x * t.density()) * t.dq
    assert mean == pytest.approx(1.5, abs=1e-8)


def test_cz_correlates_momenta():
    s = gridsim.tensor(vacuum(10, 128), vacuum(10, 128))
    t = gridsim.apply_gate(s, sp.cz(1.0))
    b0 = gridsim.homodyne_bins(t, 0, gridsim.HomodyneSpec(8))
    # p1 -> p1 + q2 has variance 1/2 + 1/2
    ref = gridsim.vacuum_bin_masses(gridsim.HomodyneSpec(8), var=1.0)
    assert np.max(np.abs(b0.full() - ref.full())) < 1e-8


def test_two_mode_cap():
    s = vacuum(10, 2048)
    with pytest.raises(GridTooSmall):
        gridsim.tensor(s, s)


def test_from_comb_rejects_small_window():
    with pytest.raises(GridTooSmall):
        gridsim.from_comb(comb.cat(10.0, 0.5), L=8.0, n=512)


def test_boundary_check():
    s = gridsim.from_function(lambda x: np.exp(-((x - 5) ** 2) / 2), 6.0, 256)
    with pytest.raises(GridTooSmall):
        s.check_boundary()


def test_synthesis_first_round_matches_comb():
    sigma = comb.sigma_of_m(1)["sigma"]
    K = 316
    g, pred = gridsim.synthesis_m1_on_grid(sigma, K, n=1024)
    closed = comb.success_probability(1, sigma, SQRT_PI / K)
    assert g.fidelity >= 0.999
    assert g.success_prob == pytest.approx(closed, rel=1e-2)
    assert len(pred.centers) == 3


@pytest.mark.parametrize("beta", [2.0, -2.0])
def test_cross_kerr_cat_generation(beta):
    r = gridsim.cross_kerr_fock(2.0, beta, 40)
    assert r.fidelity_lhs_rhs >= 1 - 1e-8
    assert r.sign_error_prob <= math.exp(-2 * beta**2)
    assert r.sign_error_prob == pytest.approx(0.5 * erfc(math.sqrt(2) * abs(beta)), rel=1e-3)


def test_cross_kerr_truncation():
    with pytest.raises(TruncationTooSmall):
        gridsim.cross_kerr_fock(3.0, 3.0, 40)


def gkp_state(m=6, shift=0.0, L=40.0, n=4096):
    spec = comb.GKPSpec.from_m(m)
    return gridsim.from_function(lambda x: comb.gaussian_gkp_wavefunction(spec, 0, x - shift), L, n)


@pytest.mark.parametrize("shift", [-0.4, 0.0, 0.25, 0.6])
def test_stabilizer_shift_reads_offset(shift):
    assert gridsim.stabilizer_shift(gkp_state(shift=shift)) == pytest.approx(shift, abs=2e-3)


def test_logical_z_sign():
    assert gridsim.logical_z_expectation(gkp_state()).real > 0.5
    assert gridsim.logical_z_expectation(gkp_state(shift=SQRT_PI)).real < -0.5


def test_gadget_is_seeded_and_corrects_small_shift():
    data = gkp_state(shift=0.3, L=30, n=2048)
    anc = comb.GaussianComb(*_ancilla_terms(6))
    spec = gridsim.HomodyneSpec(14)
    a = gridsim.ec_gadget(data, anc, spec, 11)
    b = gridsim.ec_gadget(data, anc, spec, 11)
    assert a.outcome == b.outcome and a.measured_shift == b.measured_shift
    assert abs(gridsim.stabilizer_shift(a.corrected)) < 0.3
    assert -SQRT_PI / 2 < a.measured_shift <= SQRT_PI / 2


def _ancilla_terms(m):
    spec = comb.GKPSpec.from_m(m)
    centers, w = comb._envelope_terms(spec, 0)
    return spec.sigma, tuple(w), tuple(centers)
