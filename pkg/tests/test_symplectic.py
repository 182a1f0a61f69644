import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvsynth import symplectic as sp
from cvsynth.errors import NonGaussian, NonPositive, OutOfRange, Singular

F = np.array([[0.0, -1.0], [1.0, 0.0]])


def shear_matrix(s):
    return np.array([[1.0, 0.0], [2.0 * s, 1.0]])


def test_fourier_matrix_and_order():
    assert np.array_equal(sp.symplectic_of(sp.fourier()), F)
    four = sp.compose([sp.fourier()] * 4)
    assert np.allclose(four, np.eye(2), atol=0)


def test_fourier_inverse():
    S = sp.compose([sp.fourier(), sp.fourier_inv()])
    assert np.array_equal(S, np.eye(2))


@pytest.mark.parametrize("s", [-1.5, 0.0, 0.3, 2.0])
def test_shear_matrix(s):
    # exp(i s q^2) kicks p by 2 s q
    assert np.array_equal(sp.symplectic_of(sp.shear(s)), shear_matrix(s))


def test_half_shear_is_unit_lower_triangular_entry():
    # exp(i s q^2 / 2) in the A1 convention is shear(s / 2)
    assert np.array_equal(sp.symplectic_of(sp.shear(0.7 / 2)), np.array([[1.0, 0.0], [0.7, 1.0]]))


def test_sequence_composes_right_to_left():
    seq = [sp.shear(0.4), sp.fourier()]
    assert np.allclose(sp.compose(seq), F @ shear_matrix(0.4))


@pytest.mark.parametrize("s", np.geomspace(0.1, 10, 21))
def test_decompose_squeeze(s):
    seq = sp.decompose_squeeze(s)
    assert np.max(np.abs(sp.compose(seq) - np.diag([s, 1 / s]))) < 1e-12
    assert [g.kind for g in seq].count(sp.GateKind.FOURIER) == 3


@pytest.mark.parametrize("R", np.linspace(0, 1, 101))
def test_decompose_beamsplitter(R):
    M = sp.beamsplitter_block(R)
    target = np.block([[M, np.zeros((2, 2))], [np.zeros((2, 2)), M]])
    got = sp.compose(sp.decompose_beamsplitter(R), 2)
    assert np.max(np.abs(got - target)) < 1e-12
    assert np.allclose(M @ M, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("theta", [t for t in np.linspace(-3, 3, 41) if abs(math.cos(t)) > 1e-3])
def test_decompose_rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    got = sp.compose(sp.decompose_rotation(theta))
    assert np.max(np.abs(got - np.array([[c, -s], [s, c]]))) < 1e-12


def test_rotation_singular():
    with pytest.raises(Singular):
        sp.decompose_rotation(math.pi / 2)


def test_squeeze_nonpositive():
    with pytest.raises(NonPositive):
        sp.decompose_squeeze(0.0)


def test_beamsplitter_out_of_range():
    with pytest.raises(OutOfRange):
        sp.beamsplitter_coefficients(1.2)


def test_fixed_beamsplitter_form_fails_oracle():
    res = sp.beamsplitter_form_check(0.5)
    assert res["matrix"] < 1e-12
    assert res["fixed"] > 1e-2


@pytest.mark.parametrize("g", [sp.cubic(0.1), sp.logical_t(), sp.cross_kerr(0.2)])
def test_non_gaussian_has_no_matrix(g):
    with pytest.raises(NonGaussian):
        sp.symplectic_of(g, 2)


def test_cz_matrix():
    S = sp.symplectic_of(sp.cz(0.5), 2)
    x = np.array([1.0, 2.0, 3.0, 4.0])  # q1, q2, p1, p2
    assert np.allclose(S @ x, [1.0, 2.0, 3.0 + 0.5 * 2.0, 4.0 + 0.5 * 1.0])


def test_affine_displacement_and_logical_z():
    S, c = sp.affine_of(sp.displacement(1.3, 1), 2)
    assert np.array_equal(S, np.eye(4))
    assert np.allclose(c, [0, 0, 0, 1.3])
    _, c = sp.affine_of(sp.logical_z(0), 1)
    assert np.allclose(c, [0, math.sqrt(math.pi)])


def test_sequence_mode_bounds():
    seq = sp.GateSequence(n_modes=1)
    with pytest.raises(OutOfRange):
        seq.append(sp.cz(1.0))


def test_gate_json_roundtrip_fields():
    g = sp.cz(0.25, (1, 0))
    assert g.to_json() == {"kind": "cz", "params": [0.25], "modes": [1, 0]}


gaussian_gates = st.one_of(
    st.builds(sp.shear, st.floats(-3, 3)),
    st.just(sp.fourier()),
    st.builds(sp.squeeze, st.floats(0.2, 5)),
    st.builds(sp.rotation, st.floats(-3, 3)),
    st.builds(lambda b: sp.cz(b), st.floats(-2, 2)),
    st.builds(lambda R: sp.beamsplitter(R), st.floats(0, 1)),
)


@given(st.lists(gaussian_gates, max_size=8))
def test_compositions_are_symplectic(gates):
    S = sp.compose(gates, 2)
    assert sp.is_symplectic(S, tol=1e-8 * max(1.0, np.abs(S).max() ** 2))


@given(st.floats(0.1, 10))
def test_squeeze_decomposition_property(s):
    assert np.max(np.abs(sp.compose(sp.decompose_squeeze(s)) - np.diag([s, 1 / s]))) < 1e-12
