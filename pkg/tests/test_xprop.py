import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from genham.xprop import (
    LightConeError,
    ModeSumLattice,
    OrderedPairSample,
    bare_closed_form_scalar,
    closed_form_feynman,
    dyson_first_order,
    interval,
    literal_mode_sum,
    ordered_evolution,
    ordered_product,
    ordering,
    quadrature_feynman,
    quadrature_scalar,
    smeared_closed_form_scalar,
    spacelike_samples,
    t_mode_sum_scalar,
    tensor_structure_suite,
    validate_closed_form,
    x1_mode_sum_scalar,
    x1_ordered_two_point,
)

# 1 / (4 pi^2 * 0.95) for d = (0.3, 1, 0.2, 0), from mpmath at 30 digits
BARE_VALUE = 0.0266634693795625714325998587394
# 2D Cartesian Gaussian smearing (sigma = 0.5) of the bare function at d = (0.2, 0.8, 0.3, 0.1),
# integrated with mpmath at 30 digits
SMEARED_VALUE = 0.0251183796164055520794216844693

SMALL = ModeSumLattice(points=16, box=8.0)


def test_bare_closed_form_oracle():
    assert bare_closed_form_scalar([0.3, 1.0, 0.2, 0.0]) == pytest.approx(BARE_VALUE, rel=1e-14)


def test_smeared_closed_form_oracle():
    d = [0.2, 0.8, 0.3, 0.1]
    assert smeared_closed_form_scalar(d, 0.5).real == pytest.approx(SMEARED_VALUE, rel=1e-10)
    assert quadrature_scalar(d, 0.5).real == pytest.approx(SMEARED_VALUE, rel=1e-10)


@pytest.mark.parametrize("mass", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("d", [[0.0, 1.0, 0.0, 0.0], [0.3, 0.9, 0.2, -0.1]])
def test_massive_quadrature_matches_bessel_closed_form(mass, d):
    s = np.sqrt(-interval(d))
    expected = mass * special.k1(mass * s) / (4 * np.pi**2 * s)
    assert quadrature_scalar(d, 0.0, mass).real == pytest.approx(expected, rel=1e-9)
    assert bare_closed_form_scalar(d, mass).real == pytest.approx(expected, rel=1e-14)


def test_i_epsilon_flip_conjugates():
    d = [0.3, 1.0, 0.2, 0.0]
    assert bare_closed_form_scalar(d, epsilon_sign=-1) == np.conj(bare_closed_form_scalar(d))


@pytest.mark.parametrize("d", [[1.0, 1.0, 0.0, 0.0], [0.6, 0.0, 0.0, 0.6], [1.0, 0.6, 0.8, 0.0]])
def test_light_like_separation_rejected(d):
    with pytest.raises(LightConeError):
        bare_closed_form_scalar(d)


def test_smeared_forms_need_rotatable_separation():
    with pytest.raises(LightConeError):
        smeared_closed_form_scalar([1.0, 0.5, 0.0, 0.0], 0.5)


def test_validate_closed_form_passes():
    report = validate_closed_form(spacelike_samples(4, seed=11), 0.5)
    assert report.passed, report.summary_lines()


@settings(max_examples=15, deadline=None)
@given(st.floats(0.6, 1.0), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_mode_sums_symmetric_under_reflection(d1, d0_frac, d2, d3):
    d = np.array([d0_frac * d1, d1, d2, d3])
    assert x1_mode_sum_scalar(d, SMALL) == x1_mode_sum_scalar(-d, SMALL)
    assert t_mode_sum_scalar(d, SMALL) == t_mode_sum_scalar(-d, SMALL)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_two_point_tensor_structure(mu, nu, seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, 4)
    y = x - spacelike_samples(1, seed=seed % 1000)[0]
    s = OrderedPairSample(x, y, mu, nu, lattice=SMALL)
    value = x1_ordered_two_point(s).value
    if mu != nu:
        assert value == 0
    else:
        scalar = x1_mode_sum_scalar(s.separation, SMALL)
        assert value == -np.diag([1.0, -1.0, -1.0, -1.0])[mu, mu] * scalar
    assert x1_ordered_two_point(s.swapped()).value == value


def test_closed_form_and_quadrature_routes_agree():
    s = OrderedPairSample(np.array([0.1, 0.9, 0.2, 0.0]), np.zeros(4), 2, 2)
    c = closed_form_feynman(s).value
    q = quadrature_feynman(s).value
    assert abs(c - q) <= 1e-9 * abs(q)
    assert closed_form_feynman(s, smeared=False).value == pytest.approx(
        bare_closed_form_scalar(s.separation), rel=1e-15)


def test_mode_sums_approach_closed_form():
    d = np.array([0.2, 0.8, 0.3, 0.1])
    lat = ModeSumLattice(points=32, box=16.0)
    x1 = x1_mode_sum_scalar(d, lat)
    t = t_mode_sum_scalar(d, lat)
    assert abs(x1 - SMEARED_VALUE) / SMEARED_VALUE < 0.05
    assert abs(t - SMEARED_VALUE) / SMEARED_VALUE < 0.05


def test_single_mode_literal_sum():
    # one propagating mode (k0, k2, k3) = (2, 1, 0) along x^1: w = sqrt(3)
    d = np.array([0.3, 0.7, -0.2, 0.4])
    w = np.sqrt(3.0)
    phase = 2.0 * d[0] - (w * d[1] + 1.0 * d[2])
    expected = np.exp(-1j * phase) / (2 * w * 5.0)
    assert literal_mode_sum(d, [[2.0, 1.0, 0.0]], 1, 5.0) == pytest.approx(expected, rel=1e-14)
    # reversing the order along x^1 conjugates the phase of the ordered separation
    assert literal_mode_sum(-d, [[2.0, 1.0, 0.0]], 1, 5.0) == pytest.approx(
        np.exp(-1j * (2.0 * d[0] - w * d[1] - 1.0 * d[2])) / (2 * w * 5.0), rel=1e-14)


def test_literal_sum_rejects_evanescent_modes():
    with pytest.raises(ValueError):
        literal_mode_sum([0, 1, 0, 0], [[0.5, 1.0, 0.0]], 1, 1.0)


@pytest.mark.parametrize("x, y, expected", [([0, 2, 0, 0], [0, 1, 0, 0], (0, 1)), ([0, -1, 0, 0], [0, 1, 0, 0], (1, 0))])
def test_ordering(x, y, expected):
    assert ordering(x, y) == expected
    a, b = np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])
    got = ordered_product(a, b, x, y)
    np.testing.assert_array_equal(got, a @ b if expected == (0, 1) else b @ a)


def test_equal_coordinate_ordering_rejected():
    with pytest.raises(ValueError):
        ordering([0, 1, 0, 0], [3, 1, 0, 0])
    with pytest.raises(ValueError):
        OrderedPairSample(np.array([0, 1.0, 0, 0]), np.array([2, 1.0, 0, 0]))


@pytest.mark.parametrize("kwargs", [dict(points=3), dict(points=15), dict(box=0.0), dict(sigma=-1.0), dict(photon_mass=-0.1)])
def test_lattice_validation(kwargs):
    with pytest.raises(ValueError):
        ModeSumLattice(**kwargs)


def test_refinement_halves_spacing_at_fixed_cutoff():
    lat = ModeSumLattice()
    fine = lat.refined()
    assert fine.spacing == pytest.approx(lat.spacing / 2)
    assert fine.cutoff == pytest.approx(lat.cutoff)


def test_dyson_first_order_error_is_second_order():
    rng = np.random.default_rng(5)
    gens = []
    for _ in range(4):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        gens.append(m + m.conj().T)
    errors = []
    for step in (0.02, 0.01, 0.005):
        errors.append(np.linalg.norm(ordered_evolution(gens, step) - dyson_first_order(gens, step)))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    assert np.all(np.abs(ratios - 4.0) < 0.2)


def test_ordered_evolution_is_unitary_and_ordered():
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    b = np.array([[1, 0], [0, -1]], dtype=complex)
    u = ordered_evolution([a, b], 0.3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-14)
    from scipy.linalg import expm

    np.testing.assert_allclose(u, expm(-0.3j * b) @ expm(-0.3j * a), atol=1e-14)


def test_tensor_structure_suite_passes():
    report = tensor_structure_suite()
    assert report.passed, report.summary_lines()
