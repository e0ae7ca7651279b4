import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genham.tensorcore import (
    METRIC,
    Axis,
    AxisField,
    LatticeError,
    LatticeSpec,
    build_gamma_basis,
    build_tau_basis,
    core_suite,
    indefinite_inner,
    lower_index,
    slice_field,
    spectral_derivative,
    stack_slices,
)


def test_clifford_algebra():
    basis = build_gamma_basis()
    assert basis.clifford_residual() == 0.0
    for mu in range(4):
        adj = basis.gamma[0] @ basis.gamma[mu].conj().T @ basis.gamma[0]
        np.testing.assert_array_equal(adj, basis.gamma[mu])


def test_gamma_basis_is_read_only():
    basis = build_gamma_basis()
    with pytest.raises(ValueError):
        basis.gamma[0, 0, 0] = 2.0


def test_alpha_beta_relations():
    basis = build_gamma_basis()
    for j in range(3):
        np.testing.assert_allclose(basis.alpha[j] @ basis.alpha[j], np.eye(4))
        np.testing.assert_allclose(basis.alpha[j] @ basis.beta + basis.beta @ basis.alpha[j], 0)
    np.testing.assert_allclose(basis.lower(1), -basis.gamma[1])


def test_tau_raising_is_nilpotent():
    tau = build_tau_basis()
    np.testing.assert_allclose(tau.raising @ tau.raising, 0)


def test_lower_index():
    np.testing.assert_array_equal(lower_index([1.0, 2.0, 3.0, 4.0]), [1.0, -2.0, -3.0, -4.0])
    np.testing.assert_array_equal(METRIC @ METRIC, np.eye(4))


@pytest.mark.parametrize(
    "kwargs",
    [dict(label=4, points=8, extent=1.0), dict(label=1, points=0, extent=1.0), dict(label=1, points=8, extent=0.0)],
)
def test_axis_validation(kwargs):
    with pytest.raises(LatticeError):
        Axis(**kwargs)


def test_duplicate_axis_rejected():
    with pytest.raises(LatticeError):
        LatticeSpec.from_axes(Axis(1, 8, 1.0), Axis(1, 8, 1.0))


def test_non_power_of_two_derivative_rejected():
    lat = LatticeSpec.from_axes(Axis(1, 12, 1.0))
    f = AxisField(lat, np.zeros((12, 1)))
    with pytest.raises(LatticeError):
        spectral_derivative(f, 1)


def test_field_shape_and_finiteness():
    lat = LatticeSpec.from_axes(Axis(1, 8, 1.0))
    with pytest.raises(LatticeError):
        AxisField(lat, np.zeros((4, 1)))
    with pytest.raises(ValueError):
        AxisField(lat, np.full((8, 1), np.nan))


@settings(max_examples=30, deadline=None)
@given(st.integers(-15, 15), st.integers(0, 1), st.floats(0.5, 20.0))
def test_spectral_derivative_exact_on_band_limited_modes(n, order_index, extent):
    order = order_index + 1
    lat = LatticeSpec.from_axes(Axis(1, 32, extent))
    k = 2 * np.pi * n / extent
    f = AxisField.from_function(lat, lambda c: np.exp(1j * k * c[1])[..., None])
    d = spectral_derivative(f, 1, order).values[..., 0]
    expected = (1j * k) ** order * f.values[..., 0]
    assert np.max(np.abs(d - expected)) <= 1e-11 * max(1.0, abs(k) ** order)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_indefinite_inner_is_hermitian(seed):
    rng = np.random.default_rng(seed)
    lat = LatticeSpec.from_axes(Axis(1, 8, 2.0), Axis(2, 4, 1.0))
    shape = lat.shape + (2,)
    a = AxisField(lat, rng.normal(size=shape) + 1j * rng.normal(size=shape))
    b = AxisField(lat, rng.normal(size=shape) + 1j * rng.normal(size=shape))
    tau3 = np.diag([1.0, -1.0])
    ab = indefinite_inner(tau3, a, b)
    ba = indefinite_inner(tau3, b, a)
    assert abs(ab - np.conj(ba)) <= 1e-12 * (1 + abs(ab))
    slices = indefinite_inner(tau3, a, b, surface_axis=1)
    assert abs(np.sum(slices) * lat.axis(1).spacing - ab) <= 1e-12 * (1 + abs(ab))


def test_indefinite_inner_shape_checks():
    lat = LatticeSpec.from_axes(Axis(1, 8, 1.0))
    a = AxisField(lat, np.ones((8, 2)))
    with pytest.raises(LatticeError):
        indefinite_inner(np.eye(3), a, a)
    with pytest.raises(LatticeError):
        indefinite_inner(np.eye(2), a, AxisField(lat, np.ones((8, 1))))


def test_slice_roundtrip():
    lat = LatticeSpec.from_axes(Axis(0, 4, 1.0), Axis(1, 8, 1.0))
    rng = np.random.default_rng(3)
    f = AxisField(lat, rng.normal(size=lat.shape + (2,)))
    slices = [slice_field(f, 0, j).values for j in range(4)]
    back = stack_slices(slices, lat.without(0), lat.axis(0))
    np.testing.assert_array_equal(back.values, f.values)


def test_core_suite_passes():
    report = core_suite()
    assert report.passed, report.summary_lines()
