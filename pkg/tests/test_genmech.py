import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genham.genmech import (
    SingularLegendreError,
    StepRejected,
    XLagrangian,
    XPhaseState,
    bracket_suite,
    conservation_suite,
    euler_lagrange_residual,
    euler_lagrange_suite,
    hamilton_step,
    harmonic_model,
    integrate,
    inverse_legendre,
    legendre,
    poisson_bracket,
    quartic_model,
    relativistic_particle_model,
    worldline_suite,
)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.2, 5.0))
def test_relativistic_legendre(velocity, mass):
    # t' = 1/v; the canonical momentum is minus the energy
    model = relativistic_particle_model(mass)
    tprime = 1.0 / velocity
    res = legendre(model.lagrangian, [0.0], [tprime], 0.0)
    gamma = 1.0 / np.sqrt(1 - velocity**2)
    assert res.state.p[0] == pytest.approx(-mass * gamma, rel=1e-12)
    assert res.h1 == pytest.approx(-mass * gamma * velocity, rel=1e-10)
    assert res.h1 == pytest.approx(model.hamiltonian.value(res.state.q, res.state.p, 0.0), rel=1e-12)
    back = inverse_legendre(model.lagrangian, res.state, [1.2 * tprime])
    assert back[0] == pytest.approx(tprime, rel=1e-10)


def test_singular_legendre_rejected():
    lag = XLagrangian(lambda q, v, x: float(q @ v), hessian=lambda q, v, x: np.zeros((1, 1)))
    with pytest.raises(SingularLegendreError):
        legendre(lag, [1.0], [1.0], 0.0)


def test_numeric_partials_match_analytic():
    model = quartic_model(0.7)
    analytic = model.lagrangian
    numeric = XLagrangian(analytic.value)
    q, v = np.array([0.4, -1.1]), np.array([0.3, 0.9])
    np.testing.assert_allclose(numeric.grad_q(q, v, 0.0), analytic.grad_q(q, v, 0.0), atol=1e-8)
    # nested central differences: rounding error ~ machine eps / step^2
    np.testing.assert_allclose(numeric.hess_qprime(q, v, 0.0), np.eye(2), atol=1e-5)


def test_inverse_legendre_rejects_guess_outside_domain():
    model = relativistic_particle_model(1.0)
    state = legendre(model.lagrangian, [0.0], [2.0], 0.0).state
    with pytest.raises(ValueError):
        inverse_legendre(model.lagrangian, state, [0.5])


def test_phase_state_validation():
    with pytest.raises(ValueError):
        XPhaseState([1.0, 2.0], [1.0], 0.0)
    with pytest.raises(ValueError):
        XPhaseState([np.nan], [1.0], 0.0)


def test_step_outside_domain_rejected():
    model = relativistic_particle_model(1.0)
    # |p| < m has no real H1: the step must be refused, not return NaN
    s = XPhaseState([0.0], [-0.5], 0.0)
    with np.errstate(invalid="ignore"), pytest.raises(StepRejected):
        hamilton_step(model.hamiltonian, s, 1e-3)


def test_step_crossing_domain_boundary_rejected():
    from genham.genmech import XHamiltonian

    # H1 = p^2/2 - q with domain q < 1: the flow q' = p crosses q = 1
    ham = XHamiltonian(lambda q, p, x: 0.5 * float(p @ p) - float(q[0]), domain=lambda q, p, x: q[0] < 1.0)
    with pytest.raises(StepRejected):
        hamilton_step(ham, XPhaseState([0.99], [1.0], 0.0), 0.1)


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        hamilton_step(harmonic_model().hamiltonian, XPhaseState([1.0], [0.0], 0.0), 0.1, method="euler")


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_harmonic_orbit_matches_exact(omega):
    model = harmonic_model(omega)
    traj = integrate(model.hamiltonian, XPhaseState([1.0], [0.0], 0.0), 1e-3, 2000)
    np.testing.assert_allclose(traj.q[:, 0], np.cos(omega * traj.x1), atol=1e-10)
    np.testing.assert_allclose(traj.p[:, 0], -omega * np.sin(omega * traj.x1), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_poisson_bracket_antisymmetric(q0, p0):
    ham = quartic_model().hamiltonian
    s = XPhaseState([q0], [p0], 0.0)

    def f(q, p, x):
        return float(q[0] ** 2 * p[0])

    def g(q, p, x):
        return ham.value(q, p, x)

    # {H, f} + {f, H} = 0 using f as the generator
    from genham.genmech import XHamiltonian

    fham = XHamiltonian(f)
    forward = poisson_bracket(ham, f, s)
    backward = poisson_bracket(fham, g, s)
    assert forward == pytest.approx(-backward, abs=1e-6 * (1 + abs(forward)))
    # exact value: {H, q^2 p} = 2 q p * p - q^2 * g q^3
    assert forward == pytest.approx(2 * q0 * p0**2 - q0**5, abs=1e-6 * (1 + abs(forward)))


def test_euler_lagrange_detects_non_solutions():
    model = harmonic_model(1.0)
    x = np.linspace(0, 2, 201)
    good = euler_lagrange_residual(model.lagrangian, x, np.cos(x)).check("max_residual").value
    bad = euler_lagrange_residual(model.lagrangian, x, np.cos(1.3 * x)).check("max_residual").value
    assert good <= 1e-7
    assert bad >= 0.1


@pytest.mark.parametrize("suite", [worldline_suite, conservation_suite, bracket_suite, euler_lagrange_suite])
def test_suites_pass(suite):
    report = suite()
    assert report.passed, report.summary_lines()
