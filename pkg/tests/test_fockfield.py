import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from genham.fockfield import (
    BosonRep,
    DiracModes,
    FermionRep,
    ModeLattice,
    anticommutator_suite,
    build_dirac_field,
    build_H_mu_dirac,
    build_H_mu_kg,
    build_kg_field,
    commutator_equal_surface,
    dirac_spinors,
    heisenberg_residual_kg,
    hmu_positivity_suite,
    reference_boson_lattice,
    reference_dirac_modes,
    symmetric_boson_lattice,
    translation_generator,
    vacuum_two_point,
)
from genham.relqm import GAMMA

# sum of sqrt(k0^2 - m^2) for k0 in {-1, 1, 2}, m = 0.5
ZERO_POINT = 3.6685424806725857


def _dense(op):
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def test_reference_zero_point():
    modes = reference_boson_lattice()
    assert float(np.sum(modes.w)) == pytest.approx(ZERO_POINT, rel=1e-15)
    h = build_H_mu_kg(modes, BosonRep(modes.count, 2))
    assert h.diagonal()[0].real == pytest.approx(ZERO_POINT, rel=1e-15)
    assert h.diagonal().real.min() == pytest.approx(ZERO_POINT, rel=1e-15)


def test_normal_ordered_vacuum_energy_is_zero():
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, 2)
    normal = build_H_mu_kg(modes, rep) - float(np.sum(modes.w)) * rep.identity()
    vac = np.zeros(rep.dim)
    vac[0] = 1.0
    assert np.max(np.abs(normal @ vac)) <= 1e-15


@pytest.mark.parametrize(
    "axis, wavevectors",
    [(1, [[0.2, 0.0, 0.0]]), (1, [[1.0, 2.0, 0.0]]), (1, [[0.5, 0.0, 0.0]])],
)
def test_non_propagating_modes_rejected(axis, wavevectors):
    # below threshold, transverse-dominated and exactly at threshold
    with pytest.raises(ValueError):
        ModeLattice.build(axis, 0.5, wavevectors, 2 * np.pi)


def test_mode_lattice_symmetry_flag():
    assert symmetric_boson_lattice().symmetric
    assert not reference_boson_lattice().symmetric


def test_boson_ladder_algebra_on_protected_states():
    rep = BosonRep(2, 3)
    cols = rep.protected
    eye = np.eye(rep.dim)
    for i, x in enumerate(rep.a + rep.b):
        for j, y in enumerate(rep.a + rep.b):
            comm = _dense(x @ y.conj().T - y.conj().T @ x)
            target = eye if i == j else 0 * eye
            np.testing.assert_allclose(comm[:, cols], target[:, cols], atol=1e-14)


def test_two_mode_jordan_wigner_matches_hand_built_matrices():
    # basis |n0 n1> with index 2 n0 + n1
    low = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    expected = [np.kron(low, np.eye(2)), np.kron(z, low)]
    ops = FermionRep(2).annihilators
    for got, want in zip(ops, expected):
        np.testing.assert_array_equal(_dense(got), want)


@pytest.mark.parametrize("modes", [1, 2, 3, 5])
def test_fermion_canonical_anticommutators(modes):
    ops = [_dense(c) for c in FermionRep(modes).annihilators]
    eye = np.eye(2**modes)
    for i, ci in enumerate(ops):
        for j, cj in enumerate(ops):
            np.testing.assert_array_equal(ci @ cj.conj().T + cj.conj().T @ ci, eye if i == j else 0 * eye)
            np.testing.assert_array_equal(ci @ cj + cj @ ci, 0 * eye)


def test_field_vacuum_expectation_vanishes():
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, 2)
    f = build_kg_field(modes, rep, [0.3, 1.1, 0.0, 0.0])
    vac = np.zeros(rep.dim)
    vac[0] = 1.0
    assert abs(vac @ (f.phi @ vac)) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_vacuum_two_point_is_mode_sum(x, y):
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, 1)
    got = vacuum_two_point(modes, rep, x, y)
    want = np.sum(modes.mode_functions(x) * np.conj(modes.mode_functions(y)))
    assert abs(got - want) <= 1e-14


def test_field_adjoint_consistency():
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, 2)
    f = build_kg_field(modes, rep, [0.1, -0.4, 0.0, 0.0])
    np.testing.assert_allclose(_dense(f.phi_dag), _dense(f.phi).conj().T)
    np.testing.assert_allclose(_dense(f.pi), _dense(f.grad[1]).conj().T)


def test_mode_count_mismatch_rejected():
    with pytest.raises(ValueError):
        build_kg_field(reference_boson_lattice(), BosonRep(2, 2), [0, 0, 0, 0])


def test_commutator_requires_equal_surface():
    modes = reference_boson_lattice()
    with pytest.raises(ValueError):
        commutator_equal_surface(modes, BosonRep(modes.count, 2), [0, 0.1, 0, 0], [0, 0.2, 0, 0])


@settings(max_examples=10, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_symmetric_set_commutators(t1, t2, x1):
    modes = symmetric_boson_lattice()
    rep = BosonRep(modes.count, 3)
    report = commutator_equal_surface(modes, rep, [t1, x1, 0, 0], [t2, x1, 0, 0])
    assert report.passed, report.summary_lines()
    assert "phi_phidag" in [c.name for c in report.checks]


@pytest.mark.parametrize("axis", [0, 1, 2, 3])
def test_heisenberg_single_mode(axis):
    modes = ModeLattice.build(1, 0.5, [[1.5, 0.0, 0.0]], 2 * np.pi)
    report = heisenberg_residual_kg(modes, BosonRep(1, 4), [0.2, 0.7, 0.0, 0.0], axis)
    assert report.passed, report.summary_lines()


def test_translation_generator_one_particle_eigenvalues():
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, 2)
    g0 = translation_generator(modes, rep, 0).diagonal().real
    one = np.flatnonzero((rep.occupations.sum(axis=1) == 1) & (rep.occupations[:, 2] == 1))[0]
    assert g0[one] == pytest.approx(modes.momenta[2, 0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=3, max_size=3), st.floats(0.1, 3.0))
def test_dirac_spinors(p, mass):
    u, v = dirac_spinors(p, mass)
    e = np.sqrt(np.dot(p, p) + mass**2)
    def h(sign):
        return sum(GAMMA.alpha[j] * sign * p[j] for j in range(3)) + GAMMA.beta * mass

    # u multiplies exp(-ip.x); v multiplies exp(+ip.x) and carries momentum -p
    np.testing.assert_allclose(h(1) @ u, e * u, atol=1e-12 * (1 + e))
    np.testing.assert_allclose(h(-1) @ v, -e * v, atol=1e-12 * (1 + e))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)


def test_dirac_anticommutators_symmetric_set():
    modes = DiracModes.build(1.0, [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 2 * np.pi)
    assert modes.symmetric
    report = anticommutator_suite(modes, modes.rep(), [0.3, 1.0, 0, 0], [0.3, 2.5, 0, 0])
    assert report.passed, report.summary_lines()
    assert "psi_psidag" in [c.name for c in report.checks]


def test_dirac_anticommutators_unpaired_set_only_recorded():
    modes = DiracModes.build(1.0, [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 2 * np.pi)
    assert not modes.symmetric
    report = anticommutator_suite(modes, modes.rep(), [0.3, 1.0, 0, 0], [0.3, 2.5, 0, 0])
    assert report.passed, report.summary_lines()
    assert report.notes["psi_psidag_unpaired_modes"] > 0.1


def test_dirac_field_vacuum_expectation_vanishes():
    modes = DiracModes.build(1.0, [[0.0, 0.0, 0.0]], 2 * np.pi)
    rep = modes.rep()
    f = build_dirac_field(modes, rep, [0, 0, 0, 0])
    for a in range(4):
        assert _dense(f.psi[a])[0, 0] == 0.0


@pytest.mark.parametrize("mu", [0, 1])
def test_dirac_generator_constructions_agree(mu):
    modes = DiracModes.build(1.0, [[-1.0, 0, 0], [1.0, 0, 0]], 2 * np.pi)
    _, h_b, _, report = build_H_mu_dirac(modes, modes.rep(), mu, points=8)
    assert report.passed, report.summary_lines()
    # the c-number offset equals minus the sum of mode momenta over both particle kinds
    expected = -sum(modes.four_momentum(i)[mu] for i, _ in modes.labels)
    assert report.notes["c_number_offset"]["re"] == pytest.approx(expected, abs=1e-12)


def test_reference_dirac_offset_oracle():
    modes = reference_dirac_modes()
    energies = [modes.energy(i) for i, _ in modes.labels]
    # 2 (1 + 2 sqrt 2), the offset magnitude for momenta {-1, 0, 1}, m = 1, two spins
    assert sum(energies) == pytest.approx(2 * (1 + 2 * np.sqrt(2)), rel=1e-15)


def test_hmu_positivity_suite_passes():
    report = hmu_positivity_suite(nmax=2, points=8)
    assert report.passed, report.summary_lines()
    assert report.notes["zero_point"] == pytest.approx(ZERO_POINT, rel=1e-15)
