"""Lattice checks of the free-Dirac commutator identities and angular
momentum conservation, the electromagnetic moment of point charges, and
slice constancy of the generalized conserved quantities ``G_l``."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .relqm import GAMMA, GeneralizedHamiltonian, apply_H
from .report import ResidualReport
from .tensorcore import (
    METRIC,
    Axis,
    AxisField,
    GammaBasis,
    LatticeSpec,
    spectral_derivative,
)

# --------------------------------------------------------------------------
# free Dirac identities and angular momentum


def dirac_lattice(points: int = 64, box: float = 24.0) -> LatticeSpec:
    return LatticeSpec.from_axes(*(Axis(j, points, box, -box / 2) for j in (1, 2, 3)))


def gaussian_dirac_packet(
    lattice: LatticeSpec,
    width: float = 1.2,
    center: tuple[float, float, float] = (0.8, -0.5, 0.3),
    momentum: tuple[float, float, float] = (0.3, -0.2, 0.25),
    spinor: tuple[complex, ...] = (1.0, 0.4j, 0.2, -0.1),
) -> AxisField:
    """Normalized Gaussian ``g(x) e^{i k.x} chi``.

    No energy projection is applied: the projector has tails ``~exp(-m r)``
    that would reach the periodic boundary, while the identities hold for
    any band-limited state.
    """
    coords = [lattice.grid(j) for j in (1, 2, 3)]
    env = np.exp(-sum((c - c0) ** 2 for c, c0 in zip(coords, center)) / (2 * width**2))
    phase = np.exp(1j * sum(c * k for c, k in zip(coords, momentum)))
    vals = (env * phase)[..., None] * np.asarray(spinor, dtype=complex)
    norm = np.sqrt(np.sum(np.abs(vals) ** 2) * lattice.cell_volume)
    return AxisField(lattice, vals / norm)


def _inner(a: AxisField, b: AxisField) -> complex:
    return complex(np.sum(np.conj(a.values) * b.values) * a.lattice.cell_volume)


def _matrix(basis_matrix: np.ndarray, psi: AxisField) -> AxisField:
    return psi.with_values(np.einsum("ab,...b->...a", basis_matrix, psi.values))


def _coordinate(psi: AxisField, j: int) -> AxisField:
    return psi.with_values(psi.lattice.grid(j)[..., None] * psi.values)


def _momentum_upper(psi: AxisField, j: int) -> AxisField:
    """``p^j psi = -i d_j psi``."""
    return psi.with_values(-1j * spectral_derivative(psi, j, 1).values)


def angular_momentum_action(psi: AxisField, mu: int, nu: int, t: float, h: GeneralizedHamiltonian,
                            basis: GammaBasis = GAMMA, hpsi: AxisField | None = None,
                            momenta: dict[int, AxisField] | None = None) -> AxisField:
    """``J^{mu nu} psi`` on a fixed-time slice.

    Spatial pairs use ``i x^j d^k - i x^k d^j``; pairs with the time index
    use ``J^{0j} = t p^j - x^j H`` with ``i d_t`` replaced by ``H``. The spin
    part is ``S^{mu nu} = (i/4)[gamma^mu, gamma^nu]``. ``hpsi`` and
    ``momenta`` (``p^j psi``) may be passed in to reuse work.
    """
    if mu == nu:
        return psi.with_values(np.zeros_like(psi.values))
    momenta = momenta or {}

    def p(j: int) -> AxisField:
        if j not in momenta:
            momenta[j] = _momentum_upper(psi, j)
        return momenta[j]

    spin = _matrix(basis.spin[mu, nu], psi).values
    if mu != 0 and nu != 0:
        orb = _coordinate(p(nu), mu).values - _coordinate(p(mu), nu).values
        return psi.with_values(orb + spin)
    sign = 1.0
    if nu == 0:
        mu, nu, sign = nu, mu, -1.0
    hpsi = hpsi if hpsi is not None else apply_H(h, psi)
    orb = t * p(nu).values - _coordinate(hpsi, nu).values
    return psi.with_values(sign * orb + spin)


def angular_momentum_expectations(psi: AxisField, t: float, h: GeneralizedHamiltonian,
                                  basis: GammaBasis = GAMMA,
                                  hpsi: AxisField | None = None) -> dict[tuple[int, int], complex]:
    """``<psi, J^{mu nu} psi>`` for the six pairs ``mu < nu``."""
    hpsi = hpsi if hpsi is not None else apply_H(h, psi)
    momenta = {j: _momentum_upper(psi, j) for j in (1, 2, 3)}
    return {
        pq: _inner(psi, angular_momentum_action(psi, *pq, t, h, basis, hpsi, momenta))
        for pq in combinations(range(4), 2)
    }


def _rel_max(a: np.ndarray, scale: np.ndarray) -> float:
    return float(np.max(np.abs(a)) / max(np.max(np.abs(scale)), 1e-300))


def operator_identities(psi: AxisField, h: GeneralizedHamiltonian, t: float = 0.37,
                        basis: GammaBasis = GAMMA) -> ResidualReport:
    """Commutators of the free Dirac Hamiltonian on a band-limited state."""
    out = ResidualReport("dirac-operator-identities")
    hpsi = apply_H(h, psi)
    worst = {"H_momentum": 0.0, "H_position": 0.0, "anticommutator": 0.0}
    for j in (1, 2, 3):
        p = _momentum_upper(psi, j)
        c1 = apply_H(h, p).values - _momentum_upper(hpsi, j).values
        worst["H_momentum"] = max(worst["H_momentum"], _rel_max(c1, p.values))
        xpsi = _coordinate(psi, j)
        c2 = apply_H(h, xpsi).values - _coordinate(hpsi, j).values + 1j * _matrix(basis.alpha[j - 1], psi).values
        worst["H_position"] = max(worst["H_position"], _rel_max(c2, psi.values))
        apsi = _matrix(basis.alpha[j - 1], psi)
        c3 = apply_H(h, apsi).values + _matrix(basis.alpha[j - 1], hpsi).values + 2j * spectral_derivative(psi, j).values
        worst["anticommutator"] = max(worst["anticommutator"], _rel_max(c3, hpsi.values))
    c4 = apply_H(h, psi.with_values(t * psi.values)).values - t * hpsi.values
    anchor = "free Dirac commutator identities"
    out.add("commutator_H_momentum", worst["H_momentum"], 1e-10, anchor)
    out.add("commutator_H_position_plus_i_alpha", worst["H_position"], 1e-10, anchor)
    out.add("anticommutator_H_alpha_plus_2i_grad", worst["anticommutator"], 1e-10, anchor)
    out.add("commutator_H_time", _rel_max(c4, hpsi.values), 1e-10, anchor)
    return out


def angular_momentum_suite(basis: GammaBasis = GAMMA, packet: AxisField | None = None, mass: float = 1.0,
                     steps: int = 1000, dt: float = 0.001, measure_every: int = 50,
                     drift_tol: float = 1e-8) -> ResidualReport:
    """Operator identities and ``<J^{mu nu}>`` constancy under t-evolution.

    The evolution applies the exact per-bin propagator ``exp(-i H dt)``
    ``steps`` times, so round-off accumulates as in a stepping scheme.
    """
    lattice = packet.lattice if packet is not None else dirac_lattice()
    psi = packet if packet is not None else gaussian_dirac_packet(lattice)
    h = GeneralizedHamiltonian("dirac", 0, mass, "momentum")
    out = operator_identities(psi, h, basis=basis)
    out.scenario = "angular-momentum"

    kgrids = {j: -lattice.wavenumber_grid(j) for j in (1, 2, 3)}
    blocks = np.broadcast_to(h.block(kgrids), lattice.shape + (4, 4))
    evals, evecs = np.linalg.eigh(blocks)
    phase = np.exp(-1j * evals * dt)
    pairs = list(combinations(range(4), 2))

    def to_field(c: np.ndarray) -> AxisField:
        return AxisField(lattice, np.fft.ifftn(np.einsum("...ab,...b->...a", evecs, c), axes=(0, 1, 2)))

    # each step multiplies the eigen-coefficients by exp(-i lambda dt)
    spec = np.fft.fftn(psi.values, axes=(0, 1, 2))
    coef = np.einsum("...ba,...b->...a", np.conj(evecs), spec)
    initial = angular_momentum_expectations(psi, 0.0, h, basis)
    norm0 = _inner(psi, psi).real
    drift = {pq: 0.0 for pq in pairs}
    norm_drift = 0.0
    for n in range(1, steps + 1):
        coef *= phase
        if n % measure_every == 0 or n == steps:
            cur = to_field(coef)
            vals = angular_momentum_expectations(cur, n * dt, h, basis, hpsi=to_field(evals * coef))
            for pq in pairs:
                drift[pq] = max(drift[pq], abs(vals[pq] - initial[pq]))
            norm_drift = max(norm_drift, abs(_inner(cur, cur).real - norm0))
    for (p, q), v in drift.items():
        out.add(f"J{p}{q}_drift", v, drift_tol, "angular momentum tensor is conserved")
        out.note(f"J{p}{q}_initial", initial[(p, q)])
    out.add("norm_drift", norm_drift, drift_tol, "unitary evolution")
    # orbital part alone is not conserved: the spin term is needed
    final = to_field(coef)
    spin12 = [_inner(f, _matrix(basis.spin[1, 2], f)) for f in (psi, final)]
    total12 = [initial[(1, 2)], angular_momentum_expectations(final, steps * dt, h, basis)[(1, 2)]]
    orbital_drift = abs((total12[1] - spin12[1]) - (total12[0] - spin12[0]))
    out.add("orbital_only_J12_drift", orbital_drift, 100 * drift_tol, "spin and orbital parts exchange",
            relation="ge")
    out.note("steps", steps)
    out.note("dt", dt)
    edge = max(float(np.max(np.abs(np.take(psi.values, [0, -1], axis=ax)))) for ax in range(3))
    out.note("edge_amplitude", edge)
    out.metadata["lattice"] = {"points": lattice.shape, "volume": lattice.volume}
    return out


# --------------------------------------------------------------------------
# point-particle moments


@dataclass(frozen=True)
class ParticleSystem:
    """Point charges with common charge ``e`` and rest mass ``m0``.

    ``positions`` and ``momenta`` are ``(N, 4)`` upper-index arrays on a
    common time slice.
    """

    charge: float
    rest_mass: float
    positions: np.ndarray
    momenta: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_2d(np.asarray(self.positions, dtype=float))
        p = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        if x.shape != p.shape or x.shape[1] != 4:
            raise ValueError("positions and momenta must both be (N, 4)")
        if not np.allclose(x[:, 0], x[0, 0]):
            raise ValueError("all particles must sit on one time slice")
        shell = np.einsum("na,ab,nb->n", p, METRIC, p) - self.rest_mass**2
        if np.any(np.abs(shell) > 1e-10 * max(1.0, self.rest_mass**2)) or np.any(p[:, 0] <= 0):
            raise ValueError("momenta must satisfy p^2 = m0^2 with p^0 > 0")
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "momenta", p)

    @classmethod
    def from_spatial(cls, charge: float, rest_mass: float, t: float, x, p) -> "ParticleSystem":
        """Build from spatial positions and momenta; ``p^0`` is put on shell."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p = np.atleast_2d(np.asarray(p, dtype=float))
        e = np.sqrt(np.sum(p**2, axis=1) + rest_mass**2)
        return cls(charge, rest_mass, np.column_stack([np.full(len(x), t), x]), np.column_stack([e, p]))

    @property
    def count(self) -> int:
        return len(self.positions)

    @property
    def proper_time_rate(self) -> np.ndarray:
        """``d tau / dt = m0 / p^0`` per particle."""
        return self.rest_mass / self.momenta[:, 0]

    def current(self) -> np.ndarray:
        """``e u^mu (d tau/dt)`` per particle, the weight of each delta function."""
        u = self.momenta / self.rest_mass
        return self.charge * u * self.proper_time_rate[:, None]

    def advanced(self, dt: float) -> "ParticleSystem":
        v = self.momenta / self.momenta[:, :1]
        return ParticleSystem(self.charge, self.rest_mass, self.positions + dt * v, self.momenta)


@dataclass(frozen=True)
class MomentTensor:
    moment: np.ndarray
    angular: np.ndarray


def moment_from_current(sys_: ParticleSystem) -> np.ndarray:
    """``M^{mu nu} = (1/2) int (x^mu J^nu - x^nu J^mu) d^3x`` with the
    point-particle current; the delta functions reduce it to a sum."""
    x, j = sys_.positions, sys_.current()
    return 0.5 * (np.einsum("na,nb->ab", x, j) - np.einsum("na,nb->ba", x, j))


def orbital_angular_momentum(sys_: ParticleSystem) -> np.ndarray:
    x, p = sys_.positions, sys_.momenta
    outer = x[:, :, None] * p[:, None, :]
    return np.sum(outer - np.swapaxes(outer, 1, 2), axis=0)


def moment_tensor_identity(sys_: ParticleSystem, tol: float = 1e-12) -> tuple[MomentTensor, ResidualReport]:
    """Moment tensor against ``(e/2m) L`` plus the symmetric-part identity.

    For one particle ``m = p^0`` and the equality is asserted. For several
    particles the single mass is ambiguous and the residual is recorded
    for each candidate without an assertion.
    """
    moment = moment_from_current(sys_)
    ang = orbital_angular_momentum(sys_)
    out = ResidualReport("moment-tensor")
    scale = max(1.0, float(np.max(np.abs(moment))))
    out.add("antisymmetry", float(np.max(np.abs(moment + moment.T))), 0.0, "moment tensor is antisymmetric")
    if sys_.count == 1:
        m = sys_.momenta[0, 0]
        res = float(np.max(np.abs(moment - sys_.charge / (2 * m) * ang))) / scale
        out.add("moment_vs_angular_momentum", res, tol, "moment equals (e/2m) L with the relativistic mass")
        out.note("relativistic_mass", m)
    else:
        candidates = {
            "total_energy": float(np.sum(sys_.momenta[:, 0])),
            "mean_energy": float(np.mean(sys_.momenta[:, 0])),
            "rest_mass": sys_.rest_mass,
        }
        for name, m in candidates.items():
            out.note(f"residual_mass_{name}", float(np.max(np.abs(moment - sys_.charge / (2 * m) * ang))) / scale)
        # the per-particle weighting is exact
        per = 0.5 * sys_.charge * np.einsum(
            "n,nab->ab", 1 / sys_.momenta[:, 0],
            sys_.positions[:, :, None] * sys_.momenta[:, None, :] - sys_.momenta[:, :, None] * sys_.positions[:, None, :],
        )
        out.add("moment_vs_per_particle_weighting", float(np.max(np.abs(moment - per))) / scale, tol,
                "moment equals the proper-time weighted angular momentum sum")
    # symmetric part: sum e (x^j v^k + x^k v^j) = d/dt sum e x^j x^k
    h = 1e-3
    fwd, bwd = sys_.advanced(h), sys_.advanced(-h)

    def quad(s: ParticleSystem) -> np.ndarray:
        sp = s.positions[:, 1:]
        return sys_.charge * np.einsum("na,nb->ab", sp, sp)

    rate = (quad(fwd) - quad(bwd)) / (2 * h)
    xs, js = sys_.positions[:, 1:], sys_.current()[:, 1:]
    sym = np.einsum("na,nb->ab", xs, js) + np.einsum("na,nb->ba", xs, js)
    out.add("symmetric_part_rate", float(np.max(np.abs(sym - rate))) / max(1.0, float(np.max(np.abs(sym)))), 1e-9,
            "symmetric part is a total time derivative")
    return MomentTensor(moment, ang), out


def moment_tensor_suite(seed: int = 0) -> ResidualReport:
    rng = np.random.default_rng(seed)
    out = ResidualReport("moment-tensor")
    rest = ParticleSystem.from_spatial(1.0, 1.0, 0.0, [[0, 0, 0]], [[0, 0, 0]])
    m, rep = moment_tensor_identity(rest)
    out.add("at_rest_moment", float(np.max(np.abs(m.moment))), 0.0, "particle at rest has no moment")
    r, p, e = 1.3, 0.7, 0.8
    single = ParticleSystem.from_spatial(e, 1.0, 0.0, [[r, 0, 0]], [[0, p, 0]])
    m, rep = moment_tensor_identity(single)
    energy = np.sqrt(1.0 + p**2)
    out.add("hand_M12", abs(m.moment[1, 2] - e / (2 * energy) * r * p), 1e-15, "hand evaluation of M^{12}")
    out.extend(rep, prefix="single_")
    worst = 0.0
    for _ in range(10):
        s = ParticleSystem.from_spatial(rng.uniform(-2, 2), rng.uniform(0.5, 2), rng.uniform(-1, 1),
                                        rng.uniform(-3, 3, (1, 3)), rng.uniform(-3, 3, (1, 3)))
        worst = max(worst, moment_tensor_identity(s)[1].check("moment_vs_angular_momentum").value)
    out.add("random_single_particles", worst, 1e-12, "moment equals (e/2m) L with the relativistic mass")
    many = ParticleSystem.from_spatial(0.5, 1.0, 0.2, rng.uniform(-3, 3, (5, 3)), rng.uniform(-3, 3, (5, 3)))
    _, rep = moment_tensor_identity(many)
    out.extend(rep, prefix="five_particles_")
    return out


# --------------------------------------------------------------------------
# generalized conserved quantities


REFERENCE_KG_MODES = ((6.5, 2.5), (7.5, -4.5), (10.0, 8.0))


def kg_lattice(points: int = 64, extent: float = 4 * np.pi) -> LatticeSpec:
    return LatticeSpec.from_axes(Axis(0, points, extent), Axis(1, points, extent))


def kg_plane_waves(lattice: LatticeSpec, modes, amplitudes) -> AxisField:
    """``sum_n a_n exp(-i (E_n t - k_n x))`` on a (t, x^1) lattice."""
    t, x = lattice.grid(0), lattice.grid(1)
    vals = sum(a * np.exp(-1j * (e * t - k * x)) for (e, k), a in zip(modes, amplitudes))
    return AxisField(lattice, np.asarray(vals)[..., None])


def stress_component(phi: AxisField, mass: float, l: int) -> np.ndarray:
    """``T_ll = d_l phi^* d_l phi + d_l phi d_l phi^* - g_ll Gamma`` with
    ``Gamma = d_a phi^* d^a phi - m^2 |phi|^2``."""
    grads = {a: spectral_derivative(phi, a).values[..., 0] for a in (0, 1)}
    f = phi.values[..., 0]
    gamma = sum(METRIC[a, a] * np.abs(grads[a]) ** 2 for a in (0, 1)) - mass**2 * np.abs(f) ** 2
    return 2 * np.abs(grads[l]) ** 2 - METRIC[l, l] * gamma


def noether_charge(field_solution: AxisField, l: int, mass: float) -> ResidualReport:
    """Relative slice-to-slice variation of ``G_l = int T_ll d sigma^l``."""
    lat = field_solution.lattice
    if lat.labels != (0, 1):
        raise ValueError("expects a (t, x^1) lattice")
    t_ll = stress_component(field_solution, mass, l)
    other = 1 - l
    g = np.sum(t_ll, axis=lat.position(other)) * lat.axis(other).spacing
    variation = float((g.max() - g.min()) / np.max(np.abs(g)))
    out = ResidualReport(f"noether-charge-l{l}")
    out.add("slice_variation", variation, 1e-8, "generalized conserved quantity is slice independent")
    out.note("G_mean", float(np.mean(g)))
    return out


def noether_suite(mass: float = 6.0, points: int = 64, extent: float = 4 * np.pi) -> ResidualReport:
    lat = kg_lattice(points, extent)
    out = ResidualReport("noether-charges")
    cases = {
        "single": ([REFERENCE_KG_MODES[0]], [1.0]),
        "two_mode": (REFERENCE_KG_MODES[:2], [1.0, 0.6 - 0.3j]),
        "three_mode": (REFERENCE_KG_MODES, [1.0, 0.6 - 0.3j, 0.25j]),
    }
    for name, (modes, amps) in cases.items():
        phi = kg_plane_waves(lat, modes, amps)
        for l in (0, 1):
            rep = noether_charge(phi, l, mass)
            out.add(f"{name}_l{l}", rep.check("slice_variation").value, 1e-10 if name == "single" else 1e-8,
                    "generalized conserved quantity is slice independent")
            out.note(f"{name}_l{l}_G", rep.notes["G_mean"])
    # off-shell admixtures sharing k (resp. E) with an on-shell mode break constancy
    step = 2 * np.pi / extent
    e0, k0 = REFERENCE_KG_MODES[0]
    perturbed_modes = list(REFERENCE_KG_MODES[:2]) + [(e0 + step, k0), (e0, k0 + step)]
    phi = kg_plane_waves(lat, perturbed_modes, [1.0, 0.6 - 0.3j, 0.05, 0.05])
    for l in (0, 1):
        rep = noether_charge(phi, l, mass)
        out.add(f"perturbed_l{l}", rep.check("slice_variation").value, 1e-3,
                "broken equation of motion is detected", relation="ge")
    return out


# public operations; the cli registry must cover each one
OPERATIONS = ("angular_momentum_suite", "moment_tensor_identity", "noether_charge")
