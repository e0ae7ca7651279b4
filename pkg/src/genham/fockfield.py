"""Truncated Fock-space quantization along an arbitrary axis.

Complex Klein-Gordon fields are expanded in modes labeled by the wave
numbers conjugate to the hypersurface ``x^mu = const``; the wave number
along ``x^mu`` is ``w_mu``. With lower-index 4-vectors ``k_nu`` and
``k_mu = w_mu`` the mode functions are

    u_k(x) = (2 w_mu V)^(-1/2) exp(-i k_nu x^nu),

so that ``i d_mu u_k = w_mu u_k``. Dirac fields are quantized along ``t``
with the standard spinors and Jordan-Wigner fermion matrices.
All operators are ``scipy.sparse`` matrices on an occupation basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .relqm import GAMMA, GeneralizedHamiltonian
from .report import ResidualReport
from .tensorcore import METRIC

SIGMA = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


# --------------------------------------------------------------------------
# mode lattices


@dataclass(frozen=True)
class ModeLattice:
    """Finite set of modes for quantization along ``axis``.

    Parameters
    ----------
    axis : int
    mass : float
    momenta : ndarray, shape (K, 4)
        Lower-index 4-vectors. Entry ``axis`` holds ``w_mu``; the others
        are the hypersurface wave numbers.
    volume : float
        Hypersurface volume ``V`` used in the ``1/sqrt(2 w V)`` normalization.
    """

    axis: int
    mass: float
    momenta: np.ndarray
    volume: float

    @classmethod
    def build(cls, axis: int, mass: float, wavevectors: Sequence[Sequence[float]], volume: float,
              w_min: float = 1e-7) -> "ModeLattice":
        """Fill in ``w_mu`` for hypersurface wave numbers.

        ``wavevectors`` rows list ``p_nu`` for ``nu != axis`` in increasing
        ``nu``. Only propagating modes (real ``w_mu >= w_min``) are admitted.
        """
        wv = np.atleast_2d(np.asarray(wavevectors, dtype=float))
        others = [nu for nu in range(4) if nu != axis]
        if wv.shape[1] != 3:
            raise ValueError("each wave vector needs the three hypersurface components")
        mom = np.zeros((len(wv), 4))
        mom[:, others] = wv
        if axis == 0:
            w2 = np.sum(wv**2, axis=1) + mass**2
        else:
            w2 = mom[:, 0] ** 2 - np.sum(mom[:, [j for j in (1, 2, 3) if j != axis]] ** 2, axis=1) - mass**2
        if np.any(w2 < w_min**2):
            raise ValueError(f"non-propagating modes (w^2 = {w2[w2 < w_min**2]}); only real w_mu > 0 is admitted")
        mom[:, axis] = np.sqrt(w2)
        mom.setflags(write=False)
        return cls(axis, mass, mom, float(volume))

    @property
    def count(self) -> int:
        return len(self.momenta)

    @property
    def w(self) -> np.ndarray:
        return self.momenta[:, self.axis]

    @property
    def w_min(self) -> float:
        return float(self.w.min())

    def phases(self, x: Sequence[float]) -> np.ndarray:
        """``k_nu x^nu`` for every mode at the point ``x`` (upper-index coordinates)."""
        return self.momenta @ np.asarray(x, dtype=float)

    @property
    def symmetric(self) -> bool:
        """True when the hypersurface wave numbers are closed under ``k -> -k``."""
        hyp = np.delete(self.momenta, self.axis, axis=1)
        keys = {tuple(np.round(r, 12)) for r in hyp}
        return all(tuple(np.round(-r, 12)) in keys for r in hyp)

    def mode_functions(self, x: Sequence[float]) -> np.ndarray:
        return np.exp(-1j * self.phases(x)) / np.sqrt(2 * self.w * self.volume)

    def lattice_delta(self, x: Sequence[float], y: Sequence[float]) -> complex:
        """``(1/2V) sum_k (exp(i k.d) + exp(-i k.d))`` with ``d = x - y`` on the hypersurface.

        For a mode set closed under ``k -> -k`` this is ``(1/V) sum_k exp(i k.d)``.
        """
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        d[self.axis] = 0.0
        ph = self.momenta @ d
        return complex(np.sum(np.cos(ph)) / self.volume)


# --------------------------------------------------------------------------
# Fock representations


def _kron_chain(factors: list[sp.spmatrix]) -> sp.csr_matrix:
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return sp.csr_matrix(out)


@dataclass(frozen=True)
class BosonRep:
    """Occupations ``0..nmax`` for ``a_k`` then ``b_k`` (``2K`` factors)."""

    modes: int
    nmax: int = 4

    @property
    def dim(self) -> int:
        return (self.nmax + 1) ** (2 * self.modes)

    @cached_property
    def occupations(self) -> np.ndarray:
        """Row ``i`` lists the occupation of each factor in basis state ``i``."""
        idx = np.arange(self.dim)
        digits = []
        for _ in range(2 * self.modes):
            digits.append(idx % (self.nmax + 1))
            idx = idx // (self.nmax + 1)
        return np.array(digits[::-1]).T

    def _lowering(self, factor: int) -> sp.csr_matrix:
        d = self.nmax + 1
        low = sp.diags(np.sqrt(np.arange(1, d)), 1, shape=(d, d), format="csr")
        eye = sp.identity(d, format="csr")
        return _kron_chain([low if i == factor else eye for i in range(2 * self.modes)])

    @cached_property
    def a(self) -> list[sp.csr_matrix]:
        return [self._lowering(k) for k in range(self.modes)]

    @cached_property
    def b(self) -> list[sp.csr_matrix]:
        return [self._lowering(self.modes + k) for k in range(self.modes)]

    @cached_property
    def protected(self) -> np.ndarray:
        """Basis indices whose occupations all stay <= nmax - 2."""
        return np.flatnonzero(np.all(self.occupations <= self.nmax - 2, axis=1))

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dim, format="csr", dtype=complex)


@dataclass(frozen=True)
class FermionRep:
    """Jordan-Wigner representation of ``n`` fermion modes."""

    modes: int

    @property
    def dim(self) -> int:
        return 2**self.modes

    @cached_property
    def annihilators(self) -> list[sp.csr_matrix]:
        low = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        z = sp.csr_matrix(np.diag([1.0, -1.0]))
        eye = sp.identity(2, format="csr")
        ops = []
        for j in range(self.modes):
            ops.append(_kron_chain([z] * j + [low] + [eye] * (self.modes - j - 1)).astype(complex))
        return ops

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dim, format="csr", dtype=complex)


def _dag(op: sp.spmatrix) -> sp.csr_matrix:
    return sp.csr_matrix(op.conj().T)


def _comm(x: sp.spmatrix, y: sp.spmatrix) -> sp.csr_matrix:
    return sp.csr_matrix(x @ y - y @ x)


def _anticomm(x: sp.spmatrix, y: sp.spmatrix) -> sp.csr_matrix:
    return sp.csr_matrix(x @ y + y @ x)


def _max_abs(op: sp.spmatrix, columns: np.ndarray | None = None) -> float:
    m = sp.csr_matrix(op)
    if columns is not None:
        m = sp.csc_matrix(m)[:, columns]
    return float(np.max(np.abs(m.data))) if m.nnz else 0.0


# --------------------------------------------------------------------------
# Klein-Gordon field


@dataclass(frozen=True)
class FieldOperatorAt:
    """Field operators at a point; ``grad[nu]`` is ``d_nu phi``."""

    x: np.ndarray
    phi: sp.csr_matrix
    phi_dag: sp.csr_matrix
    grad: tuple[sp.csr_matrix, ...]
    grad_dag: tuple[sp.csr_matrix, ...]
    axis: int

    @property
    def pi(self) -> sp.csr_matrix:
        """Conjugate momentum ``pi_mu = d_mu phi^dagger``."""
        return self.grad_dag[self.axis]

    @property
    def pi_dag(self) -> sp.csr_matrix:
        return self.grad[self.axis]


def build_kg_field(modes: ModeLattice, rep: BosonRep, x: Sequence[float]) -> FieldOperatorAt:
    """``phi(x) = sum_k (a_k u_k(x) + b_k^dagger u_k(x)^*)`` and its derivatives."""
    if rep.modes != modes.count:
        raise ValueError("mode lattice and Fock representation disagree on the mode count")
    x = np.asarray(x, dtype=float)
    u = modes.mode_functions(x)
    dim = rep.dim
    phi = sp.csr_matrix((dim, dim), dtype=complex)
    grads = [sp.csr_matrix((dim, dim), dtype=complex) for _ in range(4)]
    for k in range(modes.count):
        a, bd = rep.a[k], _dag(rep.b[k])
        phi = phi + u[k] * a + np.conj(u[k]) * bd
        for nu in range(4):
            kn = modes.momenta[k, nu]
            grads[nu] = grads[nu] + (-1j * kn * u[k]) * a + (1j * kn * np.conj(u[k])) * bd
    phi = sp.csr_matrix(phi)
    return FieldOperatorAt(
        x,
        phi,
        _dag(phi),
        tuple(sp.csr_matrix(g) for g in grads),
        tuple(_dag(g) for g in grads),
        modes.axis,
    )


def build_H_mu_kg(modes: ModeLattice, rep: BosonRep) -> sp.csr_matrix:
    """``H_mu = sum_k w_k (a_k^dagger a_k + b_k^dagger b_k + 1)`` (diagonal)."""
    occ = rep.occupations
    k = modes.count
    diag = (occ[:, :k] + occ[:, k:] + 1) @ modes.w
    return sp.diags(diag.astype(complex), format="csr")


def translation_generator(modes: ModeLattice, rep: BosonRep, nu: int) -> sp.csr_matrix:
    """``sum_k k_nu (a^dagger a + b^dagger b)``: generator of translations along ``x^nu``."""
    if nu == modes.axis:
        return build_H_mu_kg(modes, rep)
    occ = rep.occupations
    k = modes.count
    diag = (occ[:, :k] + occ[:, k:]) @ modes.momenta[:, nu]
    return sp.diags(diag.astype(complex), format="csr")


def integral_H_mu_kg(modes: ModeLattice, rep: BosonRep, points: np.ndarray, cell: float) -> sp.csr_matrix:
    """Hypersurface sum of ``pi d_mu phi + pi^dagger d_mu phi^dagger - g_mu_mu Gamma``
    with ``Gamma = d_a phi^dagger d^a phi - m^2 phi^dagger phi``.

    ``points`` are 4-vectors on one ``x^mu = const`` hypersurface lattice
    and ``cell`` is the hypersurface cell volume.
    """
    mu = modes.axis
    total = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    for x in points:
        f = build_kg_field(modes, rep, x)
        lag = sum(METRIC[a, a] * (f.grad_dag[a] @ f.grad[a]) for a in range(4)) - modes.mass**2 * (f.phi_dag @ f.phi)
        dens = f.pi @ f.grad[mu] + f.pi_dag @ f.grad_dag[mu] - METRIC[mu, mu] * lag
        total = total + cell * dens
    return sp.csr_matrix(total)


def commutator_equal_surface(modes: ModeLattice, rep: BosonRep, x: Sequence[float], y: Sequence[float]) -> ResidualReport:
    """Equal-surface commutators on the occupation-protected subspace."""
    if not np.isclose(x[modes.axis], y[modes.axis]):
        raise ValueError("points must share the x^mu coordinate")
    fx = build_kg_field(modes, rep, x)
    fy = build_kg_field(modes, rep, y)
    cols = rep.protected
    delta = modes.lattice_delta(x, y)
    eye = rep.identity()
    rep_out = ResidualReport("equal-surface-commutators")
    anchor = "canonical commutator on the x^mu hypersurface"
    rep_out.add("phi_pi", _max_abs(_comm(fx.phi, fy.pi) - 1j * delta * eye, cols), 1e-12, anchor)
    rep_out.add("phidag_pidag", _max_abs(_comm(fx.phi_dag, fy.pi_dag) - 1j * delta * eye, cols), 1e-12, anchor)
    rep_out.add("phi_phi", _max_abs(_comm(fx.phi, fy.phi), cols), 1e-13, anchor)
    phi_phidag = _max_abs(_comm(fx.phi, fy.phi_dag), cols)
    if modes.symmetric:
        rep_out.add("phi_phidag", phi_phidag, 1e-13, anchor)
    else:
        # only a mode set closed under k -> -k makes this vanish on the lattice
        rep_out.note("phi_phidag_unpaired_modes", phi_phidag)
    rep_out.add("pi_pi", _max_abs(_comm(fx.pi, fy.pi), cols), 1e-12, anchor)
    rep_out.note("lattice_delta", delta)
    return rep_out


def heisenberg_residual_kg(modes: ModeLattice, rep: BosonRep, x: Sequence[float], axis: int) -> ResidualReport:
    """``d_nu phi - i[G_nu, phi]`` and the same for ``pi_mu``, with ``G_mu = H_mu``."""
    f = build_kg_field(modes, rep, x)
    gen = translation_generator(modes, rep, axis)
    cols = rep.protected
    out = ResidualReport("heisenberg-kg")
    anchor = "Heisenberg equations generated by H_mu"
    out.add("phi", _max_abs(f.grad[axis] - 1j * _comm(gen, f.phi), cols), 1e-11, anchor)
    # d_nu pi_mu = d_mu d_nu phi^dagger
    d_pi = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    u = modes.mode_functions(x)
    mu = modes.axis
    for k in range(modes.count):
        kk = modes.momenta[k, mu] * modes.momenta[k, axis]
        d_pi = d_pi + (-kk * np.conj(u[k])) * _dag(rep.a[k]) + (-kk * u[k]) * rep.b[k]
    out.add("pi", _max_abs(d_pi - 1j * _comm(gen, f.pi), cols), 1e-11, anchor)
    return out


def vacuum_two_point(modes: ModeLattice, rep: BosonRep, x: Sequence[float], y: Sequence[float]) -> complex:
    """``<0| phi(x) phi^dagger(y) |0>`` from the operator matrices."""
    fx = build_kg_field(modes, rep, x)
    fy = build_kg_field(modes, rep, y)
    vac = np.zeros(rep.dim, dtype=complex)
    vac[0] = 1.0
    return complex(vac @ (fx.phi @ (fy.phi_dag @ vac)))


# --------------------------------------------------------------------------
# Dirac field


def dirac_spinors(p: Sequence[float], mass: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit-normalized ``u(p, s)`` and ``v(p, s)`` for spatial momentum ``p`` (upper index).

    Columns are ``s = up, down``; ``u^dagger u = v^dagger v = 1``.
    """
    p = np.asarray(p, dtype=float)
    e = float(np.sqrt(p @ p + mass**2))
    sp_ = np.einsum("i,iab->ab", p, SIGMA)
    norm = np.sqrt((e + mass) / (2 * e))
    chi = np.eye(2, dtype=complex)
    u = norm * np.vstack([chi, sp_ @ chi / (e + mass)])
    v = norm * np.vstack([sp_ @ chi / (e + mass), chi])
    return u, v


@dataclass(frozen=True)
class DiracModes:
    """Spatial momenta for a Dirac field quantized along ``t``.

    Mode order (Jordan-Wigner): ``c`` modes then ``d`` modes, each sorted
    lexicographically by ``(p_x, p_y, p_z, s)``.
    """

    mass: float
    momenta: np.ndarray  # (P, 3) upper-index spatial momenta
    volume: float

    @classmethod
    def build(cls, mass: float, momenta: Sequence[Sequence[float]], volume: float) -> "DiracModes":
        mom = np.atleast_2d(np.asarray(momenta, dtype=float))
        order = np.lexsort(mom.T[::-1])
        mom = mom[order]
        mom.setflags(write=False)
        return cls(mass, mom, float(volume))

    @property
    def labels(self) -> list[tuple[int, int]]:
        return [(i, s) for i in range(len(self.momenta)) for s in (0, 1)]

    @property
    def count(self) -> int:
        return 2 * len(self.momenta)

    def energy(self, i: int) -> float:
        return float(np.sqrt(self.momenta[i] @ self.momenta[i] + self.mass**2))

    def four_momentum(self, i: int) -> np.ndarray:
        """Lower-index ``p_nu`` of mode ``i``."""
        return METRIC @ np.concatenate([[self.energy(i)], self.momenta[i]])

    @property
    def symmetric(self) -> bool:
        """True when the momenta are closed under ``p -> -p``."""
        keys = {tuple(np.round(r, 12)) for r in self.momenta}
        return all(tuple(np.round(-r, 12)) in keys for r in self.momenta)

    def rep(self) -> FermionRep:
        return FermionRep(2 * self.count)

    def c_index(self, j: int) -> int:
        return j

    def d_index(self, j: int) -> int:
        return self.count + j


@dataclass(frozen=True)
class DiracFieldAt:
    x: np.ndarray
    psi: tuple[sp.csr_matrix, ...]
    psi_dag: tuple[sp.csr_matrix, ...]


def _dirac_terms(modes: DiracModes, x: Sequence[float]):
    """Yield ``(label index, spinor for c, spinor for d^dagger, phase_c, phase_d, p_lower)``."""
    x = np.asarray(x, dtype=float)
    for j, (i, s) in enumerate(modes.labels):
        p_low = modes.four_momentum(i)
        u, v = dirac_spinors(modes.momenta[i], modes.mass)
        ph = p_low @ x
        yield j, u[:, s], v[:, s], np.exp(-1j * ph), np.exp(1j * ph), p_low


def build_dirac_field(modes: DiracModes, rep: FermionRep, x: Sequence[float]) -> DiracFieldAt:
    """``psi(x) = V^(-1/2) sum [c u e^{-ip.x} + d^dagger v e^{ip.x}]``."""
    ops = rep.annihilators
    dim = rep.dim
    comps = [sp.csr_matrix((dim, dim), dtype=complex) for _ in range(4)]
    scale = 1 / np.sqrt(modes.volume)
    for j, u, v, pc, pd, _ in _dirac_terms(modes, x):
        c = ops[modes.c_index(j)]
        dd = _dag(ops[modes.d_index(j)])
        for a in range(4):
            comps[a] = comps[a] + (scale * u[a] * pc) * c + (scale * v[a] * pd) * dd
    psi = tuple(sp.csr_matrix(cm) for cm in comps)
    return DiracFieldAt(np.asarray(x, dtype=float), psi, tuple(_dag(cm) for cm in psi))


def _dirac_weighted_field(modes: DiracModes, rep: FermionRep, x, weight_c, weight_d) -> tuple[sp.csr_matrix, ...]:
    """Field with each mode spinor replaced by ``weight(p_lower, spinor)``."""
    ops = rep.annihilators
    dim = rep.dim
    comps = [sp.csr_matrix((dim, dim), dtype=complex) for _ in range(4)]
    scale = 1 / np.sqrt(modes.volume)
    for j, u, v, pc, pd, p_low in _dirac_terms(modes, x):
        wu = weight_c(p_low, u)
        wv = weight_d(p_low, v)
        c = ops[modes.c_index(j)]
        dd = _dag(ops[modes.d_index(j)])
        for a in range(4):
            comps[a] = comps[a] + (scale * wu[a] * pc) * c + (scale * wv[a] * pd) * dd
    return tuple(sp.csr_matrix(cm) for cm in comps)


def dirac_derivative(modes: DiracModes, rep: FermionRep, x, nu: int) -> tuple[sp.csr_matrix, ...]:
    """Analytic ``d_nu psi(x)``."""
    return _dirac_weighted_field(
        modes, rep, x,
        lambda p, u: -1j * p[nu] * u,
        lambda p, v: 1j * p[nu] * v,
    )


def _spatial_points(modes: DiracModes, points: int, t: float = 0.0) -> tuple[np.ndarray, float]:
    """Points of the periodic x^1 lattice (1+1D) at time ``t``."""
    length = modes.volume
    xs = length * np.arange(points) / points
    pts = np.zeros((points, 4))
    pts[:, 0] = t
    pts[:, 1] = xs
    return pts, length / points


def build_H_mu_dirac(modes: DiracModes, rep: FermionRep, mu: int, points: int = 16,
                     t: float = 0.0) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix, ResidualReport]:
    """Three constructions of the generator along ``x^mu``.

    (a) lattice integral of ``psi^dagger H_mu psi`` with the single-particle
    generator applied to each mode; (b) the normal-ordered mode form
    ``sum p_mu (c^dagger c + d^dagger d)``; and ``P_mu``, the lattice
    integral of ``psi^dagger i d_mu psi``. The report holds the c-number
    offset of (a) relative to (b) and the residuals after removing it.
    """
    h = GeneralizedHamiltonian("dirac", mu, modes.mass, "momentum")
    pts, cell = _spatial_points(modes, points, t)
    h_a = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    p_op = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)

    def block_apply(p_low, spinor, sign):
        mom = {nu: sign * p_low[nu] for nu in range(4) if nu != mu}
        return h.block(mom) @ spinor

    for x in pts:
        f = build_dirac_field(modes, rep, x)
        hpsi = _dirac_weighted_field(
            modes, rep, x,
            lambda p, u: block_apply(p, u, 1.0),
            lambda p, v: block_apply(p, v, -1.0),
        )
        ipsi = _dirac_weighted_field(modes, rep, x, lambda p, u: p[mu] * u, lambda p, v: -p[mu] * v)
        for a in range(4):
            h_a = h_a + cell * (f.psi_dag[a] @ hpsi[a])
            p_op = p_op + cell * (f.psi_dag[a] @ ipsi[a])
    diag = np.zeros(rep.dim, dtype=complex)
    occ = ((np.arange(rep.dim)[:, None] >> np.arange(rep.modes)[::-1]) & 1).astype(float)
    for j, (i, _) in enumerate(modes.labels):
        pm = modes.four_momentum(i)[mu]
        diag += pm * (occ[:, modes.c_index(j)] + occ[:, modes.d_index(j)])
    h_b = sp.diags(diag, format="csr")
    eye = rep.identity()
    offset = complex(h_a[0, 0] - h_b[0, 0])
    out = ResidualReport(f"dirac-generator-mu{mu}")
    anchor = "fermion generator from the field integral and the mode sum"
    out.add("integral_vs_mode_form", _max_abs(h_a - h_b - offset * eye), 1e-11, anchor)
    out.add("momentum_integral_vs_integral", _max_abs(p_op - h_a), 1e-11, "generator equals the momentum integral")
    out.note("c_number_offset", offset)
    out.note("offset_minus_sum_of_mode_momenta", offset + sum(modes.four_momentum(i)[mu] for i, _ in modes.labels))
    return h_a, h_b, p_op, out


def anticommutator_suite(modes: DiracModes, rep: FermionRep, x: Sequence[float], y: Sequence[float]) -> ResidualReport:
    """Equal-time anticommutators against ``delta_ab`` times the lattice delta."""
    if not np.isclose(x[0], y[0]):
        raise ValueError("anticommutators are taken at equal time")
    fx = build_dirac_field(modes, rep, x)
    fy = build_dirac_field(modes, rep, y)
    d = np.asarray(x, float)[1:] - np.asarray(y, float)[1:]
    delta = complex(np.sum(np.exp(1j * modes.momenta @ d)) / modes.volume)
    eye = rep.identity()
    worst_dag = 0.0
    worst_plain = 0.0
    for a in range(4):
        for b in range(4):
            target = (delta if a == b else 0.0) * eye
            worst_dag = max(worst_dag, _max_abs(_anticomm(fx.psi[a], fy.psi_dag[b]) - target))
            worst_plain = max(worst_plain, _max_abs(_anticomm(fx.psi[a], fy.psi[b])))
    out = ResidualReport("equal-time-anticommutators")
    if modes.symmetric:
        out.add("psi_psidag", worst_dag, 1e-12, "canonical anticommutation of the Dirac field")
    else:
        # u and v modes carry opposite momenta; only a set closed under p -> -p
        # reproduces the lattice delta away from coincidence
        out.note("psi_psidag_unpaired_modes", worst_dag)
    out.add("psi_psi", worst_plain, 1e-12, "canonical anticommutation of the Dirac field")
    out.note("lattice_delta", delta)
    return out


def heisenberg_residual_dirac(modes: DiracModes, rep: FermionRep, gen: sp.spmatrix, x: Sequence[float],
                              mu: int) -> ResidualReport:
    """``d_mu psi - i[H_mu, psi]`` and the conjugate field equation."""
    f = build_dirac_field(modes, rep, x)
    dpsi = dirac_derivative(modes, rep, x, mu)
    worst = 0.0
    worst_dag = 0.0
    for a in range(4):
        worst = max(worst, _max_abs(dpsi[a] - 1j * _comm(gen, f.psi[a])))
        worst_dag = max(worst_dag, _max_abs(_dag(dpsi[a]) - 1j * _comm(gen, f.psi_dag[a])))
    out = ResidualReport("heisenberg-dirac")
    anchor = "Heisenberg equation for the Dirac field leads back to the wave equation"
    out.add("psi", worst, 1e-11, anchor)
    out.add("psi_dag", worst_dag, 1e-11, anchor)
    return out


def c_number_contrast(modes: DiracModes, rep: FermionRep, x: Sequence[float], mu: int, points: int = 16) -> ResidualReport:
    """Operator-level ``[P_mu, psi]`` against ``[H_mu, psi]``, and the c-number
    substitution ``H_mu -> p_mu``, whose commutator with ``psi`` vanishes
    while ``d_mu psi`` does not."""
    h_a, h_b, p_op, _ = build_H_mu_dirac(modes, rep, mu, points)
    f = build_dirac_field(modes, rep, x)
    dpsi = dirac_derivative(modes, rep, x, mu)
    worst_pair = 0.0
    worst_p = 0.0
    c_number = modes.four_momentum(0)[mu] * rep.identity()
    zero_comm = 0.0
    d_norm = 0.0
    vac_block = 0.0
    for a in range(4):
        cp = _comm(p_op, f.psi[a])
        ch = _comm(h_a, f.psi[a])
        worst_pair = max(worst_pair, _max_abs(cp - ch))
        worst_p = max(worst_p, _max_abs(dpsi[a] - 1j * cp))
        zero_comm = max(zero_comm, _max_abs(_comm(c_number, f.psi[a])))
        d_norm = max(d_norm, _max_abs(dpsi[a]))
        vac_block = max(vac_block, abs(_comm(p_op, f.psi[a])[0, 0]), abs(dpsi[a][0, 0]))
    out = ResidualReport("c-number-contrast")
    out.add("P_vs_H_commutator", worst_pair, 1e-11, "generator equals the momentum operator at operator level")
    out.add("P_heisenberg", worst_p, 1e-11, "generator equals the momentum operator at operator level")
    out.add("c_number_commutator", zero_comm, 0.0, "scalars commute with the field")
    out.add("derivative_size", d_norm, 1e-3, "d_mu psi is nonzero", relation="ge")
    out.add("vacuum_block", vac_block, 1e-14, "vacuum diagonal element")
    return out


# --------------------------------------------------------------------------
# reference lattices and suites


def reference_boson_lattice(mass: float = 0.5, period: float = 2 * np.pi) -> ModeLattice:
    """Three modes for quantization along x^1 in 1+1D with ``k_0 in {-1, 1, 2} 2pi/T``."""
    q = 2 * np.pi / period
    return ModeLattice.build(1, mass, [[k * q, 0.0, 0.0] for k in (-1, 1, 2)], period)


def symmetric_boson_lattice(mass: float = 0.5, period: float = 2 * np.pi) -> ModeLattice:
    q = 2 * np.pi / period
    return ModeLattice.build(1, mass, [[-q, 0.0, 0.0], [q, 0.0, 0.0]], period)


def transverse_boson_lattice(mass: float = 0.5) -> ModeLattice:
    """Modes with transverse wave numbers for quantization along x^1 in 3+1D."""
    return ModeLattice.build(1, mass, [[2.0, 1.0, 0.0], [-2.0, 0.0, 1.0], [3.0, 1.0, 1.0]], (2 * np.pi) ** 3)


def time_boson_lattice(mass: float = 0.5) -> ModeLattice:
    return ModeLattice.build(0, mass, [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 1.0]], (2 * np.pi) ** 3)


def near_threshold_lattice(mass: float = 0.5, w: float = 1e-6) -> ModeLattice:
    k0 = np.sqrt(mass**2 + w**2)
    return ModeLattice.build(1, mass, [[k0, 0.0, 0.0], [2.0, 0.0, 0.0]], 2 * np.pi)


def reference_dirac_modes(mass: float = 1.0, length: float = 2 * np.pi) -> DiracModes:
    q = 2 * np.pi / length
    return DiracModes.build(mass, [[-q, 0, 0], [0, 0, 0], [q, 0, 0]], length)


def hmu_positivity_suite(nmax: int = 4, points: int = 16) -> ResidualReport:
    """Zero point, positivity and the hypersurface-integral construction of H_1."""
    modes = reference_boson_lattice()
    rep = BosonRep(modes.count, nmax)
    h = build_H_mu_kg(modes, rep)
    diag = h.diagonal().real
    zero_point = float(np.sum(modes.w))
    out = ResidualReport("hmu-positivity")
    anchor = "generalized Hamiltonian of the Bose field is positive"
    out.add("vacuum_minus_zero_point", abs(diag[0] - zero_point), 1e-12, anchor)
    out.add("min_eigenvalue_minus_zero_point", abs(diag.min() - zero_point), 0.0, anchor)
    out.add("offdiagonal", _max_abs(h - sp.diags(h.diagonal())), 0.0, anchor)
    one = np.flatnonzero((rep.occupations.sum(axis=1) == 1) & (rep.occupations[:, 0] == 1))[0]
    out.add("one_particle_excess", abs(diag[one] - zero_point - modes.w[0]), 1e-12, "ladder algebra")
    # hypersurface integral over a t-lattice of the reference period
    period = modes.volume
    pts = np.zeros((points, 4))
    pts[:, 0] = period * np.arange(points) / points
    pts[:, 1] = 0.37
    h_int = integral_H_mu_kg(modes, rep, pts, period / points)
    cols = rep.protected
    offset = complex(h_int[0, 0] - h[0, 0])
    out.add("integral_vs_mode_sum", _max_abs(h_int - h - offset * rep.identity(), cols), 1e-10,
            "hypersurface integral of the energy-momentum tensor")
    out.note("integral_identity_offset", offset)
    out.note("w_min", modes.w_min)
    out.note("zero_point", zero_point)
    return out


def commutator_suite(pairs: int = 20, seed: int = 0, nmax: int = 4) -> ResidualReport:
    rng = np.random.default_rng(seed)
    out = ResidualReport("commutators")
    lattices = {
        "x1_ref": reference_boson_lattice(),
        "x1_sym": symmetric_boson_lattice(),
        "x1_3d": transverse_boson_lattice(),
        "t_3d": time_boson_lattice(),
    }
    per = pairs
    for name, modes in lattices.items():
        rep = BosonRep(modes.count, nmax if modes.count <= 3 else 3)
        worst = {}
        unpaired = 0.0
        for _ in range(per):
            x = rng.uniform(-3, 3, 4)
            y = rng.uniform(-3, 3, 4)
            y[modes.axis] = x[modes.axis]
            sub = commutator_equal_surface(modes, rep, x, y)
            for c in sub.checks:
                worst[c.name] = max(worst.get(c.name, 0.0), c.value)
            unpaired = max(unpaired, sub.notes.get("phi_phidag_unpaired_modes", 0.0))
        if not modes.symmetric:
            out.note(f"{name}_phi_phidag_unpaired_modes", unpaired)
        for k, v in worst.items():
            out.add(f"{name}_{k}", v, 1e-12 if k in ("phi_pi", "phidag_pidag", "pi_pi") else 1e-13,
                    "canonical commutator on the x^mu hypersurface")
        # coincident points give i K / V
        x = rng.uniform(-3, 3, 4)
        sub = commutator_equal_surface(modes, rep, x, x)
        out.add(f"{name}_coincident", sub.check("phi_pi").value, 1e-12, "canonical commutator at coincidence")
        out.note(f"{name}_coincident_delta", sub.notes["lattice_delta"])
    # symmetric set: the lattice delta equals (1/V) sum exp(i k.d)
    modes = lattices["x1_sym"]
    x, y = rng.uniform(-3, 3, 4), rng.uniform(-3, 3, 4)
    y[1] = x[1]
    d = x - y
    d[1] = 0
    plain = np.sum(np.exp(1j * modes.momenta @ d)) / modes.volume
    out.add("symmetric_delta_form", abs(modes.lattice_delta(x, y) - plain), 1e-14, "lattice delta function")
    dmodes = reference_dirac_modes()
    frep = dmodes.rep()
    worst = {}
    for _ in range(pairs):
        t = rng.uniform(-2, 2)
        x = np.array([t, rng.uniform(0, 2 * np.pi), 0, 0])
        y = np.array([t, rng.uniform(0, 2 * np.pi), 0, 0])
        sub = anticommutator_suite(dmodes, frep, x, y)
        for c in sub.checks:
            worst[c.name] = max(worst.get(c.name, 0.0), c.value)
    for k, v in worst.items():
        out.add(f"dirac_{k}", v, 1e-12, "canonical anticommutation of the Dirac field")
    return out


def heisenberg_suite(seed: int = 0, nmax: int = 4, points: int = 16) -> ResidualReport:
    rng = np.random.default_rng(seed)
    out = ResidualReport("heisenberg")
    lattices = {
        "x1_ref": reference_boson_lattice(),
        "x1_3d": transverse_boson_lattice(),
        "t_3d": time_boson_lattice(),
        "near_threshold": near_threshold_lattice(),
        "single": ModeLattice.build(1, 0.5, [[1.5, 0.0, 0.0]], 2 * np.pi),
    }
    for name, modes in lattices.items():
        rep = BosonRep(modes.count, nmax)
        x = rng.uniform(-3, 3, 4)
        for axis in range(4):
            sub = heisenberg_residual_kg(modes, rep, x, axis)
            scale = max(1.0, float(np.max(np.abs(modes.momenta))) ** 2)
            for c in sub.checks:
                out.add(f"{name}_axis{axis}_{c.name}", c.value / scale, 1e-11, c.anchor)
    dmodes = reference_dirac_modes()
    frep = dmodes.rep()
    for mu in (0, 1):
        h_a, h_b, p_op, sub = build_H_mu_dirac(dmodes, frep, mu, points)
        out.extend(sub, prefix=f"dirac_mu{mu}_")
        x = np.array([rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi), 0, 0])
        heis = heisenberg_residual_dirac(dmodes, frep, h_b, x, mu)
        out.extend(heis, prefix=f"dirac_mu{mu}_")
        one = 1 << (frep.modes - 1 - dmodes.c_index(0))
        pm = dmodes.four_momentum(dmodes.labels[0][0])[mu]
        out.add(f"dirac_mu{mu}_one_particle", abs(h_b[one, one] - pm), 1e-12, "single-mode eigenvalue p_mu")
        contrast = c_number_contrast(dmodes, frep, x, mu, points)
        out.extend(contrast, prefix=f"dirac_mu{mu}_")
    return out


# public operations; the cli registry must cover each one
OPERATIONS = ("build_kg_field", "commutator_equal_surface", "build_H_mu_kg", "heisenberg_residual_kg", "build_dirac_field", "build_H_mu_dirac", "c_number_contrast")
