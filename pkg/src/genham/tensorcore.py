"""Shared conventions: metric, Dirac and tau matrices, periodic lattices,
spectral derivatives and hypersurface inner products.

Conventions used throughout the package:

* metric ``diag(+1, -1, -1, -1)``, natural units;
* plane waves are written ``exp(-i p_mu x^mu)`` with lower-index ``p_mu``,
  so that ``i d_mu`` acting on a plane wave returns ``p_mu``;
* every lattice axis is periodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "METRIC",
    "LatticeError",
    "GammaBasis",
    "TauBasis",
    "Axis",
    "LatticeSpec",
    "AxisField",
    "lower_index",
    "build_gamma_basis",
    "build_tau_basis",
    "spectral_derivative",
    "indefinite_inner",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class LatticeError(ValueError):
    """Raised for invalid lattice geometry or non-spectral axes."""


def lower_index(vector: Sequence[float]) -> np.ndarray:
    """Lower (or raise) a 4-vector index with the metric."""
    return METRIC @ np.asarray(vector)


@dataclass(frozen=True)
class GammaBasis:
    """Dirac matrices in the Dirac-Pauli representation.

    Attributes
    ----------
    gamma : ndarray, shape (4, 4, 4)
        ``gamma[mu]`` is the upper-index matrix ``gamma^mu``.
    alpha : ndarray, shape (3, 4, 4)
        ``alpha[j-1] = gamma^0 gamma^j``.
    beta : ndarray, shape (4, 4)
    spin : ndarray, shape (4, 4, 4, 4)
        ``spin[mu, nu] = (i/4) [gamma^mu, gamma^nu]``.
    representation : str
    """

    gamma: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    spin: np.ndarray
    representation: str = "dirac-pauli"

    def lower(self, mu: int) -> np.ndarray:
        """Return ``gamma_mu = g_{mu mu} gamma^mu``."""
        return METRIC[mu, mu] * self.gamma[mu]

    def clifford_residual(self) -> float:
        """Max entrywise deviation of ``{gamma^mu, gamma^nu} - 2 g^{mu nu}``."""
        eye = np.eye(4)
        worst = 0.0
        for mu in range(4):
            for nu in range(4):
                anti = self.gamma[mu] @ self.gamma[nu] + self.gamma[nu] @ self.gamma[mu]
                worst = max(worst, float(np.max(np.abs(anti - 2 * METRIC[mu, nu] * eye))))
        return worst


@dataclass(frozen=True)
class TauBasis:
    """The 2x2 matrices used by the two-component Klein-Gordon form."""

    tau2: np.ndarray
    tau3: np.ndarray

    @property
    def raising(self) -> np.ndarray:
        """The nilpotent combination ``tau3 + i tau2``."""
        return self.tau3 + 1j * self.tau2


def build_gamma_basis() -> GammaBasis:
    """Construct the standard Dirac-Pauli gamma matrices."""
    zero = np.zeros((2, 2), dtype=complex)
    eye = np.eye(2, dtype=complex)
    gamma = np.empty((4, 4, 4), dtype=complex)
    gamma[0] = np.block([[eye, zero], [zero, -eye]])
    for j in range(3):
        gamma[j + 1] = np.block([[zero, _SIGMA[j]], [-_SIGMA[j], zero]])
    beta = gamma[0].copy()
    alpha = np.array([gamma[0] @ gamma[j] for j in range(1, 4)])
    spin = np.empty((4, 4, 4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            spin[mu, nu] = 0.25j * (gamma[mu] @ gamma[nu] - gamma[nu] @ gamma[mu])
    for arr in (gamma, alpha, beta, spin):
        arr.setflags(write=False)
    return GammaBasis(gamma=gamma, alpha=alpha, beta=beta, spin=spin)


def build_tau_basis() -> TauBasis:
    tau2 = np.array([[0, -1j], [1j, 0]])
    tau3 = np.array([[1, 0], [0, -1]], dtype=complex)
    tau2.setflags(write=False)
    tau3.setflags(write=False)
    return TauBasis(tau2=tau2, tau3=tau3)


@dataclass(frozen=True)
class Axis:
    """One periodic lattice axis.

    Parameters
    ----------
    label : int
        Spacetime index of the coordinate (0 = t, 1..3 = x^j).
    points : int
    extent : float
        Period length; ``spacing = extent / points``.
    origin : float
        Coordinate of the first sample.
    """

    label: int
    points: int
    extent: float
    origin: float = 0.0

    def __post_init__(self) -> None:
        if self.label not in (0, 1, 2, 3):
            raise LatticeError(f"axis label must be 0..3, got {self.label}")
        if self.points < 1:
            raise LatticeError("axis needs at least one point")
        if not self.extent > 0:
            raise LatticeError("axis extent must be positive")

    @property
    def spacing(self) -> float:
        return self.extent / self.points

    @property
    def spectral(self) -> bool:
        n = self.points
        return n >= 2 and (n & (n - 1)) == 0

    def coords(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.points)

    def wavenumbers(self) -> np.ndarray:
        """Angular FFT wave numbers ``k`` with samples ``exp(i k x)``."""
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)

    def refined(self, factor: int = 2) -> "Axis":
        return Axis(self.label, self.points * factor, self.extent, self.origin)


@dataclass(frozen=True)
class LatticeSpec:
    """A periodic product lattice over a subset of the four coordinates."""

    axes: tuple[Axis, ...]

    def __post_init__(self) -> None:
        labels = [a.label for a in self.axes]
        if len(set(labels)) != len(labels):
            raise LatticeError(f"duplicate axis labels {labels}")

    @classmethod
    def from_axes(cls, *axes: Axis) -> "LatticeSpec":
        return cls(tuple(axes))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.points for a in self.axes)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(a.label for a in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([a.spacing for a in self.axes])) if self.axes else 1.0

    @property
    def volume(self) -> float:
        return float(np.prod([a.extent for a in self.axes])) if self.axes else 1.0

    def has(self, label: int) -> bool:
        return label in self.labels

    def position(self, label: int) -> int:
        """Array position of the axis carrying spacetime ``label``."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise LatticeError(f"lattice has no axis with label {label}") from None

    def axis(self, label: int) -> Axis:
        return self.axes[self.position(label)]

    def grid(self, label: int) -> np.ndarray:
        """Coordinate of ``label`` broadcast to the lattice shape."""
        pos = self.position(label)
        shape = [1] * len(self.axes)
        shape[pos] = self.axes[pos].points
        return self.axes[pos].coords().reshape(shape)

    def wavenumber_grid(self, label: int) -> np.ndarray:
        pos = self.position(label)
        shape = [1] * len(self.axes)
        shape[pos] = self.axes[pos].points
        return self.axes[pos].wavenumbers().reshape(shape)

    def without(self, label: int) -> "LatticeSpec":
        return LatticeSpec(tuple(a for a in self.axes if a.label != label))

    def with_axis(self, axis: Axis) -> "LatticeSpec":
        """Insert ``axis`` keeping axes sorted by label."""
        axes = sorted(self.axes + (axis,), key=lambda a: a.label)
        return LatticeSpec(tuple(axes))


@dataclass(frozen=True)
class AxisField:
    """Complex multi-component field sampled on a lattice.

    ``values`` has shape ``lattice.shape + (components,)``.
    """

    lattice: LatticeSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape[:-1] != self.lattice.shape or values.ndim != len(self.lattice.shape) + 1:
            raise LatticeError(
                f"values shape {values.shape} does not match lattice {self.lattice.shape} + (C,)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def components(self) -> int:
        return self.values.shape[-1]

    def with_values(self, values: np.ndarray) -> "AxisField":
        return AxisField(self.lattice, values)

    @classmethod
    def from_function(cls, lattice: LatticeSpec, func, components: int = 1) -> "AxisField":
        """Sample ``func(coords)`` where ``coords`` maps label -> broadcast grid."""
        coords = {a.label: lattice.grid(a.label) for a in lattice.axes}
        vals = np.asarray(func(coords), dtype=complex)
        vals = np.broadcast_to(vals, lattice.shape + (components,)).copy()
        return cls(lattice, vals)


def spectral_derivative(f: AxisField, axis: int, order: int = 1) -> AxisField:
    """Derivative ``d/dx^axis`` of a periodic field by FFT.

    The Nyquist mode of odd-order derivatives is zeroed so real fields stay
    real. ``axis`` is the spacetime label of a lattice axis.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    ax = f.lattice.axis(axis)
    if not ax.spectral:
        raise LatticeError(f"axis {axis} has {ax.points} points; spectral axes need a power of two")
    pos = f.lattice.position(axis)
    k = ax.wavenumbers()
    if order == 1:
        mult = 1j * k
        mult[ax.points // 2] = 0.0
    else:
        mult = -(k**2)
    shape = [1] * f.values.ndim
    shape[pos] = ax.points
    spec = np.fft.fft(f.values, axis=pos) * mult.reshape(shape)
    return f.with_values(np.fft.ifft(spec, axis=pos))


def indefinite_inner(
    metric: np.ndarray,
    psi: AxisField,
    phi: AxisField,
    surface_axis: int | None = None,
) -> complex | np.ndarray:
    """Hypersurface integral of ``psi^dagger M phi``.

    If ``surface_axis`` labels a lattice axis, the integral runs over the
    complementary axes and one value per slice is returned. Otherwise the
    whole lattice is the hypersurface and a single complex number is
    returned.
    """
    metric = np.asarray(metric)
    if psi.values.shape != phi.values.shape:
        raise LatticeError(f"shape mismatch {psi.values.shape} vs {phi.values.shape}")
    if metric.shape != (psi.components, psi.components):
        raise LatticeError(f"metric shape {metric.shape} incompatible with {psi.components} components")
    density = np.einsum("...a,ab,...b->...", psi.values.conj(), metric, phi.values)
    lat = psi.lattice
    if surface_axis is not None and lat.has(surface_axis):
        pos = lat.position(surface_axis)
        dv = lat.cell_volume / lat.axes[pos].spacing
        others = tuple(i for i in range(density.ndim) if i != pos)
        return density.sum(axis=others) * dv
    return complex(density.sum() * lat.cell_volume)


def slice_field(f: AxisField, label: int, index: int) -> AxisField:
    """The hypersurface ``x^label = coords[index]`` as a lower-rank field."""
    pos = f.lattice.position(label)
    return AxisField(f.lattice.without(label), np.take(f.values, index, axis=pos))


def stack_slices(slices: Iterable[np.ndarray], lattice: LatticeSpec, axis: Axis) -> AxisField:
    """Inverse of :func:`slice_field` over all samples of ``axis``."""
    full = lattice.with_axis(axis)
    pos = full.position(axis.label)
    return AxisField(full, np.stack(list(slices), axis=pos))



def core_suite(points: int = 32, extent: float = 2 * np.pi) -> "ResidualReport":
    """Clifford algebra, spectral derivatives and the indefinite inner product."""
    from .report import ResidualReport

    out = ResidualReport("lattice-core")
    basis = build_gamma_basis()
    out.add("clifford", basis.clifford_residual(), 1e-15, "Clifford algebra of the gamma matrices")
    herm = max(float(np.max(np.abs(basis.gamma[0] @ basis.gamma[mu].conj().T @ basis.gamma[0] - basis.gamma[mu])))
               for mu in range(4))
    out.add("gamma_adjoint", herm, 1e-15, "gamma^0 gamma^mu dagger gamma^0 = gamma^mu")
    lat = LatticeSpec.from_axes(Axis(1, points, extent), Axis(2, points, extent))
    k = 2 * np.pi / extent
    f = AxisField.from_function(lat, lambda c: (np.sin(3 * k * c[1]) * np.cos(2 * k * c[2]))[..., None])
    d1 = spectral_derivative(f, 1).values[..., 0]
    exact = 3 * k * np.cos(3 * k * lat.grid(1)) * np.cos(2 * k * lat.grid(2))
    out.add("spectral_derivative", float(np.max(np.abs(d1 - exact))), 1e-12, "spectral derivative of a band-limited field")
    d2 = spectral_derivative(f, 2, 2).values[..., 0]
    out.add("second_derivative", float(np.max(np.abs(d2 + (2 * k) ** 2 * f.values[..., 0]))), 1e-11,
            "spectral derivative of a band-limited field")
    g = AxisField.from_function(lat, lambda c: np.stack(np.broadcast_arrays(np.exp(1j * k * c[1]), 0.5 + 0 * c[2]), -1), components=2)
    tau3 = np.diag([1.0, -1.0])
    total = indefinite_inner(tau3, g, g)
    out.add("indefinite_inner", abs(total - 0.75 * lat.volume), 1e-12, "indefinite hypersurface inner product")
    slices = indefinite_inner(tau3, g, g, surface_axis=1)
    out.add("slice_sum", abs(np.sum(slices) * lat.axis(1).spacing - total), 1e-12, "slices add up to the total")
    return out


# public operations; the cli registry must cover each one
OPERATIONS = ("build_gamma_basis", "spectral_derivative", "indefinite_inner")
