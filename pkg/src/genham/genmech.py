"""Classical mechanics with ``x^1`` as the evolution parameter.

A coordinate ``q(x^1)`` has a Lagrangian ``L1(q, q', x1)`` with
``q' = dq/dx^1``. The Legendre transform ``p = dL1/dq'``,
``H1 = p q' - L1`` gives the Hamilton system

    dq/dx1 = dH1/dp,   dp/dx1 = -dH1/dq,

and brackets ``{H1, f} = df/dq dH1/dp - df/dp dH1/dq``. Everything is
written for ``x^1``; any other axis is a relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .report import ResidualReport

Array = np.ndarray


class SingularLegendreError(ValueError):
    """The Hessian ``d^2 L1 / dq'^2`` vanishes at the requested point."""


class StepRejected(RuntimeError):
    """An integration step produced non-finite values or left the domain."""


def _central_diff(func: Callable[[Array], Array], x: Array, scale: float = 1.0) -> Array:
    """Gradient of a scalar function by central differences (eps = 1e-6 * scale)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eps = 1e-6 * scale
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = eps
        grad[i] = (func(x + e) - func(x - e)) / (2 * eps)
    return grad


@dataclass(frozen=True)
class XLagrangian:
    """``L1(q, q', x1)`` with optional analytic partials.

    Missing partials fall back to central differences.
    """

    value: Callable[[Array, Array, float], float]
    dq: Callable[[Array, Array, float], Array] | None = None
    dqprime: Callable[[Array, Array, float], Array] | None = None
    hessian: Callable[[Array, Array, float], Array] | None = None
    scale: float = 1.0

    def grad_q(self, q: Array, qp: Array, x1: float) -> Array:
        if self.dq is not None:
            return np.atleast_1d(self.dq(q, qp, x1))
        return _central_diff(lambda z: self.value(z, qp, x1), q, self.scale)

    def grad_qprime(self, q: Array, qp: Array, x1: float) -> Array:
        if self.dqprime is not None:
            return np.atleast_1d(self.dqprime(q, qp, x1))
        return _central_diff(lambda z: self.value(q, z, x1), qp, self.scale)

    def hess_qprime(self, q: Array, qp: Array, x1: float) -> Array:
        if self.hessian is not None:
            return np.atleast_2d(self.hessian(q, qp, x1))
        qp = np.atleast_1d(np.asarray(qp, dtype=float))
        eps = 1e-5 * self.scale
        cols = []
        for i in range(qp.size):
            e = np.zeros_like(qp)
            e[i] = eps
            cols.append((self.grad_qprime(q, qp + e, x1) - self.grad_qprime(q, qp - e, x1)) / (2 * eps))
        return np.array(cols).T


@dataclass(frozen=True)
class XPhaseState:
    q: Array
    p: Array
    x1: float

    def __post_init__(self) -> None:
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape:
            raise ValueError("q and p must have equal shapes")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and np.isfinite(self.x1)):
            raise ValueError("phase state must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class XHamiltonian:
    """``H1(q, p, x1)`` with optional analytic partials and a validity domain."""

    value: Callable[[Array, Array, float], float]
    dq: Callable[[Array, Array, float], Array] | None = None
    dp: Callable[[Array, Array, float], Array] | None = None
    dx1: Callable[[Array, Array, float], float] | None = None
    domain: Callable[[Array, Array, float], bool] | None = None
    scale: float = 1.0

    def grad_q(self, q: Array, p: Array, x1: float) -> Array:
        if self.dq is not None:
            return np.atleast_1d(self.dq(q, p, x1))
        return _central_diff(lambda z: self.value(z, p, x1), q, self.scale)

    def grad_p(self, q: Array, p: Array, x1: float) -> Array:
        if self.dp is not None:
            return np.atleast_1d(self.dp(q, p, x1))
        return _central_diff(lambda z: self.value(q, z, x1), p, self.scale)

    def explicit(self, q: Array, p: Array, x1: float) -> float:
        if self.dx1 is not None:
            return float(self.dx1(q, p, x1))
        eps = 1e-6 * self.scale
        return float((self.value(q, p, x1 + eps) - self.value(q, p, x1 - eps)) / (2 * eps))

    def inside(self, q: Array, p: Array, x1: float) -> bool:
        return True if self.domain is None else bool(self.domain(q, p, x1))


@dataclass(frozen=True)
class LegendreResult:
    state: XPhaseState
    h1: float


def legendre(lag: XLagrangian, q: Array, qprime: Array, x1: float) -> LegendreResult:
    """Canonical momentum and ``H1`` at ``(q, q', x1)``."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    qp = np.atleast_1d(np.asarray(qprime, dtype=float))
    hess = lag.hess_qprime(q, qp, x1)
    if abs(np.linalg.det(hess)) < 1e-12 * max(1.0, float(np.max(np.abs(hess)))) ** qp.size:
        raise SingularLegendreError("Hessian in q' is singular; the Legendre map is not invertible")
    p = lag.grad_qprime(q, qp, x1)
    h1 = float(p @ qp - lag.value(q, qp, x1))
    return LegendreResult(XPhaseState(q, p, x1), h1)


def inverse_legendre(lag: XLagrangian, state: XPhaseState, guess: Array, tol: float = 1e-14,
                     max_iter: int = 60) -> Array:
    """Solve ``dL1/dq'(q, q') = p`` for ``q'`` by Newton iteration.

    Steps are halved until the residual is finite and decreasing, which
    keeps the iterate inside the domain of ``L1``.
    """
    qp = np.atleast_1d(np.asarray(guess, dtype=float)).copy()

    def residual(v: Array) -> Array:
        with np.errstate(invalid="ignore", divide="ignore"):
            return lag.grad_qprime(state.q, v, state.x1) - state.p

    resid = residual(qp)
    if not np.all(np.isfinite(resid)):
        raise ValueError("initial guess lies outside the domain of the Lagrangian")
    for _ in range(max_iter):
        step = np.linalg.solve(lag.hess_qprime(state.q, qp, state.x1), resid)
        scale = 1.0
        for _ in range(60):
            trial = qp - scale * step
            trial_resid = residual(trial)
            if np.all(np.isfinite(trial_resid)) and np.linalg.norm(trial_resid) < np.linalg.norm(resid):
                break
            scale *= 0.5
        else:
            break
        qp, resid = trial, trial_resid
        if np.max(np.abs(scale * step)) <= tol * max(1.0, float(np.max(np.abs(qp)))):
            break
    return qp


def hamilton_rhs(ham: XHamiltonian, q: Array, p: Array, x1: float) -> tuple[Array, Array]:
    return ham.grad_p(q, p, x1), -ham.grad_q(q, p, x1)


def hamilton_step(ham: XHamiltonian, s: XPhaseState, h: float, method: str = "rk4") -> XPhaseState:
    """One classical RK4 step of the Hamilton system in ``x1``."""
    if method != "rk4":
        raise ValueError("only RK4 is provided")
    q, p, x = s.q, s.p, s.x1
    k1q, k1p = hamilton_rhs(ham, q, p, x)
    k2q, k2p = hamilton_rhs(ham, q + 0.5 * h * k1q, p + 0.5 * h * k1p, x + 0.5 * h)
    k3q, k3p = hamilton_rhs(ham, q + 0.5 * h * k2q, p + 0.5 * h * k2p, x + 0.5 * h)
    k4q, k4p = hamilton_rhs(ham, q + h * k3q, p + h * k3p, x + h)
    q_new = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
    p_new = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    if not (np.all(np.isfinite(q_new)) and np.all(np.isfinite(p_new))):
        raise StepRejected(f"non-finite state after step at x1 = {x}")
    if not ham.inside(q_new, p_new, x + h):
        raise StepRejected(f"state left the model domain at x1 = {x + h}")
    return XPhaseState(q_new, p_new, x + h)


@dataclass(frozen=True)
class PhaseTrajectory:
    x1: Array
    q: Array
    p: Array


def integrate(ham: XHamiltonian, s: XPhaseState, h: float, steps: int) -> PhaseTrajectory:
    xs = np.empty(steps + 1)
    qs = np.empty((steps + 1,) + s.q.shape)
    ps = np.empty_like(qs)
    xs[0], qs[0], ps[0] = s.x1, s.q, s.p
    for j in range(steps):
        s = hamilton_step(ham, s, h)
        xs[j + 1], qs[j + 1], ps[j + 1] = s.x1, s.q, s.p
    return PhaseTrajectory(xs, qs, ps)


def poisson_bracket(
    ham: XHamiltonian,
    f: Callable[[Array, Array, float], float],
    s: XPhaseState,
    f_dq: Callable[[Array, Array, float], Array] | None = None,
    f_dp: Callable[[Array, Array, float], Array] | None = None,
) -> float:
    """``{H1, f} = df/dq . dH1/dp - df/dp . dH1/dq``."""
    dfq = np.atleast_1d(f_dq(s.q, s.p, s.x1)) if f_dq else _central_diff(lambda z: f(z, s.p, s.x1), s.q)
    dfp = np.atleast_1d(f_dp(s.q, s.p, s.x1)) if f_dp else _central_diff(lambda z: f(s.q, z, s.x1), s.p)
    return float(dfq @ ham.grad_p(s.q, s.p, s.x1) - dfp @ ham.grad_q(s.q, s.p, s.x1))


def _fd4(values: Array, h: float) -> Array:
    return (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)


def bracket_evolution_residual(
    ham: XHamiltonian,
    f: Callable[[Array, Array, float], float],
    traj: PhaseTrajectory,
    f_dx1: Callable[[Array, Array, float], float] | None = None,
) -> float:
    """Max of ``|df/dx1 - df/dx1|_explicit - {H1, f}|`` along a trajectory.

    The total derivative is a fourth-order central difference of ``f``
    sampled on the trajectory.
    """
    h = traj.x1[1] - traj.x1[0]
    vals = np.array([f(q, p, x) for q, p, x in zip(traj.q, traj.p, traj.x1)])
    total = _fd4(vals, h)
    worst = 0.0
    for j, d in enumerate(total, start=2):
        s = XPhaseState(traj.q[j], traj.p[j], traj.x1[j])
        explicit = f_dx1(s.q, s.p, s.x1) if f_dx1 else 0.0
        worst = max(worst, abs(d - explicit - poisson_bracket(ham, f, s)))
    return worst


def euler_lagrange_residual(lag: XLagrangian, x1: Array, q: Array) -> ResidualReport:
    """Residual of ``dL1/dq - d/dx1 (dL1/dq')`` on a uniformly sampled path.

    ``q'`` and the outer derivative use fourth-order central differences,
    so the reported residual covers samples ``4..n-5``.
    """
    x1 = np.asarray(x1, dtype=float)
    q = np.asarray(q, dtype=float).reshape(len(x1), -1)
    h = x1[1] - x1[0]
    qp = _fd4(q, h)
    xs = x1[2:-2]
    qs = q[2:-2]
    mom = np.array([lag.grad_qprime(a, b, x) for a, b, x in zip(qs, qp, xs)])
    force = np.array([lag.grad_q(a, b, x) for a, b, x in zip(qs, qp, xs)])
    resid = force[2:-2] - _fd4(mom, h)
    rep = ResidualReport("euler-lagrange")
    rep.add("max_residual", float(np.max(np.abs(resid))), np.inf, "variational equation in x^1")
    rep.note("step", float(h))
    return rep


# --------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Model:
    name: str
    lagrangian: XLagrangian
    hamiltonian: XHamiltonian


def quadratic_model() -> Model:
    """``L1 = q'^2 / 2``: free motion in ``x1``."""
    lag = XLagrangian(
        lambda q, v, x: 0.5 * float(v @ v),
        dq=lambda q, v, x: np.zeros_like(q),
        dqprime=lambda q, v, x: v.copy(),
        hessian=lambda q, v, x: np.eye(len(v)),
    )
    ham = XHamiltonian(
        lambda q, p, x: 0.5 * float(p @ p),
        dq=lambda q, p, x: np.zeros_like(q),
        dp=lambda q, p, x: p.copy(),
        dx1=lambda q, p, x: 0.0,
    )
    return Model("quadratic", lag, ham)


def harmonic_model(omega: float = 1.0) -> Model:
    """``L1 = (q'^2 - omega^2 q^2)/2``."""
    w2 = omega**2
    lag = XLagrangian(
        lambda q, v, x: 0.5 * float(v @ v - w2 * q @ q),
        dq=lambda q, v, x: -w2 * q,
        dqprime=lambda q, v, x: v.copy(),
        hessian=lambda q, v, x: np.eye(len(v)),
    )
    ham = XHamiltonian(
        lambda q, p, x: 0.5 * float(p @ p + w2 * q @ q),
        dq=lambda q, p, x: w2 * q,
        dp=lambda q, p, x: p.copy(),
        dx1=lambda q, p, x: 0.0,
    )
    return Model("harmonic", lag, ham)


def quartic_model(coupling: float = 1.0) -> Model:
    """``L1 = q'^2/2 - g q^4/4``: a nonlinear conservative system."""
    g = coupling
    lag = XLagrangian(
        lambda q, v, x: 0.5 * float(v @ v) - 0.25 * g * float(np.sum(q**4)),
        dq=lambda q, v, x: -g * q**3,
        dqprime=lambda q, v, x: v.copy(),
        hessian=lambda q, v, x: np.eye(len(v)),
    )
    ham = XHamiltonian(
        lambda q, p, x: 0.5 * float(p @ p) + 0.25 * g * float(np.sum(q**4)),
        dq=lambda q, p, x: g * q**3,
        dp=lambda q, p, x: p.copy(),
        dx1=lambda q, p, x: 0.0,
    )
    return Model("quartic", lag, ham)


def relativistic_particle_model(mass: float = 1.0) -> Model:
    """Free particle with the time coordinate ``t(x1)`` as the dynamical variable.

    ``L1 = -m sqrt(t'^2 - 1)`` (valid for ``t' > 1``, i.e. subluminal
    motion with monotone ``x1(t)``), ``p = -m t'/sqrt(t'^2 - 1) < -m`` and
    ``H1 = -sqrt(p^2 - m^2)``.
    """
    m = mass

    def root(v):
        return np.sqrt(v[0] ** 2 - 1.0)

    lag = XLagrangian(
        lambda q, v, x: float(-m * root(v)),
        dq=lambda q, v, x: np.zeros(1),
        dqprime=lambda q, v, x: np.array([-m * v[0] / root(v)]),
        hessian=lambda q, v, x: np.array([[m / root(v) ** 3]]),
        scale=1.0,
    )
    ham = XHamiltonian(
        lambda q, p, x: float(-np.sqrt(p[0] ** 2 - m**2)),
        dq=lambda q, p, x: np.zeros(1),
        dp=lambda q, p, x: np.array([-p[0] / np.sqrt(p[0] ** 2 - m**2)]),
        dx1=lambda q, p, x: 0.0,
        domain=lambda q, p, x: bool(p[0] < -m),
        scale=m,
    )
    return Model("relativistic", lag, ham)


def standard_relativistic_flow(mass: float, x0: float, momentum: float, t: Array) -> Array:
    """Worldline ``x(t)`` from the ordinary ``H = sqrt(P^2 + m^2)`` flow,
    integrated with RK4 in ``t``."""
    def rhs(state):
        x, p = state
        return np.array([p / np.sqrt(p * p + mass * mass), 0.0])

    out = np.empty(len(t))
    y = np.array([x0, momentum])
    out[0] = y[0]
    for j in range(len(t) - 1):
        dt = t[j + 1] - t[j]
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[j + 1] = y[0]
    return out


def _point_segment_distance(pts: Array, a: Array, b: Array) -> Array:
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("kij,ij->ki", pts[:, None, :] - a[None], ab) / np.where(denom > 0, denom, 1.0), 0, 1)
    proj = a[None] + t[..., None] * ab[None]
    return np.min(np.linalg.norm(pts[:, None, :] - proj, axis=-1), axis=1)


def polyline_hausdorff(first: Array, second: Array) -> float:
    """Symmetric Hausdorff distance between two polylines (vertices vs segments)."""
    d1 = _point_segment_distance(first, second[:-1], second[1:])
    d2 = _point_segment_distance(second, first[:-1], first[1:])
    return float(max(d1.max(), d2.max()))


def overlap(curve_a: Array, curve_b: Array, coord: int) -> tuple[Array, Array]:
    """Restrict two polylines to their shared range of one coordinate."""
    lo = max(curve_a[:, coord].min(), curve_b[:, coord].min())
    hi = min(curve_a[:, coord].max(), curve_b[:, coord].max())
    keep_a = (curve_a[:, coord] >= lo) & (curve_a[:, coord] <= hi)
    keep_b = (curve_b[:, coord] >= lo) & (curve_b[:, coord] <= hi)
    return curve_a[keep_a], curve_b[keep_b]


# --------------------------------------------------------------------------
# suites


def worldline_suite(mass: float = 1.0, velocity: float = 0.6, step: float = 1e-3, steps: int = 2000) -> ResidualReport:
    """Free relativistic particle: x1-parametrized flow versus t flow."""
    rep = ResidualReport("worldline")
    model = relativistic_particle_model(mass)
    tprime = 1.0 / velocity
    leg = legendre(model.lagrangian, [0.0], [tprime], 0.0)
    back = inverse_legendre(model.lagrangian, leg.state, [1.3 * tprime])
    rep.add("legendre_roundtrip", float(abs(back[0] - tprime)), 1e-10, "canonical momentum definition")
    rep.add("h1_consistency", abs(leg.h1 - model.hamiltonian.value(leg.state.q, leg.state.p, 0.0)), 1e-12,
            "generalized Hamiltonian definition")
    traj = integrate(model.hamiltonian, leg.state, step, steps)
    x_curve = np.column_stack([traj.q[:, 0], traj.x1])  # (t, x1)
    gamma = 1 / np.sqrt(1 - velocity**2)
    momentum = mass * gamma * velocity
    t_grid = np.linspace(x_curve[0, 0], x_curve[-1, 0], steps + 1)
    x_of_t = standard_relativistic_flow(mass, 0.0, momentum, t_grid)
    t_curve = np.column_stack([t_grid, x_of_t])
    a, b = overlap(x_curve, t_curve, 0)
    rep.add("worldline_hausdorff", polyline_hausdorff(a, b), 1e-8, "extending time evolution to x^1 evolution")
    # pointwise: x1-flow t(x1) against the inverted standard flow t = x/v
    rep.add("worldline_pointwise", float(np.max(np.abs(traj.q[:, 0] - traj.x1 / velocity))), 1e-8,
            "extending time evolution to x^1 evolution")
    rep.note("p1_equals_minus_energy", float(leg.state.p[0] + mass * gamma))
    return rep


def conservation_suite(step: float = 1e-3, steps: int = 10_000) -> ResidualReport:
    rep = ResidualReport("h1-conservation")
    for model, q0, p0 in ((quartic_model(), 1.0, 0.3), (harmonic_model(1.0), 0.7, -0.2)):
        s = XPhaseState([q0], [p0], 0.0)
        traj = integrate(model.hamiltonian, s, step, steps)
        h = np.array([model.hamiltonian.value(q, p, x) for q, p, x in zip(traj.q, traj.p, traj.x1)])
        rep.add(f"{model.name}_h1_drift", float(np.max(np.abs(h - h[0]))), 1e-9, "conserved generalized Hamiltonian")
    # one full period of the harmonic orbit: radius drift
    model = harmonic_model(1.0)
    n = int(round(2 * np.pi / step))
    traj = integrate(model.hamiltonian, XPhaseState([1.0], [0.0], 0.0), 2 * np.pi / n, n)
    radius = np.hypot(traj.q[:, 0], traj.p[:, 0])
    rep.add("harmonic_radius_drift_per_period", float(np.max(np.abs(radius - 1.0))), 1e-10, "Hamilton equations in x^1")
    return rep


def bracket_suite(step: float = 1e-2, steps: int = 400) -> ResidualReport:
    rep = ResidualReport("poisson-bracket")
    model = quartic_model()
    s = XPhaseState([0.8], [0.1], 0.0)
    traj = integrate(model.hamiltonian, s, step, steps)
    observables = {
        "q": (lambda q, p, x: float(q[0]), None),
        "qp": (lambda q, p, x: float(q[0] * p[0]), None),
        "explicit": (lambda q, p, x: float(np.sin(x) * q[0] ** 2), lambda q, p, x: float(np.cos(x) * q[0] ** 2)),
    }
    for name, (f, fx) in observables.items():
        rep.add(f"{name}_evolution_identity", bracket_evolution_residual(model.hamiltonian, f, traj, fx), 1e-6,
                "bracket form of the x^1 equations of motion")
    ham = model.hamiltonian
    rep.add("h1_self_bracket", abs(poisson_bracket(ham, ham.value, s, ham.dq, ham.dp)), 0.0,
            "antisymmetry of the bracket")
    return rep


def euler_lagrange_suite(step: float = 1e-2, steps: int = 400) -> ResidualReport:
    rep = ResidualReport("euler-lagrange")
    model = quartic_model()
    traj = integrate(model.hamiltonian, XPhaseState([0.8], [0.1], 0.0), step, steps)
    base = euler_lagrange_residual(model.lagrangian, traj.x1, traj.q).check("max_residual").value
    rep.add("rk4_orbit_residual", base, 1e-6, "variational equation in x^1")
    bump = np.sin(np.pi * (traj.x1 - traj.x1[0]) / (traj.x1[-1] - traj.x1[0]))[:, None]
    growth = []
    for amp in (1e-3, 2e-3, 4e-3):
        growth.append(euler_lagrange_residual(model.lagrangian, traj.x1, traj.q + amp * bump).check("max_residual").value)
    ratio = np.array(growth[1:]) / np.array(growth[:-1])
    rep.add("perturbation_linearity", float(np.max(np.abs(ratio - 2.0))), 0.05, "first variation of the action")
    rep.note("perturbed_residuals", growth)
    return rep


# public operations; the cli registry must cover each one
OPERATIONS = ("legendre", "hamilton_step", "poisson_bracket", "euler_lagrange_residual")
