"""Lagrangian model layer: charts, derivative providers, Legendre transform,
Hamiltonian, energy and indicatrix sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import fd


class ModelError(Exception):
    pass


class TonelliViolation(ModelError):
    """Vertical Hessian not positive definite where it must be."""


class SupercriticalityViolation(ModelError):
    """E(x, 0) >= 0: the zero-energy level does not enclose the zero section."""


class NewtonError(ModelError):
    """Damped Newton failed to converge; carries diagnostics."""

    def __init__(self, message, x=None, target=None, residual=None, iterations=None):
        super().__init__(message)
        self.x = x
        self.target = target
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class Chart:
    """Coordinate box realization of (part of) the manifold."""

    dim: int
    lower: tuple
    upper: tuple
    label: str = ""
    exclusion: object = None  # optional predicate x -> bool marking excluded points

    def __post_init__(self):
        if self.dim < 1:
            raise ModelError("chart dimension must be >= 1")
        if len(self.lower) != self.dim or len(self.upper) != self.dim:
            raise ModelError("bounds must match the chart dimension")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ModelError("chart bounds must satisfy lower < upper")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        inside = bool(np.all(x >= self.lower) and np.all(x <= self.upper))
        if inside and self.exclusion is not None:
            inside = not self.exclusion(x)
        return inside

    def center(self):
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


@dataclass(frozen=True)
class CovectorPoint:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))


def _fd_providers(L, n, step=None):
    """Central finite-difference derivative providers built from the L evaluator."""

    def L_x(x, v):
        return fd.gradient(lambda s: L(s, v), x, h=step)

    def L_v(x, v):
        return fd.gradient(lambda s: L(x, s), v, h=step)

    def L_vv(x, v):
        return fd.hessian(lambda s: L(x, s), v, h=step)

    def L_vx(x, v):
        # rows: v index, cols: x index
        return fd.jacobian(lambda s: fd.gradient(lambda w: L(s, w), v, h=step), x, h=step)

    def L_xx(x, v):
        return fd.hessian(lambda s: L(s, v), x, h=step)

    return {"L_x": L_x, "L_v": L_v, "L_vv": L_vv, "L_vx": L_vx, "L_xx": L_xx}


@dataclass
class LagrangianModel:
    """A chart-local Tonelli Lagrangian with derivative providers and a measure density.

    Derivative providers are analytic for built-in examples and central finite
    differences otherwise.  omega is the coordinate density of the measure.
    Conventions: L_x, L_v are n-vectors; L_vv[i,j] = d2L/dv_i dv_j;
    L_vx[i,j] = d2L/dv_i dx_j; L_xx[i,j] = d2L/dx_i dx_j.
    """

    chart: Chart
    L: object
    omega: object
    L_x: object = None
    L_v: object = None
    L_vv: object = None
    L_vx: object = None
    L_xx: object = None
    name: str = ""
    fd_step: float = None
    closed_form: object = None  # optional ClosedFormHamiltonian (see examples module)
    oracles: dict = field(default_factory=dict)
    smooth_at_zero: bool = True

    def __post_init__(self):
        providers = _fd_providers(self.L, self.chart.dim, step=self.fd_step)
        for key, fn in providers.items():
            if getattr(self, key) is None:
                setattr(self, key, fn)

    @property
    def dim(self):
        return self.chart.dim

    # -- basic evaluations -------------------------------------------------

    def lagrangian(self, q):
        return float(self.L(q.x, q.v))

    def measure_density(self, x):
        value = float(self.omega(np.asarray(x, dtype=float)))
        if value <= 0.0:
            raise ModelError(f"measure density must be positive, got {value}")
        return value

    def vertical_hessian(self, q):
        """g_ij = L_{v^i v^j}, symmetrized; raises if not positive definite."""
        g = np.asarray(self.L_vv(q.x, q.v), dtype=float)
        g = 0.5 * (g + g.T)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise TonelliViolation(
                f"vertical Hessian not positive definite at x={q.x}, v={q.v}"
            ) from None
        return g

    def energy(self, q):
        """E = L_v . v - L."""
        return float(np.dot(self.L_v(q.x, q.v), q.v) - self.L(q.x, q.v))

    def legendre_inverse(self, q):
        """p = L_v(x, v)."""
        return CovectorPoint(q.x, np.asarray(self.L_v(q.x, q.v), dtype=float))

    def legendre_forward(self, c, v0=None, tol=1e-12, max_iter=100, max_halvings=30):
        """Solve p = L_v(x, v) for v by damped Newton on the convex fiber problem."""
        x = c.x
        p = c.p
        if self.closed_form is not None:
            v = np.asarray(self.closed_form.hp(x, p), dtype=float)
            if np.linalg.norm(self.L_v(x, v) - p) <= 1e-10:
                return PhasePoint(x, v)
            v0 = v  # fall through to Newton with a good start
        v = np.array(p, dtype=float) if v0 is None else np.array(v0, dtype=float)
        residual = np.asarray(self.L_v(x, v)) - p
        rnorm = np.linalg.norm(residual)
        for iteration in range(max_iter):
            if rnorm <= tol:
                break
            g = np.asarray(self.L_vv(x, v), dtype=float)
            try:
                step = np.linalg.solve(0.5 * (g + g.T), residual)
            except np.linalg.LinAlgError:
                raise NewtonError(
                    "singular vertical Hessian in Legendre solve",
                    x=x, target=p, residual=rnorm, iterations=iteration,
                ) from None
            scale = 1.0
            for _ in range(max_halvings):
                v_new = v - scale * step
                r_new = np.asarray(self.L_v(x, v_new)) - p
                rn_new = np.linalg.norm(r_new)
                if rn_new < rnorm:
                    break
                scale *= 0.5
            else:
                raise NewtonError(
                    "Legendre Newton stalled (damping exhausted)",
                    x=x, target=p, residual=rnorm, iterations=iteration,
                )
            v, residual, rnorm = v_new, r_new, rn_new
        if rnorm > 1e-10:
            raise NewtonError(
                "Legendre Newton did not converge",
                x=x, target=p, residual=rnorm, iterations=max_iter,
            )
        return PhasePoint(x, v)

    def hamiltonian(self, c):
        """H(x, p) = p . v* - L(x, v*) with v* the Legendre image of p."""
        q = self.legendre_forward(c)
        return float(np.dot(c.p, q.v) - self.L(q.x, q.v))

    def indicatrix_sample(self, x, u, tol=1e-12):
        """Scale the direction u to the zero-energy level: v = r u with E(x, r u) = 0."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            raise ModelError("indicatrix direction must be nonzero")
        u = u / norm
        e0 = self.energy(PhasePoint(x, 1e-8 * u)) if not self.smooth_at_zero else \
            self.energy(PhasePoint(x, np.zeros_like(u)))
        if e0 >= 0.0:
            raise SupercriticalityViolation(
                f"E(x, 0) = {e0} >= 0 at x={x}: supercriticality violated"
            )

        def e_of_r(r):
            return self.energy(PhasePoint(x, r * u))

        r_hi = 1.0
        for _ in range(200):
            if e_of_r(r_hi) > 0.0:
                break
            r_hi *= 2.0
        else:
            raise ModelError("could not bracket the indicatrix radius")
        r = brentq(e_of_r, r_hi * 2.0 ** -60, r_hi, xtol=1e-15, rtol=8.9e-16)
        # Newton polish: dE/dr = r u^T L_vv u > 0
        for _ in range(10):
            e = e_of_r(r)
            if abs(e) <= tol:
                break
            g = self.vertical_hessian(PhasePoint(x, r * u))
            r -= e / (r * float(u @ g @ u))
        if abs(e_of_r(r)) > tol:
            raise ModelError("indicatrix root polish failed")
        return PhasePoint(x, r * u)


def random_sphere_direction(rng, n):
    """Uniform direction on S^(n-1) (a sampling convention; the indicatrix need
    not be a round sphere)."""
    while True:
        u = rng.standard_normal(n)
        norm = np.linalg.norm(u)
        if norm > 1e-12:
            return u / norm


def sample_indicatrix_points(model, rng, count, margin=0.15):
    """Random zero-energy phase points with base points drawn uniformly in the
    (margin-shrunk) chart box."""
    chart = model.chart
    lo = np.asarray(chart.lower, dtype=float)
    hi = np.asarray(chart.upper, dtype=float)
    span = hi - lo
    lo_m = lo + margin * span
    hi_m = hi - margin * span
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 100 * count + 100:
            raise ModelError("could not sample enough indicatrix points")
        x = lo_m + rng.random(chart.dim) * (hi_m - lo_m)
        if chart.exclusion is not None and chart.exclusion(x):
            continue
        u = random_sphere_direction(rng, chart.dim)
        try:
            points.append(model.indicatrix_sample(x, u))
        except ModelError:
            continue
    return points
