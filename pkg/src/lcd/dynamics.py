"""Euler-Lagrange dynamics: semispray, flow on the zero-energy level, the
linearized (variational/Jacobi) flow, nonlinear connection coefficients and the
deviation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .model import CovectorPoint, ModelError, PhasePoint


class FlowError(ModelError):
    pass


class LeftChartError(FlowError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass
class Trajectory:
    t: np.ndarray          # uniform time grid, t[0] = 0
    x: np.ndarray          # (m+1, n)
    v: np.ndarray          # (m+1, n)
    energy: np.ndarray     # per-step energy values
    left_chart: bool = False

    @property
    def endpoint(self):
        return PhasePoint(self.x[-1], self.v[-1])

    @property
    def energy_drift(self):
        return float(np.max(np.abs(self.energy - self.energy[0])))


@dataclass
class VariationalState:
    t: np.ndarray
    x: np.ndarray          # base curve, (m+1, n)
    p: np.ndarray          # base momenta, (m+1, n)
    J: np.ndarray          # (m+1, 2n, k) linearization samples
    left_chart: bool = False

    def symplectic_defect(self):
        """max_t ||J^T O J - O|| for the canonical symplectic matrix O (full J only)."""
        two_n = self.J.shape[1]
        if self.J.shape[2] != two_n:
            raise ValueError("symplectic defect needs a square (2n x 2n) linearization")
        n = two_n // 2
        omega = np.zeros((two_n, two_n))
        omega[:n, n:] = np.eye(n)
        omega[n:, :n] = -np.eye(n)
        worst = 0.0
        for k in range(self.J.shape[0]):
            J = self.J[k]
            worst = max(worst, float(np.max(np.abs(J.T @ omega @ J - omega))))
        return worst


def semispray(model, q):
    """Acceleration a with L_vv a = L_x - L_vx v (the Euler-Lagrange vector field)."""
    g = model.vertical_hessian(q)
    L_x = np.asarray(model.L_x(q.x, q.v), dtype=float)
    L_vx = np.asarray(model.L_vx(q.x, q.v), dtype=float)
    rhs = L_x - L_vx @ q.v
    return np.linalg.solve(g, rhs)


def _el_rhs(model, x, v):
    a = semispray(model, PhasePoint(x, v))
    return v, a


def el_flow(model, q0, T, h, energy_tol=1e-7, zero_energy=False, check_chart=True):
    """Classical RK4 integration of (x', v') = (v, semispray)."""
    if zero_energy and abs(model.energy(q0)) > 1e-10:
        raise FlowError(f"initial energy {model.energy(q0)} exceeds 1e-10")
    steps = max(1, int(round(abs(T) / h)))
    dt = (T / steps) if T != 0 else h
    n = model.dim
    xs = np.empty((steps + 1, n))
    vs = np.empty((steps + 1, n))
    es = np.empty(steps + 1)
    xs[0], vs[0] = q0.x, q0.v
    es[0] = model.energy(q0)
    left = False
    last = steps
    for k in range(steps):
        x, v = xs[k], vs[k]
        k1x, k1v = _el_rhs(model, x, v)
        k2x, k2v = _el_rhs(model, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = _el_rhs(model, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = _el_rhs(model, x + dt * k3x, v + dt * k3v)
        xs[k + 1] = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        vs[k + 1] = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if check_chart and not model.chart.contains(xs[k + 1]):
            left = True
            last = k + 1
            break
        es[k + 1] = model.energy(PhasePoint(xs[k + 1], vs[k + 1]))
    t = dt * np.arange(last + 1)
    traj = Trajectory(t, xs[: last + 1], vs[: last + 1],
                      es[: last + 1] if not left else es[:last + 1], left_chart=left)
    if left:
        traj.energy[-1] = traj.energy[-2] if last >= 1 else es[0]
        return traj
    drift = traj.energy_drift
    if drift > 10.0 * energy_tol:
        raise FlowError(
            f"energy drift {drift:.3e} exceeds 10x tolerance {energy_tol:.1e}; "
            "reduce the step size"
        )
    return traj


def flow_point(model, q0, T, h):
    """Endpoint of the Euler-Lagrange flow after time T (convenience wrapper)."""
    if T == 0:
        return q0
    traj = el_flow(model, q0, T, h, check_chart=False)
    return traj.endpoint


def hamiltonian_blocks(model, x, p):
    """First and second derivatives of H at (x, p).

    Returns (v, Hx, Hpp, Hpx, Hxx) with v = H_p.  Built-ins use exact symbolic
    derivatives of the closed-form Hamiltonian; otherwise the blocks follow
    from the implicit function theorem applied to p = L_v(x, v*), with L_xx by
    central differences of the L_x provider when no analytic provider exists.
    """
    cf = model.closed_form
    if cf is not None and cf.hpp is not None:
        v = np.asarray(cf.hp(x, p), dtype=float)
        hx = np.asarray(cf.hx(x, p), dtype=float)
        return (v, hx, np.asarray(cf.hpp(x, p), dtype=float),
                np.asarray(cf.hpx(x, p), dtype=float),
                np.asarray(cf.hxx(x, p), dtype=float))
    q = model.legendre_forward(CovectorPoint(x, p))
    v = q.v
    g = model.vertical_hessian(q)
    g_inv = np.linalg.inv(g)
    L_vx = np.asarray(model.L_vx(x, v), dtype=float)
    L_xx = np.asarray(model.L_xx(x, v), dtype=float)
    hx = -np.asarray(model.L_x(x, v), dtype=float)
    hpp = g_inv
    hpx = -g_inv @ L_vx
    hxx = -L_xx + L_vx.T @ g_inv @ L_vx
    return v, hx, hpp, hpx, hxx


def hamiltonian_rhs(model, x, p):
    cf = model.closed_form
    if cf is not None:
        return np.asarray(cf.hp(x, p), dtype=float), -np.asarray(cf.hx(x, p), dtype=float)
    q = model.legendre_forward(CovectorPoint(x, p))
    return q.v, np.asarray(model.L_x(x, q.v), dtype=float)


def variational_flow(model, q0, T, h, J0=None, check_chart=True):
    """Propagate the linearization of the Hamiltonian flow along the base curve.

    J0 has shape (2n, k) in (dx, dp) coordinates; default is the full identity.
    Base point is the Legendre image of q0.
    """
    n = model.dim
    if J0 is None:
        J0 = np.eye(2 * n)
    J0 = np.asarray(J0, dtype=float)
    if J0.shape[0] != 2 * n:
        raise ValueError("J0 must have 2n rows")
    c0 = model.legendre_inverse(q0)
    steps = max(1, int(round(abs(T) / h)))
    dt = (T / steps) if T != 0 else h
    xs = np.empty((steps + 1, n))
    ps = np.empty((steps + 1, n))
    Js = np.empty((steps + 1, 2 * n, J0.shape[1]))
    xs[0], ps[0], Js[0] = c0.x, c0.p, J0
    left = False
    last = steps

    def rhs(x, p, J):
        v, hx, hpp, hpx, hxx = hamiltonian_blocks(model, x, p)
        A = np.empty((2 * n, 2 * n))
        A[:n, :n] = hpx
        A[:n, n:] = hpp
        A[n:, :n] = -hxx
        A[n:, n:] = -hpx.T
        return v, -hx, A @ J

    for k in range(steps):
        x, p, J = xs[k], ps[k], Js[k]
        k1 = rhs(x, p, J)
        k2 = rhs(x + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1], J + 0.5 * dt * k1[2])
        k3 = rhs(x + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1], J + 0.5 * dt * k2[2])
        k4 = rhs(x + dt * k3[0], p + dt * k3[1], J + dt * k3[2])
        xs[k + 1] = x + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        ps[k + 1] = p + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        Js[k + 1] = J + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        if check_chart and not model.chart.contains(xs[k + 1]):
            left = True
            last = k + 1
            break
    t = dt * np.arange(last + 1)
    return VariationalState(t, xs[: last + 1], ps[: last + 1], Js[: last + 1],
                            left_chart=left)


def flow_lvv_derivative(model, q, h_sigma=1e-4, richardson=False):
    """d/dt L_vv along the integrated Euler-Lagrange flow at t = 0.

    Central difference with a single RK4 step to +-h_sigma, optionally
    Richardson refined; this avoids third-order finite differences of L.
    """

    def lvv_at(t):
        if t == 0.0:
            return np.asarray(model.L_vv(q.x, q.v), dtype=float)
        qt = flow_point(model, q, t, abs(t))
        return np.asarray(model.L_vv(qt.x, qt.v), dtype=float)

    def flow_derivative(step):
        return (lvv_at(step) - lvv_at(-step)) / (2.0 * step)

    M = flow_derivative(h_sigma)
    if richardson:
        M_fine = flow_derivative(h_sigma / 2.0)
        M = (4.0 * M_fine - M) / 3.0
    return M


def connection_coeffs(model, q, h_sigma=1e-4, richardson=False):
    """Nonlinear connection Gamma[i, j] = Gamma_i^j."""
    g = model.vertical_hessian(q)
    L_vx = np.asarray(model.L_vx(q.x, q.v), dtype=float)
    M = flow_lvv_derivative(model, q, h_sigma=h_sigma, richardson=richardson)
    # Gamma_i^j = 1/2 g^{jk} (M_ik + L_{v^k x^i} - L_{v^i x^k})
    inner = M + L_vx.T - L_vx  # inner[i, k]
    gamma = 0.5 * np.linalg.solve(g, inner.T).T  # contract over k with g^{jk}
    return gamma


def deviation(model, q):
    """Deviation Lambda^j = v^i Gamma_i^j + Sigma^j and its components.

    Returns (Lambda, Lambda_par, Lambda_perp_sq); the components are taken with
    respect to g = L_vv.
    """
    if np.allclose(q.v, 0.0):
        raise ModelError("deviation requires v != 0")
    gamma = connection_coeffs(model, q)
    sigma = semispray(model, q)
    lam = q.v @ gamma + sigma
    g = model.vertical_hessian(q)
    vv = float(q.v @ g @ q.v)
    lam_par = float(q.v @ g @ lam) / vv
    perp = lam - lam_par * q.v
    lam_perp_sq = float(perp @ g @ perp) / vv
    return lam, lam_par, lam_perp_sq
