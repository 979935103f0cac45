"""Hamilton-Jacobi seeds and needle extraction.

A seed prescribes second-order data (x0, p0 = du, S = Hessian of u) of a local
Hamilton-Jacobi solution whose graph is tangent to the zero level of H.  The
needle is the extremal through the seed together with the 1D density obtained
by propagating the Jacobi blocks (X, P) and taking rho = omega_c * det X.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import flow_lvv_derivative, hamiltonian_blocks, variational_flow
from .model import CovectorPoint, ModelError, PhasePoint


class SeedError(ModelError):
    pass


@dataclass
class HJSeed:
    x0: np.ndarray
    p0: np.ndarray
    S: np.ndarray
    mode: str = "minimal"
    N: float = np.inf

    def validate(self, model, h_tol=1e-10, tangency_tol=1e-9):
        H = model.hamiltonian(CovectorPoint(self.x0, self.p0))
        if abs(H) > h_tol:
            raise SeedError(f"seed is off the zero level: H = {H:.3e}")
        defect = np.max(np.abs(self.S - self.S.T))
        if defect > 1e-12:
            raise SeedError(f"seed Hessian not symmetric: {defect:.3e}")
        _, hx, _, _, _ = hamiltonian_blocks(model, self.x0, self.p0)
        q = model.legendre_forward(CovectorPoint(self.x0, self.p0))
        res = np.max(np.abs(hx + self.S @ q.v))
        if res > tangency_tol:
            raise SeedError(f"seed tangency residual {res:.3e} exceeds {tangency_tol}")
        return res


def seed_construct(model, q, mode="minimal", N=np.inf):
    """Second-order Hamilton-Jacobi data at q in SM.

    minimal: least-Frobenius-norm symmetric S with S . H_p = -H_x.
    equality: S realizes the curvature-saturating Hessian, with orthogonal
    part c0 * projection and tangential part forced by the deviation; the
    translation between the Hessian of u and S uses
    g . Hess(u) = S + (d/dt L_vv - L_vx - L_vx^T)/2 along the flow.
    """
    n = model.dim
    c = model.legendre_inverse(q)
    x0, p0 = c.x, c.p
    _, hx, _, _, _ = hamiltonian_blocks(model, x0, p0)
    a = -hx
    b = q.v  # H_p on the zero level
    bb = float(b @ b)
    if bb <= 0.0:
        raise SeedError("H_p = 0 on the zero level; supercriticality violated")
    if mode == "minimal":
        ab = float(a @ b)
        S = (np.outer(a, b) + np.outer(b, a)) / bb - (ab / bb ** 2) * np.outer(b, b)
    elif mode == "equality":
        from .curvature import sigma_psi  # local import avoids a module cycle

        from .dynamics import deviation

        if 0.0 <= N < n:
            raise SeedError(f"N = {N} lies in the excluded band [0, {n})")
        _, lam_par, _ = deviation(model, q)
        s_psi, _ = sigma_psi(model, q)
        if N == np.inf:
            c0 = 0.0
        elif N == n:
            if abs(s_psi - lam_par) > 1e-6:
                raise SeedError("N = n requires sigma psi = Lambda_par on this model")
            c0 = 0.0
        else:
            c0 = (lam_par - s_psi) / (N - n)
        g = model.vertical_hessian(q)
        L_vx = np.asarray(model.L_vx(x0, q.v), dtype=float)
        M = flow_lvv_derivative(model, q, richardson=True)
        B = 0.5 * (M - L_vx - L_vx.T)
        m_vec = a + B @ q.v
        gv = g @ q.v
        vv = float(q.v @ gv)
        W = (c0 * (g - np.outer(gv, gv) / vv)
             + (np.outer(m_vec, gv) + np.outer(gv, m_vec)) / vv
             - (float(q.v @ m_vec) / vv ** 2) * np.outer(gv, gv))
        S = W - B
        S = 0.5 * (S + S.T)
    else:
        raise SeedError(f"unknown seed mode {mode!r}")
    seed = HJSeed(x0=np.asarray(x0, float), p0=np.asarray(p0, float),
                  S=np.asarray(S, float), mode=mode, N=N)
    seed.validate(model)
    return seed


@dataclass
class Needle:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    p: np.ndarray
    rho: np.ndarray
    psi: np.ndarray          # -log rho
    Lu: np.ndarray           # rho'/rho from the divergence route
    U: np.ndarray            # (m, n, n) Hessian of u along the curve
    seed: HJSeed
    truncated: bool = False
    conjugate_time: float = None
    max_condition: float = 1.0
    symmetry_defect: float = 0.0

    @property
    def index_zero(self):
        return int(np.argmin(np.abs(self.t)))

    def velocity_residual(self):
        """max |dx/dt - v| on interior grid points (4th-order FD)."""
        h = self.t[1] - self.t[0]
        xs = self.x
        interior = slice(2, len(self.t) - 2)
        dx = (xs[:-4] - 8 * xs[1:-3] + 8 * xs[3:-1] - xs[4:]) / (12 * h)
        return float(np.max(np.abs(dx - self.v[interior])))

    def density_residual(self):
        """max |d/dt log rho - Lu| on interior grid points."""
        h = self.t[1] - self.t[0]
        lr = np.log(self.rho)
        dlr = (lr[:-4] - 8 * lr[1:-3] + 8 * lr[3:-1] - lr[4:]) / (12 * h)
        return float(np.max(np.abs(dlr - self.Lu[2:-2])))


def _propagate(model, seed, T, h):
    """One-sided Jacobi propagation from the seed; returns arrays without t=0
    when T < 0 (the caller keeps the forward copy)."""
    n = model.dim
    J0 = np.vstack([np.eye(n), seed.S])
    q0 = model.legendre_forward(CovectorPoint(seed.x0, seed.p0))
    return variational_flow(model, q0, T, h, J0=J0, check_chart=True)


def _det_x_at(model, seed, t, h):
    n = model.dim
    vs = _propagate(model, seed, t, min(h, abs(t) if t != 0 else h))
    return float(np.linalg.det(vs.J[-1][:n, :]))


def extract_needle(model, seed, t_range, h):
    """Needle through the seed over t_range = (t_minus <= 0, t_plus >= 0).

    Truncates (with a flag and a bisection-refined conjugate time) where
    det X changes sign or the base curve leaves the chart.
    """
    t_minus, t_plus = t_range
    if not (t_minus <= 0.0 <= t_plus) or t_plus == t_minus:
        raise ModelError("t_range must contain 0 with t_minus < t_plus")
    n = model.dim

    halves = []
    for T in (t_plus, t_minus):
        if T == 0.0:
            halves.append(None)
            continue
        halves.append(_propagate(model, seed, T, h))

    # merge backward (reversed) and forward halves on one increasing grid
    parts_t, parts_x, parts_p, parts_J = [], [], [], []
    fwd, bwd = halves
    if bwd is not None:
        parts_t.append(bwd.t[::-1][:-1])
        parts_x.append(bwd.x[::-1][:-1])
        parts_p.append(bwd.p[::-1][:-1])
        parts_J.append(bwd.J[::-1][:-1])
    if fwd is not None:
        parts_t.append(fwd.t)
        parts_x.append(fwd.x)
        parts_p.append(fwd.p)
        parts_J.append(fwd.J)
    t = np.concatenate(parts_t)
    x = np.concatenate(parts_x)
    p = np.concatenate(parts_p)
    J = np.concatenate(parts_J)

    detx = np.array([np.linalg.det(Jk[:n, :]) for Jk in J])
    i0 = int(np.argmin(np.abs(t)))
    lo, hi = 0, len(t) - 1
    truncated = bool((fwd is not None and fwd.left_chart)
                     or (bwd is not None and bwd.left_chart))
    conjugate_time = None
    for k in range(i0, hi + 1):
        if detx[k] <= 0.0:
            hi = k - 1
            truncated = True
            conjugate_time = _bisect_conjugate(model, seed, t[k - 1], t[k], h)
            break
    for k in range(i0, lo - 1, -1):
        if detx[k] <= 0.0:
            lo = k + 1
            truncated = True
            if conjugate_time is None:
                conjugate_time = _bisect_conjugate(model, seed, t[k + 1], t[k], h)
            break
    if hi - lo < 4:
        raise ModelError("needle window too short after truncation")
    sl = slice(lo, hi + 1)
    t, x, p, J, detx = t[sl], x[sl], p[sl], J[sl], detx[sl]

    m = len(t)
    v = np.empty_like(x)
    U = np.empty((m, n, n))
    Lu = np.empty(m)
    rho = np.empty(m)
    max_cond = 1.0
    sym_defect = 0.0
    log_omega = np.empty(m)
    for k in range(m):
        X = J[k][:n, :]
        P = J[k][n:, :]
        Uk = np.linalg.solve(X.T, P.T).T
        U[k] = Uk
        sym_defect = max(sym_defect, float(np.max(np.abs(Uk - Uk.T))))
        max_cond = max(max_cond, float(np.linalg.cond(X)))
        vk, _, hpp, hpx, _ = hamiltonian_blocks(model, x[k], p[k])
        v[k] = vk
        omega_k = model.measure_density(x[k])
        rho[k] = omega_k * detx[k]
        log_omega[k] = np.log(omega_k)
        Lu[k] = float(np.trace(hpx + hpp @ Uk))
    # the measure part of Lu: d/dt log omega along the curve
    grad_lo = np.gradient(log_omega, t, edge_order=2)
    # interior 4th-order refinement
    if m >= 5:
        h_grid = t[1] - t[0]
        grad_lo[2:-2] = (log_omega[:-4] - 8 * log_omega[1:-3]
                         + 8 * log_omega[3:-1] - log_omega[4:]) / (12 * h_grid)
    Lu = Lu + grad_lo
    return Needle(t=t, x=x, v=v, p=p, rho=rho, psi=-np.log(rho), Lu=Lu, U=U,
                  seed=seed, truncated=truncated, conjugate_time=conjugate_time,
                  max_condition=max_cond, symmetry_defect=sym_defect)


def _bisect_conjugate(model, seed, t_good, t_bad, h, tol=1e-8):
    """Refine the first zero of det X between t_good (positive det) and t_bad."""
    a, b = t_good, t_bad
    fa = _det_x_at(model, seed, a, h)
    for _ in range(200):
        if abs(b - a) <= tol:
            break
        mid = 0.5 * (a + b)
        fm = _det_x_at(model, seed, mid, h)
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass
class NeedleCDReport:
    K: float
    N: float
    residual_max: float
    passed: bool
    t: np.ndarray = field(repr=False, default=None)
    residual: np.ndarray = field(repr=False, default=None)


def needle_cd_check(needle, K, N, tol=5e-4):
    """Residual r(t) = -psi'' + psi'^2/(N-1) + K on the interior grid.

    The needle satisfies the curvature-dimension condition iff r <= 0; the
    check passes when max r <= tol.  For N = infinity the quadratic term is
    dropped.
    """
    t = needle.t
    if len(t) < 5:
        raise ModelError("needle too short for the CD residual (need >= 5 points)")
    h = t[1] - t[0]
    psi = needle.psi
    d1 = (psi[:-4] - 8 * psi[1:-3] + 8 * psi[3:-1] - psi[4:]) / (12 * h)
    d2 = (-psi[:-4] + 16 * psi[1:-3] - 30 * psi[2:-2]
          + 16 * psi[3:-1] - psi[4:]) / (12 * h * h)
    quad = 0.0 if N == np.inf else d1 ** 2 / (N - 1.0)
    r = -d2 + quad + K
    return NeedleCDReport(K=float(K), N=float(N), residual_max=float(np.max(r)),
                          passed=bool(np.max(r) <= tol), t=t[2:-2], residual=r)
