"""Ricci curvature of a Tonelli Lagrangian and its weighted variants.

The Ricci curvature is assembled from the coordinate frame E_i = d/dx^i -
Gamma_i^j d/dv^j and coframe eps^j = dv^j + Gamma_i^j dx^i as the contraction
Ric = eps^i([Sigma, E_i]), with the bracket evaluated by directional finite
differences of the two vector fields on TM.  The weighted curvature adds the
flow derivatives of psi = log sqrt(det g) - log omega_c and the deviation
terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .dynamics import connection_coeffs, deviation, flow_point, semispray
from .model import ModelError, PhasePoint, random_sphere_direction


class InvalidDimensionParameter(ModelError):
    """Effective dimension N outside the admissible domain."""


def psi_tm(model, q):
    """psi(x, v) = log sqrt(det g(x, v)) - log omega_c(x)."""
    g = model.vertical_hessian(q)
    det = float(np.linalg.det(g))
    if det <= 0.0:
        raise ModelError(f"det g = {det} must be positive")
    return 0.5 * np.log(det) - np.log(model.measure_density(q.x))


def sigma_psi(model, q, h=1e-3, with_error=False):
    """Flow derivatives (Sigma psi, Sigma^2 psi) at q by Richardson-refined
    central differences of t -> psi along the Euler-Lagrange flow."""

    def psi_at(t):
        return psi_tm(model, flow_point(model, q, t, abs(t) if t else h))

    d1, e1 = fd.d1_richardson(psi_at, 0.0, h)
    d2, e2 = fd.d2_richardson(psi_at, 0.0, h)
    if with_error:
        return float(d1), float(d2), float(e1), float(e2)
    return float(d1), float(d2)


def ricci_direct(model, q, h=1e-4):
    """Ric(q) = eps^i([Sigma, E_i]) by directional FD of the fields on TM."""
    n = model.dim
    z0 = np.concatenate([q.x, q.v])
    gamma0 = connection_coeffs(model, q)

    def sigma_field(z):
        point = PhasePoint(z[:n], z[n:])
        return np.concatenate([point.v, semispray(model, point)])

    def frame_field(i):
        def field(z):
            point = PhasePoint(z[:n], z[n:])
            gamma = connection_coeffs(model, point)
            out = np.zeros(2 * n)
            out[i] = 1.0
            out[n:] = -gamma[i]
            return out

        return field

    sigma0 = sigma_field(z0)
    total = 0.0
    for i in range(n):
        Ei = frame_field(i)
        ei0 = Ei(z0)
        # [Sigma, E_i] = D_Sigma E_i - D_{E_i} Sigma at z0
        bracket = (fd.directional(Ei, z0, sigma0, h, order=4)
                   - fd.directional(sigma_field, z0, ei0, h, order=4))
        # eps^i(w) = w_v^i + Gamma_k^i w_x^k
        total += bracket[n + i] + float(gamma0[:, i] @ bracket[:n])
    return float(total)


def _check_dimension_parameter(N, n):
    if N != np.inf and not np.isfinite(N):
        raise InvalidDimensionParameter(f"N = {N} is not a number")
    if N != np.inf and 0.0 <= N < n:
        raise InvalidDimensionParameter(
            f"N = {N} lies in the excluded band [0, {n})"
        )


@dataclass
class CurvatureSample:
    q: PhasePoint
    N: float
    ric: float
    sigma_psi1: float
    sigma_psi2: float
    lam_par: float
    lam_perp_sq: float
    ric_weighted: float
    method: str = "direct"


def ricci_weighted(model, q, N, details=False):
    """Ric_{mu,N}(q) = Ric + Sigma^2 psi - (Sigma psi - Lambda_par)^2/(N-n)
    + 2 Lambda_perp^2 + Lambda_par^2.

    N = infinity drops the (N - n) term; N = n is admitted only when
    Sigma psi - Lambda_par vanishes (to 1e-6), in which case the term is 0.
    """
    n = model.dim
    _check_dimension_parameter(N, n)
    ric = ricci_direct(model, q)
    s1, s2 = sigma_psi(model, q)
    _, lam_par, lam_perp_sq = deviation(model, q)
    excess = s1 - lam_par
    if N == np.inf:
        dim_term = 0.0
    elif N == n:
        if abs(excess) > 1e-6:
            raise InvalidDimensionParameter(
                f"N = n = {n} requires Sigma psi = Lambda_par; "
                f"difference is {excess:.3e}"
            )
        dim_term = 0.0
    else:
        dim_term = excess ** 2 / (N - n)
    value = ric + s2 - dim_term + 2.0 * lam_perp_sq + lam_par ** 2
    if details:
        return CurvatureSample(q=q, N=float(N), ric=ric, sigma_psi1=s1,
                               sigma_psi2=s2, lam_par=lam_par,
                               lam_perp_sq=lam_perp_sq, ric_weighted=float(value))
    return float(value)


def ricci_bochner_oracle(model, q, N, delta=1e-2):
    """Ric_{mu,N}(q) via the Bochner route.

    Builds the curvature-saturating (equality-mode) seed at q, extracts a short
    needle, and returns psi_needle''(0) - psi_needle'(0)^2/(N-1), which equals
    the weighted Ricci curvature up to discretization error.
    """
    from .needles import extract_needle, seed_construct

    _check_dimension_parameter(N, model.dim)
    seed = seed_construct(model, q, mode="equality", N=N)
    needle = extract_needle(model, seed, (-2.0 * delta, 2.0 * delta), delta)
    if len(needle.t) != 5 or needle.truncated:
        raise ModelError("Bochner probe needle truncated; point too close to "
                         "the chart boundary")
    psi = needle.psi
    d1 = (psi[0] - 8.0 * psi[1] + 8.0 * psi[3] - psi[4]) / (12.0 * delta)
    d2 = (-psi[0] + 16.0 * psi[1] - 30.0 * psi[2] + 16.0 * psi[3] - psi[4]) \
        / (12.0 * delta * delta)
    if N == np.inf:
        return float(d2)
    return float(d2 - d1 ** 2 / (N - 1.0))


@dataclass
class CDVerdict:
    model: str
    K: float
    N: float
    count: int
    min_excess: float
    argmin: PhasePoint
    passed: bool
    tol: float
    failures: int = 0


def cd_verdict(model, K, N, grid_per_axis=3, dirs_per_point=8, seed=0,
               tol=1e-3, margin=0.15, polish=True):
    """CD(K, N) verdict: min of Ric_{mu,N} - K over a chart grid times random
    indicatrix directions; pass iff the minimum is >= -tol.

    With polish=True the direction at the argmin base point is refined by a
    derivative-free fiber minimization, so extremal directions that random
    sampling only approaches are resolved."""
    n = model.dim
    _check_dimension_parameter(N, n)
    while grid_per_axis > 1 and grid_per_axis ** n > 256:
        grid_per_axis -= 1
    lo = np.asarray(model.chart.lower, float)
    hi = np.asarray(model.chart.upper, float)
    span = hi - lo
    axes = [np.linspace(lo[i] + margin * span[i], hi[i] - margin * span[i],
                        grid_per_axis) for i in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    rng = np.random.default_rng(seed)
    best = np.inf
    argmin = None
    count = 0
    failures = 0
    for x in points:
        if model.chart.exclusion is not None and model.chart.exclusion(x):
            continue
        for _ in range(dirs_per_point):
            u = random_sphere_direction(rng, n)
            try:
                q = model.indicatrix_sample(x, u)
                value = ricci_weighted(model, q, N)
            except ModelError:
                failures += 1
                continue
            count += 1
            if value - K < best:
                best = value - K
                argmin = q
    if count == 0:
        raise ModelError("cd_verdict: no samples could be evaluated")
    if polish and argmin is not None:
        from scipy.optimize import minimize

        x_star = argmin.x

        def objective(w):
            norm = np.linalg.norm(w)
            if norm < 1e-8:
                return np.inf
            try:
                qw = model.indicatrix_sample(x_star, w / norm)
                return ricci_weighted(model, qw, N)
            except ModelError:
                return np.inf

        w0 = argmin.v / np.linalg.norm(argmin.v)
        res = minimize(objective, w0, method="Nelder-Mead",
                       options={"xatol": 1e-5, "fatol": 1e-7, "maxiter": 400})
        if np.isfinite(res.fun) and res.fun - K < best:
            best = float(res.fun) - K
            argmin = model.indicatrix_sample(x_star, res.x / np.linalg.norm(res.x))
    return CDVerdict(model=model.name, K=float(K), N=float(N), count=count,
                     min_excess=float(best), argmin=argmin,
                     passed=bool(best >= -tol), tol=tol, failures=failures)
