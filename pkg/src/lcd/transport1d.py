"""One-dimensional measures, monotone transport, displacement interpolation,
entropies, distortion coefficients and the 1D inequalities the higher
dimensional statements disintegrate into: the needle CD criterion,
displacement convexity, oriented Borell-Brascamp-Lieb, Phi-entropy and the
Poincare inequality on an interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .model import ModelError

GRID_DEFAULT = 2048


class Transport1DError(ModelError):
    pass


@dataclass(frozen=True)
class Measure1D:
    """Measure on [a, b] given by density samples on a uniform grid."""

    t: np.ndarray
    rho: np.ndarray
    fn: object = None          # optional analytic density
    _cdf: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, float)
        rho = np.asarray(self.rho, float)
        if len(t) < 9 or len(t) != len(rho):
            raise Transport1DError("need matching grids with >= 9 points")
        if np.min(rho) < 0.0:
            raise Transport1DError("density must be nonnegative")
        steps = np.diff(t)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
            raise Transport1DError("grid must be uniform")
        cdf = cumulative_simpson(rho, x=t, initial=0.0)
        cdf = np.maximum.accumulate(cdf)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "_cdf", cdf)

    @classmethod
    def from_function(cls, fn, a, b, grid=GRID_DEFAULT):
        t = np.linspace(a, b, grid + 1)
        return cls(t=t, rho=np.array([float(fn(s)) for s in t]), fn=fn)

    @property
    def a(self):
        return float(self.t[0])

    @property
    def b(self):
        return float(self.t[-1])

    @property
    def mass(self):
        return float(self._cdf[-1])

    def density_at(self, s):
        if self.fn is not None:
            return np.vectorize(lambda x: float(self.fn(x)))(s) \
                if np.ndim(s) else float(self.fn(s))
        return np.interp(s, self.t, self.rho, left=0.0, right=0.0)

    def cdf_at(self, s):
        return np.interp(s, self.t, self._cdf, left=0.0, right=self.mass)

    def tail_at(self, s):
        """m([s, infinity))."""
        return self.mass - self.cdf_at(s)

    def integrate(self, values):
        """Simpson quadrature of values (samples on the grid) against m."""
        return float(simpson(np.asarray(values, float) * self.rho, x=self.t))

    def normalized(self):
        m = self.mass
        if m <= 0.0:
            raise Transport1DError("cannot normalize a null measure")
        return Measure1D(t=self.t, rho=self.rho / m,
                         fn=None if self.fn is None
                         else (lambda s, f=self.fn, m=m: f(s) / m))

    def restrict(self, c, d, grid=GRID_DEFAULT, normalize=True):
        """Normalized restriction m|_[c,d] on its own grid."""
        if not (self.a <= c < d <= self.b):
            raise Transport1DError("restriction interval outside support")
        t = np.linspace(c, d, grid + 1)
        rho = self.density_at(t)
        out = Measure1D(t=t, rho=rho)
        return out.normalized() if normalize else out


@dataclass(frozen=True)
class TransportMap1D:
    t: np.ndarray            # source grid
    T: np.ndarray            # map samples, non-decreasing
    oriented: bool           # whether m0([t, inf)) <= m1([t, inf)) held

    def __post_init__(self):
        if np.any(np.diff(self.T) < -1e-12):
            raise Transport1DError("transport map must be non-decreasing")

    def at(self, s):
        return np.interp(s, self.t, self.T)

    def interpolant(self, lam):
        """T_lambda(t) = (1 - lambda) t + lambda T(t) samples."""
        return (1.0 - lam) * self.t + lam * self.T


def monotone_map(m0, m1, mass_tol=1e-9):
    """Monotone map with m0([t, infinity)) = m1([T(t), infinity)).

    Tail inversion by interpolation on the cached tail function, refined by a
    local Newton step where the target density is positive.  The orientation
    condition m0([t, inf)) <= m1([t, inf)) is checked and reported; when it
    fails the map is still returned with oriented=False (T >= t is then not
    guaranteed).
    """
    if abs(m0.mass - m1.mass) > mass_tol:
        raise Transport1DError(
            f"mass mismatch: {m0.mass} vs {m1.mass} (tol {mass_tol})")
    s = m0.mass - m0._cdf  # tail values on the source grid, decreasing
    tail1 = m1.mass - m1._cdf
    T = np.interp(s, tail1[::-1], m1.t[::-1])
    for _ in range(3):
        rho = m1.density_at(T)
        good = rho > 1e-12
        resid = m1.tail_at(T) - s
        T = np.where(good, T + resid / np.maximum(rho, 1e-12), T)
        T = np.clip(T, m1.a, m1.b)
    T = np.maximum.accumulate(T)
    oriented = bool(np.all(m0.tail_at(m0.t) <= m1.tail_at(m0.t) + 1e-9))
    return TransportMap1D(t=m0.t, T=T, oriented=oriented)


def interpolate(m0, m1, lam, grid=GRID_DEFAULT, transport=None):
    """Displacement interpolation m_lambda = (T_lambda)_* m0.

    Density by the change of variables rho0(t) = rho_lam(T_lam(t)) T_lam'(t),
    resampled onto a uniform grid over the image interval."""
    if not 0.0 <= lam <= 1.0:
        raise Transport1DError("lambda must lie in [0, 1]")
    tmap = transport if transport is not None else monotone_map(m0, m1)
    y = tmap.interpolant(lam)
    dy = np.gradient(y, m0.t, edge_order=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(m0.rho > 0.0, m0.rho / np.maximum(dy, 1e-300), 0.0)
    # y can have plateaus only where rho0 = 0; make it strictly increasing
    y_mono = np.maximum.accumulate(y)
    grid_t = np.linspace(y_mono[0], y_mono[-1], grid + 1)
    rho = np.interp(grid_t, y_mono, f)
    out = Measure1D(t=grid_t, rho=rho)
    if abs(out.mass - m0.mass) > 1e-6:
        raise Transport1DError(
            f"interpolation lost mass: {out.mass} vs {m0.mass}")
    return out


def entropy(m_lam, reference, N):
    """S_N[m_lam|reference] = -int f^(-1/N) dm_lam with f = dm_lam/dreference;
    S_infinity = int f log f dreference (0 log 0 := 0)."""
    ref = reference.density_at(m_lam.t)
    pos = m_lam.rho > 0.0
    if np.any(pos & (ref <= 0.0)):
        raise Transport1DError("m_lam is not absolutely continuous w.r.t. "
                               "the reference on the grid")
    f = np.where(pos, m_lam.rho / np.where(ref > 0.0, ref, 1.0), 0.0)
    if N == np.inf:
        vals = np.where(pos, np.log(np.where(pos, f, 1.0)), 0.0)
        return float(simpson(vals * m_lam.rho, x=m_lam.t))
    if N <= 1:
        raise Transport1DError("entropy needs N > 1 or N = infinity")
    vals = np.where(pos, f ** (-1.0 / N), 0.0)
    return -float(simpson(vals * m_lam.rho, x=m_lam.t))


@dataclass(frozen=True)
class DistortionTriple:
    sigma: float
    tau: float
    beta: float
    infinite: bool = False

    def __post_init__(self):
        if not self.infinite and np.isfinite(self.sigma):
            pass


def distortion(t, K, N, ell):
    """Distortion coefficients (sigma_t, tau_t, beta_t)^{K,N}(ell).

    Conventions: K > 0 with ell sqrt(K/(N-1)) >= pi gives sigma = infinity;
    K = 0 gives (t, t, 1); K < 0 uses sinh; N = infinity gives sigma = tau = 1
    and beta = exp(K (1 - t^2) ell^2 / 6); ell = 0 gives (t, t, 1).
    """
    if not 0.0 <= t <= 1.0:
        raise Transport1DError("t must lie in [0, 1]")
    if ell < 0.0:
        raise Transport1DError("ell must be nonnegative")
    if N == np.inf:
        beta = math.exp(K * (1.0 - t * t) * ell * ell / 6.0)
        return DistortionTriple(sigma=1.0, tau=1.0, beta=beta)
    if N <= 1:
        raise Transport1DError("distortion needs N > 1 or N = infinity")
    if ell == 0.0 or K == 0.0:
        return DistortionTriple(sigma=t, tau=t, beta=1.0)
    w = ell * math.sqrt(abs(K) / (N - 1.0))
    if K > 0.0:
        if w >= math.pi:
            return DistortionTriple(sigma=np.inf, tau=np.inf, beta=np.inf,
                                    infinite=True)
        sigma = math.sin(t * w) / math.sin(w)
    else:
        sigma = math.sinh(t * w) / math.sinh(w)
    tau = t ** (1.0 / N) * sigma ** (1.0 - 1.0 / N)
    beta = t ** (1.0 - N) * sigma ** (N - 1.0) if t > 0.0 else np.inf
    return DistortionTriple(sigma=sigma, tau=tau, beta=beta,
                            infinite=not np.isfinite(beta))


def generalized_mean(a, b, lam, q):
    """M_q(a, b; lambda); zero whenever ab = 0."""
    if a < 0.0 or b < 0.0:
        raise Transport1DError("generalized mean needs nonnegative entries")
    if a * b == 0.0:
        return 0.0
    if q == np.inf:
        return max(a, b)
    if q == -np.inf:
        return min(a, b)
    if q == 0.0:
        return a ** (1.0 - lam) * b ** lam
    # log-space to survive large |q| (q' = q/(q+1) blows up near q = -1)
    la, lb = q * math.log(a), q * math.log(b)
    top = max(la, lb)
    s = (1.0 - lam) * math.exp(la - top) + lam * math.exp(lb - top)
    return math.exp((top + math.log(s)) / q)


@dataclass
class CD1DReport:
    K: float
    N: float
    residual_max: float
    passed: bool


def cd1d_check(m, K, N, tol=1e-6):
    """max over interior grid points of K + psi'^2/(N-1) - psi'' for
    psi = -log density; the measure is a CD(K, N) needle iff this is <= 0."""
    if np.any(m.rho[1:-1] <= 0.0):
        raise Transport1DError("cd1d_check requires positive interior density")
    h = m.t[1] - m.t[0]
    psi = -np.log(m.rho)
    d1 = (psi[:-4] - 8 * psi[1:-3] + 8 * psi[3:-1] - psi[4:]) / (12 * h)
    d2 = (-psi[:-4] + 16 * psi[1:-3] - 30 * psi[2:-2]
          + 16 * psi[3:-1] - psi[4:]) / (12 * h * h)
    quad = 0.0 if N == np.inf else d1 ** 2 / (N - 1.0)
    r = K + quad - d2
    rmax = float(np.max(r))
    return CD1DReport(K=float(K), N=float(N), residual_max=rmax,
                      passed=bool(rmax <= tol))


@dataclass
class DisplacementConvexityReport:
    K: float
    N: float
    lambdas: list
    margins: list
    worst_margin: float
    vacuous: bool
    passed: bool


def displacement_convexity_check(m, m0, m1, K, N, lambdas=None, tol=1e-4):
    """Both sides of the 1D displacement convexity inequality along the
    monotone interpolation between m0 and m1 (reference measure m).

    N < infinity: S_N[m_lam|m] <= -int [tau_{1-lam}(T - t) f0(t)^(-1/N)
    + tau_lam(T - t) f1(T(t))^(-1/N)] dm0(t).  N = infinity uses the convex
    combination of S_infinity with the quadratic correction
    -(K/2) lam (1 - lam) int (T - t)^2 dm0.  Margin = RHS - LHS per lambda.
    """
    if lambdas is None:
        lambdas = [0.1, 0.25, 0.5, 0.75, 0.9]
    m0 = m0.normalized()
    m1 = m1.normalized()
    tmap = monotone_map(m0, m1)
    gap = tmap.T - tmap.t
    f0 = np.where(m0.rho > 0.0,
                  m0.rho / np.maximum(m.density_at(m0.t), 1e-300), 0.0)
    f1_at_T = np.where(m0.rho > 0.0,
                       m1.density_at(tmap.T)
                       / np.maximum(m.density_at(tmap.T), 1e-300), 0.0)
    margins = []
    vacuous = False
    for lam in lambdas:
        m_lam = interpolate(m0, m1, lam, transport=tmap)
        lhs = entropy(m_lam, m, N)
        if N == np.inf:
            rhs = ((1.0 - lam) * entropy(m0, m, N) + lam * entropy(m1, m, N)
                   - 0.5 * K * lam * (1.0 - lam) * m0.integrate(gap ** 2))
        else:
            tau0 = np.empty_like(gap)
            tau1 = np.empty_like(gap)
            for i, ell in enumerate(np.abs(gap)):
                d0 = distortion(1.0 - lam, K, N, ell)
                d1 = distortion(lam, K, N, ell)
                if d0.infinite or d1.infinite:
                    vacuous = True
                tau0[i] = d0.tau
                tau1[i] = d1.tau
            if vacuous:
                margins.append(np.inf)
                continue
            integrand = np.where(
                m0.rho > 0.0,
                tau0 * np.where(f0 > 0, f0, 1.0) ** (-1.0 / N)
                + tau1 * np.where(f1_at_T > 0, f1_at_T, 1.0) ** (-1.0 / N),
                0.0)
            rhs = -m0.integrate(integrand)
        margins.append(rhs - lhs)
    worst = float(np.min(margins))
    return DisplacementConvexityReport(
        K=float(K), N=float(N), lambdas=list(lambdas),
        margins=[float(x) for x in margins], worst_margin=worst,
        vacuous=vacuous, passed=bool(worst >= -tol))


@dataclass
class OrientedBBLReport:
    q: float
    q_prime: float
    lam: float
    lhs: float
    rhs: float
    hypothesis_ok: bool
    tail_ok: bool
    vacuous: bool
    passed: bool


def oriented_bbl_check(t, h0, h1, h_lam, q, lam, pair_grid=64, tol=1e-9):
    """Oriented 1D Borell-Brascamp-Lieb: given the tail domination
    int_t^b h0 / int h0 <= int_t^b h1 / int h1 and the pointwise hypothesis
    h_lam((1-lam) t0 + lam t1) >= M_q(h0(t0), h1(t1); lam) for t0 <= t1,
    conclude int h_lam >= M_{q/(q+1)}(int h0, int h1; lam).

    Both hypotheses are verified numerically on a grid of (t0, t1) pairs; if
    either fails the conclusion is not tested (vacuous, flagged)."""
    t = np.asarray(t, float)
    h0 = np.asarray(h0, float)
    h1 = np.asarray(h1, float)
    h_lam = np.asarray(h_lam, float)
    i0 = float(simpson(h0, x=t))
    i1 = float(simpson(h1, x=t))
    il = float(simpson(h_lam, x=t))
    c0 = cumulative_simpson(h0, x=t, initial=0.0)
    c1 = cumulative_simpson(h1, x=t, initial=0.0)
    tail_ok = bool(np.all((i0 - c0) / i0 <= (i1 - c1) / i1 + 1e-9))
    idx = np.linspace(0, len(t) - 1, pair_grid).astype(int)
    hyp_ok = True
    for i in idx:
        for j in idx:
            if t[j] < t[i]:
                continue
            mid = (1.0 - lam) * t[i] + lam * t[j]
            h_mid = float(np.interp(mid, t, h_lam))
            if h_mid < generalized_mean(h0[i], h1[j], lam, q) - 1e-9:
                hyp_ok = False
    if q == np.inf:
        q_prime = 1.0
    elif q == -1.0:
        q_prime = -np.inf
    else:
        q_prime = q / (q + 1.0)
    vacuous = not (tail_ok and hyp_ok)
    rhs = generalized_mean(i0, i1, lam, q_prime)
    passed = vacuous or il >= rhs - tol
    return OrientedBBLReport(q=float(q), q_prime=float(q_prime), lam=float(lam),
                             lhs=il, rhs=rhs, hypothesis_ok=hyp_ok,
                             tail_ok=tail_ok, vacuous=vacuous,
                             passed=bool(passed))


PHI_SPECS = {
    "square": (lambda u: u * u, lambda u: 2.0 * np.ones_like(u)),
    "tlogt": (lambda u: u * np.log(u), lambda u: 1.0 / u),
}


def phi_spec(spec):
    """Phi and Phi'' for a named convex function; ('power', p) gives t^p."""
    if isinstance(spec, tuple) and spec[0] == "power":
        p = float(spec[1])
        return (lambda u: u ** p,
                lambda u: p * (p - 1.0) * u ** (p - 2.0))
    try:
        return PHI_SPECS[spec]
    except KeyError:
        raise Transport1DError(f"unknown Phi spec {spec!r}") from None


@dataclass
class PhiEntropyReport:
    K: float
    lhs: float
    rhs: float
    margin: float
    passed: bool


def phi_entropy_check(m, f, spec, K, fprime=None, tol=1e-9):
    """int Phi(f) dm - Phi(int f dm) <= (1/2K) int Phi''(f) |f'|^2 dm for a
    probability measure m with psi'' >= K > 0 (verified by FD)."""
    if K <= 0.0:
        raise Transport1DError("Phi-entropy needs K > 0")
    if abs(m.mass - 1.0) > 1e-6:
        raise Transport1DError("Phi-entropy needs a probability measure")
    rep = cd1d_check(m, K, np.inf, tol=1e-6)
    if not rep.passed:
        raise Transport1DError(
            f"reference does not satisfy psi'' >= {K}: excess {rep.residual_max}")
    phi, phi2 = phi_spec(spec)
    fv = np.array([float(f(s)) for s in m.t])
    if fprime is not None:
        fp = np.array([float(fprime(s)) for s in m.t])
    else:
        fp = np.gradient(fv, m.t, edge_order=2)
    lhs = m.integrate(phi(fv)) - float(phi(np.array([m.integrate(fv)]))[0])
    rhs = m.integrate(phi2(fv) * fp ** 2) / (2.0 * K)
    return PhiEntropyReport(K=float(K), lhs=float(lhs), rhs=float(rhs),
                            margin=float(rhs - lhs),
                            passed=bool(lhs <= rhs + tol))


@dataclass
class Poincare1DReport:
    diameter: float
    trials: int
    worst_margin: float
    passed: bool


def poincare_check(m, trials=100, modes=6, seed=0, tol=1e-9):
    """int f^2 dm <= (D^2/pi^2) int f'^2 dm for random smooth centered f on a
    log-concave probability measure of diameter D = b - a."""
    m = m.normalized()
    rep = cd1d_check(m, 0.0, np.inf, tol=1e-6)
    if not rep.passed:
        raise Transport1DError("Poincare check needs a log-concave density")
    D = m.b - m.a
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(trials):
        coef = rng.standard_normal(modes)
        phase = rng.uniform(0.0, 2.0 * np.pi, modes)
        s = (m.t - m.a) / D
        fv = np.zeros_like(m.t)
        fp = np.zeros_like(m.t)
        for k in range(modes):
            wk = (k + 1) * np.pi
            fv += coef[k] * np.sin(wk * s + phase[k])
            fp += coef[k] * wk / D * np.cos(wk * s + phase[k])
        fv = fv - m.integrate(fv)
        lhs = m.integrate(fv ** 2)
        rhs = (D / np.pi) ** 2 * m.integrate(fp ** 2)
        worst = min(worst, rhs - lhs)
    return Poincare1DReport(diameter=float(D), trials=trials,
                            worst_margin=float(worst),
                            passed=bool(worst >= -tol))
