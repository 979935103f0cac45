import math

import numpy as np
import pytest

from lcd import transport1d as t1


def gauss(mu, sigma=1.0):
    def fn(s):
        z = (s - mu) / sigma
        return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2 * math.pi))
    return fn


def quantiles(m, probs):
    """Inverse CDF by interpolation on the measure's grid."""
    cdf = np.array([m.cdf_at(s) for s in m.t]) / m.mass
    return np.interp(probs, cdf, m.t)


def test_measure_basics():
    m = t1.Measure1D.from_function(lambda s: 2.0 * s, 0.0, 1.0)
    assert m.mass == pytest.approx(1.0, abs=1e-10)
    assert m.cdf_at(0.5) == pytest.approx(0.25, abs=1e-8)
    assert m.tail_at(0.5) == pytest.approx(0.75, abs=1e-8)
    assert m.density_at(0.3) == pytest.approx(0.6, abs=1e-10)
    r = m.restrict(0.2, 0.8)
    assert r.mass == pytest.approx(1.0, abs=1e-9)  # renormalized
    with pytest.raises(t1.Transport1DError):
        t1.Measure1D.from_function(lambda s: -1.0, 0.0, 1.0)


def test_uniform_shift_map():
    m0 = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 1.0)
    m1 = t1.Measure1D.from_function(lambda s: 1.0, 2.0, 3.0)
    tm = t1.monotone_map(m0, m1)
    assert np.max(np.abs(tm.T - (tm.t + 2.0))) <= 1e-9
    assert tm.oriented
    for lam in (0.0, 0.5, 1.0):
        ml = t1.interpolate(m0, m1, lam, transport=tm)
        assert ml.mass == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(ml.rho - 1.0)) <= 1e-6
        assert ml.a == pytest.approx(2.0 * lam, abs=1e-9)


def test_monotone_map_against_sorted_atoms():
    # 200 equal-mass atoms at matching quantiles; the discrete monotone
    # coupling pairs them in sorted order
    m0 = t1.Measure1D.from_function(gauss(0.0), -6.0, 6.0).normalized()
    m1 = t1.Measure1D.from_function(lambda s: math.exp(-s) if s > 0 else 0.0,
                                    1e-9, 14.0).normalized()
    tm = t1.monotone_map(m0, m1)
    probs = (np.arange(200) + 0.5) / 200.0
    atoms0 = quantiles(m0, probs)
    atoms1 = quantiles(m1, probs)
    cell0 = m0.t[1] - m0.t[0]
    cell1 = m1.t[1] - m1.t[0]
    mapped = np.interp(atoms0, tm.t, tm.T)
    assert np.max(np.abs(mapped - atoms1)) <= 2.0 * max(cell0, cell1)


def test_gaussian_interpolation():
    m0 = t1.Measure1D.from_function(gauss(0.0), -10.0, 12.0)
    m1 = t1.Measure1D.from_function(gauss(2.0), -10.0, 12.0)
    tm = t1.monotone_map(m0, m1)
    for lam in (0.25, 0.5, 0.75):
        ml = t1.interpolate(m0, m1, lam, transport=tm)
        exact = np.array([gauss(2.0 * lam)(s) for s in ml.t])
        assert np.max(np.abs(ml.rho - exact)) <= 1e-4


def test_entropy():
    leb = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 1.0)
    assert t1.entropy(leb, leb, 5.0) == pytest.approx(-1.0, abs=1e-10)
    assert t1.entropy(leb, leb, np.inf) == pytest.approx(0.0, abs=1e-12)
    # KL(N(0,1) || N(0,2^2)) closed form
    g = t1.Measure1D.from_function(gauss(0.0), -14.0, 14.0)
    ref = t1.Measure1D.from_function(gauss(0.0, 2.0), -14.0, 14.0)
    kl_exact = 0.5 * (0.25 - 1.0 + math.log(4.0))
    assert t1.entropy(g, ref, np.inf) == pytest.approx(kl_exact, abs=1e-8)


def test_distortion_identities(rng):
    worst = 0.0
    for _ in range(200):
        t = rng.uniform(0.01, 0.99)
        K = rng.uniform(-3.0, 3.0)
        N = rng.uniform(1.5, 12.0)
        ell = rng.uniform(0.0, 2.0)
        d = t1.distortion(t, K, N, ell)
        if d.infinite:
            continue
        worst = max(worst,
                    abs(d.tau - t ** (1 / N) * d.sigma ** (1 - 1 / N)),
                    abs(d.beta - t ** (1 - N) * d.sigma ** (N - 1)))
    assert worst <= 1e-12


def test_distortion_special_cases():
    d0 = t1.distortion(0.4, 0.0, 3.0, 1.2)
    assert (d0.sigma, d0.tau, d0.beta) == (0.4, 0.4, 1.0)
    dinf = t1.distortion(0.3, 2.0, np.inf, 1.5)
    assert dinf.sigma == 1.0 and dinf.tau == 1.0
    assert dinf.beta == pytest.approx(math.exp(2.0 * (1 - 0.09) * 2.25 / 6))
    assert t1.distortion(0.5, 2.0, 3.0, 10.0).infinite  # ell w >= pi


def test_generalized_mean():
    a, b, lam = 2.0, 8.0, 0.5
    assert t1.generalized_mean(a, b, lam, 1.0) == pytest.approx(5.0)
    assert t1.generalized_mean(a, b, lam, 0.0) == pytest.approx(4.0)
    assert t1.generalized_mean(a, b, lam, -1.0) == pytest.approx(3.2)
    assert t1.generalized_mean(a, b, lam, np.inf) == 8.0
    assert t1.generalized_mean(a, b, lam, -np.inf) == 2.0
    assert t1.generalized_mean(0.0, b, lam, 0.5) == 0.0
    # extreme exponents must not overflow
    assert t1.generalized_mean(a, b, lam, -999.0) > 0.0


def test_cd1d_sharp_density():
    K, N = 2.0, 4.0
    w = math.sqrt(K / (N - 1))
    L = math.pi / w
    eps = 1e-3
    sharp = t1.Measure1D.from_function(
        lambda s: math.sin(w * s) ** (N - 1), eps, L - eps)
    assert t1.cd1d_check(sharp, K, N).passed
    assert not t1.cd1d_check(sharp, K + 0.1, N).passed


def test_displacement_convexity():
    K, N = 2.0, 4.0
    w = math.sqrt(K / (N - 1))
    sharp = t1.Measure1D.from_function(
        lambda s: math.sin(w * s) ** (N - 1), 1e-3,
        math.pi / w - 1e-3).normalized()
    rep = t1.displacement_convexity_check(sharp, sharp.restrict(0.2, 0.8),
                                          sharp.restrict(1.2, 1.8), K, N)
    assert rep.passed and not rep.vacuous
    assert rep.worst_margin >= -1e-4

    # N = infinity Gaussian case, K = 1
    g0 = t1.Measure1D.from_function(gauss(0.0), -10.0, 12.0)
    ga = t1.Measure1D.from_function(gauss(-1.0), -10.0, 12.0)
    g1 = t1.Measure1D.from_function(gauss(2.0), -10.0, 12.0)
    rep_inf = t1.displacement_convexity_check(g0, ga, g1, 1.0, np.inf)
    assert rep_inf.passed
    assert rep_inf.worst_margin >= -1e-4


def test_displacement_convexity_negative_control():
    # Lebesgue on [0, 3] does not satisfy CD(0.5, 3)
    leb = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 3.0)
    rep = t1.displacement_convexity_check(leb, leb.restrict(0.1, 0.9),
                                          leb.restrict(2.1, 2.9), 0.5, 3.0)
    assert not rep.passed
    assert rep.worst_margin < 0.0


def test_oriented_bbl(rng):
    # translated and scaled log-concave profiles: h1 = s h0(. - d) with
    # h_lam = s^lam h0(. - lam d) satisfies the q-mean hypothesis for q <= 0
    t = np.linspace(0.0, 3.0, 385)
    fails = vacuous = total = 0
    for _ in range(50):
        lam = rng.uniform(0.1, 0.9)
        q = rng.uniform(-1.0, 0.0)
        c = rng.uniform(1.0, 4.0)
        d = rng.uniform(0.3, 1.2)
        s = rng.uniform(0.4, 2.0)
        h0 = np.exp(-c * (t - 0.8) ** 2)
        h1 = s * np.exp(-c * (t - 0.8 - d) ** 2)
        hl = s ** lam * np.exp(-c * (t - 0.8 - lam * d) ** 2)
        rep = t1.oriented_bbl_check(t, h0, h1, hl, q, lam, pair_grid=32)
        total += 1
        if rep.vacuous:
            vacuous += 1
        elif not rep.passed:
            fails += 1
    assert fails == 0
    assert vacuous < total // 2


def test_phi_entropy_gaussian_equalities():
    g = t1.Measure1D.from_function(gauss(0.0), -12.0, 12.0).normalized()
    r1 = t1.phi_entropy_check(g, lambda s: s, "square", 1.0,
                              fprime=lambda s: 1.0)
    assert r1.passed
    assert r1.lhs == pytest.approx(r1.rhs, abs=1e-6)  # equality case
    r2 = t1.phi_entropy_check(g, lambda s: math.exp(s - 0.5), "tlogt", 1.0,
                              fprime=lambda s: math.exp(s - 0.5))
    assert r2.passed
    assert r2.lhs == pytest.approx(0.5, abs=1e-6)


def test_poincare():
    for m in (t1.Measure1D.from_function(lambda s: 1.0, 0.0, 2.0),
              t1.Measure1D.from_function(gauss(1.0), 0.0, 2.0)):
        rep = t1.poincare_check(m, trials=50, seed=3)
        assert rep.passed
    # non-log-concave density is rejected up front
    bimodal = t1.Measure1D.from_function(
        lambda s: math.exp(-4.0 * (abs(s) - 1.0) ** 2), -3.0, 3.0)
    with pytest.raises(t1.Transport1DError):
        t1.poincare_check(bimodal)


def test_mass_mismatch_rejected():
    m0 = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 1.0)
    m1 = t1.Measure1D.from_function(lambda s: 2.0, 0.0, 1.0)
    with pytest.raises(t1.Transport1DError):
        t1.monotone_map(m0, m1)
