import math
import numpy as np
from lcd import transport1d as t1

# 1. uniform shift
m0 = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 1.0)
m1 = t1.Measure1D.from_function(lambda s: 1.0, 2.0, 3.0)
tm = t1.monotone_map(m0, m1)
print("shift T err:", np.max(np.abs(tm.T - (tm.t + 2.0))), "oriented:", tm.oriented)
for lam in (0.0, 0.5, 1.0):
    ml = t1.interpolate(m0, m1, lam, transport=tm)
    print(f"  lam={lam}: support [{ml.a:.6f},{ml.b:.6f}] mass {ml.mass:.9f}",
          "rho err:", np.max(np.abs(ml.rho - 1.0)))

# 2. Gaussian N(0,1) -> N(2,1)
g = lambda mu: (lambda s: math.exp(-0.5 * (s - mu) ** 2) / math.sqrt(2 * math.pi))
G0 = t1.Measure1D.from_function(g(0.0), -10.0, 12.0)
G1 = t1.Measure1D.from_function(g(2.0), -10.0, 12.0)
tmg = t1.monotone_map(G0, G1)
for lam in (0.25, 0.5, 0.75):
    ml = t1.interpolate(G0, G1, lam, transport=tmg)
    exact = np.array([g(2.0 * lam)(s) for s in ml.t])
    print(f"gauss lam={lam}: sup err {np.max(np.abs(ml.rho - exact)):.2e}")

# 3. entropy: f == 1
lebesgue = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 1.0)
print("S_N[unif|leb]:", t1.entropy(lebesgue, lebesgue, 5.0),
      "S_inf:", t1.entropy(lebesgue, lebesgue, np.inf))
# Gaussian KL: S_inf[N(0,1)|N(2,1)-weighted...] use KL(N(0,1)||N(0,4)) vs closed form
G0b = t1.Measure1D.from_function(g(0.0), -14.0, 14.0)
ref = t1.Measure1D.from_function(lambda s: math.exp(-0.5 * (s/2)**2)/(2*math.sqrt(2*math.pi)), -14.0, 14.0)
kl = t1.entropy(G0b, ref, np.inf)
kl_exact = 0.5 * (0.25 + 0 - 1 + math.log(4))
print("gauss KL:", kl, "exact:", kl_exact, "err:", abs(kl - kl_exact))

# 4. distortion identities
rng = np.random.default_rng(1)
worst = 0.0
for _ in range(200):
    t = rng.uniform(0.01, 0.99)
    K = rng.uniform(-3, 3)
    N = rng.uniform(1.5, 12)
    ell = rng.uniform(0.0, 2.0)
    d = t1.distortion(t, K, N, ell)
    if d.infinite:
        continue
    worst = max(worst,
                abs(d.tau - t ** (1/N) * d.sigma ** (1 - 1/N)),
                abs(d.beta - t ** (1-N) * d.sigma ** (N-1)))
print("distortion identity worst:", worst)
dinf = t1.distortion(0.3, 2.0, np.inf, 1.5)
print("N=inf beta:", dinf.beta, "expect", math.exp(2.0*(1-0.09)*2.25/6))
print("K>0 lw>=pi:", t1.distortion(0.5, 2.0, 3.0, 10.0).infinite)

# 5. cd1d: sin^{N-1}
K, N = 2.0, 4.0
w = math.sqrt(K / (N - 1))
L = math.pi / w
eps = 1e-3
sharp = t1.Measure1D.from_function(lambda s: math.sin(w * s) ** (N - 1), eps, L - eps)
r_ok = t1.cd1d_check(sharp, K, N)
r_bad = t1.cd1d_check(sharp, K + 0.1, N)
print("cd1d sharp:", r_ok.residual_max, r_ok.passed, "| K+0.1:", r_bad.residual_max, r_bad.passed)

# 6. displacement convexity on the sharp density (CD(2,4) needle)
m = sharp.normalized()
m0r = m.restrict(0.2, 0.8)
m1r = m.restrict(1.2, 1.8)
rep = t1.displacement_convexity_check(m, m0r, m1r, K, N)
print("dconv sharp:", rep.worst_margin, rep.passed, "vacuous:", rep.vacuous)
rep_inf = t1.displacement_convexity_check(G0, t1.Measure1D.from_function(g(-1.0), -10, 12),
                                          G1, 1.0, np.inf)
print("dconv gauss Ninf K=1:", rep_inf.worst_margin, rep_inf.passed)
# negative control: lebesgue reference claimed CD(0.5, N) on [0, 3] is false
leb3 = t1.Measure1D.from_function(lambda s: 1.0, 0.0, 3.0)
a0 = leb3.restrict(0.1, 0.9)
a1 = leb3.restrict(2.1, 2.9)
neg = t1.displacement_convexity_check(leb3, a0, a1, 0.5, 3.0)
print("dconv negative control (should fail):", neg.worst_margin, neg.passed)

# 7. oriented BBL randomized log-concave trials
rng = np.random.default_rng(7)
t = np.linspace(0.0, 1.0, 513)
fails = 0
worst_m = np.inf
vac = 0
for _ in range(500):
    lam = rng.uniform(0.1, 0.9)
    q = rng.uniform(-0.9, 3.0)
    c0, c1 = rng.uniform(0.5, 4.0, 2)
    mu0, mu1 = rng.uniform(0.2, 0.8, 2)
    h0 = np.exp(-c0 * (t - mu0) ** 2)
    h1 = np.exp(-c1 * (t - mu1) ** 2)
    hl = np.array([max(t1.generalized_mean(
        np.interp((x - lam * b) / (1 - lam) if lam < 1 else 0, t, h0),
        np.interp(b, t, h1), lam, q) for b in np.linspace(0, 1, 40)
        if 0 <= (x - lam * b) / (1 - lam) <= 1) if lam < 1 else 0
        for x in t])
    rep = t1.oriented_bbl_check(t, h0, h1, hl, q, lam, pair_grid=32)
    if rep.vacuous:
        vac += 1
    elif not rep.passed:
        fails += 1
    if not rep.vacuous:
        worst_m = min(worst_m, rep.lhs - rep.rhs)
print("BBL fails:", fails, "vacuous:", vac, "worst margin:", worst_m)

# 8. Phi-entropy Gaussian equalities
gauss = t1.Measure1D.from_function(g(0.0), -12.0, 12.0).normalized()
r1 = t1.phi_entropy_check(gauss, lambda s: s, "square", 1.0, fprime=lambda s: 1.0)
print("phi square f=t: lhs", r1.lhs, "rhs", r1.rhs, "margin", r1.margin)
r2 = t1.phi_entropy_check(gauss, lambda s: math.exp(s - 0.5), "tlogt", 1.0,
                          fprime=lambda s: math.exp(s - 0.5))
print("phi tlogt f=e^{t-1/2}: lhs", r2.lhs, "rhs", r2.rhs, "margin", r2.margin)

# 9. Poincare on log-concave measures
for name, mm in [("unif[0,2]", t1.Measure1D.from_function(lambda s: 1.0, 0.0, 2.0)),
                 ("trunc gauss", t1.Measure1D.from_function(g(1.0), 0.0, 2.0))]:
    rp = t1.poincare_check(mm, trials=100, seed=3)
    print(f"poincare {name}: worst {rp.worst_margin:.4f} passed {rp.passed}")
