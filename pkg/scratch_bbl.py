import numpy as np
from lcd import transport1d as t1

rng = np.random.default_rng(7)
t = np.linspace(-1.0, 3.0, 801)
fails = vac = 0
worst = np.inf
for _ in range(500):
    lam = rng.uniform(0.1, 0.9)
    q = rng.uniform(-1.0, 0.0)
    c = rng.uniform(0.5, 4.0)
    mu = rng.uniform(-0.2, 0.6)
    d = rng.uniform(0.0, 1.2)
    s = rng.uniform(0.3, 3.0)
    h0 = np.exp(-c * (t - mu) ** 2)
    h1 = s * np.exp(-c * (t - mu - d) ** 2)
    hl = s ** lam * np.exp(-c * (t - mu - lam * d) ** 2)
    rep = t1.oriented_bbl_check(t, h0, h1, hl, q, lam, pair_grid=32)
    if rep.vacuous:
        vac += 1
    else:
        worst = min(worst, rep.lhs - rep.rhs)
        if not rep.passed:
            fails += 1
print("fails:", fails, "vacuous:", vac, "worst:", worst)
# conventions
for q in (np.inf, -1.0, 0.0, 1.0):
    rep = t1.oriented_bbl_check(t, np.exp(-t**2), np.exp(-t**2), np.exp(-t**2), q, 0.5)
    print("q:", q, "q':", rep.q_prime)
