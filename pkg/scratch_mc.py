import time
import numpy as np
from lcd import examples, mc

flat = examples.get_example('flat_euclidean', n=2)
horo = examples.get_example('hyperbolic_horocycle')

# e_star
x = np.array([0.3, -0.2])
p = np.array([0.7, -1.1])
print("flat e_star:", mc.e_star(flat, x, p), "expect", np.linalg.norm(p))
xh = np.array([0.5, 1.4])
gstar = xh[1] ** 2 * np.eye(2)
print("horo e_star:", mc.e_star(horo, xh, p), "expect",
      np.sqrt(p @ gstar @ p))
mech = examples.get_example('mechanical', n=2, potential="2")
print("mech U=2 e_star:", mc.e_star(mech, x, p), "expect", 2 * np.linalg.norm(p))

# regions
A0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat)
A1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat)
print("box measures:", A0.measure(), A1.measure())

t0 = time.perf_counter()
cloud = mc.midpoint_set(flat, A0, A1, 0.5, pairs=4000, seed=11)
print(f"cloud: {len(cloud.points)} pts, fail {cloud.failure_rate:.2%}, "
      f"{time.perf_counter()-t0:.1f}s")
# Minkowski combination check: midpoints should lie in (1-l)A0 + l A1
mid_lo, mid_hi = np.array([-0.25, -0.4]), np.array([0.75, 0.6])
inside = np.all((cloud.points >= mid_lo - 1e-9) & (cloud.points <= mid_hi + 1e-9), axis=1)
print("midpoints in Minkowski box:", np.mean(inside))

est = mc.measure_lower_estimate(flat, cloud, 256)
print("estimate at 4000 pairs:", est, "exact Minkowski vol:", 1.0)

# lam -> 0 concentration
for lam in (0.1, 0.01):
    cl = mc.midpoint_set(flat, A0, A1, lam, pairs=300, seed=3)
    d = np.array([max(np.max(pt - np.array([0.0, 0.0])), 0) for pt in cl.points])
    sup = max(float(np.max(np.maximum(pt - A0.upper, A0.lower - pt).max()) ) for pt in cl.points)
    print(f"lam={lam}: sup distance to A0 box {sup:.4f}")

# sandwich: lam->0 cloud estimate vs mu(A0)
cl = mc.midpoint_set(flat, A0, A1, 0.01, pairs=20000, seed=5)
est0 = mc.measure_lower_estimate(flat, cl, 64)
print("sandwich est:", est0, "mu(A0):", A0.measure())

# flat BM equality case (small pair count first)
t0 = time.perf_counter()
rep = mc.brunn_minkowski_check(flat, A0, A1, 0.5, 0.0, 2.0, pairs=20000,
                               resolution=256, seed=7)
print(f"flat BM: est {rep.estimate:.4f} bound {rep.bound:.4f} margin "
      f"{rep.margin/rep.bound:+.2%} passed {rep.passed} "
      f"({time.perf_counter()-t0:.1f}s)")
