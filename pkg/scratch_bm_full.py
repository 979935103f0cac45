import time, math
import numpy as np
from lcd import examples, mc

def report(tag, rep, dt):
    print(f"{tag}: est {rep.estimate:.5f} bound {rep.bound:.5f} "
          f"rel margin {rep.margin/rep.bound:+.3%} fail {rep.failure_rate:.2%} "
          f"ell {rep.ell_range} res {rep.resolution} {dt:.0f}s "
          f"passed {rep.passed}", flush=True)

flat = examples.get_example('flat_euclidean', n=2)
A0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat)
A1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat)
t0 = time.perf_counter()
rep = mc.brunn_minkowski_check(flat, A0, A1, 0.5, 0.0, 2.0, pairs=10**5, seed=20)
report("flat", rep, time.perf_counter() - t0)

horo = examples.get_example('hyperbolic_horocycle')
def hyp_disk(c, r):
    cx, cy = c; thr = math.cosh(r)
    def fn(xs):
        return 1.0 + ((xs[:,0]-cx)**2 + (xs[:,1]-cy)**2) / (2.0*xs[:,1]*cy) <= thr
    return fn
B0 = mc.RegionSpec.indicator(hyp_disk((-0.8, 1.2), 0.5), [-1.5, 0.6], [-0.1, 2.1]).bind(horo)
B1 = mc.RegionSpec.indicator(hyp_disk((0.8, 1.8), 0.45), [-0.1, 1.0], [1.7, 2.9]).bind(horo)
t0 = time.perf_counter()
rep = mc.brunn_minkowski_check(horo, B0, B1, 0.5, 0.0, 2.0, pairs=10**5, seed=21)
report("horo", rep, time.perf_counter() - t0)

con = examples.get_example('contact_sphere', d=1, s=0.5)
def cap(c, r):
    c = np.asarray(c, float)
    C = np.concatenate([2*c, [1.0 - c@c]]) / (1.0 + c@c)
    def fn(xs):
        s2 = np.sum(xs**2, axis=1)
        X = np.concatenate([2*xs, (1.0 - s2)[:, None]], axis=1) / (1.0 + s2)[:, None]
        return np.arccos(np.clip(X @ C, -1, 1)) <= r
    return fn
C0 = mc.RegionSpec.indicator(cap([-0.3, 0.0, 0.1], 0.45), [-1.0, -0.8, -0.6], [0.4, 0.8, 0.8]).bind(con)
C1 = mc.RegionSpec.indicator(cap([0.3, 0.1, -0.1], 0.4), [-0.4, -0.6, -0.8], [1.0, 0.8, 0.6]).bind(con)
t0 = time.perf_counter()
rep = mc.brunn_minkowski_check(con, C0, C1, 0.5, 0.0, 3.0, pairs=10**5, seed=22,
                               connect_kwargs=dict(h=4e-2))
report("contact", rep, time.perf_counter() - t0)
