import math

import numpy as np
import pytest

from lcd import mc
from lcd.examples import get_example


def test_e_star_riemannian(flat2, horocycle):
    x = np.array([0.3, -0.2])
    p = np.array([0.7, -1.1])
    assert mc.e_star(flat2, x, p) == pytest.approx(np.linalg.norm(p),
                                                   abs=1e-9)
    xh = np.array([0.5, 1.4])
    # g* = y^2 I on the horocycle model's metric part
    want = 1.4 * np.linalg.norm(p)
    assert mc.e_star(horocycle, xh, p) == pytest.approx(want, rel=1e-5)


def test_e_star_mechanical():
    mech = get_example("mechanical", n=2, potential="2")
    x = np.array([0.3, -0.2])
    p = np.array([0.7, -1.1])
    # |v| = sqrt(2U) = 2 on the indicatrix, so E*(p) = 2 |p|
    assert mc.e_star(mech, x, p) == pytest.approx(2 * np.linalg.norm(p),
                                                  rel=1e-6)


def test_box_region(flat2, rng):
    box = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.5]).bind(flat2)
    assert box.measure() == pytest.approx(1.5, abs=1e-9)
    pts = box.sample(flat2, rng, 500)
    assert np.all(box.contains_many(pts))
    assert box.contains([-0.5, 0.2])
    assert not box.contains([0.4, 0.2])


def test_box_region_weighted_measure(horocycle):
    # omega = 1/y^2: integral over [x0,x1] x [y0,y1] is (x1-x0)(1/y0 - 1/y1)
    box = mc.RegionSpec.box([0.0, 1.0], [1.0, 2.0]).bind(horocycle)
    assert box.measure() == pytest.approx(0.5, abs=1e-6)


def test_indicator_region_hyperbolic_disk(horocycle, rng):
    cx, cy, r = -0.8, 1.2, 0.5

    def member(xs):
        return (1.0 + ((xs[:, 0] - cx) ** 2 + (xs[:, 1] - cy) ** 2)
                / (2.0 * xs[:, 1] * cy)) <= math.cosh(r)

    disk = mc.RegionSpec.indicator(member, [-1.8, 0.5], [0.2, 2.2]).bind(
        horocycle)
    exact = 2.0 * math.pi * (math.cosh(r) - 1.0)
    assert disk.measure() == pytest.approx(exact, rel=1e-3)
    pts = disk.sample(horocycle, rng, 300)
    assert np.all(member(pts))


def test_midpoints_stay_in_minkowski_box(flat2):
    a0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat2)
    a1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat2)
    cloud = mc.midpoint_set(flat2, a0, a1, 0.5, pairs=200, seed=11)
    assert cloud.failure_rate <= 0.05
    lo = np.array([-0.25, -0.4]) - 1e-9
    hi = np.array([0.75, 0.6]) + 1e-9
    assert np.all((cloud.points >= lo) & (cloud.points <= hi))


def test_midpoint_concentration_near_lam_zero(flat2):
    a0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat2)
    a1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat2)
    cloud = mc.midpoint_set(flat2, a0, a1, 0.02, pairs=100, seed=3)
    outside = np.maximum(cloud.points - a0.upper, a0.lower - cloud.points)
    assert float(np.max(outside)) <= 0.05


def test_brunn_minkowski_small_flat(flat2):
    a0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat2)
    a1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat2)
    rep = mc.brunn_minkowski_check(flat2, a0, a1, 0.5, 0.0, 2.0,
                                   pairs=4000, resolution=40, seed=7)
    assert rep.mu0 == pytest.approx(1.0, abs=1e-8)
    assert rep.bound == pytest.approx(1.0, abs=1e-6)  # equality case
    assert rep.estimate <= 1.0 + 1e-9  # lower estimate never overshoots
    assert rep.passed
    assert rep.failure_rate == 0.0


def test_brunn_minkowski_seed_reproducible(flat2):
    a0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat2)
    a1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat2)
    r1 = mc.brunn_minkowski_check(flat2, a0, a1, 0.5, 0.0, 2.0,
                                  pairs=500, resolution=48, seed=9)
    r2 = mc.brunn_minkowski_check(flat2, a0, a1, 0.5, 0.0, 2.0,
                                  pairs=500, resolution=48, seed=9)
    assert r1.estimate == r2.estimate
    assert r1.bound == r2.bound


def test_functional_poincare_flat(flat2):
    box = mc.RegionSpec.box([-1.4, -1.4], [1.4, 1.4]).bind(flat2)
    rep = mc.functional_check(flat2, "poincare", box,
                              diameter=2.8 * math.sqrt(2.0),
                              n_funcs=6, samples=800, seed=1)
    assert rep.passed
    assert rep.worst_ratio <= 1.0 + rep.tol


def test_functional_log_sobolev_needs_K(flat2):
    box = mc.RegionSpec.box([-1.0, -1.0], [1.0, 1.0]).bind(flat2)
    from lcd.model import ModelError
    with pytest.raises(ModelError):
        mc.functional_check(flat2, "log-sobolev", box)
    with pytest.raises(ModelError):
        mc.functional_check(flat2, "poincare", box)  # no diameter
    with pytest.raises(ModelError):
        mc.functional_check(flat2, "nope", box)
