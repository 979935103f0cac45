import math

import numpy as np
import pytest

from lcd.cost import (bishop_gromov_check, brute_force_cost_oracle,
                      comparison_volume, connect, cost, diameter_probe,
                      forward_ball_volume, supercriticality_probe)
from lcd.examples import get_example
from lcd.model import ModelError


def test_flat_cost_is_distance(flat2, rng):
    for _ in range(5):
        a = rng.uniform(-1.2, 1.2, 2)
        b = rng.uniform(-1.2, 1.2, 2)
        if np.linalg.norm(b - a) < 0.2:
            continue
        sol = connect(flat2, a, b)
        dist = np.linalg.norm(b - a)
        assert sol.action == pytest.approx(dist, abs=1e-6)
        assert sol.ell == pytest.approx(dist, abs=1e-6)
        assert abs(sol.energy0) <= 1e-10


def test_cost_wrapper(flat2):
    assert cost(flat2, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0,
                                                                abs=1e-6)


def test_sphere_cost_is_arc_length(sphere2):
    # stereographic-type chart of the unit sphere: cost = geodesic distance
    a = np.array([0.0, 0.0])
    b = np.array([0.5, 0.2])
    sol = connect(sphere2, a, b)
    assert sol.action == pytest.approx(sol.ell, abs=1e-9)
    oracle = brute_force_cost_oracle(sphere2, a, b, nodes=4, sweeps=2)
    assert sol.action <= oracle.action + 1e-6


def test_triangle_inequality(horocycle, rng):
    slack_min = np.inf
    for _ in range(10):
        pts = [np.array([rng.uniform(-1.5, 1.5), rng.uniform(0.9, 3.0)])
               for _ in range(3)]
        try:
            cab = connect(horocycle, pts[0], pts[1],
                          full_trajectory=False).action
            cbc = connect(horocycle, pts[1], pts[2],
                          full_trajectory=False).action
            cac = connect(horocycle, pts[0], pts[2],
                          full_trajectory=False).action
        except ModelError:
            continue
        slack_min = min(slack_min, cab + cbc - cac)
    assert slack_min >= -1e-6


def test_shooting_beats_transcription(horocycle):
    # upper-bound property at a coarse node count; the tight 64-node gap
    # comparison lives in the acceptance tests
    a = np.array([-0.5, 1.4])
    b = np.array([0.6, 1.9])
    sol = connect(horocycle, a, b, full_trajectory=False)
    oracle = brute_force_cost_oracle(horocycle, a, b, nodes=4, sweeps=2)
    assert sol.action <= oracle.action + 1e-6
    assert oracle.action - sol.action <= 1e-2


def test_flat_ball_volume(flat2):
    # |v| = 1 on the indicatrix, so the forward r-ball is the Euclidean disk
    vol = forward_ball_volume(flat2, np.array([0.0, 0.0]), 0.8,
                              resolution=192)
    assert not vol.truncated
    assert vol.volume == pytest.approx(math.pi * 0.64, rel=0.03)


def test_comparison_volume_limits():
    # profile (int_0^r s_K)^(N-1); K -> 0 gives (r^2/2)^(N-1)
    r = 0.7
    flat = (r ** 2 / 2) ** 2
    assert comparison_volume(0.0, 3.0, r) == pytest.approx(flat)
    assert comparison_volume(1e-12, 3.0, r) == pytest.approx(flat, rel=1e-6)
    # K > 0 caps the profile at ell = pi sqrt((N-1)/K)
    assert comparison_volume(2.0, 3.0, 10.0) == pytest.approx(
        comparison_volume(2.0, 3.0, math.pi), rel=1e-12)


def test_bishop_gromov_flat(flat2):
    rep = bishop_gromov_check(flat2, np.array([0.0, 0.0]), 0.0, 2.0,
                              [0.4, 0.6, 0.9], resolution=128, seed=1)
    assert rep.passed
    # flat N=2 profile ratio is (r/R)^2
    for r, ratio in zip(rep.radii, rep.ratios):
        assert ratio == pytest.approx((r / 0.9) ** 2, rel=0.08)


def test_diameter_probe_requires_positive_K(flat2):
    with pytest.raises(ModelError):
        diameter_probe(flat2, 0.0, 2.0)
    with pytest.raises(ModelError):
        diameter_probe(flat2, 1.0, np.inf)


def test_supercriticality(flat2, horocycle):
    for model in (flat2, horocycle):
        rep = supercriticality_probe(model, loops=20, seed=2)
        assert rep.passed
        assert rep.min_action > 0.0
