import math

import numpy as np
import pytest

from lcd.curvature import (InvalidDimensionParameter, cd_verdict,
                           psi_tm, ricci_bochner_oracle, ricci_direct,
                           ricci_weighted, sigma_psi)
from lcd.examples import get_example
from lcd.model import PhasePoint, sample_indicatrix_points


def test_flat_ricci_zero(flat2, rng):
    for q in sample_indicatrix_points(flat2, rng, 10):
        assert abs(ricci_direct(flat2, q)) <= 1e-8
        assert abs(ricci_weighted(flat2, q, np.inf)) <= 1e-8
        assert abs(ricci_weighted(flat2, q, 5.0)) <= 1e-8


def test_sphere_ricci_constant(sphere2, rng):
    # unit round sphere in dimension 2: Ric = n - 1 = 1 on unit vectors
    for q in sample_indicatrix_points(sphere2, rng, 10):
        assert ricci_weighted(sphere2, q, 2.0) == pytest.approx(1.0, abs=1e-6)


def test_horocycle_weighted_ricci_vanishes(horocycle, rng):
    for q in sample_indicatrix_points(horocycle, rng, 20):
        assert abs(ricci_weighted(horocycle, q, 2.0)) <= 1e-5


def test_contact_sphere_formula(rng):
    d, s = 1, 0.3
    model = get_example("contact_sphere", d=d, s=s)
    oracle = model.oracles["ricci"]
    for q in sample_indicatrix_points(model, rng, 10):
        assert ricci_weighted(model, q, 3.0) == pytest.approx(
            oracle(q, 3.0), abs=1e-3)


def test_bochner_route_agrees(flat2, horocycle, rng):
    for model in (flat2, horocycle):
        for q in sample_indicatrix_points(model, rng, 5):
            direct = ricci_weighted(model, q, np.inf)
            oracle = ricci_bochner_oracle(model, q, np.inf)
            assert abs(direct - oracle) <= 1e-3


def test_psi_and_sigma_psi(horocycle):
    q = horocycle.indicatrix_sample(np.array([0.2, 1.5]),
                                    np.array([0.6, 0.2]))
    # g = I/y^2, omega = 1/y^2, so psi = log(1/y^2) - log(1/y^2) = 0 on SM
    assert psi_tm(horocycle, q) == pytest.approx(0.0, abs=1e-12)
    s1, s2 = sigma_psi(horocycle, q)
    assert abs(s1) <= 1e-8 and abs(s2) <= 1e-6


def test_dimension_parameter_band(flat2):
    q = PhasePoint([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(InvalidDimensionParameter):
        ricci_weighted(flat2, q, 1.5)  # inside the excluded band [0, n)
    with pytest.raises(InvalidDimensionParameter):
        ricci_weighted(flat2, q, 0.0)
    # N = n is fine exactly when Sigma psi = Lambda_par (true on flat space)
    assert abs(ricci_weighted(flat2, q, 2.0)) <= 1e-8


def test_negative_effective_dimension(flat2, rng):
    # N < 0 is admissible in the paper's convention
    for q in sample_indicatrix_points(flat2, rng, 3):
        assert abs(ricci_weighted(flat2, q, -4.0)) <= 1e-8


def test_details_sample(horocycle):
    q = horocycle.indicatrix_sample(np.array([0.1, 1.2]),
                                    np.array([0.3, 0.8]))
    sample = ricci_weighted(horocycle, q, 2.0, details=True)
    recon = (sample.ric + sample.sigma_psi2
             + 2.0 * sample.lam_perp_sq + sample.lam_par ** 2)
    assert sample.ric_weighted == pytest.approx(recon, abs=1e-12)


def test_cd_verdict_threshold(rng):
    s = 0.5
    model = get_example("contact_sphere", d=1, s=s)
    K_star = 2.0 * (s - 1.0) ** 2
    below = cd_verdict(model, K_star - 1e-2, 3.0, grid_per_axis=2,
                       dirs_per_point=4, seed=0)
    above = cd_verdict(model, K_star + 1e-2, 3.0, grid_per_axis=2,
                       dirs_per_point=4, seed=0)
    assert below.passed
    assert not above.passed
