import numpy as np
import pytest

from lcd.curvature import ricci_weighted
from lcd.model import sample_indicatrix_points
from lcd.needles import (HJSeed, SeedError, extract_needle, needle_cd_check,
                         seed_construct)


def test_seed_validation(horocycle):
    q = horocycle.indicatrix_sample(np.array([0.2, 1.4]),
                                    np.array([0.6, 0.3]))
    for mode in ("minimal", "equality"):
        seed = seed_construct(horocycle, q, mode=mode, N=2.0)
        assert seed.validate(horocycle) <= 1e-9
        assert np.allclose(seed.S, seed.S.T)
    with pytest.raises(SeedError):
        seed_construct(horocycle, q, mode="nope")
    with pytest.raises(SeedError):
        seed_construct(horocycle, q, mode="equality", N=1.5)  # excluded band


def test_needle_internal_consistency(horocycle):
    q = horocycle.indicatrix_sample(np.array([0.1, 1.3]),
                                    np.array([0.5, 0.5]))
    seed = seed_construct(horocycle, q, mode="minimal", N=2.0)
    needle = extract_needle(horocycle, seed, (-0.5, 0.5), 1e-3)
    assert needle.velocity_residual() <= 1e-6
    assert needle.density_residual() <= 1e-4
    assert np.allclose(needle.psi, -np.log(needle.rho))
    k0 = needle.index_zero
    assert needle.t[k0] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(needle.x[k0], q.x, atol=1e-12)


def test_flat_needle_residual(flat2, rng):
    for q in sample_indicatrix_points(flat2, rng, 5):
        for mode in ("minimal", "equality"):
            seed = seed_construct(flat2, q, mode=mode, N=np.inf)
            needle = extract_needle(flat2, seed, (-0.4, 0.4), 1e-3)
            rep = needle_cd_check(needle, 0.0, np.inf)
            assert rep.residual_max <= 5e-4


def test_horocycle_needle_residual(horocycle, rng):
    for q in sample_indicatrix_points(horocycle, rng, 5):
        for mode in ("minimal", "equality"):
            seed = seed_construct(horocycle, q, mode=mode, N=2.0)
            needle = extract_needle(horocycle, seed, (-0.4, 0.4), 1e-3)
            rep = needle_cd_check(needle, 0.0, 2.0)
            assert rep.residual_max <= 5e-4


def test_equality_mode_saturates(horocycle, rng):
    # equality needles meet the CD bound: residual at t=0 equals
    # -Ric_{mu,N} + K up to the extraction error
    K, N = 0.0, 2.0
    for q in sample_indicatrix_points(horocycle, rng, 5):
        seed = seed_construct(horocycle, q, mode="equality", N=N)
        needle = extract_needle(horocycle, seed, (-0.3, 0.3), 1e-3)
        rep = needle_cd_check(needle, K, N)
        k0 = int(np.argmin(np.abs(rep.t)))
        target = -ricci_weighted(horocycle, q, N) + K
        assert rep.residual[k0] == pytest.approx(target, abs=1e-3)


def test_needle_truncation_at_conjugate_point(sphere2):
    # on the round sphere the Jacobi determinant vanishes before t = pi + eps
    q = sphere2.indicatrix_sample(np.array([0.05, -0.1]),
                                  np.array([1.0, 0.2]))
    seed = seed_construct(sphere2, q, mode="equality", N=2.0)
    needle = extract_needle(sphere2, seed, (-4.0, 4.0), 1e-3)
    assert needle.truncated
    assert needle.conjugate_time is not None
    assert np.all(needle.rho > 0.0)
