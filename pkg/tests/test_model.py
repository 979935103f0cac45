import math

import numpy as np
import pytest

from lcd.examples import get_example
from lcd.model import (Chart, CovectorPoint, LagrangianModel, ModelError,
                       PhasePoint, TonelliViolation,
                       sample_indicatrix_points)


def test_chart_validation():
    with pytest.raises(ModelError):
        Chart(2, (0.0,), (1.0, 1.0))
    with pytest.raises(ModelError):
        Chart(1, (1.0,), (0.0,))
    c = Chart(2, (-1.0, -1.0), (1.0, 1.0))
    assert c.contains([0.0, 0.5])
    assert not c.contains([0.0, 1.5])
    assert np.allclose(c.center(), [0.0, 0.0])


def test_fd_providers_match_analytic(flat2, horocycle):
    # the built-in models carry analytic providers; rebuild one with FD only
    for model in (flat2, horocycle):
        bare = LagrangianModel(chart=model.chart, L=model.L,
                               omega=model.omega)
        x = np.array([0.3, 1.4]) if model is horocycle else np.array([0.3, -0.4])
        v = np.array([0.8, -0.5])
        assert np.allclose(bare.L_v(x, v), model.L_v(x, v), atol=1e-7)
        assert np.allclose(bare.L_x(x, v), model.L_x(x, v), atol=1e-6)
        assert np.allclose(bare.L_vv(x, v), model.L_vv(x, v), atol=1e-5)
        assert np.allclose(bare.L_vx(x, v), model.L_vx(x, v), atol=1e-4)


def test_legendre_round_trip(flat2, horocycle, mechanical2, rng):
    for model in (flat2, horocycle, mechanical2):
        for _ in range(20):
            lo = np.asarray(model.chart.lower)
            hi = np.asarray(model.chart.upper)
            x = lo + (0.2 + 0.6 * rng.random(model.dim)) * (hi - lo)
            v = rng.standard_normal(model.dim)
            q = PhasePoint(x, v)
            p = model.legendre_inverse(q).p
            q_back = model.legendre_forward(CovectorPoint(x, p))
            assert np.max(np.abs(q_back.v - v)) <= 1e-9


def test_energy_and_hamiltonian_agree(horocycle):
    q = PhasePoint([0.2, 1.3], [0.7, -0.4])
    c = horocycle.legendre_inverse(q)
    assert horocycle.hamiltonian(c) == pytest.approx(horocycle.energy(q),
                                                     abs=1e-10)


def test_indicatrix_sample_zero_energy(flat2, horocycle, mechanical2, rng):
    for model in (flat2, horocycle, mechanical2):
        pts = sample_indicatrix_points(model, rng, 10)
        for q in pts:
            assert abs(model.energy(q)) <= 1e-10
            assert model.chart.contains(q.x)


def test_vertical_hessian_positive_definite(horocycle):
    q = PhasePoint([0.1, 1.0], [0.5, 0.5])
    g = horocycle.vertical_hessian(q)
    assert np.all(np.linalg.eigvalsh(g) > 0.0)


def test_tonelli_violation_detected():
    chart = Chart(1, (-1.0,), (1.0,))
    bad = LagrangianModel(chart=chart,
                          L=lambda x, v: -0.5 * v[0] ** 2 + 1.0,
                          omega=lambda x: 1.0)
    with pytest.raises(TonelliViolation):
        bad.vertical_hessian(PhasePoint([0.0], [1.0]))


def test_measure_density_positive(horocycle):
    assert horocycle.measure_density([0.0, 2.0]) == pytest.approx(0.25)
    bad = LagrangianModel(chart=Chart(1, (-1.0,), (1.0,)),
                          L=lambda x, v: 0.5 * v[0] ** 2 + 1.0,
                          omega=lambda x: float(x[0]))
    with pytest.raises(ModelError):
        bad.measure_density([-0.5])


def test_registry_round_trip():
    from lcd.examples import list_examples
    names = [name for name, _ in list_examples()]
    assert "flat_euclidean" in names
    assert "hyperbolic_horocycle" in names
    assert "contact_sphere" in names
    with pytest.raises(ModelError):
        get_example("no_such_model")
