import math

import numpy as np
import pytest

from lcd.dynamics import (connection_coeffs, deviation, el_flow, flow_point,
                          hamiltonian_blocks, hamiltonian_rhs, semispray,
                          variational_flow)
from lcd.model import CovectorPoint, PhasePoint
from lcd.curvature import sigma_psi


def test_flat_flow_is_straight(flat2):
    q0 = PhasePoint([0.1, -0.2], [0.5, 0.3])
    traj = el_flow(flat2, q0, 2.0, 1e-3)
    assert np.allclose(traj.x[-1], [0.1 + 1.0, -0.2 + 0.6], atol=1e-10)
    assert np.allclose(traj.v[-1], q0.v, atol=1e-10)
    assert traj.energy_drift <= 1e-14


def test_energy_conservation(horocycle, mechanical2):
    for model, x in ((horocycle, [0.1, 1.3]), (mechanical2, [0.3, -0.2])):
        q0 = model.indicatrix_sample(np.array(x), np.array([0.6, 0.5]))
        traj = el_flow(model, q0, 5.0, 1e-3)
        assert traj.energy_drift <= 1e-8


def test_integrator_order(horocycle):
    # halving h should cut the endpoint error by ~2^4 (RK4)
    q0 = PhasePoint([0.1, 1.2], [0.4, 0.3])
    ref = el_flow(horocycle, q0, 1.0, 1e-4).x[-1]
    errs = []
    for h in (4e-2, 2e-2, 1e-2):
        errs.append(np.max(np.abs(el_flow(horocycle, q0, 1.0, h).x[-1] - ref)))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5


def test_zero_energy_guard(horocycle):
    from lcd.dynamics import FlowError
    q_off = PhasePoint([0.1, 1.2], [0.9, 0.5])  # not on the indicatrix
    with pytest.raises(FlowError):
        el_flow(horocycle, q_off, 0.5, 1e-3, zero_energy=True)
    q_on = horocycle.indicatrix_sample(np.array([0.1, 1.2]),
                                       np.array([0.9, 0.5]))
    traj = el_flow(horocycle, q_on, 0.5, 1e-3, zero_energy=True)
    assert abs(traj.energy[0]) <= 1e-10


def test_hamiltonian_rhs_matches_el_flow(horocycle):
    q0 = horocycle.indicatrix_sample(np.array([0.2, 1.1]),
                                     np.array([0.7, -0.3]))
    c0 = horocycle.legendre_inverse(q0)
    xdot, pdot = hamiltonian_rhs(horocycle, c0.x, c0.p)
    assert np.allclose(xdot, q0.v, atol=1e-9)
    # pdot = -H_x = L_x along the Legendre identification
    assert np.allclose(pdot, horocycle.L_x(q0.x, q0.v), atol=1e-7)


def test_hamiltonian_blocks_consistency(horocycle):
    x = np.array([0.15, 1.4])
    p = np.array([0.3, -0.2])
    v, hx, hpp, hpx, hxx = hamiltonian_blocks(horocycle, x, p)
    q = horocycle.legendre_forward(CovectorPoint(x, p))
    assert np.allclose(v, q.v, atol=1e-9)
    g = horocycle.vertical_hessian(q)
    assert np.allclose(hpp, np.linalg.inv(g), atol=1e-6)
    assert np.allclose(hx, -np.asarray(horocycle.L_x(x, q.v)), atol=1e-7)


def test_variational_flow_matches_bump_fd(horocycle):
    q0 = horocycle.indicatrix_sample(np.array([0.2, 1.3]),
                                     np.array([0.5, 0.4]))
    c0 = horocycle.legendre_inverse(q0)
    T, h = 1.0, 1e-3
    vs = variational_flow(horocycle, q0, T, h)
    n = horocycle.dim
    eps = 1e-6
    J_fd = np.zeros((2 * n, 2 * n))
    z0 = np.concatenate([c0.x, c0.p])
    for k in range(2 * n):
        for sign in (1.0, -1.0):
            z = z0.copy()
            z[k] += sign * eps
            q = horocycle.legendre_forward(CovectorPoint(z[:n], z[n:]))
            vz = variational_flow(horocycle, q, T, h,
                                  J0=np.zeros((2 * n, 0)))
            J_fd[:, k] += sign * np.concatenate([vz.x[-1], vz.p[-1]]) / (2 * eps)
    rel = np.max(np.abs(vs.J[-1] - J_fd)) / max(1.0, np.max(np.abs(J_fd)))
    assert rel <= 1e-4
    assert vs.symplectic_defect() <= 1e-6


def test_trace_identity(horocycle, mechanical2, rng):
    # trace of the nonlinear connection equals the flow derivative of
    # log sqrt(det g)
    for model in (horocycle, mechanical2):
        for _ in range(3):
            lo = np.asarray(model.chart.lower)
            hi = np.asarray(model.chart.upper)
            x = lo + (0.3 + 0.4 * rng.random(model.dim)) * (hi - lo)
            q = model.indicatrix_sample(x, rng.standard_normal(model.dim))
            gamma = connection_coeffs(model, q, richardson=True)
            trace = float(np.trace(gamma))

            def half_logdet(t):
                qt = flow_point(model, q, t, abs(t) if t else 1e-3)
                return 0.5 * math.log(np.linalg.det(model.vertical_hessian(qt)))

            from lcd import fd
            d1, _ = fd.d1_richardson(half_logdet, 0.0, 1e-3)
            assert abs(trace - d1) <= 1e-6


def test_deviation_vanishes_for_quadratic(flat2, horocycle):
    # quadratic (and magnetic-linear) Lagrangians have 2-homogeneous sprays up
    # to the constant term; the deviation of the horocycle model is nonzero
    q = PhasePoint([0.3, -0.1], [0.6, 0.8])
    lam, lam_par, lam_perp = deviation(flat2, q)
    assert np.max(np.abs(lam)) <= 1e-8
    q2 = horocycle.indicatrix_sample(np.array([0.2, 1.5]),
                                     np.array([0.7, 0.1]))
    lam2, _, _ = deviation(horocycle, q2)
    assert np.max(np.abs(lam2)) > 1e-3


def test_left_chart_flag(horocycle):
    q0 = PhasePoint([0.0, 1.0], [0.0, -2.0])  # races toward y = 0
    traj = el_flow(horocycle, q0, 5.0, 1e-3, check_chart=True)
    assert traj.left_chart
