"""Hot-loop kernels for Hamiltonian flows.

The functions here take the model's compiled Hamiltonian callables as
arguments (ham(x, p) -> (H_p, H_x), plus the second-derivative blocks) so a
single kernel serves every model.  With numba enabled the kernels and the
callables are both jitted; otherwise the identical source runs as plain
Python via the no-op decorator in _numba.  Use `plain(fn)` to recover the
uncompiled version when a model only provides Python callables.
"""

from __future__ import annotations

import numpy as np

from ._numba import njit


def plain(fn):
    """The pure-Python version of a (possibly jitted) kernel."""
    return fn.py_func if hasattr(fn, "py_func") else fn


@njit(cache=False)
def flow_traj(ham, x0, p0, dt, steps, lo, hi):
    """RK4 trajectory of xdot = H_p, pdot = -H_x with chart-box truncation.

    Returns (xs, ps, last): arrays of shape (steps+1, n) filled up to index
    `last`; last < steps means the curve left the box [lo, hi].
    """
    n = x0.shape[0]
    xs = np.empty((steps + 1, n))
    ps = np.empty((steps + 1, n))
    xs[0] = x0
    ps[0] = p0
    last = steps
    for k in range(steps):
        x = xs[k]
        p = ps[k]
        a1, b1 = ham(x, p)
        a2, b2 = ham(x + 0.5 * dt * a1, p - 0.5 * dt * b1)
        a3, b3 = ham(x + 0.5 * dt * a2, p - 0.5 * dt * b2)
        a4, b4 = ham(x + dt * a3, p - dt * b3)
        xs[k + 1] = x + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        ps[k + 1] = p - dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        inside = True
        for i in range(n):
            if not (lo[i] <= xs[k + 1, i] <= hi[i]):
                inside = False
        if not inside:
            last = k + 1
            break
    return xs, ps, last


@njit(cache=False)
def flow_action(ham, x0, p0, dt, steps, lo, hi, acc_max):
    """Hamiltonian flow with the running action (trapezoid of p . H_p, which
    equals L on the zero level).  Stops at acc_max or on leaving the box."""
    n = x0.shape[0]
    xs = np.empty((steps + 1, n))
    acc = np.zeros(steps + 1)
    xs[0] = x0
    p = p0.copy()
    last = steps
    a_prev, _ = ham(x0, p0)
    L_prev = np.dot(p0, a_prev)
    for k in range(steps):
        x = xs[k]
        a1, b1 = ham(x, p)
        a2, b2 = ham(x + 0.5 * dt * a1, p - 0.5 * dt * b1)
        a3, b3 = ham(x + 0.5 * dt * a2, p - 0.5 * dt * b2)
        a4, b4 = ham(x + dt * a3, p - dt * b3)
        xs[k + 1] = x + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        p = p - dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        hp, _ = ham(xs[k + 1], p)
        L_k = np.dot(p, hp)
        acc[k + 1] = acc[k] + 0.5 * dt * (L_prev + L_k)
        L_prev = L_k
        inside = True
        for i in range(n):
            if not (lo[i] <= xs[k + 1, i] <= hi[i]):
                inside = False
        if not inside or acc[k + 1] >= acc_max:
            last = k + 1
            break
    return xs, acc, last


@njit(cache=False)
def flow_endpoint(ham, x0, p0, dt, steps):
    """Endpoint (x, p) of the RK4 Hamiltonian flow, no chart check."""
    x = x0.copy()
    p = p0.copy()
    for _ in range(steps):
        a1, b1 = ham(x, p)
        a2, b2 = ham(x + 0.5 * dt * a1, p - 0.5 * dt * b1)
        a3, b3 = ham(x + 0.5 * dt * a2, p - 0.5 * dt * b2)
        a4, b4 = ham(x + dt * a3, p - dt * b3)
        x = x + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        p = p - dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    return x, p


@njit(cache=False)
def _var_rhs(ham, hpp_f, hpx_f, hxx_f, x, p, M):
    n = x.shape[0]
    hp, hx = ham(x, p)
    hpp = hpp_f(x, p)
    hpx = hpx_f(x, p)
    hxx = hxx_f(x, p)
    Mx = M[:n]
    Mp = M[n:]
    dM = np.empty_like(M)
    dM[:n] = hpx @ Mx + hpp @ Mp
    dM[n:] = -(hxx @ Mx) - hpx.T @ Mp
    return hp, -hx, dM


@njit(cache=False)
def var_endpoint(ham, hpp_f, hpx_f, hxx_f, x0, p0, M0, dt, steps):
    """Jointly flow (x, p) and the linearization M (shape (2n, k)).

    Returns (x, p, M, v) at the final time.
    """
    x = x0.copy()
    p = p0.copy()
    M = M0.copy()
    for _ in range(steps):
        k1x, k1p, k1m = _var_rhs(ham, hpp_f, hpx_f, hxx_f, x, p, M)
        k2x, k2p, k2m = _var_rhs(ham, hpp_f, hpx_f, hxx_f,
                                 x + 0.5 * dt * k1x, p + 0.5 * dt * k1p,
                                 M + 0.5 * dt * k1m)
        k3x, k3p, k3m = _var_rhs(ham, hpp_f, hpx_f, hxx_f,
                                 x + 0.5 * dt * k2x, p + 0.5 * dt * k2p,
                                 M + 0.5 * dt * k2m)
        k4x, k4p, k4m = _var_rhs(ham, hpp_f, hpx_f, hxx_f,
                                 x + dt * k3x, p + dt * k3p, M + dt * k3m)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        M = M + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    v, _ = ham(x, p)
    return x, p, M, v
