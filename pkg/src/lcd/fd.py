"""Central finite-difference stencils with optional Richardson extrapolation."""

from __future__ import annotations

import numpy as np

EPS = float(np.finfo(float).eps)


def step_first(x):
    """Default step for first derivatives: eps^(1/3) * max(1, |x|)."""
    return EPS ** (1.0 / 3.0) * max(1.0, abs(float(x)))


def step_second(x):
    """Default step for second derivatives: eps^(1/4) * max(1, |x|)."""
    return EPS ** 0.25 * max(1.0, abs(float(x)))


def d1(f, x, h=None, order=2):
    """Central first derivative of a scalar/array-valued f at scalar x."""
    if h is None:
        h = step_first(x)
    if order == 2:
        return (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2.0 * h)
    if order == 4:
        fm2 = np.asarray(f(x - 2 * h))
        fm1 = np.asarray(f(x - h))
        fp1 = np.asarray(f(x + h))
        fp2 = np.asarray(f(x + 2 * h))
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    raise ValueError(f"unsupported order {order}")


def d2(f, x, h=None, order=2):
    """Central second derivative of a scalar/array-valued f at scalar x."""
    if h is None:
        h = step_second(x)
    if order == 2:
        return (np.asarray(f(x + h)) - 2.0 * np.asarray(f(x)) + np.asarray(f(x - h))) / (h * h)
    if order == 4:
        fm2 = np.asarray(f(x - 2 * h))
        fm1 = np.asarray(f(x - h))
        f0 = np.asarray(f(x))
        fp1 = np.asarray(f(x + h))
        fp2 = np.asarray(f(x + 2 * h))
        return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
    raise ValueError(f"unsupported order {order}")


def d1_richardson(f, x, h):
    """First derivative: 2nd-order central differences at h and h/2 combined.

    Returns (value, error_estimate); the combination is 4th-order accurate.
    """
    coarse = d1(f, x, h)
    fine = d1(f, x, h / 2.0)
    value = (4.0 * fine - coarse) / 3.0
    return value, np.max(np.abs(fine - coarse)) / 3.0


def d2_richardson(f, x, h):
    """Second derivative with Richardson refinement; returns (value, error_estimate)."""
    coarse = d2(f, x, h)
    fine = d2(f, x, h / 2.0)
    value = (4.0 * fine - coarse) / 3.0
    return value, np.max(np.abs(fine - coarse)) / 3.0


def gradient(f, x, h=None):
    """Central-difference gradient of scalar f over vector x."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for i in range(x.size):
        hi = step_first(x[i]) if h is None else h

        def fi(s, i=i):
            xs = x.copy()
            xs[i] = s
            return f(xs)

        out[i] = d1(fi, x[i], hi)
    return out


def jacobian(f, x, h=None):
    """Central-difference Jacobian of vector f over vector x (rows f, cols x)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        hi = step_first(x[i]) if h is None else h

        def fi(s, i=i):
            xs = x.copy()
            xs[i] = s
            return np.asarray(f(xs), dtype=float)

        cols.append(d1(fi, x[i], hi))
    return np.stack(cols, axis=-1)


def hessian(f, x, h=None):
    """Central-difference Hessian of scalar f over vector x (symmetrized)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    out = np.empty((n, n))
    steps = [step_second(x[i]) if h is None else h for i in range(n)]
    f0 = f(x)
    for i in range(n):
        hi = steps[i]
        xp = x.copy(); xp[i] += hi
        xm = x.copy(); xm[i] -= hi
        out[i, i] = (f(xp) - 2.0 * f0 + f(xm)) / (hi * hi)
        for j in range(i + 1, n):
            hj = steps[j]
            xpp = x.copy(); xpp[i] += hi; xpp[j] += hj
            xpm = x.copy(); xpm[i] += hi; xpm[j] -= hj
            xmp = x.copy(); xmp[i] -= hi; xmp[j] += hj
            xmm = x.copy(); xmm[i] -= hi; xmm[j] -= hj
            out[i, j] = out[j, i] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hi * hj)
    return out


def directional(f, x, direction, h, order=4):
    """Directional derivative of array-valued f at vector x along direction."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        probe = np.asarray(f(x))
        return np.zeros_like(probe, dtype=float)
    unit = direction / norm
    return norm * d1(lambda s: f(x + s * unit), 0.0, h, order=order)
