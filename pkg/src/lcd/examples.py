"""Built-in model registry.

Each entry constructs a LagrangianModel with exact symbolic derivative
providers (generated once via sympy and cached), a closed-form Hamiltonian for
the fast flow kernels, and reference oracles where a closed-form curvature is
known.  Several models are chart realizations of compact or non-flat spaces
(stereographic charts, Siegel half-space); chart boxes keep a margin away from
coordinate singularities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from . import expr as expr_mod
from ._codegen import build_function, build_pair_function
from .model import Chart, LagrangianModel, ModelError


@dataclass
class ClosedFormHamiltonian:
    """Exact symbolic Hamiltonian derivatives plus kernel-friendly callables.

    ham_pair(x, p) -> (H_p, -?) returns the pair (H_p, H_x); p_from_dir(x, u)
    maps a fiber direction to the zero-energy covector over x.  Both are
    compiled for the hot loops (numba when enabled).
    """

    h: object
    hp: object
    hx: object
    hpp: object
    hpx: object
    hxx: object
    ham_pair: object = None
    p_from_dir: object = None


def _symbols(prefix, n):
    return list(sp.symbols(f"{prefix}1:{n + 1}", real=True))


def _lagrangian_providers(name, xs, vs, L_expr):
    """Exact derivative providers for L(x, v) given as a sympy expression."""
    n = len(xs)
    args = [("x", xs), ("v", vs)]
    Lx = [sp.diff(L_expr, s) for s in xs]
    Lv = [sp.diff(L_expr, s) for s in vs]
    Lvv = [[sp.diff(L_expr, vs[i], vs[j]) for j in range(n)] for i in range(n)]
    Lvx = [[sp.diff(L_expr, vs[i], xs[j]) for j in range(n)] for i in range(n)]
    Lxx = [[sp.diff(L_expr, xs[i], xs[j]) for j in range(n)] for i in range(n)]
    return {
        "L": build_function(f"{name}_L", args, L_expr),
        "L_x": build_function(f"{name}_Lx", args, Lx),
        "L_v": build_function(f"{name}_Lv", args, Lv),
        "L_vv": build_function(f"{name}_Lvv", args, Lvv),
        "L_vx": build_function(f"{name}_Lvx", args, Lvx),
        "L_xx": build_function(f"{name}_Lxx", args, Lxx),
    }


def _closed_form(name, xs, ps, H_expr, p_dir_expr=None, us=None):
    """ClosedFormHamiltonian from a sympy H(x, p)."""
    n = len(xs)
    args = [("x", xs), ("p", ps)]
    Hp = [sp.diff(H_expr, s) for s in ps]
    Hx = [sp.diff(H_expr, s) for s in xs]
    Hpp = [[sp.diff(H_expr, ps[i], ps[j]) for j in range(n)] for i in range(n)]
    Hpx = [[sp.diff(H_expr, ps[i], xs[j]) for j in range(n)] for i in range(n)]
    Hxx = [[sp.diff(H_expr, xs[i], xs[j]) for j in range(n)] for i in range(n)]
    cf = ClosedFormHamiltonian(
        h=build_function(f"{name}_H", args, H_expr),
        hp=build_function(f"{name}_Hp", args, Hp),
        hx=build_function(f"{name}_Hx", args, Hx),
        hpp=build_function(f"{name}_Hpp", args, Hpp, jit=True),
        hpx=build_function(f"{name}_Hpx", args, Hpx, jit=True),
        hxx=build_function(f"{name}_Hxx", args, Hxx, jit=True),
        ham_pair=build_pair_function(f"{name}_ham", args, Hp, Hx, jit=True),
    )
    if p_dir_expr is not None:
        cf.p_from_dir = build_function(
            f"{name}_pdir", [("x", xs), ("u", us)], p_dir_expr, jit=True
        )
    return cf


def _classical_model(name, chart, G, c_expr, eta_row, omega_expr, xs,
                     G_inv=None, oracles=None):
    """Model for the family L = v.G(x).v / 2 + c(x) - eta(x).v.

    The Hamiltonian is H = (p + eta).G^-1.(p + eta)/2 - c, and the zero-energy
    covector over direction u is p = r G u - eta with r = sqrt(2c / u.G.u).
    """
    n = len(xs)
    vs = _symbols("v", n)
    ps = _symbols("p", n)
    us = _symbols("u", n)
    v = sp.Matrix(vs)
    eta = sp.Matrix([[sp.S.Zero] * n]) if eta_row is None else eta_row
    L_expr = (v.T * G * v)[0] / 2 + c_expr - (eta * v)[0]
    if G_inv is None:
        G_inv = G.inv().applyfunc(sp.cancel)
    w = sp.Matrix(ps) + eta.T
    H_expr = (w.T * G_inv * w)[0] / 2 - c_expr
    u = sp.Matrix(us)
    r = sp.sqrt(2 * c_expr / (u.T * G * u)[0])
    p_dir = [sp.expand(e) for e in (r * (G * u) - eta.T)]
    providers = _lagrangian_providers(name, xs, vs, L_expr)
    cf = _closed_form(name, xs, ps, H_expr, p_dir_expr=p_dir, us=us)
    omega = build_function(f"{name}_omega", [("x", xs)], omega_expr)
    return LagrangianModel(
        chart=chart,
        L=providers["L"],
        omega=omega,
        L_x=providers["L_x"],
        L_v=providers["L_v"],
        L_vv=providers["L_vv"],
        L_vx=providers["L_vx"],
        L_xx=providers["L_xx"],
        name=name,
        closed_form=cf,
        oracles=oracles or {},
    )


def _const_oracle(value, valid_N=None):
    def oracle(q, N):
        if valid_N is not None and N not in valid_N:
            return None
        return float(value)

    return oracle


# -- registry builders -------------------------------------------------------


def _flat_euclidean(n=2):
    n = int(n)
    if n < 1:
        raise ModelError("flat_euclidean requires n >= 1")
    xs = _symbols("x", n)
    chart = Chart(n, (-2.0,) * n, (2.0,) * n, label="R^n box")
    G = sp.eye(n)
    oracles = {"ricci": _const_oracle(0.0), "cd": {"K": 0.0, "N": float(n)}}
    return _classical_model(f"flat{n}", chart, G, sp.Rational(1, 2), None,
                            sp.S.One, xs, G_inv=sp.eye(n), oracles=oracles)


def _round_sphere_chart(n=2):
    n = int(n)
    if n < 2:
        raise ModelError("round_sphere_chart requires n >= 2")
    xs = _symbols("x", n)
    r2 = sum(s ** 2 for s in xs)
    conf = 4 / (1 + r2) ** 2
    G = conf * sp.eye(n)
    G_inv = sp.eye(n) / conf
    omega = (2 / (1 + r2)) ** n
    chart = Chart(n, (-1.5,) * n, (1.5,) * n, label="stereographic chart of S^n")
    oracles = {"ricci": _const_oracle(float(n - 1)),
               "cd": {"K": float(n - 1), "N": float(n)}}
    return _classical_model(f"sphere{n}", chart, G, sp.Rational(1, 2), None,
                            omega, xs, G_inv=G_inv, oracles=oracles)


def _hyperbolic_horocycle():
    xs = _symbols("x", 2)
    x, y = xs
    G = sp.eye(2) / y ** 2
    G_inv = y ** 2 * sp.eye(2)
    eta = sp.Matrix([[1 / y, sp.S.Zero]])
    omega = 1 / y ** 2
    chart = Chart(2, (-3.0, 0.4), (3.0, 4.0), label="upper half-plane")
    oracles = {"ricci": _const_oracle(0.0, valid_N={2.0}),
               "cd": {"K": 0.0, "N": 2.0}}
    return _classical_model("horocycle", chart, G, sp.Rational(1, 2), eta,
                            omega, xs, G_inv=G_inv, oracles=oracles)


def _complex_hyperbolic_siegel(d=2):
    if int(d) != 2:
        raise ModelError("complex_hyperbolic_siegel is registered for d=2 only")
    n = 4
    xs = _symbols("x", n)
    x1, x2, x3, x4 = xs  # (Re z1, Im z1, Re z2, Im z2)
    vs = _symbols("v", n)
    rho = 2 * x3 - x1 ** 2 - x2 ** 2
    v = sp.Matrix(vs)
    # alpha = dz2 - conj(z1) dz1 evaluated on v
    re_a = vs[2] - (x1 * vs[0] + x2 * vs[1])
    im_a = vs[3] - (x1 * vs[1] - x2 * vs[0])
    quad = (4 / rho ** 2) * (re_a ** 2 + im_a ** 2) + (4 / rho) * (vs[0] ** 2 + vs[1] ** 2)
    G = sp.hessian(quad, vs) / 2
    G = G.applyfunc(sp.cancel)
    eta_entries = [-sp.cancel(sp.diff((2 / rho) * im_a, s)) for s in vs]
    eta = sp.Matrix([eta_entries])
    omega = sp.sqrt(sp.cancel(G.det()))
    chart = Chart(n, (-0.7, -0.7, 0.8, -1.5), (0.7, 0.7, 2.5, 1.5),
                  label="Siegel half-space, real coordinates")
    oracles = {"ricci": _const_oracle(0.0, valid_N={4.0}),
               "cd": {"K": 0.0, "N": 4.0}}
    return _classical_model("siegel", chart, G, sp.Rational(1, 2), eta,
                            omega, xs, oracles=oracles)


def _contact_sphere(d=1, s=0.0):
    d = int(d)
    s = float(s)
    if d < 1:
        raise ModelError("contact_sphere requires d >= 1")
    if abs(s) >= 1.0:
        raise ModelError("contact_sphere requires |s| < 1 (supercriticality)")
    n = 2 * d + 1
    xs = _symbols("x", n)
    r2 = sum(t ** 2 for t in xs)
    conf = 4 / (1 + r2) ** 2
    G = conf * sp.eye(n)
    G_inv = sp.eye(n) / conf
    # ambient embedding z: R^n -> S^n in R^(n+1), complex structure J acts
    # pairwise on ambient coordinates; eta is the pullback of (J z) . dz.
    # The magnetic term enters with the co-orientation for which the standard
    # curvature formula 2d|v|^2 + 4sd eta(v) + 2s^2(d+1-eta^2/|v|^2) holds
    # with eta as reported; the opposite choice gives an isometric model
    # under the fiberwise antipodal map.
    z = [2 * t / (1 + r2) for t in xs] + [(1 - r2) / (1 + r2)]
    Jz = []
    for k in range(0, n + 1, 2):
        Jz.extend([-z[k + 1], z[k]])
    eta_entries = []
    for j in range(n):
        e = sum(Jz[k] * sp.diff(z[k], xs[j]) for k in range(n + 1))
        eta_entries.append(sp.cancel(e))
    eta = -s * sp.Matrix([eta_entries])
    omega = (2 / (1 + r2)) ** n
    chart = Chart(n, (-1.2,) * n, (1.2,) * n,
                  label="stereographic chart of S^(2d+1)")

    vs = _symbols("v", n)
    vcol = sp.Matrix(vs)
    name = f"contact{d}"
    gsq_fn = build_function(f"{name}_gsq", [("x", xs), ("v", vs)],
                            (vcol.T * G * vcol)[0])
    eta_fn = build_function(f"{name}_eta", [("x", xs), ("v", vs)],
                            (sp.Matrix([eta_entries]) * vcol)[0])

    def ricci_oracle(q, N):
        if N != float(n):
            return None
        vv = float(gsq_fn(q.x, q.v))
        ev = float(eta_fn(q.x, q.v))
        return 2 * d * vv + 4 * s * d * ev + 2 * s * s * (d + 1 - ev * ev / vv)

    oracles = {
        "ricci": ricci_oracle,
        "cd": {"K": 2 * d * (s - 1.0) ** 2, "N": float(n)},
        "eta": eta_fn,
        "metric_sq": gsq_fn,
    }
    return _classical_model(name, chart, G, sp.Rational(1, 2), eta, omega, xs,
                            G_inv=G_inv, oracles=oracles)


def _potential_oracle(n, dU_fn, d2U_fn, mass=None):
    """Weighted Ricci oracle for L = |v|^2_g/2 + U with flat (mass) metric g."""
    M_inv = None if mass is None else np.diag(1.0 / np.asarray(mass, dtype=float))

    def oracle(q, N):
        if 0.0 <= N < n or N == n:
            return None
        dU = np.asarray(dU_fn(q.x), dtype=float)
        d2U = np.asarray(d2U_fn(q.x), dtype=float)
        v = q.v
        if mass is None:
            vv = float(v @ v)
            grad_sq = float(dU @ dU)
            lap = float(np.trace(d2U))
        else:
            m = np.asarray(mass, dtype=float)
            vv = float(v @ (m * v))
            grad_sq = float(dU @ (M_inv @ dU))
            lap = float(np.trace(M_inv @ d2U))
        pairing = float(v @ dU)  # <v, grad_g U>_g
        inv_excess = 0.0 if N == np.inf else 1.0 / (N - n)
        return (-lap + 2.0 * grad_sq / vv
                - (1.0 + inv_excess) * pairing ** 2 / vv ** 2)

    return oracle


def _mechanical(n=2, potential="1/2 + (1/4)*exp(-(x1^2+x2^2))", half_width=2.0):
    n = int(n)
    if n < 1:
        raise ModelError("mechanical requires n >= 1")
    xs = _symbols("x", n)
    table = {f"x{i + 1}": xs[i] for i in range(n)}
    ast = expr_mod.parse(potential)
    free = expr_mod.free_vars(ast)
    if not free.issubset(set(table)):
        raise ModelError(f"potential uses unknown variables {sorted(free - set(table))}")
    U = sp.nsimplify(expr_mod.to_sympy(ast, table), rational=False)
    chart = Chart(n, (-float(half_width),) * n, (float(half_width),) * n,
                  label="flat chart")
    dU = [sp.diff(U, t) for t in xs]
    d2U = [[sp.diff(U, a, b) for b in xs] for a in xs]
    name = f"mech{n}"
    dU_fn = build_function(f"{name}_dU", [("x", xs)], dU)
    d2U_fn = build_function(f"{name}_d2U", [("x", xs)], d2U)
    oracles = {"ricci": _potential_oracle(n, dU_fn, d2U_fn),
               "cd": {"K": 0.0, "N": np.inf}}
    return _classical_model(name, chart, sp.eye(n), U, None, sp.S.One, xs,
                            G_inv=sp.eye(n), oracles=oracles)


def _many_body(d=3, k=2, masses=(1.0, 1.0), G=1.0, collision_radius=0.1):
    d = int(d)
    k = int(k)
    if d < 3:
        raise ModelError("many_body requires d >= 3")
    if k < 2:
        raise ModelError("many_body requires k >= 2")
    masses = tuple(float(m) for m in masses)
    if len(masses) != k or any(m <= 0 for m in masses):
        raise ModelError("many_body needs k positive masses")
    G_const = float(G)
    if G_const <= 0:
        raise ModelError("many_body requires G > 0")
    radius = float(collision_radius)
    n = d * k
    xs = _symbols("x", n)

    def body(i):
        return xs[d * i: d * (i + 1)]

    U = sp.Rational(1, 2)
    for i in range(k):
        for j in range(i + 1, k):
            sep = sum((a - b) ** 2 for a, b in zip(body(i), body(j)))
            U = U + G_const * masses[i] * masses[j] / sp.sqrt(sep)

    def excluded(x):
        x = np.asarray(x, dtype=float).reshape(k, d)
        for i in range(k):
            for j in range(i + 1, k):
                if np.linalg.norm(x[i] - x[j]) <= radius:
                    return True
        return False

    chart = Chart(n, (-2.0,) * n, (2.0,) * n, label="configurations, collisions excluded",
                  exclusion=excluded)
    mass_diag = [m for m in masses for _ in range(d)]
    Gmat = sp.diag(*mass_diag)
    G_inv = sp.diag(*[1.0 / m for m in mass_diag])
    dU = [sp.diff(U, t) for t in xs]
    d2U = [[sp.diff(U, a, b) for b in xs] for a in xs]
    name = f"nbody{d}_{k}"
    dU_fn = build_function(f"{name}_dU", [("x", xs)], dU)
    d2U_fn = build_function(f"{name}_d2U", [("x", xs)], d2U)
    oracles = {"ricci": _potential_oracle(n, dU_fn, d2U_fn, mass=mass_diag),
               "cd": {"K": 0.0, "N": np.inf}}
    return _classical_model(name, chart, Gmat, U, None, sp.S.One, xs,
                            G_inv=G_inv, oracles=oracles)


def _q_homogeneous(q=4.0, n=2):
    q = float(q)
    n = int(n)
    if q <= 1.0:
        raise ModelError("q_homogeneous requires q > 1")
    if n < 1:
        raise ModelError("q_homogeneous requires n >= 1")
    xs = _symbols("x", n)
    vs = _symbols("v", n)
    ps = _symbols("p", n)
    us = _symbols("u", n)
    speed = sp.sqrt(sum(t ** 2 for t in vs))
    L_expr = (speed ** q + (q - 1)) / q
    pnorm = sp.sqrt(sum(t ** 2 for t in ps))
    H_expr = ((q - 1) / q) * (pnorm ** (q / (q - 1)) - 1)
    unorm = sp.sqrt(sum(t ** 2 for t in us))
    p_dir = [t / unorm for t in us]  # indicatrix covector has unit norm
    name = f"qhom{n}"
    providers = _lagrangian_providers(name, xs, vs, L_expr)
    cf = _closed_form(name, xs, ps, H_expr, p_dir_expr=p_dir, us=us)
    chart = Chart(n, (-2.0,) * n, (2.0,) * n, label="R^n box")
    oracles = {"ricci": _const_oracle(0.0), "lambda_zero": True,
               "cd": {"K": 0.0, "N": float(n)}}
    return LagrangianModel(
        chart=chart,
        L=providers["L"],
        omega=build_function(f"{name}_omega", [("x", xs)], sp.S.One),
        L_x=providers["L_x"],
        L_v=providers["L_v"],
        L_vv=providers["L_vv"],
        L_vx=providers["L_vx"],
        L_xx=providers["L_xx"],
        name=name,
        closed_form=cf,
        oracles=oracles,
        smooth_at_zero=False,
    )


REGISTRY = {
    "flat_euclidean": (_flat_euclidean, {"n": "dimension (default 2)"}),
    "round_sphere_chart": (_round_sphere_chart, {"n": "dimension (default 2)"}),
    "hyperbolic_horocycle": (_hyperbolic_horocycle, {}),
    "complex_hyperbolic_siegel": (_complex_hyperbolic_siegel, {"d": "complex dimension (only 2)"}),
    "contact_sphere": (_contact_sphere, {"d": "complex dimension (default 1)",
                                         "s": "magnetic strength, |s| < 1 (default 0)"}),
    "mechanical": (_mechanical, {"n": "dimension (default 2)",
                                 "potential": "positive potential U(x1..xn)",
                                 "half_width": "chart box half width (default 2)"}),
    "many_body": (_many_body, {"d": "space dimension >= 3 (default 3)",
                               "k": "number of bodies (default 2)",
                               "masses": "tuple of k masses",
                               "G": "gravitational constant (default 1)",
                               "collision_radius": "excluded tube radius (default 0.1)"}),
    "q_homogeneous": (_q_homogeneous, {"q": "homogeneity exponent > 1 (default 4)",
                                       "n": "dimension (default 2)"}),
}

_CACHE = {}


def get_example(name, **params):
    """Build (and cache) a registered model."""
    if name not in REGISTRY:
        raise ModelError(f"unknown example {name!r}; known: {sorted(REGISTRY)}")
    builder, schema = REGISTRY[name]
    unknown = set(params) - set(schema)
    if unknown:
        raise ModelError(f"unknown parameters {sorted(unknown)} for {name}")
    key = (name, tuple(sorted((k, repr(v)) for k, v in params.items())))
    if key not in _CACHE:
        _CACHE[key] = builder(**params)
    return _CACHE[key]


def list_examples():
    """Registry listing as (name, parameter schema) pairs."""
    return [(name, dict(schema)) for name, (_, schema) in sorted(REGISTRY.items())]
