"""Generate plain-Python (optionally numba-compiled) functions from sympy expressions.

Built-in models carry exact symbolic Lagrangians; this module turns their
derivatives into fast scalar-math callables instead of hand-coding them.
"""

from __future__ import annotations

import math

import numpy as np
import sympy as sp
from sympy.printing.pycode import PythonCodePrinter

from ._numba import njit

_printer = PythonCodePrinter({"fully_qualified_modules": True})


def _print_expr(e):
    return _printer.doprint(e)


def _flatten(out):
    """Normalize an output spec into (kind, shape, flat expression list)."""
    if isinstance(out, sp.MatrixBase):
        return "matrix", out.shape, list(out)
    if isinstance(out, (list, tuple)):
        if out and isinstance(out[0], (list, tuple)):
            rows = len(out)
            cols = len(out[0])
            flat = [sp.sympify(e) for row in out for e in row]
            return "matrix", (rows, cols), flat
        return "vector", (len(out),), [sp.sympify(e) for e in out]
    return "scalar", (), [sp.sympify(out)]


def build_function(name, args, out, jit=False):
    """Compile sympy output(s) into a callable.

    args: list of (array_name, [symbols]) pairs; the callable receives one 1-D
    array per pair and unpacks the symbols positionally.
    out: scalar expr, list (vector), list of lists, or sympy Matrix.
    """
    kind, shape, flat = _flatten(out)
    lines = [f"def {name}({', '.join(a for a, _ in args)}):"]
    for arr, syms in args:
        for i, s in enumerate(syms):
            lines.append(f"    {s} = {arr}[{i}]")
    repl, reduced = sp.cse(flat, symbols=sp.numbered_symbols("_t"), optimizations="basic")
    for lhs, rhs in repl:
        lines.append(f"    {lhs} = {_print_expr(rhs)}")
    if kind == "scalar":
        lines.append(f"    return {_print_expr(reduced[0])}")
    elif kind == "vector":
        lines.append(f"    _out = np.empty({shape[0]})")
        for i, e in enumerate(reduced):
            lines.append(f"    _out[{i}] = {_print_expr(e)}")
        lines.append("    return _out")
    else:
        rows, cols = shape
        lines.append(f"    _out = np.empty(({rows}, {cols}))")
        for k, e in enumerate(reduced):
            lines.append(f"    _out[{k // cols}, {k % cols}] = {_print_expr(e)}")
        lines.append("    return _out")
    source = "\n".join(lines)
    namespace = {"math": math, "np": np}
    exec(compile(source, f"<generated {name}>", "exec"), namespace)
    fn = namespace[name]
    fn.__source__ = source
    if jit:
        fn = njit(cache=False)(fn)
    return fn


def build_pair_function(name, args, out_a, out_b, jit=False):
    """Compile two vector outputs into one callable returning a tuple of arrays."""
    kind_a, shape_a, flat_a = _flatten(out_a)
    kind_b, shape_b, flat_b = _flatten(out_b)
    if kind_a != "vector" or kind_b != "vector":
        raise ValueError("pair outputs must be vectors")
    lines = [f"def {name}({', '.join(a for a, _ in args)}):"]
    for arr, syms in args:
        for i, s in enumerate(syms):
            lines.append(f"    {s} = {arr}[{i}]")
    repl, reduced = sp.cse(flat_a + flat_b, symbols=sp.numbered_symbols("_t"), optimizations="basic")
    for lhs, rhs in repl:
        lines.append(f"    {lhs} = {_print_expr(rhs)}")
    na = shape_a[0]
    lines.append(f"    _a = np.empty({na})")
    lines.append(f"    _b = np.empty({shape_b[0]})")
    for i in range(na):
        lines.append(f"    _a[{i}] = {_print_expr(reduced[i])}")
    for i in range(shape_b[0]):
        lines.append(f"    _b[{i}] = {_print_expr(reduced[na + i])}")
    lines.append("    return _a, _b")
    source = "\n".join(lines)
    namespace = {"math": math, "np": np}
    exec(compile(source, f"<generated {name}>", "exec"), namespace)
    fn = namespace[name]
    fn.__source__ = source
    if jit:
        fn = njit(cache=False)(fn)
    return fn
