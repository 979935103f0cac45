"""Curvature-dimension toolkit for supercritical Tonelli Lagrangians.

Numerical weighted Ricci curvature, Euler-Lagrange and Jacobi flows on the
zero-energy level, Hamilton-Jacobi needles, Lagrangian cost, one-dimensional
displacement interpolation, and Monte-Carlo checks of Brunn-Minkowski type
inequalities, with a registry of built-in example models and a CLI (lcd).
"""

__version__ = "0.1.0"
