"""Symmetric first and second divided differences, plain and directional.

All functions broadcast over array arguments ``x`` and ``t``.
"""

import numpy as np

from .errors import BadParameter, ScaleTooFine


def _check_scale(f, t):
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise BadParameter("scale t must be nonzero")
    if f.min_scale and np.any(np.abs(t) < f.min_scale):
        raise ScaleTooFine(f"|t| below 2*spacing = {f.min_scale} for {f.label}")
    return t


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def delta(f, x, t):
    """(f(x+t) - f(x-t)) / (2|t|)."""
    t = _check_scale(f, t)
    x = np.asarray(x, dtype=float)
    return _out((f(x + t) - f(x - t)) / (2.0 * np.abs(t)))


def delta2(f, x, t):
    """(f(x+t) + f(x-t) - 2 f(x)) / (2|t|)."""
    t = _check_scale(f, t)
    x = np.asarray(x, dtype=float)
    return _out((f(x + t) + f(x - t) - 2.0 * f(x)) / (2.0 * np.abs(t)))


def _unit(xi):
    xi = np.asarray(xi, dtype=float)
    norm = np.hypot(xi[0], xi[1])
    if xi.shape != (2,) or not abs(norm - 1.0) < 1e-12:
        raise BadParameter(f"direction {xi} is not a unit vector in the plane")
    return xi


def delta_xi(f, p, t, xi):
    """Divided difference of a planar source along the unit direction xi."""
    xi = _unit(xi)
    if np.any(np.asarray(t) == 0):
        raise BadParameter("scale t must be nonzero")
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    fp = f(p[..., 0] + t * xi[0], p[..., 1] + t * xi[1])
    fm = f(p[..., 0] - t * xi[0], p[..., 1] - t * xi[1])
    return _out((fp - fm) / (2.0 * np.abs(t)))


def delta2_xi(f, p, t, xi):
    """Second divided difference of a planar source along xi."""
    xi = _unit(xi)
    if np.any(np.asarray(t) == 0):
        raise BadParameter("scale t must be nonzero")
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    fp = f(p[..., 0] + t * xi[0], p[..., 1] + t * xi[1])
    fm = f(p[..., 0] - t * xi[0], p[..., 1] - t * xi[1])
    f0 = f(p[..., 0], p[..., 1])
    return _out((fp + fm - 2.0 * f0) / (2.0 * np.abs(t)))
