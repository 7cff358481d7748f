"""Gauss-Legendre tensor quadrature with node doubling.

Integrands return a pair ``(values, roundoff)``: the second array bounds the
floating-point error of each value, so integrals whose true value is zero
(affine inputs) are recognised as converged instead of chasing rounding noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import BadParameter, NoConvergence


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts and stopping rule shared by every integral in the package.

    nodes       Gauss-Legendre nodes per axis on the first pass (per band).
    tol         relative change between successive doublings that counts as converged.
    max_levels  number of doublings allowed.
    strict      raise NoConvergence when refinement runs out (else flag and continue).
    max_bands   cap on dyadic bands when integrating down to height 0.
    """

    nodes: int = 8
    tol: float = 1e-6
    max_levels: int = 8
    strict: bool = True
    max_bands: int = 64

    def __post_init__(self):
        if self.nodes < 2:
            raise BadParameter("quadrature needs at least 2 nodes per axis")
        if not 0.0 < self.tol <= 1e-2:
            raise BadParameter("quadrature tolerance must lie in (0, 1e-2]")
        if self.max_levels < 1:
            raise BadParameter("max_levels must be >= 1")
        if self.max_bands < 1:
            raise BadParameter("max_bands must be >= 1")

    def refined(self):
        """Twice the starting nodes and half the tolerance."""
        return replace(self, nodes=2 * self.nodes, tol=self.tol / 2.0)

    def to_dict(self):
        return {"nodes": self.nodes, "tol": self.tol, "max_levels": self.max_levels,
                "strict": self.strict, "max_bands": self.max_bands}


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    converged: bool
    error: float
    nodes: int
    roundoff: float = 0.0

    def checked(self, spec, what="integral"):
        """Return the value, raising NoConvergence under a strict spec."""
        if not self.converged and spec.strict:
            raise NoConvergence(f"{what} did not converge at {self.nodes} nodes "
                                f"(last change {self.error:.3g})", value=self.value)
        return self.value


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a, b):
    """Nodes and weights of the n-point rule on [a, b]."""
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def rule_1d(g, a, b, n):
    x, w = gauss_legendre(n, a, b)
    vals, rnd = g(x)
    return float(w @ vals), float(np.abs(w) @ rnd)


def rule_2d(g, a, b, c, d, n):
    """Tensor rule for the integral of g(u, v) over [a, b] x [c, d]."""
    u, wu = gauss_legendre(n, a, b)
    v, wv = gauss_legendre(n, c, d)
    vals, rnd = g(u[:, None], v[None, :])
    return float(wu @ vals @ wv), float(np.abs(wu) @ rnd @ np.abs(wv))


def refine(rule, spec, scale=0.0):
    """Double the node count until successive values agree.

    ``rule(n)`` returns ``(value, roundoff)``. ``scale`` is a magnitude the
    tolerance may be measured against in addition to the value itself (the
    running total when integrating band by band).
    """
    n = spec.nodes
    prev, prev_rnd = rule(n)
    cur, err = prev, np.inf
    for _ in range(spec.max_levels):
        n *= 2
        cur, rnd = rule(n)
        err = abs(cur - prev)
        if err <= spec.tol * (abs(cur) + abs(scale)) + 8.0 * (rnd + prev_rnd):
            return QuadResult(cur, True, err, n, rnd)
        prev, prev_rnd = cur, rnd
    return QuadResult(cur, False, err, n, prev_rnd)


def integrate_1d(g, a, b, spec, scale=0.0):
    return refine(lambda n: rule_1d(g, a, b, n), spec, scale)


def integrate_2d(g, a, b, c, d, spec, scale=0.0):
    return refine(lambda n: rule_2d(g, a, b, c, d, n), spec, scale)


def integrate_panels_1d(g, breakpoints, spec):
    """Sum of refined 1-D rules over consecutive panels."""
    total, ok, err, nmax, rnd = 0.0, True, 0.0, 0, 0.0
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        if b <= a:
            continue
        r = integrate_1d(g, a, b, spec, scale=total)
        total += r.value
        ok &= r.converged
        err += r.error
        rnd += r.roundoff
        nmax = max(nmax, r.nodes)
    return QuadResult(total, ok, err, nmax, rnd)
