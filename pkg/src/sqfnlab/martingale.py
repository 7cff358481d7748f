"""Rho-dyadic grids and dyadic martingales with exact piecewise-constant calculus.

A :class:`MartingaleTrace` stores every generation densely: generation k
holds 2^k values, one per half-open interval of length 2^-k rho inside the
base interval. Integrals over the base interval are finite sums over the
finest generation, so every quantity here is exact up to floating rounding.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import BadParameter, OutOfDomain, PreconditionError, ScaleTooFine
from .quadrature import gauss_legendre

MAX_DEPTH = 22
ZERO_START_TOL = 1e-12


@dataclass(frozen=True)
class DyadicGrid:
    """Generation-0 interval [j rho - s, (j+1) rho - s) and its dyadic children."""

    rho: float = 1.0
    shift: float = 0.0
    index: int = 0

    def __post_init__(self):
        if not 1.0 <= self.rho < 4.0:
            raise BadParameter("rho must lie in [1, 4)")
        if self.shift < 0:
            raise BadParameter("shift must be >= 0")

    @property
    def left(self):
        return self.index * self.rho - self.shift

    @property
    def right(self):
        return (self.index + 1) * self.rho - self.shift

    def length(self, k):
        return math.ldexp(self.rho, -k)

    def edges(self, k):
        """The 2^k + 1 endpoints of generation k."""
        return self.left + self.length(k) * np.arange((1 << k) + 1)

    def locate(self, x, k):
        """Index of the generation-k interval containing x (right endpoints go to the next interval)."""
        x = np.asarray(x, dtype=float)
        if np.any((x < self.left) | (x >= self.right)):
            raise OutOfDomain(f"point outside the base interval [{self.left}, {self.right})")
        idx = np.floor((x - self.left) / self.length(k)).astype(np.int64)
        return np.minimum(idx, (1 << k) - 1)

    def interval(self, x, k):
        i = int(self.locate(x, k))
        a = self.left + i * self.length(k)
        return a, a + self.length(k)

    def to_dict(self):
        return {"rho": self.rho, "shift": self.shift, "index": self.index}


@dataclass(frozen=True)
class PiecewiseConstant:
    """Function constant on the 2^n equal pieces of [left, left + length)."""

    left: float
    length: float
    values: np.ndarray

    @property
    def piece(self):
        return self.length / self.values.size

    def integral(self):
        return math.fsum(self.values) * self.piece

    def measure(self, mask):
        return int(np.count_nonzero(mask)) * self.piece

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.floor((x - self.left) / self.piece).astype(np.int64)
        if np.any((idx < 0) | (idx >= self.values.size)):
            raise OutOfDomain("point outside the base interval")
        return self.values[idx]


@dataclass(frozen=True, eq=False)
class MartingaleTrace:
    grid: DyadicGrid
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        for k, lv in enumerate(self.levels):
            if lv.shape != (1 << k,):
                raise BadParameter(f"generation {k} must hold {1 << k} values")
            lv.setflags(write=False)

    @property
    def depth(self):
        return len(self.levels) - 1

    @property
    def base_length(self):
        return self.grid.rho

    def flat(self):
        return np.concatenate(self.levels)

    def value(self, x, k):
        return self.levels[k][self.grid.locate(x, k)]

    def _piecewise(self, values):
        return PiecewiseConstant(self.grid.left, self.grid.rho, values)

    def _check_n(self, n):
        n = self.depth if n is None else int(n)
        if not 0 <= n <= self.depth:
            raise BadParameter(f"n={n} outside 0..{self.depth}")
        return n

    def leaf_stats(self, n=None):
        n = self._check_n(n)
        return _kernels.leaf_stats(self.flat()[: (1 << (n + 1)) - 1], n)

    def martingale_defect(self):
        """Largest |mean of children - parent| over all generations."""
        worst = 0.0
        for parent, children in zip(self.levels[:-1], self.levels[1:]):
            mean = 0.5 * (children[0::2] + children[1::2])
            worst = max(worst, float(np.max(np.abs(mean - parent))))
        return worst

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["generation", "index", "value"])
            for k, lv in enumerate(self.levels):
                for i, v in enumerate(lv):
                    w.writerow([k, i, repr(float(v))])


def _new_trace(grid, levels):
    if len(levels) - 1 > MAX_DEPTH:
        raise BadParameter(f"depth capped at {MAX_DEPTH}")
    return MartingaleTrace(grid, tuple(np.asarray(lv, dtype=float) for lv in levels))


# ---------------------------------------------------------------------------
# construction


def build_from_function(f, grid, depth):
    """Slopes of f over every interval: S_k = (f(b) - f(a)) / (b - a) on [a, b)."""
    depth = int(depth)
    if not 0 <= depth <= MAX_DEPTH:
        raise BadParameter(f"depth must be in 0..{MAX_DEPTH}")
    if f.min_scale and grid.length(depth) < f.min_scale:
        raise ScaleTooFine(f"finest interval {grid.length(depth)} below 2*spacing for {f.label}")
    edges = grid.edges(depth)
    values = f(edges)
    levels = []
    for k in range(depth + 1):
        stride = 1 << (depth - k)
        ends = values[::stride]
        levels.append(np.diff(ends) / grid.length(k))
    return _new_trace(grid, levels)


def path_slopes(f, rho, shifts, x, n):
    """S_0..S_n of the grid G(rho, s) applied to f, read at the point x.

    Vectorised over ``shifts``; returns an array of shape ``shifts.shape + (n+1,)``.
    Equals S_k^(rho)(f_s)(x + s) with f_s(y) = f(y - s).
    """
    shifts = np.asarray(shifts, dtype=float)
    out = np.empty(shifts.shape + (n + 1,))
    for k in range(n + 1):
        length = math.ldexp(rho, -k)
        a = length * np.floor((x + shifts) / length) - shifts
        out[..., k] = (f(a + length) - f(a)) / length
    return out


def shift_averages(f, x, rhos, n, nodes):
    """Mean over s in [0, rho] of S_n and <S>_n^2 of the grid G(rho, 0) applied to f_s at x + s.

    As s runs over [0, rho] the generation-n cell holding x + s changes at
    2^n points; the integral is split there so that every piece is smooth
    and gets its own ``nodes``-point Gauss-Legendre rule. Cell indices are
    integers, so coarser generations follow by exact bit shifts.
    Returns ``(slope_mean, qv_mean, roundoff)`` arrays over ``rhos``.
    """
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    n = int(n)
    if not 0 <= n <= MAX_DEPTH:
        raise BadParameter(f"n must be in 0..{MAX_DEPTH}")
    length = np.ldexp(rhos, -n)[:, None]
    first_cell = np.ceil(x / length)
    s_first = first_cell * length - x
    p = np.arange((1 << n) + 1)[None, :]
    lo = np.where(p == 0, 0.0, s_first + (p - 1) * length)
    hi = np.minimum(s_first + p * length, rhos[:, None])
    cell = (first_cell.astype(np.int64) - 1 + p)[..., None]
    xg, wg = gauss_legendre(nodes, -1.0, 1.0)
    half = 0.5 * (hi - lo)[..., None]
    s = 0.5 * (hi + lo)[..., None] + half * xg
    w = half * wg
    rho3 = rhos[:, None, None]
    prev = None
    qv = np.zeros(s.shape)
    rnd = np.zeros(s.shape)
    for k in range(n + 1):
        lk = np.ldexp(rho3, -k)
        a = lk * (cell >> (n - k)) - s
        fa, fb = f(a), f(a + lk)
        slope = (fb - fa) / lk
        r = 4.0 * np.finfo(float).eps * (np.abs(fa) + np.abs(fb)) / lk
        if prev is not None:
            d = slope - prev
            qv += d * d
            rnd += 2.0 * np.abs(d) * r + r * r
        prev = slope
    norm = 1.0 / rhos
    slope_mean = np.sum(w * prev, axis=(1, 2)) * norm
    qv_mean = np.sum(w * qv, axis=(1, 2)) * norm
    roundoff = np.sum(np.abs(w) * (rnd + r), axis=(1, 2)) * norm
    return slope_mean, qv_mean, roundoff


def _law(law):
    if isinstance(law, str):
        name, _, c = law.partition(":")
        law = (name, float(c) if c else 1.0)
    name, c = law
    if name not in ("pm", "uniform"):
        raise BadParameter(f"unknown increment law {name!r} (use pm or uniform)")
    if not c > 0:
        raise BadParameter("increment size c must be positive")
    return name, float(c)


def random_martingale(seed, depth, law="pm:1", grid=None):
    """Random martingale with S_0 = 0 and exact children-mean property.

    Each parent draws |d| (equal to c for ``pm``, uniform on [0, c] for
    ``uniform``) and a fair sign; its children receive parent + d and
    parent - d.
    """
    name, c = _law(law)
    depth = int(depth)
    if not 0 <= depth <= MAX_DEPTH:
        raise BadParameter(f"depth must be in 0..{MAX_DEPTH}")
    rng = np.random.default_rng(seed)
    levels = [np.zeros(1)]
    for _ in range(depth):
        parent = levels[-1]
        size = parent.size
        mag = np.full(size, c) if name == "pm" else rng.uniform(0.0, c, size)
        d = np.where(rng.random(size) < 0.5, mag, -mag)
        child = np.empty(2 * size)
        child[0::2] = parent + d
        child[1::2] = parent - d
        levels.append(child)
    return _new_trace(grid or DyadicGrid(), levels)


def trial_seeds(master_seed, count):
    """Independent per-trial seeds derived from one master seed."""
    return np.random.SeedSequence(master_seed).spawn(count)


# ---------------------------------------------------------------------------
# stopping


@dataclass(frozen=True)
class StoppingRule:
    """Stop on an interval once ``predicate(k, values_k)`` is true there."""

    predicate: Callable[[int, np.ndarray], np.ndarray]

    def apply(self, trace):
        levels = [trace.levels[0].copy()]
        stopped = np.asarray(self.predicate(0, levels[0]), dtype=bool)
        for k in range(1, trace.depth + 1):
            parent_stopped = np.repeat(stopped, 2)
            vals = np.where(parent_stopped, np.repeat(levels[-1], 2), trace.levels[k])
            levels.append(vals)
            stopped = parent_stopped | np.asarray(self.predicate(k, vals), dtype=bool)
        return _new_trace(trace.grid, levels)


def stop_when_abs_exceeds(bound):
    return StoppingRule(lambda k, v: np.abs(v) > bound)


# ---------------------------------------------------------------------------
# piecewise-constant derived functions


def quadratic_variation(trace, n=None):
    """<S>_n^2 = sum_{k=1}^n (S_k - S_{k-1})^2 on generation-n pieces."""
    _, qv, _, _ = trace.leaf_stats(n)
    return trace._piecewise(qv)


def maximal(trace, n=None):
    """M_n = sup_{k<=n} |S_k|."""
    _, _, _, maxabs = trace.leaf_stats(n)
    return trace._piecewise(maxabs)


def drift_sup(trace, n=None):
    """sup_{k<=n} (S_k - S_0 - <S>_k^2 / 2)."""
    s0 = float(trace.levels[0][0])
    _, _, drift, _ = trace.leaf_stats(n)
    return trace._piecewise(drift - s0)


def n_function(trace, n=None):
    """N_n = (sup_{k<=n} (S_k - S_0 - <S>_k^2 / 2))^+."""
    pc = drift_sup(trace, n)
    return PiecewiseConstant(pc.left, pc.length, np.maximum(pc.values, 0.0))


def orthogonality_gap(trace, n=None):
    """(integral of (S_n - S_0)^2, integral of <S>_n^2); equal for any martingale."""
    s_n, qv, _, _ = trace.leaf_stats(n)
    s0 = float(trace.levels[0][0])
    piece = trace.grid.length(trace._check_n(n))
    return math.fsum((s_n - s0) ** 2) * piece, math.fsum(qv) * piece


# ---------------------------------------------------------------------------
# exponential inequalities


def _require_zero_start(trace):
    if abs(float(trace.levels[0][0])) > ZERO_START_TOL:
        raise PreconditionError("the inequality needs S_0 = 0 on the base interval")


def lemma21_integral(trace, n=None):
    """Integral over I0 of exp(S_n - <S>_n^2 / 2); never exceeds |I0|."""
    _require_zero_start(trace)
    s_n, qv, _, _ = trace.leaf_stats(n)
    piece = trace.grid.length(trace._check_n(n))
    return math.fsum(np.exp(s_n - 0.5 * qv)) * piece


def lemma22_tail_measure(trace, lam, n=None):
    """|{x in I0 : sup_{k<=n} (S_k - <S>_k^2 / 2) > lam}|; at most e^-lam |I0|."""
    _require_zero_start(trace)
    if not lam > 0:
        raise BadParameter("lambda must be positive")
    _, _, drift, _ = trace.leaf_stats(n)
    return int(np.count_nonzero(drift > lam)) * trace.grid.length(trace._check_n(n))


def lemma23_exp_moment(trace, alpha, n=None):
    """Integral over I0 of exp(alpha N_n); at most |I0| / (1 - alpha)."""
    _require_zero_start(trace)
    if not 0.0 < alpha < 1.0:
        raise BadParameter("alpha must lie in (0, 1)")
    _, _, drift, _ = trace.leaf_stats(n)
    piece = trace.grid.length(trace._check_n(n))
    return math.fsum(np.exp(alpha * np.maximum(drift, 0.0))) * piece


def lemma24_stopped_qv(trace, n=None, bound=1.0):
    """Integral of <S>_n^2 over E_n = {x : sup_{k<=n} |S_k(x)| <= bound}.

    This is the quantity of the bounded-martingale estimate for the
    martingale frozen after generation n; the proof constant is 100 rho.
    """
    _require_zero_start(trace)
    _, qv, _, maxabs = trace.leaf_stats(n)
    inside = maxabs <= bound
    return math.fsum(qv[inside]) * trace.grid.length(trace._check_n(n))


def lemma24_profile(trace, bound=1.0):
    """Integral over E (fixed at full depth) of <S>_k^2 for k = 1..depth.

    Nondecreasing in k by construction and bounded by the full-depth value.
    """
    _require_zero_start(trace)
    n = trace.depth
    _, _, _, maxabs = trace.leaf_stats(n)
    weight = (maxabs <= bound).astype(float)
    out = []
    acc = 0.0
    for k in range(1, n + 1):
        inc = trace.levels[k] - np.repeat(trace.levels[k - 1], 2)
        # leaves of E under each generation-k interval
        counts = weight.reshape(1 << k, -1).sum(axis=1)
        acc += math.fsum(inc * inc * counts) * trace.grid.length(n)
        out.append(acc)
    return out
