"""Function sources: analytic builtins, grid samples, domains and cone heights.

A :class:`FunctionSource` is an immutable, vectorised real function of one
variable living on an :class:`OpenDomain` (a finite union of open
intervals). Evaluation outside the domain raises :class:`OutOfDomain`.
Two-variable sources (:class:`FunctionSource2D`) live on an open box and
exist only to feed the directional operators.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .errors import BadParameter, OutOfDomain

INF = math.inf


@dataclass(frozen=True)
class OpenDomain:
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        if not ivs:
            raise BadParameter("domain needs at least one interval")
        for a, b in ivs:
            if not a < b:
                raise BadParameter(f"empty interval ({a}, {b})")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise BadParameter("domain intervals overlap")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def real_line(cls):
        return cls(((-INF, INF),))

    @classmethod
    def interval(cls, a, b):
        return cls(((a, b),))

    @property
    def is_real_line(self):
        return self.intervals == ((-INF, INF),)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x > a) & (x < b)
        return inside

    def distance_to_complement(self, x):
        """Distance from ``x`` to R minus the domain (0 outside the domain)."""
        x = float(x)
        for a, b in self.intervals:
            if a < x < b:
                return min(x - a, b - x)
        return 0.0

    def shifted(self, s):
        return OpenDomain(tuple((a + s, b + s) for a, b in self.intervals))

    def covers(self, a, b):
        """True if [a, b] lies in the closure of one component."""
        lo, hi = min(a, b), max(a, b)
        return any(l <= lo and hi <= r for l, r in self.intervals)


@dataclass(frozen=True)
class ConeHeight:
    x: float
    h0: float


@dataclass(frozen=True, eq=False)
class FunctionSource:
    """Real function of one variable on an open domain.

    ``offset`` implements translation: the source evaluates
    ``base(x - offset)``. ``min_scale`` is the smallest admissible scale
    parameter for difference operators (``2 * spacing`` for grid data,
    0 for analytic builtins).
    """

    name: str
    params: tuple
    domain: OpenDomain
    base: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    derivative_base: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    offset: float = 0.0
    min_scale: float = 0.0
    kinks: tuple[float, ...] = ()
    support: tuple[float, float] | None = None
    metadata: Mapping = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not self.domain.is_real_line and not np.all(self.domain.contains(x)):
            bad = x[~self.domain.contains(x)] if x.ndim else x
            raise OutOfDomain(f"{self.label}: point(s) {np.ravel(bad)[:3]} outside {self.domain.intervals}")
        if self.offset:
            return self.base(x - self.offset)
        return self.base(x)

    def evaluate(self, x):
        return float(self(float(x)))

    def derivative(self, x):
        if self.derivative_base is None:
            raise BadParameter(f"{self.label} has no known derivative")
        x = np.asarray(x, dtype=float)
        return self.derivative_base(x - self.offset)

    @property
    def has_derivative(self):
        return self.derivative_base is not None

    @property
    def label(self):
        text = self.name
        if self.params:
            text += ":" + ",".join(_fmt(p) for p in self.params)
        if self.offset:
            text += f"@shift={_fmt(self.offset)}"
        return text

    def scaled(self, lam):
        """The source lam * f (same domain)."""
        base, der = self.base, self.derivative_base
        return FunctionSource(
            name=f"{_fmt(lam)}*{self.name}", params=self.params, domain=self.domain,
            base=lambda x: lam * base(x),
            derivative_base=None if der is None else (lambda x: lam * der(x)),
            offset=self.offset, min_scale=self.min_scale, kinks=self.kinks,
            support=self.support, metadata=dict(self.metadata))

    def plus(self, other):
        """Pointwise sum with another source sharing the same domain."""
        if other.domain != self.domain:
            raise BadParameter("sum of sources requires identical domains")
        der = None
        if self.has_derivative and other.has_derivative:
            der = lambda x: self.derivative(x) + other.derivative(x)  # noqa: E731
        return FunctionSource(
            name=f"({self.label}+{other.label})", params=(), domain=self.domain,
            base=lambda x: self(x) + other(x), derivative_base=der,
            min_scale=max(self.min_scale, other.min_scale),
            kinks=tuple(sorted(set(self.kinks) | set(other.kinks))))


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def evaluate(f, x):
    return f.evaluate(x)


def shift(f, s):
    """Return f_s with f_s(x) = f(x - s); the domain moves by +s."""
    s = float(s)
    if s == 0.0:
        return f
    return FunctionSource(
        name=f.name, params=f.params, domain=f.domain.shifted(s), base=f.base,
        derivative_base=f.derivative_base, offset=f.offset + s, min_scale=f.min_scale,
        kinks=tuple(k + s for k in f.kinks),
        support=None if f.support is None else (f.support[0] + s, f.support[1] + s),
        metadata=dict(f.metadata))


def cone_height(f, x):
    """h0(x) = min(1, dist(x, complement of the domain) / 2)."""
    x = float(x)
    if not f.domain.contains(x):
        raise OutOfDomain(f"{x} is not in the domain of {f.label}")
    return ConeHeight(x, min(1.0, f.domain.distance_to_complement(x) / 2.0))


# ---------------------------------------------------------------------------
# builtin catalog

def _builtin(name, params, base, der=None, domain=None, **kw):
    return FunctionSource(name=name, params=tuple(params), domain=domain or OpenDomain.real_line(),
                          base=base, derivative_base=der, **kw)


def square():
    return _builtin("square", (), lambda x: x * x, lambda x: 2.0 * x)


def cube():
    return _builtin("cube", (), lambda x: x * x * x, lambda x: 3.0 * x * x)


def absolute():
    return _builtin("abs", (), np.abs, np.sign, kinks=(0.0,))


def abs_power(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise BadParameter("abs_pow needs alpha in (0, 2)")

    def der(x):
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ax > 0, alpha * np.sign(x) * ax ** (alpha - 1.0), 0.0)

    return _builtin("abs_pow", (alpha,), lambda x: np.abs(x) ** alpha, der, kinks=(0.0,))


def hat():
    return _builtin("hat", (), lambda x: np.maximum(0.0, 1.0 - np.abs(x)),
                    lambda x: np.where(np.abs(x) < 1.0, -np.sign(x), 0.0),
                    kinks=(-1.0, 0.0, 1.0), support=(-1.0, 1.0))


# e^{-49} < 1e-21: the gaussian window is numerically zero beyond |x| = 7.
GAUSS_WINDOW = 7.0


def gauss_sine(k):
    k = float(k)

    def base(x):
        return np.exp(-x * x) * np.sin(k * x)

    def der(x):
        return np.exp(-x * x) * (k * np.cos(k * x) - 2.0 * x * np.sin(k * x))

    return _builtin("gauss_sine", (k,), base, der, support=(-GAUSS_WINDOW, GAUSS_WINDOW))


def affine(a, b=0.0):
    a, b = float(a), float(b)
    return _builtin("affine", (a, b), lambda x: a * x + b, lambda x: np.full_like(x, a))


def constant(c):
    c = float(c)
    return _builtin("const", (c,), lambda x: np.full_like(x, c), lambda x: np.zeros_like(x))


def default_terms(b):
    """Smallest truncation whose tail b^-N / (b - 1) is below 1e-12."""
    return max(1, math.ceil(math.log(1e-12 * (b - 1.0)) / -math.log(b)))


def weierstrass_hardy(b=2.0, n_terms=None):
    """Partial sum of sum_n b^-n cos(b^n x), n = 1..n_terms."""
    b = float(b)
    if not b > 1.0:
        raise BadParameter("weierstrass_hardy needs b > 1")
    n_terms = default_terms(b) if n_terms is None else int(n_terms)
    if n_terms < 1:
        raise BadParameter("n_terms must be >= 1")

    def base(x):
        return _kernels.lacunary_sum(x, b, n_terms)

    def der(x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        freq = 1.0
        for _ in range(n_terms):
            freq *= b
            out -= np.sin(freq * x)
        return out

    tail = b ** (-n_terms) / (b - 1.0)
    return _builtin("weierstrass", (b, n_terms), base, der,
                    metadata={"tail_bound": tail, "n_terms": n_terms})


_CATALOG = {
    "square": (square, 0, 0),
    "cube": (cube, 0, 0),
    "abs": (absolute, 0, 0),
    "abs_pow": (abs_power, 1, 1),
    "hat": (hat, 0, 0),
    "gauss_sine": (gauss_sine, 1, 1),
    "weierstrass": (weierstrass_hardy, 0, 2),
    "affine": (affine, 1, 2),
    "const": (constant, 1, 1),
}


def builtin_names():
    return sorted(_CATALOG)


def builtin(name, *params):
    try:
        factory, lo, hi = _CATALOG[name]
    except KeyError:
        raise BadParameter(f"unknown builtin {name!r}; known: {', '.join(builtin_names())}") from None
    if not lo <= len(params) <= hi:
        raise BadParameter(f"{name} takes {lo}..{hi} parameters, got {len(params)}")
    if name == "weierstrass" and len(params) == 2:
        params = (params[0], int(params[1]))
    return factory(*params)


def parse_function(text):
    """Parse ``id[:p1,p2]`` or ``csv:<path>`` into a source."""
    text = text.strip()
    if text.startswith("csv:"):
        return from_csv(text[4:])
    name, _, rest = text.partition(":")
    params = [float(p) for p in rest.split(",")] if rest else []
    return builtin(name, *params)


# ---------------------------------------------------------------------------
# grid-sampled sources

def grid_function(samples, origin, spacing, name="grid"):
    """Piecewise-linear interpolant of uniform samples.

    Domain is the open interval spanned by the nodes; evaluation is exact at
    interior nodes and affine between consecutive nodes.
    """
    samples = np.asarray(samples, dtype=float)
    origin, spacing = float(origin), float(spacing)
    if not spacing > 0:
        raise BadParameter("grid spacing must be positive")
    if samples.ndim != 1 or samples.size < 3:
        raise BadParameter("grid functions need at least 3 samples")
    if not np.all(np.isfinite(samples)):
        raise BadParameter("grid samples must be finite")
    nodes = origin + spacing * np.arange(samples.size)
    samples.setflags(write=False)

    def base(x):
        return np.interp(x, nodes, samples)

    return FunctionSource(
        name=name, params=(), domain=OpenDomain.interval(nodes[0], nodes[-1]), base=base,
        min_scale=2.0 * spacing,
        metadata={"origin": origin, "spacing": spacing, "n_samples": int(samples.size)})


def from_csv(path, rtol=1e-9):
    """Load two-column (x, f(x)) CSV data with uniform spacing."""
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if xs:
                    raise BadParameter(f"malformed row {row!r} in {path}") from None
                continue  # header
            xs.append(x)
            ys.append(y)
    xs = np.asarray(xs)
    if xs.size < 3:
        raise BadParameter(f"{path}: need at least 3 rows")
    steps = np.diff(xs)
    spacing = (xs[-1] - xs[0]) / (xs.size - 1)
    if spacing <= 0 or np.max(np.abs(steps - spacing)) > rtol * spacing:
        raise BadParameter(f"{path}: x column is not uniformly spaced (rtol {rtol})")
    return grid_function(ys, xs[0], spacing, name=f"csv:{path}")


# ---------------------------------------------------------------------------
# two-variable sources


@dataclass(frozen=True)
class Box2D:
    x_range: tuple[float, float] = (-INF, INF)
    y_range: tuple[float, float] = (-INF, INF)

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        (a, b), (c, d) = self.x_range, self.y_range
        return (p[..., 0] > a) & (p[..., 0] < b) & (p[..., 1] > c) & (p[..., 1] < d)

    def distance_to_complement(self, p):
        px, py = float(p[0]), float(p[1])
        if not self.contains(np.array([px, py])):
            return 0.0
        (a, b), (c, d) = self.x_range, self.y_range
        return min(px - a, b - px, py - c, d - py)

    def line_interval(self, p, xi):
        """Parameter interval {u : p + u xi inside the box} (open)."""
        lo, hi = -INF, INF
        for axis, (a, b) in enumerate((self.x_range, self.y_range)):
            c = xi[axis]
            if abs(c) < 1e-300:
                continue
            u1, u2 = (a - p[axis]) / c, (b - p[axis]) / c
            lo, hi = max(lo, min(u1, u2)), min(hi, max(u1, u2))
        return lo, hi


@dataclass(frozen=True, eq=False)
class FunctionSource2D:
    name: str
    params: tuple
    domain: Box2D
    base: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        pts = np.stack(np.broadcast_arrays(x, y), axis=-1)
        if not np.all(self.domain.contains(pts)):
            raise OutOfDomain(f"{self.name}: point outside {self.domain}")
        return self.base(x, y)

    def cone_height(self, p):
        if not self.domain.contains(np.asarray(p, dtype=float)):
            raise OutOfDomain(f"{tuple(p)} is not in the domain of {self.name}")
        return min(1.0, self.domain.distance_to_complement(p) / 2.0)

    def restriction(self, p, xi):
        """The one-variable source u -> f(p + u xi) on its open line domain."""
        p = np.asarray(p, dtype=float)
        xi = np.asarray(xi, dtype=float)
        lo, hi = self.domain.line_interval(p, xi)
        base2 = self.base

        def base(u):
            return base2(p[0] + u * xi[0], p[1] + u * xi[1])

        return FunctionSource(name=f"{self.name}|line", params=(), domain=OpenDomain.interval(lo, hi), base=base)


def sum_of_squares_2d(domain=None):
    return FunctionSource2D("sumsq2", (), domain or Box2D(), lambda x, y: x * x + y * y)


def x_squared_2d(domain=None):
    return FunctionSource2D("xsq2", (), domain or Box2D(), lambda x, y: x * x + 0.0 * y)


def affine_2d(a, b, c=0.0, domain=None):
    a, b, c = float(a), float(b), float(c)
    return FunctionSource2D("affine2", (a, b, c), domain or Box2D(), lambda x, y: a * x + b * y + c)


def constant_2d(c, domain=None):
    c = float(c)
    return FunctionSource2D("const2", (c,), domain or Box2D(), lambda x, y: np.full(np.broadcast(x, y).shape, c))


def gauss_sine_2d(k, domain=None):
    k = float(k)
    return FunctionSource2D("gauss_sine2", (k,), domain or Box2D(),
                            lambda x, y: np.exp(-x * x - y * y) * np.sin(k * x) * np.cos(0.5 * k * y))


_CATALOG_2D = {
    "sumsq2": sum_of_squares_2d,
    "xsq2": x_squared_2d,
    "affine2": affine_2d,
    "const2": constant_2d,
    "gauss_sine2": gauss_sine_2d,
}


def parse_function_2d(text):
    name, _, rest = text.strip().partition(":")
    params = [float(p) for p in rest.split(",")] if rest else []
    try:
        factory = _CATALOG_2D[name]
    except KeyError:
        raise BadParameter(f"unknown 2-d builtin {name!r}; known: {', '.join(sorted(_CATALOG_2D))}") from None
    return factory(*params)
