"""Square functions and mean divided differences.

Cone integrals are evaluated band by band over dyadic scales
t in [h0 2^-(k+1), h0 2^-k]. Inside a band the substitution
s = x + u t, tau = ln t turns ds dt / t^2 into du dtau, and a tensor
Gauss-Legendre rule in (u, tau) is doubled until it settles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, NoConvergence, OutOfDomain, ScaleTooFine
from .funcspace import cone_height
from .quadrature import (DEFAULT_SPEC, QuadResult, gauss_legendre, integrate_1d, integrate_2d,
                         refine)

EPS = np.finfo(float).eps
LN2 = math.log(2.0)
TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# integrands in (u, tau) coordinates


def _eval3(f, a, b, c):
    vals = f(np.stack(np.broadcast_arrays(a, b, c)))
    return vals[0], vals[1], vals[2]


def _delta2_sq(f, x, weight=1.0):
    """(u, tau) -> weight * Delta_2(f)(x + u t, t)^2 with t = e^tau."""

    def g(u, tau):
        t = np.exp(tau)
        s = x + u * t
        fp, fm, f0 = _eval3(f, s + t, s - t, s)
        d2 = (fp + fm - 2.0 * f0) / (2.0 * t)
        r = 4.0 * EPS * (np.abs(fp) + np.abs(fm) + 2.0 * np.abs(f0)) / (2.0 * t)
        return weight * d2 * d2, weight * (2.0 * np.abs(d2) * r + r * r)

    g.kinks = tuple(k - x for k in f.kinks)
    return g


def _delta_mean(f, x):
    """(u, tau) -> Delta(f)(x + u t, t) / 2."""

    def g(u, tau):
        t = np.exp(tau)
        s = x + u * t
        fp = f(s + t)
        fm = f(s - t)
        d = (fp - fm) / (2.0 * t)
        r = 2.0 * EPS * (np.abs(fp) + np.abs(fm)) / (2.0 * t)
        return 0.5 * d, 0.5 * r

    g.kinks = tuple(k - x for k in f.kinks)
    return g


def _require_segment(f, a, b, what):
    if not f.domain.covers(a, b):
        raise OutOfDomain(f"{what}: [{a}, {b}] is not inside the domain of {f.label}")


# ---------------------------------------------------------------------------
# band accumulation


def _kinked_rule(g, marks, taus, n):
    """Iterated rule: GL in tau per panel, and per tau node GL in u on each
    piece between the kink lines u = m / t and u = m / t -+ 1."""
    xg, wg = gauss_legendre(n, -1.0, 1.0)
    rel = np.asarray(marks, dtype=float)
    val = rnd = 0.0
    for a, b in zip(taus[:-1], taus[1:]):
        tau, wt = gauss_legendre(n, a, b)
        c = rel[None, :] / np.exp(tau)[:, None]
        ends = np.broadcast_to([-1.0, 1.0], (tau.size, 2))
        bp = np.sort(np.concatenate([ends, np.clip(np.concatenate([c - 1.0, c, c + 1.0], axis=1),
                                                    -1.0, 1.0)], axis=1), axis=1)
        half = 0.5 * np.diff(bp, axis=1)[..., None]
        u = 0.5 * (bp[:, 1:] + bp[:, :-1])[..., None] + half * xg
        w = wt[:, None, None] * half * wg
        vals, r = g(u, tau[:, None, None])
        val += float(np.sum(w * vals))
        rnd += float(np.sum(np.abs(w) * r))
    return val, rnd


def _cone_rule(g, lo, hi, spec, scale=0.0):
    """Integral of g(u, tau) over -1 < u < 1, lo < e^tau < hi.

    Kinks of the source (carried as offsets from the apex in ``g.kinks``)
    make the integrand only piecewise smooth; when one can reach the band the
    u-range is split along the kink lines and the tau-range where those lines
    leave the cone, so each piece is smooth.
    """
    marks = [m for m in getattr(g, "kinks", ()) if abs(m) < 2.0 * hi]
    if not marks:
        return integrate_2d(g, -1.0, 1.0, math.log(lo), math.log(hi), spec, scale=scale)
    cuts = {lo, hi} | {c for m in marks for c in (abs(m), 0.5 * abs(m)) if lo < c < hi}
    taus = [math.log(c) for c in sorted(cuts)]
    return refine(lambda n: _kinked_rule(g, marks, taus, n), spec, scale)


@dataclass(frozen=True)
class BandSum:
    """Per-band contributions of a cone integral, finest band last."""

    edges: tuple[float, ...]
    values: tuple[float, ...]
    converged: bool
    error: float = 0.0
    nodes: int = 0
    capped: bool = False

    @property
    def total(self):
        return float(math.fsum(self.values))

    def result(self):
        return QuadResult(self.total, self.converged, self.error, self.nodes)

    def checked(self, spec, what):
        if self.capped and spec.strict:
            raise NoConvergence(f"{what}: bands still contribute after {len(self.values)} "
                                f"octaves (integral may diverge)", value=self.total)
        return self.result().checked(spec, what)


def _bands(g, edges, spec):
    values, ok, total, err, nodes = [], True, 0.0, 0.0, 0
    for hi, lo in zip(edges[:-1], edges[1:]):
        r = _cone_rule(g, lo, hi, spec, scale=total)
        values.append(r.value)
        total += r.value
        ok &= r.converged
        err += r.error
        nodes = max(nodes, r.nodes)
    return BandSum(tuple(edges), tuple(values), ok, err, nodes)


def _bands_to_zero(g, top, spec, rule=_cone_rule):
    """Dyadic bands below ``top`` until the geometric tail is negligible."""
    edges, values, ok, total, err, nodes = [top], [], True, 0.0, 0.0, 0
    quiet = 0
    hi = top
    for _ in range(spec.max_bands):
        lo = hi / 2.0
        if rule is _cone_rule:
            r = rule(g, lo, hi, spec, scale=total)
        else:
            r = rule(g, math.log(lo), math.log(hi), spec, scale=total)
        values.append(r.value)
        edges.append(lo)
        total += r.value
        ok &= r.converged
        err += r.error
        nodes = max(nodes, r.nodes)
        if abs(r.value) <= 0.25 * spec.tol * abs(total) + 8.0 * r.roundoff:
            quiet += 1
            if quiet >= 2:
                return BandSum(tuple(edges), tuple(values), ok, err, nodes)
        else:
            quiet = 0
        hi = lo
    return BandSum(tuple(edges), tuple(values), False, err, nodes, capped=True)


def _dyadic_edges(top, lower):
    edges = [top]
    t = top
    while t / 2.0 > lower:
        t /= 2.0
        edges.append(t)
    edges.append(lower)
    return edges


# ---------------------------------------------------------------------------
# one-variable operators


def normalizer_H(y):
    """The unique integer N and H = 2^N y with 1 <= H < 2."""
    y = float(y)
    if not 0.0 < y < 2.0:
        raise BadParameter("normalizer_H needs 0 < y < 2")
    _, e = math.frexp(y)  # y = m 2^e, 0.5 <= m < 1
    n = 1 - e
    return n, math.ldexp(y, n)


def _cone_setup(f, x, h, h0):
    x = float(x)
    if h0 is None:
        h0 = cone_height(f, x).h0
    elif not f.domain.contains(x):
        raise OutOfDomain(f"{x} is not in the domain of {f.label}")
    if not h >= 0.0:
        raise BadParameter("height h must be >= 0")
    if h >= h0:
        raise BadParameter(f"height h={h} must be below the cone height h0={h0}")
    _require_segment(f, x - 2.0 * h0, x + 2.0 * h0, "cone")
    return x, h0, max(float(h), f.min_scale)


def conical_bands(f, x, h=0.0, spec=DEFAULT_SPEC, h0=None):
    """Band decomposition of A^2(f)(x, h) (bands down to height 0 when h = 0)."""
    x, h0, lower = _cone_setup(f, x, h, h0)
    g = _delta2_sq(f, x)
    if lower == 0.0:
        return _bands_to_zero(g, h0, spec)
    return _bands(g, _dyadic_edges(h0, lower), spec)


def conical_A2_result(f, x, h=0.0, spec=DEFAULT_SPEC, h0=None):
    return conical_bands(f, x, h, spec, h0).result()


def conical_A2(f, x, h=0.0, spec=DEFAULT_SPEC, h0=None):
    """Truncated conical square function A^2(f)(x, h).

    Integral of Delta_2^2(f)(s, t) ds dt / t^2 over the cone
    |s - x| < t, h <= t < h0. For grid sources the lower height is raised to
    twice the sample spacing.
    """
    return conical_bands(f, x, h, spec, h0).checked(spec, "conical_A2")


def vertical_g2(f, x, delta, spec=DEFAULT_SPEC):
    """g_delta^2(f)(x): integral of Delta_2^2(f)(x, t) dt / |t| over |t| < delta."""
    x, delta = float(x), float(delta)
    if not delta > 0:
        raise BadParameter("delta must be positive")
    _require_segment(f, x - delta, x + delta, "vertical_g2")
    if f.min_scale:
        raise ScaleTooFine("vertical_g2 reaches t -> 0, below the grid scale")

    def g(tau):
        t = np.exp(tau)
        fp, fm, f0 = _eval3(f, x + t, x - t, np.full_like(t, x))
        d2 = (fp + fm - 2.0 * f0) / (2.0 * t)
        r = 4.0 * EPS * (np.abs(fp) + np.abs(fm) + 2.0 * np.abs(f0)) / (2.0 * t)
        return 2.0 * d2 * d2, 2.0 * (2.0 * np.abs(d2) * r + r * r)

    return _bands_to_zero(g, delta, spec, rule=integrate_1d).checked(spec, "vertical_g2")


def mean_divided_diff_result(f, x, h, spec=DEFAULT_SPEC):
    x, h = float(x), float(h)
    if not h > 0:
        raise BadParameter("h must be positive")
    if f.min_scale and h / 2.0 < f.min_scale:
        raise ScaleTooFine(f"h/2 below 2*spacing for {f.label}")
    _require_segment(f, x - 2.0 * h, x + 2.0 * h, "mean_divided_diff")
    return _cone_rule(_delta_mean(f, x), h / 2.0, h, spec)


def mean_divided_diff(f, x, h, spec=DEFAULT_SPEC):
    """Mean divided difference over the scale band [h/2, h].

    Integral of Delta(f)(s, t) ds dt / (2 t^2) over |s - x| < t, h/2 < t < h.
    Tends to ln(2) f'(x) as h -> 0 at points of differentiability.
    """
    return mean_divided_diff_result(f, x, h, spec).checked(spec, "mean_divided_diff")


def tilde_bands(f, x, y, spec=DEFAULT_SPEC):
    """Dyadic bands [y 2^k, y 2^(k+1)] of the truncated square function up to H(y)."""
    x = float(x)
    n, big_h = normalizer_H(y)
    _require_segment(f, x - 2.0 * big_h, x + 2.0 * big_h, "tilde_A2")
    if f.min_scale and y < f.min_scale:
        raise ScaleTooFine(f"y below 2*spacing for {f.label}")
    if n == 0:
        return BandSum((big_h,), (), True)
    edges = [math.ldexp(big_h, -k) for k in range(n + 1)]
    return _bands(_delta2_sq(f, x, 0.5), edges, spec)


def tilde_A2(f, x, y, spec=DEFAULT_SPEC):
    """Integral over y < h < H(y) of the mean of Delta_2^2(f)(., h) on (x-h, x+h), dh / h."""
    return tilde_bands(f, x, y, spec).result().checked(spec, "tilde_A2")


def tilde_A2_split(f, x, y, spec=DEFAULT_SPEC):
    """(A^2(f)(x, y) / 2, tail above height 1) for a source with h0(x) = 1.

    The two parts add up to tilde_A2(f, x, y).
    """
    if cone_height(f, x).h0 < 1.0:
        raise BadParameter("tilde_A2_split needs cone height 1 at x")
    _, big_h = normalizer_H(y)
    half = 0.5 * conical_A2(f, x, y, spec)
    if big_h == 1.0:
        return half, 0.0
    tail = _bands(_delta2_sq(f, float(x), 0.5), [big_h, 1.0], spec).result().checked(spec, "tail")
    return half, tail


def mean_dd_star(f, x, h, spec=DEFAULT_SPEC):
    """Single-scale average of Delta(f)(s, h) over s in (x - h, x + h)."""
    x, h = float(x), float(h)
    if not h > 0:
        raise BadParameter("h must be positive")
    if f.min_scale and h < f.min_scale:
        raise ScaleTooFine(f"h below 2*spacing for {f.label}")
    _require_segment(f, x - 2.0 * h, x + 2.0 * h, "mean_dd_star")

    def g(u):
        s = x + u * h
        fp, fm = f(s + h), f(s - h)
        return 0.5 * (fp - fm) / (2.0 * h), EPS * (np.abs(fp) + np.abs(fm)) / (2.0 * h)

    return integrate_1d(g, -1.0, 1.0, spec).checked(spec, "mean_dd_star")


def discrete_A2(f, x, n_levels, spec=DEFAULT_SPEC):
    """Sum over k = 1..N of the integral of Delta_2^2(f)(s, 2^-k) over |s - x| < 2^-k."""
    x = float(x)
    n_levels = int(n_levels)
    if n_levels < 1:
        raise BadParameter("N must be >= 1")
    if f.min_scale and 2.0 ** -n_levels < f.min_scale:
        raise ScaleTooFine(f"2^-{n_levels} below 2*spacing for {f.label}")
    total, ok = 0.0, True
    for k in range(1, n_levels + 1):
        t = 2.0 ** -k

        def g(u, t=t):
            s = x + u * t
            fp, fm, f0 = _eval3(f, s + t, s - t, s)
            d2 = (fp + fm - 2.0 * f0) / (2.0 * t)
            r = 4.0 * EPS * (np.abs(fp) + np.abs(fm) + 2.0 * np.abs(f0)) / (2.0 * t)
            return t * d2 * d2, t * (2.0 * np.abs(d2) * r + r * r)

        r = integrate_1d(g, -1.0, 1.0, spec, scale=total)
        total += r.value
        ok &= r.converged
    return QuadResult(total, ok, 0.0, 0).checked(spec, "discrete_A2")


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class PiecewiseKernel:
    """Piecewise polynomial on [-2, 2]; coefficients in ascending powers."""

    name: str
    pieces: tuple[tuple[float, float, tuple[float, ...]], ...]
    verified: bool = True

    def __post_init__(self):
        for a, b, coeffs in self.pieces:
            if not -2.0 <= a < b <= 2.0:
                raise BadParameter(f"kernel piece [{a}, {b}] not inside [-2, 2]")
            if not coeffs:
                raise BadParameter("kernel piece needs coefficients")

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        for a, b, coeffs in self.pieces:
            mask = (v >= a) & (v < b)
            out[mask] = np.polynomial.polynomial.polyval(v[mask], coeffs)
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            pieces = tuple((float(p["interval"][0]), float(p["interval"][1]),
                            tuple(float(c) for c in p["coeffs"])) for p in data["pieces"])
        except (KeyError, TypeError, IndexError) as exc:
            raise BadParameter(f"malformed kernel spec: {exc}") from None
        return cls(str(data.get("name", "custom")), pieces, bool(data.get("verified", True)))

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {"name": self.name, "verified": self.verified,
                "pieces": [{"interval": [a, b], "coeffs": list(c)} for a, b, c in self.pieces]}


KERNELS = {
    "box2": PiecewiseKernel("box2", ((-2.0, 2.0, (1.0,)),)),
    "box1": PiecewiseKernel("box1", ((-1.0, 1.0, (1.0,)),)),
    # As printed: 1 on [-1, 1], -1/3 + 4/3 w^2 on the outer pieces. It does not
    # reproduce the mean divided difference (x^2 gives ~3.78 x, not 2 ln2 x).
    "printed": PiecewiseKernel("printed", (
        (-2.0, -1.0, (-1.0 / 3.0, 0.0, 4.0 / 3.0)),
        (-1.0, 1.0, (1.0,)),
        (1.0, 2.0, (-1.0 / 3.0, 0.0, 4.0 / 3.0)),
    ), verified=False),
}


def kernel_mean_dd(f, x, h, kernel, spec=DEFAULT_SPEC):
    """(1/4h) * integral over |s - x| < 2h of Delta(f)(s, 2h) K((s - x)/h) ds."""
    x, h = float(x), float(h)
    if isinstance(kernel, str):
        kernel = KERNELS[kernel]
    if not h > 0:
        raise BadParameter("h must be positive")
    _require_segment(f, x - 4.0 * h, x + 4.0 * h, "kernel_mean_dd")
    total, ok = 0.0, True
    for a, b, coeffs in kernel.pieces:

        def g(v, coeffs=coeffs):
            s = x + v * h
            fp, fm = f(s + 2.0 * h), f(s - 2.0 * h)
            kv = np.polynomial.polynomial.polyval(v, coeffs)
            d = (fp - fm) / (4.0 * h)
            return 0.25 * d * kv, 0.25 * EPS * (np.abs(fp) + np.abs(fm)) / (4.0 * h) * np.abs(kv)

        r = integrate_1d(g, a, b, spec, scale=total)
        total += r.value
        ok &= r.converged
    return QuadResult(total, ok, 0.0, 0).checked(spec, "kernel_mean_dd")


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class SquareProfile:
    """A^2(f)(x, h_j) on descending dyadic heights h_j = H 2^-j."""

    x: float
    heights: tuple[float, ...]
    values: tuple[float, ...]
    converged: bool

    @property
    def divergent(self):
        return divergence_flag(self.heights, self.values)

    def rows(self):
        flag = int(self.divergent)
        return [(self.x, h, v, flag) for h, v in zip(self.heights, self.values)]


def divergence_flag(heights, values, min_slope=1e-9):
    """Consistent linear growth of A^2 in ln(1/h) at the fine end of a profile.

    The profile is cut into three trailing blocks of equal length in
    ln(1/h) (one third of the range each, one step each for a four-point
    profile). Flags when the least-squares slope against ln(1/h) is positive
    and the growth across every block is at least half of slope * block
    length. Single steps of a lacunary profile fluctuate too much to be
    tested one at a time.
    """
    heights = np.asarray(heights, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size < 4:
        return False
    order = np.argsort(-heights)
    logs = np.log(1.0 / heights[order])
    values = values[order]
    slope = np.polyfit(logs, values, 1)[0]
    if not slope > min_slope:
        return False
    block = (values.size - 1) // 3
    idx = np.arange(values.size - 1 - 3 * block, values.size, block)
    inc = np.diff(values[idx])
    return bool(np.all(inc >= 0.5 * slope * np.diff(logs[idx])))


def square_profile(f, x, j_values, spec=DEFAULT_SPEC, base_height=1.0, h0=None):
    """Tabulate A^2(f)(x, base_height * 2^-j) for the given j (any order)."""
    x = float(x)
    js = sorted({int(j) for j in j_values})
    heights = [math.ldexp(base_height, -j) for j in js]
    if h0 is None:
        h0 = cone_height(f, x).h0
    lowest = heights[-1]
    if f.min_scale and lowest < f.min_scale:
        raise ScaleTooFine(f"profile height {lowest} below 2*spacing for {f.label}")
    _require_segment(f, x - 2.0 * h0, x + 2.0 * h0, "square_profile")
    cuts = {h for h in heights if h < h0}
    t = h0
    while t > lowest:
        cuts.add(t)
        t /= 2.0
    edges = sorted(cuts | {h0}, reverse=True)
    bands = _bands(_delta2_sq(f, x), edges, spec) if len(edges) > 1 else BandSum((h0,), (), True)
    cumulative = np.concatenate([[0.0], np.cumsum(bands.values)])
    lookup = {e: c for e, c in zip(edges, cumulative)}
    values = tuple(float(lookup[h]) if h < h0 else 0.0 for h in heights)
    if spec.strict and not bands.converged:
        bands.result().checked(spec, "square_profile")
    return SquareProfile(x, tuple(heights), values, bands.converged)


# ---------------------------------------------------------------------------
# planar operators (d = 2)


def _direction(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def directional_A2_result(f, p, xi, h=0.0, spec=DEFAULT_SPEC):
    xi = np.asarray(xi, dtype=float)
    if abs(math.hypot(xi[0], xi[1]) - 1.0) > 1e-12:
        raise BadParameter("direction must be a unit vector")
    h0 = f.cone_height(p)
    line = f.restriction(p, xi)
    return conical_A2_result(line, 0.0, h, spec, h0=h0)


def directional_A2(f, p, xi, h=0.0, spec=DEFAULT_SPEC):
    """A_xi^2(f)(p, h): the one-variable A^2 of u -> f(p + u xi) at u = 0."""
    return directional_A2_result(f, p, xi, h, spec).checked(spec, "directional_A2")


def directional_mean_dd_result(f, p, xi, h, spec=DEFAULT_SPEC):
    xi = np.asarray(xi, dtype=float)
    if abs(math.hypot(xi[0], xi[1]) - 1.0) > 1e-12:
        raise BadParameter("direction must be a unit vector")
    return mean_divided_diff_result(f.restriction(p, xi), 0.0, h, spec)


def directional_mean_dd(f, p, xi, h, spec=DEFAULT_SPEC):
    return directional_mean_dd_result(f, p, xi, h, spec).checked(spec, "directional_mean_dd")


def sphere_A2(f, p, h=0.0, directions=16, spec=DEFAULT_SPEC):
    """Average of A_xi^2 over M equispaced directions on the full circle."""
    m = int(directions)
    if m < 4:
        raise BadParameter("sphere_A2 needs at least 4 directions")
    vals = [directional_A2(f, p, _direction(TWO_PI * i / m), h, spec) for i in range(m)]
    return math.fsum(vals) / m


def _sector_integral(inner, a, b, spec):
    """Integral of inner(theta) d(theta) / 2pi over [a, b]."""

    def values(thetas):
        res = [inner(th) for th in thetas]
        v = np.array([r.value for r in res])
        rnd = np.array([r.error + r.roundoff + EPS * abs(r.value) for r in res])
        return v, rnd

    if math.isclose(b - a, TWO_PI, rel_tol=0, abs_tol=1e-14):
        # full circle: periodic trapezoid rule

        def rule(n):
            th = a + TWO_PI * np.arange(n) / n
            v, rnd = values(th)
            return float(v.mean()), float(rnd.mean())

        return refine(rule, spec)

    def rule(n):
        th, w = gauss_legendre(n, a, b)
        v, rnd = values(th)
        return float(w @ v) / TWO_PI, float(np.abs(w) @ rnd) / TWO_PI

    return refine(rule, spec)


def sector_measure(sectors):
    return sum(b - a for a, b in sectors) / TWO_PI


def _check_sectors(sectors):
    out = []
    for a, b in sectors:
        a, b = float(a), float(b)
        if not a < b or b - a > TWO_PI + 1e-14:
            raise BadParameter(f"bad angle interval [{a}, {b}]")
        out.append((a, b))
    out.sort()
    for (_, b0), (a1, _) in zip(out, out[1:]):
        if a1 < b0:
            raise BadParameter("angle intervals overlap")
    if out and out[-1][1] - out[0][0] > TWO_PI + 1e-14:
        raise BadParameter("angle intervals wrap past a full turn")
    return out


def mean_dd_sector(f, p, h, sectors, spec=DEFAULT_SPEC):
    """Integral over directions in E of the directional mean divided difference, d sigma.

    ``sectors`` is a list of angle intervals (radians); sigma is the
    normalised arc length on the full circle.
    """
    sectors = _check_sectors(sectors)

    def inner(theta):
        return directional_mean_dd_result(f, p, _direction(theta), h, spec)

    total, ok = 0.0, True
    for a, b in sectors:
        r = _sector_integral(inner, a, b, spec)
        total += r.value
        ok &= r.converged
    return QuadResult(total, ok, 0.0, 0).checked(spec, "mean_dd_sector")
