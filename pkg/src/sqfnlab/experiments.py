"""Experiment drivers: averaging identities, good-lambda sets, LIL ratios,
Zygmund growth, Sobolev norm comparison and differentiability classification.

Every driver returns an :class:`ExperimentReport` whose JSON form is a
deterministic function of the inputs: records are kept in input order, keys
are sorted and no wall-clock data is stored.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import martingale, sqfn
from .differences import delta, delta2
from .errors import BadParameter
from .funcspace import cone_height
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, gauss_legendre, integrate_panels_1d,
                         refine)

SCHEMA_VERSION = 1
LIL_CONSTANT = math.sqrt(2.0 * math.log(2.0))
LN4 = math.log(4.0)

# Lacunary sources carry frequencies up to 2^40; a 1e-4 band tolerance keeps
# their profiles at about a second per point while staying far below the
# spread of the statistics built on them.
ROUGH_SPEC = QuadratureSpec(nodes=8, tol=1e-4, max_levels=10)
IDENTITY_SPEC = QuadratureSpec(nodes=16, tol=1e-6, max_levels=8)


# ---------------------------------------------------------------------------
# reports


def _plain(obj):
    """JSON-ready copy: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.verdicts.values())

    def to_dict(self):
        return _plain({
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "inputs": self.inputs,
            "records": self.records,
            "summary": self.summary,
            "verdicts": self.verdicts,
            "tolerances": self.tolerances,
            "config": self.config,
        })

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, out_dir, stem=None):
        """Write ``<stem>.json`` and ``<stem>.csv``; returns both paths."""
        stem = stem or self.experiment
        os.makedirs(out_dir, exist_ok=True)
        jpath = os.path.join(out_dir, f"{stem}.json")
        cpath = os.path.join(out_dir, f"{stem}.csv")
        with open(jpath, "w") as fh:
            fh.write(self.to_json())
        write_records_csv(cpath, self.to_dict()["records"])
        return jpath, cpath


def write_records_csv(path, records):
    columns = []
    for rec in records:
        for key in rec:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["schema_version"] + columns)
        for rec in records:
            w.writerow([SCHEMA_VERSION] + [_cell(rec.get(c)) for c in columns])


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def write_plot_data(path, curves):
    """Long-format plot data: one (curve, x, y) row per point."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["curve", "x", "y"])
        for name in sorted(curves):
            xs, ys = curves[name]
            for a, b in zip(xs, ys):
                w.writerow([name, _cell(float(a)), _cell(float(b))])


def parallel_map(fn, items, threads=None):
    """Map preserving input order; runs serially when one thread is requested."""
    items = list(items)
    threads = (os.cpu_count() or 1) if threads is None else int(threads)
    if threads < 1:
        raise BadParameter("threads must be >= 1")
    if threads == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def uniform_grid(a, b, n):
    """Midpoints of n equal cells of [a, b]."""
    if n < 1 or not b > a:
        raise BadParameter("uniform grid needs n >= 1 and b > a")
    return a + (b - a) * (np.arange(n) + 0.5) / n


def _linfit(xs, ys):
    """Least-squares slope, intercept and R^2."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    slope, icpt = np.polyfit(xs, ys, 1)
    ss = float(np.sum((ys - ys.mean()) ** 2))
    res = float(np.sum((ys - (slope * xs + icpt)) ** 2))
    r2 = 1.0 - res / ss if ss > 0 else (1.0 if res == 0 else 0.0)
    return float(slope), float(icpt), r2


# ---------------------------------------------------------------------------
# averaging identities


@dataclass(frozen=True)
class IdentityCheck:
    which: str
    x: float
    y: float
    lhs: float
    rhs: float
    rel_error: float
    converged: bool

    def record(self):
        return {"which": self.which, "x": self.x, "y": self.y, "lhs": self.lhs,
                "rhs": self.rhs, "rel_error": self.rel_error, "converged": self.converged}


def relative_error(a, b, floor=1e-12):
    """|a - b| / max(|a|, |b|, floor); the floor absorbs rounding noise when both vanish."""
    return abs(a - b) / max(abs(a), abs(b), floor)


def shift_average_integral(f, x, y, which, spec=IDENTITY_SPEC):
    """Integral over rho in [H, 2H] (d rho / rho) of the shift mean of S_N or <S>_N^2."""
    n, big_h = sqfn.normalizer_H(y)
    slot = {"a": 0, "b": 1}[which]
    lo, hi = math.log(big_h), math.log(2.0 * big_h)

    def rule(m):
        tau, w = gauss_legendre(m, lo, hi)
        parts = martingale.shift_averages(f, float(x), np.exp(tau), n, m)
        return float(w @ parts[slot]), float(np.abs(w) @ parts[2])

    return refine(rule, spec)


def _check_identity(which, f, x, y, spec):
    x, y = float(x), float(y)
    if which == "a":
        if not 0.0 < y < 2.0:
            raise BadParameter("identity (a) needs 0 < y < 2")
        lhs = sqfn.mean_divided_diff_result(f, x, y, spec)
    else:
        if not 0.0 < y < 1.0:
            raise BadParameter("identity (b) needs 0 < y < 1")
        lhs = sqfn.tilde_bands(f, x, y, spec).result()
    rhs = shift_average_integral(f, x, y, which, spec)
    left = lhs.checked(spec, f"identity ({which}) left side")
    right = rhs.checked(spec, f"identity ({which}) right side")
    return IdentityCheck(which, x, y, left, right, relative_error(left, right),
                         bool(lhs.converged and rhs.converged))


def check_identity_a(f, x, y, spec=IDENTITY_SPEC):
    """Mean divided difference at height y against the shift-averaged martingale slope."""
    return _check_identity("a", f, x, y, spec)


def check_identity_b(f, x, y, spec=IDENTITY_SPEC):
    """Truncated square function against the shift-averaged quadratic variation."""
    return _check_identity("b", f, x, y, spec)


def identity_suite(f, pairs, which=("a", "b"), spec=IDENTITY_SPEC, max_error=1e-4, threads=1):
    pairs = [(float(x), float(y)) for x, y in pairs]
    jobs = [(w, x, y) for w in which for x, y in pairs]
    checks = parallel_map(lambda j: _check_identity(j[0], f, j[1], j[2], spec), jobs, threads)
    worst = max((c.rel_error for c in checks), default=0.0)
    return ExperimentReport(
        experiment="identity",
        inputs={"function": f.label, "pairs": pairs, "which": list(which)},
        records=[c.record() for c in checks],
        summary={"max_rel_error": worst, "count": len(checks)},
        verdicts={"rel_error_below_max": worst < max_error},
        tolerances={"max_rel_error": max_error, "quadrature": spec.to_dict()})


# ---------------------------------------------------------------------------
# good-lambda sets


def _y_grid(h_min, per_octave):
    count = int(math.floor(-math.log2(h_min) * per_octave + 1e-9))
    return [2.0 ** (-i / per_octave) for i in range(count + 1)]


def _tilde_table(f, x, ys, spec):
    """Ã^2(x, y) for every y of a geometric grid, one band sweep per H(y) class.

    Heights sharing H(y) share the dyadic band edges H 2^-k, so each class
    is integrated once from H downwards and read off cumulatively.
    """
    classes = {}
    for y in ys:
        if y < 1.0:
            n, big_h = sqfn.normalizer_H(y)
            classes.setdefault(big_h, []).append((n, y))
    out = {}
    for big_h, members in classes.items():
        depth = max(n for n, _ in members)
        edges = [math.ldexp(big_h, -k) for k in range(depth + 1)]
        bands = sqfn._bands(sqfn._delta2_sq(f, x, 0.5), edges, spec)
        bands.result().checked(spec, "tilde_A2")
        cumulative = np.cumsum(bands.values)
        for n, y in members:
            out[y] = float(cumulative[n - 1])
    return out


def good_lambda_point(f, x, ys, spec=ROUGH_SPEC):
    """Per-point table: running sup of D(y) = Delta~(x, y) - Delta~(x, H(y)) and Ã^2(x, y).

    ``ys`` descends from 1; entry i holds sup over ys[:i+1] of D and Ã^2(x, ys[i]).
    """
    x = float(x)
    sqfn._require_segment(f, x - 4.0, x + 4.0, "good_lambda")
    if f.min_scale and min(ys) < f.min_scale:
        raise BadParameter(f"heights below 2*spacing for {f.label}")
    cache = {}

    def dtilde(h):
        if h not in cache:
            cache[h] = sqfn.mean_divided_diff(f, x, h, spec)
        return cache[h]

    tilde = _tilde_table(f, x, ys, spec)
    sup_d, tails, best = [], [], -math.inf
    for y in ys:
        _, big_h = sqfn.normalizer_H(y)
        best = max(best, dtilde(y) - dtilde(big_h))
        sup_d.append(best)
        tails.append(tilde.get(y, 0.0))
    return np.array(sup_d), np.array(tails)


def good_lambda_bound(m, n, c=1.0):
    """C (M^2 / 2N) exp(-M^2 / (2 N ln 4))."""
    return c * m * m / (2.0 * n) * math.exp(-m * m / (2.0 * n * LN4))


def good_lambda_measure(f, interval=(0.0, 1.0), ms=(1.0, 2.0, 3.0), ns=(0.2, 0.5, 1.0),
                        h_min=2.0 ** -8, points=32, per_octave=2, spec=ROUGH_SPEC, threads=1):
    """Empirical measure of E(M, N) on a uniform grid of the interval, for every (M, N) with M^2 > 4N.

    The sup over y >= h and the existence of h are taken over the geometric
    grid y = 2^(-i / per_octave) down to ``h_min``. The constant of the bound
    is reported as the smallest value that covers every measured pair.
    """
    a, b = map(float, interval)
    if not b > a:
        raise BadParameter("interval must have positive length")
    xs = uniform_grid(a, b, int(points))
    ys = _y_grid(float(h_min), int(per_octave))
    tables = parallel_map(lambda x: good_lambda_point(f, x, ys, spec), xs, threads)
    sup_d = np.array([t[0] for t in tables])
    tails = np.array([t[1] for t in tables])
    records, c_fit = [], 0.0
    for m in sorted(map(float, ms)):
        for n in sorted(map(float, ns)):
            if not m * m > 4.0 * n:
                continue
            inside = np.any((sup_d >= m) & (tails <= n), axis=1)
            measure = float(np.count_nonzero(inside)) * (b - a) / xs.size
            bound = good_lambda_bound(m, n)
            if bound > 0:
                c_fit = max(c_fit, measure / bound)
            records.append({"M": m, "N": n, "measure": measure, "bound_c1": bound,
                            "within_c1": measure <= bound})
    mono = _good_lambda_monotone(records)
    return ExperimentReport(
        experiment="goodlambda",
        inputs={"function": f.label, "interval": [a, b], "M": sorted(map(float, ms)),
                "N": sorted(map(float, ns)), "h_min": float(h_min), "points": int(points),
                "per_octave": int(per_octave)},
        records=records,
        summary={"c_fit": c_fit, "pairs": len(records),
                 "max_sup_difference": float(np.max(sup_d)) if sup_d.size else 0.0},
        verdicts={"monotone": mono},
        tolerances={"quadrature": spec.to_dict()})


def _good_lambda_monotone(records):
    by = {(r["M"], r["N"]): r["measure"] for r in records}
    for (m, n), v in by.items():
        for (m2, n2), v2 in by.items():
            if m2 >= m and n2 <= n and v2 > v:
                return False
    return True


# ---------------------------------------------------------------------------
# law of the iterated logarithm


@dataclass(frozen=True)
class RatioStatistic:
    x: float
    j: int
    h: float
    numerator: float
    a2: float
    denominator: float | None
    ratio: float | None

    @property
    def pre_asymptotic(self):
        return self.ratio is None

    def record(self):
        return {"x": self.x, "j": self.j, "h": self.h, "numerator": self.numerator,
                "A2": self.a2, "denominator": self.denominator, "ratio": self.ratio,
                "pre_asymptotic": self.pre_asymptotic}


def ratio_statistic(x, j, h, dtilde, a2):
    num = abs(dtilde)
    if not a2 > math.e:
        return RatioStatistic(x, j, h, num, a2, None, None)
    den = math.sqrt(a2 * math.log(math.log(a2)))
    return RatioStatistic(x, j, h, num, a2, den, num / den)


def lil_point(f, x, j_values, spec=ROUGH_SPEC):
    js = sorted({int(j) for j in j_values})
    prof = sqfn.square_profile(f, x, js, spec)
    out = []
    for j, h, a2 in zip(js, prof.heights, prof.values):
        out.append(ratio_statistic(float(x), j, h, sqfn.mean_divided_diff(f, x, h, spec), a2))
    return out


def lil_profile(f, xs, j_values=range(6, 19), spec=ROUGH_SPEC, upper=2.0 * LIL_CONSTANT,
                lower=0.02, threads=1, upper_fraction=0.95, lower_fraction=0.90):
    """Ratio |Delta~| / sqrt(A^2 ln ln A^2) over dyadic heights; per-x max over the range."""
    xs = [float(x) for x in xs]
    js = sorted({int(j) for j in j_values})
    rows = parallel_map(lambda x: lil_point(f, x, js, spec), xs, threads)
    records, maxima = [], []
    for stats in rows:
        records.extend(s.record() for s in stats)
        ratios = [s.ratio for s in stats if s.ratio is not None]
        maxima.append(max(ratios) if ratios else math.nan)
    maxima = np.array(maxima)
    finite = np.isfinite(maxima)
    frac_up = float(np.count_nonzero(finite & (maxima <= upper))) / len(xs) if xs else 0.0
    frac_lo = float(np.count_nonzero(finite & (maxima >= lower))) / len(xs) if xs else 0.0
    return ExperimentReport(
        experiment="lil",
        inputs={"function": f.label, "x": xs, "j": js},
        records=records,
        summary={"max_ratio": [None if not math.isfinite(m) else float(m) for m in maxima],
                 "fraction_below_upper": frac_up, "fraction_above_lower": frac_lo,
                 "pre_asymptotic_points": int(np.count_nonzero(~finite)),
                 "constant": LIL_CONSTANT},
        verdicts={"upper": frac_up >= upper_fraction, "lower": frac_lo >= lower_fraction},
        tolerances={"upper": upper, "lower": lower, "upper_fraction": upper_fraction,
                    "lower_fraction": lower_fraction, "quadrature": spec.to_dict()})


# ---------------------------------------------------------------------------
# Zygmund growth


@dataclass(frozen=True)
class GrowthFit:
    x: float
    slope: float
    intercept: float
    r2: float
    divergent: bool

    def record(self):
        return {"x": self.x, "slope": self.slope, "intercept": self.intercept,
                "r2": self.r2, "divergent": self.divergent}


def growth_fit(f, x, j_values, spec=ROUGH_SPEC):
    """Least-squares fit of A^2(x, 2^-j) against j ln 2 = ln(1/h)."""
    js = sorted({int(j) for j in j_values})
    prof = sqfn.square_profile(f, x, js, spec)
    slope, icpt, r2 = _linfit(np.array(js) * math.log(2.0), prof.values)
    return GrowthFit(float(x), slope, icpt, r2, prof.divergent), prof


def zygmund_growth(f, xs, j_values=range(4, 19), spec=ROUGH_SPEC, min_r2=0.95,
                   min_fraction=0.95, threads=1):
    xs = [float(x) for x in xs]
    js = sorted({int(j) for j in j_values})
    fits = parallel_map(lambda x: growth_fit(f, x, js, spec)[0], xs, threads)
    good = sum(1 for g in fits if g.r2 >= min_r2 and g.slope > 0)
    frac = good / len(fits) if fits else 0.0
    return ExperimentReport(
        experiment="zygmund",
        inputs={"function": f.label, "x": xs, "j": js},
        records=[g.record() for g in fits],
        summary={"good_points": good, "fraction_good": frac,
                 "divergent_points": sum(g.divergent for g in fits),
                 "max_growth_per_log": max((g.slope for g in fits), default=0.0)},
        verdicts={"linear_growth": frac >= min_fraction},
        tolerances={"min_r2": min_r2, "min_fraction": min_fraction, "quadrature": spec.to_dict()})


# ---------------------------------------------------------------------------
# Sobolev comparison


def _panels(f, reach=2.0):
    """Breakpoints for x-integration of A(f): support edges and kinks, shifted by 0, +-1, +-2."""
    if f.support is None:
        raise BadParameter(f"{f.label} has no declared compact support")
    lo, hi = f.support
    marks = {lo, hi} | set(f.kinks)
    pts = {m + d for m in marks for d in (-reach, -reach / 2.0, 0.0, reach / 2.0, reach)}
    a, b = lo - reach - 1.0, hi + reach + 1.0
    pts |= set(np.arange(math.floor(a), math.ceil(b) + 1.0))
    return sorted(p for p in pts if a <= p <= b)


def _lp_integral(g, breakpoints, p, spec, what):
    def integrand(x):
        v = np.array([g(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
        val = np.abs(v) ** p
        return val, 4.0 * np.finfo(float).eps * val

    res = integrate_panels_1d(integrand, breakpoints, spec)
    total = res.checked(spec, what)
    return total ** (1.0 / p)


def square_function_norm(f, p, spec=DEFAULT_SPEC, outer=None):
    """||A(f)||_p with A(f)(x) = A^2(f)(x, 0)^(1/2) on a compactly supported source."""
    outer = outer or spec
    cache = {}

    def a_of(x):
        if x not in cache:
            h0 = cone_height(f, x).h0
            cache[x] = math.sqrt(max(sqfn.conical_A2(f, x, 0.0, spec, h0), 0.0))
        return cache[x]

    return _lp_integral(a_of, _panels(f), p, outer, "||A(f)||_p")


def derivative_norm(f, p, spec=DEFAULT_SPEC):
    """||f'||_p from the analytic derivative over the support."""
    if f.support is None:
        raise BadParameter(f"{f.label} has no declared compact support")
    lo, hi = f.support
    pts = sorted({lo, hi} | {k for k in f.kinks if lo < k < hi} |
                 set(np.linspace(lo, hi, int(math.ceil(hi - lo)) + 1)))
    return _lp_integral(lambda x: float(f.derivative(x)), pts, p, spec, "||f'||_p")


def sobolev_compare(family, ps=(1.5, 2.0, 3.0), spec=QuadratureSpec(tol=1e-4, max_levels=8),
                    ratio_range=(0.02, 50.0), max_spread=25.0, max_refine_change=0.02, threads=1):
    """||A(f)||_p / ||f'||_p across a family, at spec and at the refined spec."""
    ps = [float(p) for p in ps]
    jobs = [(f, p) for f in family for p in ps]

    def run(job):
        f, p = job
        d = derivative_norm(f, p, spec.refined())
        a = square_function_norm(f, p, spec)
        a_fine = square_function_norm(f, p, spec.refined())
        return {"function": f.label, "p": p, "A_norm": a, "A_norm_refined": a_fine,
                "derivative_norm": d,
                "ratio": a / d if d > 0 else math.nan,
                "ratio_refined": a_fine / d if d > 0 else math.nan}

    records = parallel_map(run, jobs, threads)
    for r in records:
        r["refine_change"] = (abs(r["ratio_refined"] - r["ratio"]) / r["ratio"]
                              if r["ratio"] > 0 else 0.0)
    spread = {}
    for p in ps:
        rs = [r["ratio"] for r in records if r["p"] == p and r["ratio"] > 0]
        spread[repr(p)] = max(rs) / min(rs) if rs else math.nan
    lo, hi = ratio_range
    in_range = all(lo <= r["ratio"] <= hi for r in records)
    spread_ok = all(v <= max_spread for v in spread.values())
    refine_ok = all(r["refine_change"] < max_refine_change for r in records)
    return ExperimentReport(
        experiment="sobolev",
        inputs={"family": [f.label for f in family], "p": ps},
        records=records,
        summary={"spread": spread,
                 "max_refine_change": max((r["refine_change"] for r in records), default=0.0)},
        verdicts={"ratio_range": in_range, "spread": spread_ok, "refinement": refine_ok},
        tolerances={"ratio_range": list(ratio_range), "max_spread": max_spread,
                    "max_refine_change": max_refine_change, "quadrature": spec.to_dict()})


# ---------------------------------------------------------------------------
# differentiability classification


@dataclass(frozen=True)
class PointLabel:
    x: float
    oscillation: float
    sup_delta2: float
    divergent: bool
    a_label: bool
    b_label: bool

    def record(self):
        return {"x": self.x, "oscillation": self.oscillation, "sup_delta2": self.sup_delta2,
                "divergent": self.divergent, "A": self.a_label, "B": self.b_label}


def classify_point(f, x, cauchy_j=range(8, 17), profile_j=range(4, 19), tol=1e-3,
                   bound=10.0, spec=ROUGH_SPEC):
    """A-label: Delta(f)(x, 2^-j) settles within tol and Delta_2 stays below bound.
    B-label: Delta_2 stays below bound and the A^2 profile is not divergence-flagged."""
    x = float(x)
    hs = np.ldexp(1.0, -np.array(sorted(set(cauchy_j) | set(profile_j))))
    cj = np.ldexp(1.0, -np.array(sorted(set(cauchy_j))))
    d = np.asarray(delta(f, np.full(cj.shape, x), cj))
    osc = float(d.max() - d.min())
    sup2 = float(np.max(np.abs(delta2(f, np.full(hs.shape, x), hs))))
    prof = sqfn.square_profile(f, x, profile_j, spec)
    div = prof.divergent
    bounded = sup2 < bound
    return PointLabel(x, osc, sup2, div, bool(osc < tol and bounded), bool(bounded and not div))


def classify_differentiability(f, xs, cauchy_j=range(8, 17), profile_j=range(4, 19), tol=1e-3,
                               bound=10.0, spec=ROUGH_SPEC, threads=1):
    xs = [float(x) for x in xs]
    labels = parallel_map(
        lambda x: classify_point(f, x, cauchy_j, profile_j, tol, bound, spec), xs, threads)
    n = len(labels) or 1
    agree = sum(lb.a_label == lb.b_label for lb in labels) / n
    both_false = sum(not lb.a_label and not lb.b_label for lb in labels) / n
    both_true = sum(lb.a_label and lb.b_label for lb in labels) / n
    return ExperimentReport(
        experiment="classify",
        inputs={"function": f.label, "x": xs, "cauchy_j": sorted(set(cauchy_j)),
                "profile_j": sorted(set(profile_j))},
        records=[lb.record() for lb in labels],
        summary={"agreement": agree, "both_false": both_false, "both_true": both_true},
        verdicts={},
        tolerances={"oscillation_tol": tol, "delta2_bound": bound, "quadrature": spec.to_dict()})


__all__ = [
    "ExperimentReport", "IdentityCheck", "RatioStatistic", "GrowthFit", "PointLabel",
    "SCHEMA_VERSION", "LIL_CONSTANT", "ROUGH_SPEC", "IDENTITY_SPEC", "parallel_map", "uniform_grid", "write_plot_data", "write_records_csv",
    "relative_error", "shift_average_integral", "check_identity_a", "check_identity_b",
    "identity_suite", "good_lambda_point", "good_lambda_bound", "good_lambda_measure",
    "ratio_statistic", "lil_point", "lil_profile", "growth_fit", "zygmund_growth",
    "square_function_norm", "derivative_norm", "sobolev_compare", "classify_point",
    "classify_differentiability",
]
