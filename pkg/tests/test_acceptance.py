"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run on its own with

    pytest tests/test_acceptance.py -v -s

Each test prints its verdict line (visible with -s or in the summary of
``pytest -v``) and then asserts the same condition, so the pytest outcome
and the printed line always agree.
"""

import math
import time

import numpy as np
import pytest

from sqfnlab import cli
from sqfnlab import experiments as ex
from sqfnlab import funcspace as fs
from sqfnlab import martingale as mg
from sqfnlab import sqfn

LN2 = math.log(2.0)
MASTER_SEED = 20240517

IDENTITY_PAIRS = [(-0.7, 0.5), (-0.31, 0.25), (0.0, 0.3), (0.2, 0.7), (0.37, 0.9),
                  (0.5, 0.11), (0.83, 0.06), (1.1, 0.45), (1.7, 0.8), (2.3, 0.03)]


def verdict(capsys, number, title, ok, detail, elapsed, budget=None):
    timing = f"{elapsed:.1f}s" + (f" (budget {budget:.0f}s)" if budget else "")
    line = f"CRITERION {number:2d} {'PASS' if ok else 'FAIL'} | {title} | {detail} | {timing}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_01_closed_form_oracles(capsys):
    t0 = time.perf_counter()
    sq = fs.square()
    errs = {}
    errs["A2(x,0.5)"] = max(abs(sqfn.conical_A2(sq, x, 0.5) - 0.75) for x in (-2.0, 0.0, 0.3, 5.0))
    errs["mean_dd"] = max(abs(sqfn.mean_divided_diff(sq, 1.0, h) - 2 * LN2)
                          for h in (2.0 ** -3, 2.0 ** -6))
    discrete = [sqfn.discrete_A2(sq, x, 5) for x in (0.0, 0.3, -1.7)]
    exact = 2.0 / 7.0 * (1.0 - 8.0 ** -5)
    errs["discrete"] = max(abs(v - exact) for v in discrete)
    errs["tilde"] = abs(sqfn.tilde_A2(sq, 0.0, 0.5) - 0.375)
    # the six printed digits 0.285705 are a truncation of the closed form
    printed_ok = all(abs(v - 0.285705) < 1e-6 for v in discrete)
    elapsed = time.perf_counter() - t0
    ok = (errs["A2(x,0.5)"] <= 1e-6 and errs["mean_dd"] <= 1e-6 and errs["discrete"] <= 1e-9
          and printed_ok and errs["tilde"] <= 1e-6 and elapsed < 5.0)
    detail = ", ".join(f"{k} err {v:.1e}" for k, v in errs.items())
    verdict(capsys, 1, "closed-form oracles", ok, detail, elapsed, 5)


@pytest.mark.slow
def test_criterion_02_averaging_identities(capsys):
    t0 = time.perf_counter()
    cases = [("affine:1.5,-0.5", 1e-4), ("square", 1e-4), ("gauss_sine:3", 1e-4),
             ("weierstrass:2,10", 1e-3)]
    worst, ok = {}, True
    for name, limit in cases:
        rep = ex.identity_suite(fs.parse_function(name), IDENTITY_PAIRS, max_error=limit)
        worst[name] = rep.summary["max_rel_error"]
        ok &= rep.passed and rep.summary["count"] == 20
        ok &= all(r["converged"] for r in rep.records)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    detail = ", ".join(f"{k} max rel {v:.1e}" for k, v in worst.items())
    verdict(capsys, 2, "averaging identities (a) and (b), 10 pairs each", ok, detail, elapsed, 120)


def _criterion3_trace(i, seq):
    depth = 8 + i % 7
    law = ("pm" if i % 2 == 0 else "uniform") + ":" + ("0.5", "1", "2")[(i // 2) % 3]
    return mg.random_martingale(seq, depth, law)


def test_criterion_03_exponential_inequalities(capsys):
    t0 = time.perf_counter()
    violations, worst_orth, checked = 0, 0.0, 0
    for i, seq in enumerate(mg.trial_seeds(MASTER_SEED, 2000)):
        tr = _criterion3_trace(i, seq)
        size = tr.grid.rho
        violations += mg.lemma21_integral(tr) > size
        for lam in (0.25, 0.5, 1.0, 2.0, 4.0):
            violations += mg.lemma22_tail_measure(tr, lam) > math.exp(-lam) * size
        for alpha in (0.3, 0.6, 0.9):
            violations += mg.lemma23_exp_moment(tr, alpha) > size / (1.0 - alpha)
        left, right = mg.orthogonality_gap(tr)
        worst_orth = max(worst_orth, abs(left - right) / max(1.0, right))
        checked += 9
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and worst_orth <= 1e-12 and elapsed < 60.0
    detail = (f"{violations} violations in {checked} checks over 2000 traces, "
              f"orthogonality gap {worst_orth:.1e}")
    verdict(capsys, 3, "martingale exponential inequalities", ok, detail, elapsed, 60)


def test_criterion_04_bounded_martingale(capsys):
    t0 = time.perf_counter()
    rhos = (1.0, 1.5, 2.5, 3.75)
    violations, nonmonotone, worst = 0, 0, 0.0
    for i, seq in enumerate(mg.trial_seeds(MASTER_SEED + 1, 500)):
        c = (0.3, 0.7, 1.5)[i % 3]
        grid = mg.DyadicGrid(rhos[(i // 3) % 4])
        tr = mg.random_martingale(seq, 8 + i % 7, f"pm:{c}", grid)
        prof = mg.lemma24_profile(tr, 1.0)
        value = mg.lemma24_stopped_qv(tr, bound=1.0)
        violations += value > 100.0 * grid.rho
        nonmonotone += any(b < a for a, b in zip(prof, prof[1:]))
        nonmonotone += not math.isclose(prof[-1], value, rel_tol=1e-12, abs_tol=1e-15)
        worst = max(worst, value / (100.0 * grid.rho))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and nonmonotone == 0 and elapsed < 60.0
    detail = (f"{violations} violations, {nonmonotone} non-monotone profiles over 500 traces, "
              f"max value / 100 rho = {worst:.3f}")
    verdict(capsys, 4, "stopped quadratic variation bound", ok, detail, elapsed, 60)


@pytest.mark.slow
def test_criterion_05_zygmund_growth(capsys):
    t0 = time.perf_counter()
    xs = ex.uniform_grid(0.0, 1.0, 100)
    rep = ex.zygmund_growth(fs.weierstrass_hardy(2.0), xs, range(4, 19))
    elapsed = time.perf_counter() - t0
    good = rep.summary["good_points"]
    bad = [r for r in rep.records if not (r["r2"] >= 0.95 and r["slope"] > 0)]
    ok = good >= 95 and elapsed < 300.0
    detail = (f"{good}/100 points with R^2 >= 0.95 and positive slope; "
              f"min R^2 {min(r['r2'] for r in rep.records):.3f}; "
              f"failing x {[round(r['x'], 3) for r in bad]}")
    verdict(capsys, 5, "linear growth of A^2 in ln(1/h) for f_2", ok, detail, elapsed, 300)


@pytest.mark.slow
def test_criterion_06_lil_ratio(capsys):
    t0 = time.perf_counter()
    xs = ex.uniform_grid(0.0, 1.0, 200)
    rep = ex.lil_profile(fs.weierstrass_hardy(2.0), xs, range(6, 19))
    elapsed = time.perf_counter() - t0
    maxima = [m for m in rep.summary["max_ratio"] if m is not None]
    above = [r for r in rep.records if r["ratio"] is not None and r["ratio"] > 2 * ex.LIL_CONSTANT]
    js = sorted({r["j"] for r in above})
    up, lo = rep.summary["fraction_below_upper"], rep.summary["fraction_above_lower"]
    ok = up >= 0.95 and lo >= 0.90 and elapsed < 600.0
    detail = (f"max ratio <= 2.36 at {up:.1%}, >= 0.02 at {lo:.1%} of 200 points; "
              f"largest max ratio {max(maxima):.2f}; exceedances only at j = {js}")
    verdict(capsys, 6, "iterated-logarithm ratio for f_2", ok, detail, elapsed, 600)


@pytest.mark.slow
def test_criterion_07_sobolev(capsys):
    t0 = time.perf_counter()
    family = [fs.hat(), fs.gauss_sine(1), fs.gauss_sine(3), fs.gauss_sine(9)]
    rep = ex.sobolev_compare(family, (1.5, 2.0, 3.0), ratio_range=(0.02, 50.0), max_spread=25.0,
                             max_refine_change=0.02)
    elapsed = time.perf_counter() - t0
    ratios = [r["ratio"] for r in rep.records]
    ok = rep.passed and len(ratios) == 12 and elapsed < 600.0
    detail = (f"ratios in [{min(ratios):.3f}, {max(ratios):.3f}], "
              f"max spread {max(rep.summary['spread'].values()):.2f}, "
              f"max refinement change {rep.summary['max_refine_change']:.1e}")
    verdict(capsys, 7, "||A(f)||_p / ||f'||_p comparison", ok, detail, elapsed, 600)


@pytest.mark.slow
def test_criterion_08_classifier(capsys):
    t0 = time.perf_counter()
    grid = ex.uniform_grid(-1.0, 1.0, 100)
    smooth = [(fs.square(), grid), (fs.absolute(), grid[np.abs(grid) >= 0.05]),
              (fs.gauss_sine(3), grid)]
    agree = {}
    for f, xs in smooth:
        agree[f.label] = ex.classify_differentiability(f, xs).summary["agreement"]
    rough = ex.classify_differentiability(fs.weierstrass_hardy(2.0), ex.uniform_grid(0.0, 1.0, 100))
    both_false = rough.summary["both_false"]
    elapsed = time.perf_counter() - t0
    ok = min(agree.values()) >= 0.98 and both_false >= 0.95 and elapsed < 300.0
    detail = (", ".join(f"{k} agreement {v:.0%}" for k, v in agree.items())
              + f"; f_2 both labels false at {both_false:.0%}")
    verdict(capsys, 8, "differentiability label agreement", ok, detail, elapsed, 300)


def test_criterion_09_planar_consistency(capsys):
    t0 = time.perf_counter()
    origin = np.zeros(2)
    sumsq = fs.sum_of_squares_2d()
    sphere = {m: sqfn.sphere_A2(sumsq, origin, 0.0, m) for m in (8, 16)}
    sphere_err = max(abs(v - 1.0) for v in sphere.values())
    # directional along e1 against independent one-variable sources
    e1 = (1.0, 0.0)
    dir_err = 0.0
    for h in (0.0, 0.25, 0.5):
        a = sqfn.directional_A2(fs.x_squared_2d(), np.array([0.4, -0.3]), e1, h)
        dir_err = max(dir_err, abs(a - sqfn.conical_A2(fs.square(), 0.4, h)))
    k, p = 3.0, np.array([0.2, 0.1])
    factor = math.exp(-p[1] ** 2) * math.cos(0.5 * k * p[1])
    for h in (0.0, 0.125):
        a = sqfn.directional_A2(fs.gauss_sine_2d(k), p, e1, h)
        b = sqfn.conical_A2(fs.gauss_sine(k).scaled(factor), p[0], h)
        dir_err = max(dir_err, abs(a - b))
    sector = max(abs(sqfn.mean_dd_sector(fs.affine_2d(a, b, 0.5), origin, h, [(0.0, 2 * math.pi)]))
                 for a, b, h in ((1.0, 0.0, 0.3), (-2.0, 3.0, 0.1), (0.7, 0.7, 0.5)))
    elapsed = time.perf_counter() - t0
    ok = sphere_err <= 1e-3 and dir_err <= 1e-6 and sector <= 1e-8 and elapsed < 60.0
    detail = (f"sphere M=8,16 err {sphere_err:.1e}, directional vs 1-D err {dir_err:.1e}, "
              f"full-circle sector of affine {sector:.1e}")
    verdict(capsys, 9, "directional and sphere consistency in the plane", ok, detail, elapsed, 60)


def _cli_report(argv, out_dir, stem):
    code = cli.main(argv + ["--out", out_dir, "--threads", "2"])
    try:
        with open(f"{out_dir}/{stem}.json", "rb") as fh:
            return code, fh.read()
    except FileNotFoundError:
        return code or 1, b""


def test_criterion_10_reproducibility(tmp_path, capsys):
    t0 = time.perf_counter()
    runs = [
        (["martingale", "lemma23", "--law", "uniform:1.5", "--depth", "8:12", "--trials", "40",
          "--seed", "99"], "martingale_lemma23"),
        (["martingale", "lemma24", "--law", "pm:0.7", "--depth", "10", "--trials", "20",
          "--seed", "5"], "martingale_lemma24"),
        (["identity", "--which", "b", "--f", "gauss_sine:3", "--x", "0.2", "--y", "0.25"],
         "identity"),
        (["lil", "--grid", "0:1:4", "--j", "6:12"], "lil"),
        (["goodlambda", "--points", "4", "--h-min", "0.0625"], "goodlambda"),
        (["classify", "--f", "abs", "--grid=-1:1:8", "--exclude", "0.05"], "classify"),
    ]
    out_dir = str(tmp_path)
    mismatched, failed = [], []
    for argv, stem in runs:
        c1, first = _cli_report(argv, out_dir, stem)
        c2, second = _cli_report(argv, out_dir, stem)
        if c1 or c2:
            failed.append(stem)
        if first != second:
            mismatched.append(stem)
    capsys.readouterr()
    # library-level rerun with a different thread count gives the same report
    f2 = fs.weierstrass_hardy(2.0)
    a = ex.zygmund_growth(f2, [0.1, 0.6, 0.9], range(4, 12), threads=1).to_json()
    b = ex.zygmund_growth(f2, [0.1, 0.6, 0.9], range(4, 12), threads=3).to_json()
    if a != b:
        mismatched.append("zygmund threads")
    elapsed = time.perf_counter() - t0
    ok = not mismatched and not failed
    detail = (f"{len(runs) + 1} experiments rerun; byte mismatches {mismatched or 'none'}; "
              f"failed runs {failed or 'none'}")
    verdict(capsys, 10, "byte-identical reports on rerun", ok, detail, elapsed)
