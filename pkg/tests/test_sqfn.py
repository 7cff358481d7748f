import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfnlab import funcspace as fs
from sqfnlab import sqfn
from sqfnlab.errors import BadParameter, NoConvergence, OutOfDomain, ScaleTooFine
from sqfnlab.quadrature import QuadratureSpec

LN2 = math.log(2.0)
TIGHT = QuadratureSpec(nodes=16, tol=1e-9, max_levels=10)
FAST = QuadratureSpec(nodes=8, tol=1e-6, max_levels=8)

# Frozen reference values for gauss_sine(k=3) at x = 0.2, computed by scipy
# adaptive quadrature in the original (s, t) variables.
GS3_A2_H025 = 3.318653010660578
GS3_A2_H0 = 4.119474016500051
GS3_MDD_H025 = 1.3030525912972981
GS3_TILDE_Y025 = 1.659326505330289
GS3_TILDE_Y03 = 1.6153402109557824
GS3_G2_D05 = 2.5481474168655684
# abs at x = 0.3, h = 0: 30-digit mpmath with the kink split out.
ABS_A2_X03 = 0.765152128821589264638894246841
# hat at x = 0.5, h = 0, same method with all kink lines split out.
HAT_A2_X05 = 0.5012956299628807683353776


def test_normalizer_examples():
    assert sqfn.normalizer_H(1.0) == (0, 1.0)
    n, h = sqfn.normalizer_H(0.3)
    assert n == 2 and h == pytest.approx(1.2, abs=1e-15)
    assert sqfn.normalizer_H(1.5) == (0, 1.5)
    for bad in (0.0, 2.0, -1.0):
        with pytest.raises(BadParameter):
            sqfn.normalizer_H(bad)


@given(st.floats(1e-6, 1.999999))
def test_normalizer_range(y):
    n, h = sqfn.normalizer_H(y)
    assert 1.0 <= h < 2.0 and h == math.ldexp(y, n)


def test_conical_square_closed_forms():
    sq = fs.square()
    # integrals down to height 0 stop once the geometric tail is below tol
    assert sqfn.conical_A2(sq, 0.3, 0.0) == pytest.approx(1.0, abs=1e-6)
    assert sqfn.conical_A2(sq, 0.3, 0.0, TIGHT) == pytest.approx(1.0, abs=1e-9)
    assert sqfn.conical_A2(sq, -4.0, 0.5) == pytest.approx(0.75, abs=1e-9)
    assert sqfn.conical_A2(fs.affine(3.0, 1.0), 0.7, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_conical_against_frozen_oracles():
    f = fs.gauss_sine(3)
    assert sqfn.conical_A2(f, 0.2, 0.25, TIGHT) == pytest.approx(GS3_A2_H025, rel=1e-10)
    assert sqfn.conical_A2(f, 0.2, 0.0, TIGHT) == pytest.approx(GS3_A2_H0, rel=1e-9)
    assert sqfn.conical_A2(fs.absolute(), 0.3, 0.0, TIGHT) == pytest.approx(ABS_A2_X03, rel=1e-9)
    assert sqfn.conical_A2(fs.hat(), 0.5, 0.0, TIGHT) == pytest.approx(HAT_A2_X05, rel=1e-9)


def test_kinked_sources():
    # mean of s/t and sign(s) pieces, exact value 0.185
    assert sqfn.mean_divided_diff(fs.absolute(), 0.05, 0.25, TIGHT) == pytest.approx(0.185, abs=1e-12)
    # A(|x|)(0) is infinite: every octave contributes (2/3) ln 2
    bands = sqfn.conical_bands(fs.absolute(), 0.0, 0.0, QuadratureSpec(max_bands=12))
    assert bands.capped
    assert np.allclose(bands.values, 2.0 / 3.0 * LN2, rtol=1e-12)
    with pytest.raises(NoConvergence, match="diverge"):
        sqfn.conical_A2(fs.absolute(), 0.0, 0.0, QuadratureSpec(max_bands=12))


def test_conical_preconditions():
    g = fs.FunctionSource("g", (), fs.OpenDomain.interval(0.0, 10.0), lambda x: x * x)
    assert sqfn.conical_A2(g, 0.5, 0.0) == pytest.approx(0.25 ** 2, abs=1e-9)
    with pytest.raises(BadParameter):
        sqfn.conical_A2(g, 0.5, 0.25)
    with pytest.raises(OutOfDomain):
        sqfn.conical_A2(g, -1.0, 0.0)
    with pytest.raises(BadParameter):
        sqfn.conical_A2(fs.square(), 0.0, -0.1)


def test_grid_source_floor_at_twice_spacing():
    x = np.linspace(-3, 3, 601)
    g = fs.grid_function(x * x, -3.0, 0.01)
    # the lower height is raised to 2 * spacing: 1 - 0.02^2
    assert sqfn.conical_A2(g, 0.0, 0.0) == pytest.approx(1 - 0.02 ** 2, rel=1e-3)
    with pytest.raises(ScaleTooFine):
        sqfn.vertical_g2(g, 0.0, 0.5)


def test_vertical_g2():
    sq = fs.square()
    assert sqfn.vertical_g2(sq, 0.0, 1.0, TIGHT) == pytest.approx(1.0, abs=1e-9)
    assert sqfn.vertical_g2(sq, 2.0, 0.5, TIGHT) == pytest.approx(0.25, abs=1e-9)
    assert sqfn.vertical_g2(fs.affine(2.0), 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert sqfn.vertical_g2(fs.gauss_sine(3), 0.2, 0.5, TIGHT) == pytest.approx(GS3_G2_D05, rel=1e-9)


def test_mean_divided_difference():
    for h in (2.0 ** -3, 2.0 ** -6, 0.7):
        assert sqfn.mean_divided_diff(fs.square(), 1.0, h) == pytest.approx(2 * LN2, abs=1e-9)
    assert sqfn.mean_divided_diff(fs.affine(-1.5, 2.0), 0.4, 0.3) == pytest.approx(-1.5 * LN2, abs=1e-12)
    assert sqfn.mean_divided_diff(fs.constant(4.0), 0.4, 0.3) == pytest.approx(0.0, abs=1e-13)
    f = fs.gauss_sine(3)
    assert sqfn.mean_divided_diff(f, 0.2, 0.25, TIGHT) == pytest.approx(GS3_MDD_H025, rel=1e-10)


@pytest.mark.parametrize("name", ["square", "gauss_sine:3"])
def test_mean_divided_difference_limit(name):
    f = fs.parse_function(name)
    x = 0.37
    target = LN2 * float(f.derivative(np.array(x)))
    errs = [abs(sqfn.mean_divided_diff(f, x, 2.0 ** -j, TIGHT) - target) for j in range(4, 13)]
    assert errs[-1] < 1e-3
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_tilde():
    sq = fs.square()
    assert sqfn.tilde_A2(sq, 0.0, 0.5) == pytest.approx(0.375, abs=1e-9)
    assert sqfn.tilde_A2(sq, 0.0, 1.0) == 0.0
    assert sqfn.tilde_A2(fs.affine(1.0), 0.0, 0.3) == pytest.approx(0.0, abs=1e-12)
    f = fs.gauss_sine(3)
    assert sqfn.tilde_A2(f, 0.2, 0.25, TIGHT) == pytest.approx(GS3_TILDE_Y025, rel=1e-10)
    assert sqfn.tilde_A2(f, 0.2, 0.3, TIGHT) == pytest.approx(GS3_TILDE_Y03, rel=1e-10)
    with pytest.raises(BadParameter):
        sqfn.tilde_A2(sq, 0.0, 0.0)


def test_tilde_split_adds_up():
    f = fs.gauss_sine(3)
    half, tail = sqfn.tilde_A2_split(f, 0.2, 0.3, TIGHT)
    assert half + tail == pytest.approx(sqfn.tilde_A2(f, 0.2, 0.3, TIGHT), rel=1e-10)
    assert half == pytest.approx(0.5 * sqfn.conical_A2(f, 0.2, 0.3, TIGHT), rel=1e-12)


def test_star_and_discrete():
    sq = fs.square()
    assert sqfn.mean_dd_star(sq, 1.0, 0.25) == pytest.approx(2.0, abs=1e-12)
    assert sqfn.mean_dd_star(fs.affine(3.0), 1.0, 0.25) == pytest.approx(3.0, abs=1e-12)
    assert sqfn.mean_dd_star(fs.constant(1.0), 1.0, 0.25) == pytest.approx(0.0, abs=1e-13)
    assert sqfn.discrete_A2(sq, 0.4, 5) == pytest.approx(2 / 7 * (1 - 8.0 ** -5), abs=1e-12)
    assert sqfn.discrete_A2(sq, 0.4, 1) == pytest.approx(0.25, abs=1e-14)
    assert sqfn.discrete_A2(fs.affine(2.0), 0.4, 7) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(BadParameter):
        sqfn.discrete_A2(sq, 0.0, 0)


def test_kernels():
    assert sqfn.kernel_mean_dd(fs.affine(1.3), 0.2, 0.1, "box2") == pytest.approx(1.3, abs=1e-12)
    assert sqfn.kernel_mean_dd(fs.constant(5.0), 0.2, 0.1, "printed") == pytest.approx(0.0, abs=1e-12)
    assert sqfn.kernel_mean_dd(fs.square(), 1.0, 0.25, "box1") == pytest.approx(1.0, abs=1e-12)
    k = sqfn.KERNELS["printed"]
    assert not k.verified
    again = sqfn.PiecewiseKernel.from_dict(k.to_dict())
    assert again == k
    with pytest.raises(BadParameter):
        sqfn.PiecewiseKernel.from_dict({"pieces": [{"interval": [-3, 0], "coeffs": [1]}]})
    with pytest.raises(BadParameter):
        sqfn.PiecewiseKernel.from_dict({"pieces": [{"coeffs": [1]}]})


def test_kernel_json(tmp_path):
    p = tmp_path / "k.json"
    p.write_text('{"name": "tri", "pieces": [{"interval": [-1, 1], "coeffs": [1, 0]}]}')
    k = sqfn.PiecewiseKernel.from_json(str(p))
    assert k.name == "tri" and k(np.array([0.5, 1.5])).tolist() == [1.0, 0.0]


SOURCES = ["square", "abs", "gauss_sine:3", "cube", "weierstrass:2,8"]


@settings(max_examples=15)
@given(st.sampled_from(SOURCES), st.floats(-1, 1), st.floats(0.01, 0.9), st.floats(0.01, 0.9))
def test_truncation_monotone(name, x, h1, h2):
    f = fs.parse_function(name)
    lo, hi = sorted((h1, h2))
    assert sqfn.conical_A2(f, x, hi, FAST) <= sqfn.conical_A2(f, x, lo, FAST) * (1 + 1e-6) + 1e-12


@settings(max_examples=15)
@given(st.sampled_from(SOURCES), st.floats(-1, 1), st.floats(0.05, 0.9), st.floats(-4, 4))
def test_quadratic_scaling(name, x, h, lam):
    f = fs.parse_function(name)
    base = sqfn.conical_A2(f, x, h, FAST)
    assert sqfn.conical_A2(f.scaled(lam), x, h, FAST) == pytest.approx(lam * lam * base, rel=1e-9, abs=1e-12)


@settings(max_examples=15)
@given(st.sampled_from(SOURCES), st.floats(-1, 1), st.floats(0.05, 0.9), st.floats(-3, 3))
def test_translation_covariance(name, x, h, s):
    f = fs.parse_function(name)
    a = sqfn.conical_A2(f, x, h, FAST)
    b = sqfn.conical_A2(fs.shift(f, s), x + s, h, FAST)
    assert b == pytest.approx(a, rel=1e-5, abs=1e-10)


@settings(max_examples=15)
@given(st.sampled_from(SOURCES), st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(0.05, 0.9))
def test_mean_divided_difference_linear(name, x, a, b, h):
    f = fs.parse_function(name)
    g = fs.gauss_sine(1)
    lhs = sqfn.mean_divided_diff(f.scaled(a).plus(g.scaled(b)), x, h, FAST)
    rhs = a * sqfn.mean_divided_diff(f, x, h, FAST) + b * sqfn.mean_divided_diff(g, x, h, FAST)
    assert lhs == pytest.approx(rhs, rel=1e-5, abs=1e-8)


def test_band_additivity():
    f = fs.gauss_sine(3)
    h1, h2 = 0.5, 0.125
    band = sqfn._bands(sqfn._delta2_sq(f, 0.2), [h1, 0.25, h2], TIGHT).total
    diff = sqfn.conical_A2(f, 0.2, h2, TIGHT) - sqfn.conical_A2(f, 0.2, h1, TIGHT)
    assert band == pytest.approx(diff, rel=1e-9)


def test_zygmund_growth_bound():
    f = fs.weierstrass_hardy(2.0)
    spec = QuadratureSpec(nodes=8, tol=1e-4, max_levels=10)
    for x in (0.1, 0.37, 0.8):
        prof = sqfn.square_profile(f, x, range(4, 19), spec)
        ratios = np.array(prof.values) / np.log(1.0 / np.array(prof.heights))
        # growth per unit of ln(1/h) stays bounded over six decades of h
        assert np.all(ratios < 3.0)
        assert ratios[-5:].max() <= 1.5 * ratios[:5].max()
        assert np.all(np.diff(prof.values) >= -1e-12)


def test_profile_matches_closed_form():
    prof = sqfn.square_profile(fs.square(), 0.0, [1, 3, 2])
    assert prof.heights == (0.5, 0.25, 0.125)
    assert np.allclose(prof.values, [1 - 4.0 ** -j for j in (1, 2, 3)], atol=1e-9)
    assert not prof.divergent
    assert prof.rows()[0] == (0.0, 0.5, prof.values[0], 0)


def test_divergence_flag():
    hs = [2.0 ** -j for j in range(4, 19)]
    logs = np.log(1 / np.array(hs))
    assert sqfn.divergence_flag(hs, 0.3 * logs)
    assert not sqfn.divergence_flag(hs, 1 - np.array(hs) ** 2)
    stalled = np.minimum(logs, logs[8])
    assert not sqfn.divergence_flag(hs, stalled)
    assert not sqfn.divergence_flag(hs[:3], logs[:3])


def test_strict_quadrature_reports_partial_value():
    spec = QuadratureSpec(nodes=2, tol=1e-8, max_levels=1)
    with pytest.raises(NoConvergence) as info:
        sqfn.conical_A2(fs.weierstrass_hardy(2.0), 0.3, 0.0, spec)
    assert math.isfinite(info.value.value)


def test_planar_operators():
    sumsq = fs.sum_of_squares_2d()
    xsq = fs.x_squared_2d()
    origin = np.zeros(2)
    assert sqfn.directional_A2(xsq, origin, (1.0, 0.0), 0.0, TIGHT) == pytest.approx(1.0, abs=1e-9)
    assert sqfn.directional_A2(xsq, origin, (0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)
    assert sqfn.directional_A2(sumsq, origin, (0.0, 1.0), 0.0, TIGHT) == pytest.approx(1.0, abs=1e-9)
    assert sqfn.sphere_A2(sumsq, origin, 0.0, 4, TIGHT) == pytest.approx(1.0, abs=1e-9)
    assert sqfn.sphere_A2(xsq, origin, 0.0, 4, TIGHT) == pytest.approx(0.5, abs=1e-9)
    assert sqfn.sphere_A2(fs.affine_2d(1.0, 2.0), origin, 0.0, 8) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(BadParameter):
        sqfn.sphere_A2(sumsq, origin, 0.0, 3)
    with pytest.raises(BadParameter):
        sqfn.directional_A2(sumsq, origin, (1.0, 1.0))


def test_sphere_direction_convergence():
    g = fs.gauss_sine_2d(1.0)
    p = np.array([0.2, 0.1])
    a = sqfn.sphere_A2(g, p, 0.1, 8, FAST)
    b = sqfn.sphere_A2(g, p, 0.1, 16, FAST)
    assert abs(a - b) < 0.01 * abs(b)


def test_sector_means():
    full = [(0.0, 2 * math.pi)]
    assert sqfn.mean_dd_sector(fs.affine_2d(1.0, -2.0), np.zeros(2), 0.3, full) == pytest.approx(0.0, abs=1e-12)
    assert sqfn.mean_dd_sector(fs.sum_of_squares_2d(), np.array([1.0, 0.0]), 0.1, full) == pytest.approx(0.0, abs=1e-10)
    quarter = [(-math.pi / 4, math.pi / 4)]
    assert sqfn.mean_dd_sector(fs.constant_2d(2.0), np.zeros(2), 0.3, quarter) == pytest.approx(0.0, abs=1e-13)
    # half circle facing +x of the affine x: ln2 * mean of cos over that half
    half = [(-math.pi / 2, math.pi / 2)]
    got = sqfn.mean_dd_sector(fs.affine_2d(1.0, 0.0), np.zeros(2), 0.3, half)
    assert got == pytest.approx(LN2 / math.pi, rel=1e-9)
    assert sqfn.sector_measure(half) == 0.5
    with pytest.raises(BadParameter):
        sqfn.mean_dd_sector(fs.constant_2d(1.0), np.zeros(2), 0.3, [(0.0, 1.0), (0.5, 2.0)])
