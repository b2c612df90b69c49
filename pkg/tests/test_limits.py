import numpy as np
import pytest

from twistspec.build import derive_rng
from twistspec.limits import (
    Window,
    arcsine_sample,
    frozen_esm,
    mu_sample,
    root_modulus_gap,
    schmidt_spitzer_set,
    xi_support_samples,
)
from twistspec.measures import EmpiricalMeasure, PointCloud, hausdorff, sliced_w1
from twistspec.symbols import LaurentSymbol, TridiagonalSymbol


@pytest.fixture(scope="module")
def cos_frozen():
    return LaurentSymbol.from_strings({-1: "1", 1: "1"}).freeze(0.0)


# --- arcsine sampling --------------------------------------------------------


def test_arcsine_samples_on_segment():
    b, c, d = 1 + 1j, 0.25j, 1j
    cloud = arcsine_sample(b, c, d, 5000, seed=5)
    w = 2 * np.sqrt(complex(d * c) + 0.0)
    t = (cloud.points - b) / w
    assert np.abs(t.imag).max() < 1e-12
    assert np.abs(t.real).max() <= 1.0 + 1e-12


def test_arcsine_parameter_cdf_symmetric():
    cloud = arcsine_sample(0.0, 1.0, 1.0, 100_000, seed=6)
    t = cloud.points.real / 2.0
    # F(0) = 1/2 within the 99 percent DKW band
    eps = np.sqrt(np.log(2 / 0.01) / (2 * 100_000))
    assert abs(np.mean(t < 0) - 0.5) < eps


def test_arcsine_mean_concentration():
    b, c, d = 2 - 1j, 1j, 0.5
    n = 10**6
    cloud = arcsine_sample(b, c, d, n, seed=7)
    w = 2 * np.sqrt(complex(d * c) + 0.0)
    # E cos(pi U) = 0, Var = 1/2
    assert abs(cloud.points.mean() - b) <= 4 * abs(w) / np.sqrt(2 * n)


def test_arcsine_degenerate_interval():
    cloud = arcsine_sample(3 + 3j, 0.0, 1.0, 100, seed=8)
    np.testing.assert_array_equal(cloud.points, np.full(100, 3 + 3j))


def test_arcsine_branch_invariance():
    b, c, d = 0.3, 1 + 0.5j, -0.25
    base = arcsine_sample(b, c, d, 100_000, seed=9)
    w = 2 * np.sqrt(complex(d * c) + 0.0)
    rng = derive_rng(10, "branch-check")
    flipped = b + (-w) * np.cos(np.pi * rng.uniform(0, 1, 100_000))
    assert sliced_w1(base, PointCloud(flipped)) < 0.01


# --- mixture sampling --------------------------------------------------------


def test_mu_constant_symbol_collapses():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    mix = mu_sample(sym, 100_000, seed=11)
    plain = arcsine_sample(0.0, 1.0, 1.0, 100_000, seed=12)
    assert sliced_w1(mix, plain) < 0.01


def test_mu_fig2_purely_imaginary(fig2_symbol):
    cloud = mu_sample(fig2_symbol, 50_000, seed=13)
    assert np.abs(cloud.points.real).max() < 1e-12
    assert np.abs(cloud.points.imag).max() <= 0.2 + 1e-12


def test_mu_symmetric_case_in_range_closure():
    sym = TridiagonalSymbol.from_strings(d="(1+x)/2", b="i*x", c="(1+x)/2")
    from twistspec.symbols import symbol_range

    cloud = mu_sample(sym, 20_000, seed=14)
    rng_cloud = symbol_range(sym, 400, 512)
    from scipy.spatial import cKDTree

    tree = cKDTree(np.column_stack([rng_cloud.points.real, rng_cloud.points.imag]))
    dist = tree.query(np.column_stack([cloud.points.real, cloud.points.imag]))[0]
    assert dist.max() < 0.02  # grid tolerance of the range sampling


# --- Schmidt-Spitzer sets ----------------------------------------------------


def test_root_gap_on_and_off_set(cos_frozen):
    assert root_modulus_gap(cos_frozen, 0.0) < 1e-12
    assert root_modulus_gap(cos_frozen, 3.0) == pytest.approx(
        1 - (3 - np.sqrt(5)) / (3 + np.sqrt(5))
    )


def test_schmidt_spitzer_cos_segment(cos_frozen):
    win = Window(-3.0, 3.0, -1.0, 1.0)
    grid = (400, 400)
    cloud = schmidt_spitzer_set(cos_frozen, win, grid=grid, tol=0.02)
    assert len(cloud) > 0
    # retained points hug [-2, 2]
    assert np.abs(cloud.points.imag).max() < 0.05
    assert cloud.points.real.min() == pytest.approx(-2.0, abs=0.05)
    assert cloud.points.real.max() == pytest.approx(2.0, abs=0.05)
    segment = PointCloud(np.linspace(-2, 2, 2001))
    assert hausdorff(cloud, segment) < 2 * win.cell_diagonal(*grid)


def test_schmidt_spitzer_tridiagonal_matches_xi():
    sym = TridiagonalSymbol.from_strings(d="1/2", b="i", c="2")
    frozen = sym.as_laurent().freeze(0.0)
    from twistspec.symbols import symbol_range, xi_support_tridiagonal

    interval = xi_support_tridiagonal(sym, 1)[0]
    samples = PointCloud(interval.sample(2001))
    # default window: bounding box of the symbol range padded by 20 percent
    win = Window.from_points(symbol_range(sym, 1, 512), 0.2)
    grid = (400, 400)
    cloud = schmidt_spitzer_set(frozen, win, grid=grid, tol=0.02)
    assert hausdorff(cloud, samples) < 2 * win.cell_diagonal(*grid)


def test_schmidt_spitzer_trims_zero_leading(ex5_symbol):
    frozen = ex5_symbol.freeze(1.0)  # leading z^2 coefficient vanishes
    assert frozen.coefficient(2) == pytest.approx(0.0)
    gap = root_modulus_gap(frozen, 10.0)
    assert gap > 0.1
    curve = np.array(
        [
            sum(v * np.exp(1j * t * j) for j, v in frozen.coefficients.items())
            for t in np.linspace(0, 2 * np.pi, 128)
        ]
    )
    cloud = schmidt_spitzer_set(frozen, Window.from_points(PointCloud(curve), 0.2), grid=(150, 150))
    assert len(cloud) > 0


# --- frozen empirical measures -----------------------------------------------


def test_frozen_esm_golden(cos_frozen):
    cloud = frozen_esm(cos_frozen, 4)
    expected = 2 * np.cos(np.arange(1, 5) * np.pi / 5)
    np.testing.assert_allclose(np.sort(cloud.points.real), np.sort(expected), atol=1e-10)
    assert np.abs(cloud.points.imag).max() < 1e-10


def test_frozen_esm_m1():
    frozen = LaurentSymbol.from_strings({-1: "1", 0: "2+i", 1: "x+1"}).freeze(0.5)
    cloud = frozen_esm(frozen, 1)
    assert cloud.points[0] == pytest.approx(2 + 1j)


def test_frozen_esm_consistency_in_m(ex4_symbol):
    frozen = ex4_symbol.freeze(0.25)
    w1_100_300 = sliced_w1(frozen_esm(frozen, 100), frozen_esm(frozen, 300))
    w1_300_600 = sliced_w1(frozen_esm(frozen, 300), frozen_esm(frozen, 600))
    assert w1_300_600 < w1_100_300


def test_xi_support_samples_cover_box(fig1_symbol):
    cloud = xi_support_samples(fig1_symbol, nx=50, per_interval=51)
    assert len(cloud) == 51 * 51
    assert cloud.points.real.min() == pytest.approx(-1.0, abs=1e-12)
    assert cloud.points.real.max() == pytest.approx(1.0, abs=1e-12)
    assert cloud.points.imag.min() == pytest.approx(-1.0, abs=1e-12)


def test_window_from_points():
    win = Window.from_points(PointCloud([0.0, 1.0 + 1j]), pad=0.2)
    assert win.re_min == pytest.approx(-0.2)
    assert win.re_max == pytest.approx(1.2)
    assert win.grid(3, 3).shape == (9,)
