import numpy as np
import pytest

from conftest import random_tridiagonal
from twistspec.build import NoiseSpec, build_perturbed, build_twisted
from twistspec.linalg import log_abs_det
from twistspec.potential import (
    FrozenSymbol,
    cone_diagnostics,
    continuant_log_det,
    continuant_trace,
    frozen_gamma,
    gamma_field,
    gamma_profile,
    integrated_gamma,
    sigma_margins,
    theta_ratio,
)
from twistspec.symbols import TridiagonalSymbol


def tridiag_011(n):
    return build_twisted(TridiagonalSymbol.from_strings(d="1", b="0", c="1"), n)


# --- continuants -------------------------------------------------------------


def test_continuant_hand_recurrence():
    # b = 0, c = d = 1, z = 0: D_1 = 0, D_2 = -1, D_3 = 0
    M = tridiag_011(3)
    assert continuant_log_det(M, 0.0) == -np.inf
    trace = continuant_trace(M, 0.0)
    assert trace.log_det == -np.inf
    # D_2 = -1 while D_1 = 0: the k = 2 state is (-1, 0) up to scale
    state = trace.states[2] * np.exp(trace.log_scales[2])
    np.testing.assert_allclose(state, [-1.0, 0.0], atol=1e-15)


def test_continuant_n1():
    M = build_twisted(TridiagonalSymbol.from_strings(d="0", b="2+i", c="0"), 1)
    z = 5.0 - 1.0j
    assert continuant_log_det(M, z) == pytest.approx(np.log(abs(z - (2 + 1j))))


def test_continuant_matches_lu():
    rng = np.random.default_rng(21)
    M = random_tridiagonal(rng, 500)
    for z in (3 + 2j, -1 - 4j, 0.3 + 0.1j):
        assert continuant_log_det(M, z) == pytest.approx(
            log_abs_det(M, z), abs=1e-8
        )


def test_continuant_no_overflow():
    # |D_k| ~ rho^k would overflow near k ~ 700 without rescaling
    M = tridiag_011(5000)
    out = continuant_log_det(M, 10.0)
    assert np.isfinite(out)
    assert out == pytest.approx(5000 * frozen_gamma(FrozenSymbol(0, 1, 1), 10.0), rel=1e-3)


def test_trace_reconstruction_vs_lu():
    rng = np.random.default_rng(22)
    M = random_tridiagonal(rng, 500)
    z = 2.5 + 2.5j
    trace = continuant_trace(M, z)
    reference = log_abs_det(M, z)
    reconstructed = trace.log_scales[-1] + np.log(abs(trace.states[-1, 0]))
    assert reconstructed == pytest.approx(trace.log_det)
    assert abs(trace.log_det - reference) <= 1e-10 * max(abs(reference), 1.0)


def test_trace_growth_ratios_constant_symbol():
    M = tridiag_011(50)
    trace = continuant_trace(M, 3.0)
    rho = max(abs(r) for r in np.roots([1, -3, 1]))
    # ratios approach the dominant root modulus
    np.testing.assert_allclose(trace.ratios[-10:], rho, rtol=1e-6)


# --- frozen gamma ------------------------------------------------------------


def test_frozen_gamma_values():
    f = FrozenSymbol(0, 1, 1)
    assert frozen_gamma(f, 3.0) == pytest.approx(np.log((3 + np.sqrt(5)) / 2))
    assert frozen_gamma(f, 0.0) == pytest.approx(0.0)
    assert frozen_gamma(FrozenSymbol(0, 2, 0.5), 0.0) == pytest.approx(0.0)


def test_frozen_gamma_degenerate_branches():
    f = FrozenSymbol(1 + 1j, 0, 2.0)  # c0 = 0: triangular
    assert frozen_gamma(f, 3.0) == pytest.approx(np.log(abs(3 - (1 + 1j))))
    assert frozen_gamma(FrozenSymbol(2.0, 1.0, 0.0), 2.0) == -np.inf


def test_transfer_roots_invariants():
    rng = np.random.default_rng(23)
    for _ in range(200):
        b0, c0, d0, z = (
            complex(*rng.standard_normal(2)),
            complex(*rng.standard_normal(2)),
            complex(*rng.standard_normal(2)),
            complex(*rng.standard_normal(2)),
        )
        if abs(c0) < 1e-3:
            continue
        f = FrozenSymbol(b0, c0, d0)
        x1, x2 = f.transfer_roots(z)
        assert abs(x1) >= abs(x2)
        np.testing.assert_allclose(x1 * x2, d0 / c0, atol=1e-10)
        np.testing.assert_allclose(x1 + x2, (z - b0) / c0, atol=1e-10)


def test_gamma_equals_arcsine_potential_closed_form():
    rng = np.random.default_rng(24)
    count = 0
    while count < 10_000:
        b0, c0, d0, z = (
            complex(*rng.standard_normal(2)),
            complex(*rng.standard_normal(2)),
            complex(*rng.standard_normal(2)),
            complex(*2 * rng.standard_normal(2)),
        )
        if abs(c0) < 1e-6 or abs(d0) < 1e-6:
            continue
        count += 1
        zeta = z - b0
        w2 = 4 * d0 * c0
        sq = np.sqrt(zeta * zeta - w2 + 0.0)
        closed = max(abs(zeta + sq), abs(zeta - sq))
        if closed == 0:
            continue
        expected = np.log(closed) - np.log(2.0)
        assert frozen_gamma(FrozenSymbol(b0, c0, d0), z) == pytest.approx(
            expected, abs=1e-12
        )


def test_gamma_field_constant_symbol():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    for x in (0.0, 0.33, 1.0):
        assert gamma_field(sym, x, 3.0) == pytest.approx(
            frozen_gamma(FrozenSymbol(0, 1, 1), 3.0)
        )


def test_gamma_far_field(fig1_symbol):
    assert gamma_field(fig1_symbol, 0.5, 10.0) == pytest.approx(np.log(10), abs=0.02)


def test_gamma_profile_matches_scalar(fig1_symbol):
    xs = np.linspace(0, 1, 11)
    profile = gamma_profile(fig1_symbol, xs, 2 + 1j)
    for x, val in zip(xs, profile):
        assert val == pytest.approx(gamma_field(fig1_symbol, float(x), 2 + 1j))


# --- integrated gamma --------------------------------------------------------


def test_integrated_gamma_constant_symbol():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    expected = frozen_gamma(FrozenSymbol(0, 1, 1), 2.7 + 0.4j)
    assert integrated_gamma(sym, 2.7 + 0.4j) == pytest.approx(expected, abs=1e-10)


def test_integrated_gamma_far_field(fig1_symbol):
    assert integrated_gamma(fig1_symbol, 1e6) == pytest.approx(np.log(1e6), abs=1e-3)


def test_integrated_gamma_monte_carlo_oracle(fig1_symbol):
    from twistspec.limits import mu_sample

    z = 5.0
    samples = mu_sample(fig1_symbol, 10**6, seed=2026).points
    oracle = float(np.mean(np.log(np.abs(samples - z))))
    assert integrated_gamma(fig1_symbol, z) == pytest.approx(oracle, abs=3e-3)


def test_integrated_gamma_node_counts(fig1_symbol):
    z = 3.0 + 1.0j
    reference = integrated_gamma(fig1_symbol, z, nodes=2001)
    for nodes in (2, 3, 4, 101, 400, 401):
        got = integrated_gamma(fig1_symbol, z, nodes=nodes)
        tol = 0.05 if nodes < 10 else 1e-6
        assert got == pytest.approx(reference, abs=tol)


def test_riemann_sum_consistency(fig1_symbol):
    z = 2.5 + 1.5j
    n = 10_000
    k = int(np.sqrt(n))
    m = n // k
    xs = np.arange(1, m + 1) * k / n
    riemann = (k / n) * np.sum(gamma_profile(fig1_symbol, xs, z))
    assert abs(riemann - integrated_gamma(fig1_symbol, z)) < 0.01


# --- theorem 2.1 at desk scale (reduced version; full run in acceptance) -----


def test_perturbed_potential_near_gamma():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    f = FrozenSymbol(0, 1, 1)
    n = 2000
    noise = NoiseSpec("uniform-sym")
    zs = [2.5, -2.5, 0.8j + 2.2, 1.5j]
    for seed in range(5):
        P = build_perturbed(sym, n, n**-0.5, noise, seed)
        for z in zs:
            err = abs(continuant_log_det(P, complex(z)) / n - frozen_gamma(f, complex(z)))
            assert err < 0.05


# --- cone diagnostics --------------------------------------------------------


def test_cone_unperturbed_exact():
    M = tridiag_011(400)
    f = FrozenSymbol(0, 1, 1)
    report = cone_diagnostics(M, f, 3.0 + 0.5j)
    assert report.delta_hat < 1e-12
    np.testing.assert_allclose(report.ratios, report.rho, rtol=1e-12)
    assert report.cone_preserved
    assert report.ratios_in_band


def test_cone_small_perturbation():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    f = FrozenSymbol(0, 1, 1)
    noise = NoiseSpec("uniform-sym")
    for seed in range(5):
        P = build_perturbed(sym, 400, 1e-3, noise, seed)
        report = cone_diagnostics(P, f, 2.8 + 0.3j)
        assert report.gap_condition_met
        assert report.cone_preserved
        assert report.ratios_in_band


def test_cone_large_perturbation_reported_not_raised():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    f = FrozenSymbol(0, 1, 1)
    P = build_perturbed(sym, 200, 1.5, NoiseSpec("uniform-sym"), seed=1)
    report = cone_diagnostics(P, f, 2.8 + 0.3j)
    assert not report.gap_condition_met  # out of hypothesis, still observable
    assert report.ratios.shape == (200,)


def test_cone_rejects_on_limit_set():
    M = tridiag_011(50)
    with pytest.raises(ValueError, match="limiting set"):
        cone_diagnostics(M, FrozenSymbol(0, 1, 1), 1.0)  # inside [-2, 2]


def test_cone_rejects_zero_c0():
    M = tridiag_011(10)
    with pytest.raises(ValueError):
        cone_diagnostics(M, FrozenSymbol(0, 0, 1), 3.0)


# --- theta ratio -------------------------------------------------------------


def test_theta_ratio_constant_symbol():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    out = theta_ratio(sym, 400, 200, 1, 3.0)
    predicted = ((3 + np.sqrt(5)) / 2) ** -2
    assert out.predicted == pytest.approx(predicted)
    assert abs(out.value - out.predicted) < 2e-2


def test_theta_far_field():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    out = theta_ratio(sym, 200, 100, 1, 1000.0)
    assert abs(out.value) < 1e-4


def test_theta_rejects_on_sigma():
    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    with pytest.raises(ValueError, match="exceptional set"):
        theta_ratio(sym, 400, 200, 1, 1.0)


def test_sigma_margins(fig1_symbol):
    gap, unit = sigma_margins(fig1_symbol, 4.0 + 2.0j)
    assert gap > 1e-3 and unit > 1e-3
