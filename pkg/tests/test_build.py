import numpy as np
import pytest

from twistspec.build import (
    BandedComplexMatrix,
    NoiseSpec,
    build_perturbed,
    build_randomized,
    build_twisted,
    derive_rng,
    principal_block,
    principal_submatrix,
    sample_order_statistics,
)
from twistspec.linalg import eigenvalues, pair_eigenvalues
from twistspec.symbols import LaurentSymbol, TridiagonalSymbol


def test_fig1_n2_exact(fig1_symbol):
    dense = build_twisted(fig1_symbol, 2).to_dense()
    np.testing.assert_allclose(dense, [[0, 0.25j], [1j, -1]], atol=1e-15)


def test_constant_symbol_gives_toeplitz():
    sym = LaurentSymbol.from_strings({-1: "2", 0: "i", 1: "1/2"})
    M = build_twisted(sym, 6)
    for j, vals in M.diagonals.items():
        assert np.all(vals == vals[0])


def test_real_symbol_gives_hermitian():
    sym = TridiagonalSymbol.from_strings(d="1+x", b="2*x", c="1+x")
    dense = build_twisted(sym, 8).to_dense()
    np.testing.assert_allclose(dense, dense.conj().T, atol=1e-15)


def test_dense_matches_entry_access(ex5_symbol):
    M = build_twisted(ex5_symbol, 7)
    dense = M.to_dense()
    for i in range(7):
        for k in range(7):
            assert dense[i, k] == M.entry(i, k)


def test_out_of_band_zero(ex4_symbol):
    dense = build_twisted(ex4_symbol, 9).to_dense()
    for i in range(9):
        for k in range(9):
            if k - i > 2 or i - k > 1:
                assert dense[i, k] == 0


def test_sigma_zero_equals_twisted(fig1_symbol):
    noise = NoiseSpec("standard-normal")
    A = build_perturbed(fig1_symbol, 12, 0.0, noise, seed=5)
    B = build_twisted(fig1_symbol, 12)
    np.testing.assert_array_equal(A.to_dense(), B.to_dense())


def test_perturbed_deterministic_in_seed(fig1_symbol):
    noise = NoiseSpec("paper-binomial")
    A = build_perturbed(fig1_symbol, 20, 0.01, noise, seed=42)
    B = build_perturbed(fig1_symbol, 20, 0.01, noise, seed=42)
    np.testing.assert_array_equal(A.to_dense(), B.to_dense())
    C = build_perturbed(fig1_symbol, 20, 0.01, noise, seed=43)
    assert not np.array_equal(A.to_dense(), C.to_dense())


def test_perturbed_band_structure(fig2_symbol):
    # fig2 has no diagonal coefficient, but the band [-1, 1] is stored and
    # therefore noised
    noise = NoiseSpec("standard-normal")
    M = build_perturbed(fig2_symbol.as_laurent(), 10, 0.1, noise, seed=0)
    assert set(M.diagonals) == {-1, 0, 1}
    assert np.any(M.diagonals[0] != 0)
    dense = M.to_dense()
    for i in range(10):
        for k in range(10):
            if abs(k - i) > 1:
                assert dense[i, k] == 0


def test_paper_binomial_moments():
    noise = NoiseSpec("paper-binomial")
    rng = derive_rng(123, "moment-test")
    draws = noise.sample(rng, 10**6).real
    assert abs(draws.mean()) < 4 * np.sqrt(128 / 10**6)
    assert abs(draws.var() - 128) < 0.02 * 128
    assert noise.variance() == 128


def test_complex_noise_variance():
    noise = NoiseSpec("standard-normal", complex_valued=True)
    rng = derive_rng(7, "moment-test")
    draws = noise.sample(rng, 200_000)
    assert abs(np.mean(draws.real)) < 0.01
    assert abs(np.var(draws.real) - 0.5) < 0.01
    assert abs(np.var(draws.imag) - 0.5) < 0.01


def test_noise_presets_centered():
    rng = derive_rng(11, "noise-presets")
    for tag in NoiseSpec.TAGS:
        spec = NoiseSpec(tag)
        draws = spec.sample(rng, 100_000).real
        assert abs(draws.mean()) < 5 * np.sqrt(spec.variance() / 100_000)


def test_binomial_center_override():
    spec = NoiseSpec("paper-binomial", binomial_center=265.0)
    rng = derive_rng(3, "center-test")
    draws = spec.sample(rng, 200_000).real
    assert abs(draws.mean() - (-9.0)) < 0.2


def test_order_statistics_sorted_sweep():
    for seed in range(1000):
        pts = sample_order_statistics(50, seed).points
        assert np.all(np.diff(pts) >= 0)
        assert pts[0] >= 0 and pts[-1] <= 1


def test_order_statistics_single_draw():
    pts = sample_order_statistics(1, 9).points
    assert pts.shape == (1,)
    assert 0 <= pts[0] <= 1


def test_randomized_constant_symbol_seed_free():
    sym = LaurentSymbol.from_strings({-1: "2", 0: "i", 1: "1/2"})
    A = build_randomized(sym, 10, seed=1).to_dense()
    B = build_randomized(sym, 10, seed=999).to_dense()
    T = build_twisted(sym, 10).to_dense()
    np.testing.assert_array_equal(A, B)
    np.testing.assert_array_equal(A, T)


def test_randomized_n1(fig1_symbol):
    M = build_randomized(fig1_symbol, 1, seed=4)
    x = sample_order_statistics(1, 4).points[0]
    assert M.to_dense()[0, 0] == pytest.approx(1 - 2 * x)


def test_randomized_diagonal_recomputation(fig1_symbol):
    n, seed = 500, 31
    M = build_randomized(fig1_symbol, n, seed)
    pts = sample_order_statistics(n, seed).points
    np.testing.assert_allclose(M.diagonals[0], 1 - 2 * pts, rtol=1e-15)
    np.testing.assert_allclose(M.diagonals[1], np.full(n - 1, 0.25j), rtol=1e-15)


def test_transpose_convention(fig1_symbol):
    # entry (i,k) = a_{i-k}(min/n) is the transpose of build_twisted
    lau = fig1_symbol.as_laurent()
    flipped = LaurentSymbol(1, 1, {-j: ast for j, ast in lau.coefficients.items()})
    n = 40
    A = build_twisted(lau, n)
    B = build_twisted(flipped, n)
    np.testing.assert_array_equal(B.to_dense(), A.to_dense().T)
    ev_a = eigenvalues(A).values
    ev_b = eigenvalues(B).values
    assert pair_eigenvalues(ev_a, ev_b) < 1e-8


def test_principal_block_matches_dense(ex5_symbol):
    M = build_twisted(ex5_symbol, 24)
    dense = M.to_dense()
    blk = principal_block(M, 2, 8)
    np.testing.assert_array_equal(blk.to_dense(), dense[8:16, 8:16])
    sub = principal_submatrix(M, 3, 14)
    np.testing.assert_array_equal(sub.to_dense(), dense[3:14, 3:14])


def test_rng_streams_independent():
    a = derive_rng(100, "alpha").standard_normal(4)
    b = derive_rng(100, "beta").standard_normal(4)
    a2 = derive_rng(100, "alpha").standard_normal(4)
    np.testing.assert_array_equal(a, a2)
    assert not np.array_equal(a, b)


def test_matrix_validation():
    with pytest.raises(ValueError):
        BandedComplexMatrix(3, 1, 1, {0: np.zeros(2)})
    with pytest.raises(ValueError):
        build_twisted(TridiagonalSymbol.from_strings("1", "0", "1"), 0)
