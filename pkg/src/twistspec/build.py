"""Builders for twisted Toeplitz matrices and their random variants.

Index convention: entry (i, k) of the n x n matrix is a_{k-i}(min(i, k)/n)
with 1-based i, k, which puts c on the superdiagonal and d on the
subdiagonal for a tridiagonal symbol d z^-1 + b + c z.  This matches the
displayed matrix convention; the transposed reading gives the transpose of
our output and the same spectra.  See README for the full discussion.

Randomness: a single documented generator family (PCG64).  Every random
consumer derives its stream from (seed, purpose tag), so adding new
consumers never perturbs existing outputs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .symbols import LaurentSymbol, TridiagonalSymbol

__all__ = [
    "BandedComplexMatrix",
    "NoiseSpec",
    "SamplingPoints",
    "derive_rng",
    "build_twisted",
    "build_perturbed",
    "build_randomized",
    "sample_order_statistics",
    "principal_block",
    "principal_submatrix",
    "RNG_ALGORITHM",
]

RNG_ALGORITHM = "pcg64"


def _tag_to_int(tag: str) -> int:
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")


def derive_rng(seed: int, tag: str) -> np.random.Generator:
    """Independent PCG64 stream for (seed, purpose tag)."""
    ss = np.random.SeedSequence([seed % 2**64, _tag_to_int(tag)])
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class BandedComplexMatrix:
    """n x n complex matrix with lower bandwidth q and upper bandwidth p.

    Storage is by diagonal: offset j in [-q, p] maps to the entries
    (i, i + j), indexed by min(row, column), length n - |j|.  Offsets whose
    diagonal does not fit (|j| >= n) are dropped.
    """

    n: int
    lower: int  # q
    upper: int  # p
    diagonals: dict[int, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension must be >= 1")
        diags = {}
        for j in range(-self.lower, self.upper + 1):
            if abs(j) >= self.n:
                continue
            values = self.diagonals.get(j)
            length = self.n - abs(j)
            if values is None:
                arr = np.zeros(length, dtype=np.complex128)
            else:
                arr = np.asarray(values, dtype=np.complex128)
                if arr.shape != (length,):
                    raise ValueError(f"diagonal {j} must have length {length}")
            diags[j] = arr
        object.__setattr__(self, "diagonals", diags)

    def entry(self, i: int, k: int) -> complex:
        """Entry at 0-based (row, column)."""
        j = k - i
        if j in self.diagonals:
            return complex(self.diagonals[j][min(i, k)])
        return 0j

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n), dtype=np.complex128)
        for j, values in self.diagonals.items():
            idx = np.arange(self.n - abs(j))
            if j >= 0:
                dense[idx, idx + j] = values
            else:
                dense[idx - j, idx] = values
        return dense

    def transpose(self) -> "BandedComplexMatrix":
        return BandedComplexMatrix(
            self.n,
            self.upper,
            self.lower,
            {-j: v.copy() for j, v in self.diagonals.items()},
        )

    def max_abs(self) -> float:
        return max(float(np.abs(v).max()) for v in self.diagonals.values())

    def is_tridiagonal(self) -> bool:
        return self.lower <= 1 and self.upper <= 1


@dataclass(frozen=True)
class NoiseSpec:
    """Entry distribution for the random perturbation.

    All presets have mean 0 and finite variance:

    - ``paper-binomial``: Binomial(trials, p) - center, defaults
      Binomial(512, 0.5) - 256 with variance 128.  The center is
      overridable for reproduction experiments.
    - ``standard-normal``: N(0, 1).
    - ``rademacher``: +-1 with equal probability.
    - ``uniform-sym``: uniform on [-half_width, half_width].

    With ``complex_valued`` the entry is (a + i b)/sqrt(2) for independent
    real draws a, b, which halves the variance of each part and preserves
    the total.
    """

    distribution: str = "paper-binomial"
    complex_valued: bool = False
    binomial_trials: int = 512
    binomial_p: float = 0.5
    binomial_center: float = 256.0
    half_width: float = 1.0

    TAGS = ("paper-binomial", "standard-normal", "rademacher", "uniform-sym")

    def __post_init__(self):
        if self.distribution not in self.TAGS:
            raise ValueError(f"unknown noise distribution {self.distribution!r}")

    def variance(self) -> float:
        if self.distribution == "paper-binomial":
            return self.binomial_trials * self.binomial_p * (1.0 - self.binomial_p)
        if self.distribution == "standard-normal":
            return 1.0
        if self.distribution == "rademacher":
            return 1.0
        return self.half_width**2 / 3.0

    def _sample_real(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.distribution == "paper-binomial":
            draws = rng.binomial(self.binomial_trials, self.binomial_p, size)
            return draws.astype(np.float64) - self.binomial_center
        if self.distribution == "standard-normal":
            return rng.standard_normal(size)
        if self.distribution == "rademacher":
            return rng.integers(0, 2, size) * 2.0 - 1.0
        return rng.uniform(-self.half_width, self.half_width, size)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.complex_valued:
            re = self._sample_real(rng, size)
            im = self._sample_real(rng, size)
            return (re + 1j * im) / np.sqrt(2.0)
        return self._sample_real(rng, size).astype(np.complex128)


@dataclass(frozen=True)
class SamplingPoints:
    """Sorted uniform order statistics x_{1,n} <= ... <= x_{n,n} in [0, 1]."""

    points: np.ndarray
    seed: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if np.any(np.diff(pts) < 0):
            raise ValueError("sampling points must be nondecreasing")
        if pts.size and (pts[0] < 0.0 or pts[-1] > 1.0):
            raise ValueError("sampling points must lie in [0, 1]")
        object.__setattr__(self, "points", pts)


def _as_laurent(sym) -> LaurentSymbol:
    if isinstance(sym, TridiagonalSymbol):
        return sym.as_laurent()
    return sym


def build_twisted(sym, n: int) -> BandedComplexMatrix:
    """T_n(a) with entries a_{k-i}(min(i, k)/n), i, k = 1..n."""
    lau = _as_laurent(sym)
    if n < 1:
        raise ValueError("n must be >= 1")
    diags = {}
    for j in range(-lau.lower, lau.upper + 1):
        length = n - abs(j)
        if length < 1:
            continue
        xs = (np.arange(length) + 1.0) / n
        diags[j] = lau.coefficient_values(j, xs)
    return BandedComplexMatrix(n, lau.lower, lau.upper, diags)


def build_perturbed(
    sym, n: int, sigma: float, noise: NoiseSpec, seed: int
) -> BandedComplexMatrix:
    """R_n(a) = T_n(a) + sigma * X_n with X_n i.i.d. on every stored diagonal.

    The noise matrix has exactly the symbol's band structure.  Diagonals are
    drawn in offset order -q..p from the stream (seed, "perturbation"), so
    the output is a pure function of (sym, n, sigma, noise, seed).
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    base = build_twisted(sym, n)
    rng = derive_rng(seed, "perturbation")
    diags = {}
    for j in sorted(base.diagonals):
        draw = noise.sample(rng, base.diagonals[j].size)
        diags[j] = base.diagonals[j] + sigma * draw
    return BandedComplexMatrix(n, base.lower, base.upper, diags)


def sample_order_statistics(n: int, seed: int) -> SamplingPoints:
    """n independent Uniform[0, 1] draws, sorted ascending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = derive_rng(seed, "sampling-points")
    return SamplingPoints(np.sort(rng.uniform(0.0, 1.0, n)), seed)


def build_randomized(sym, n: int, seed: int) -> BandedComplexMatrix:
    """Twisted Toeplitz matrix with random sampling points: entry (i, k)
    equals a_{k-i}(x_{min(i,k),n}) for the order statistics drawn from seed."""
    lau = _as_laurent(sym)
    pts = sample_order_statistics(n, seed).points
    diags = {}
    for j in range(-lau.lower, lau.upper + 1):
        length = n - abs(j)
        if length < 1:
            continue
        diags[j] = lau.coefficient_values(j, pts[:length])
    return BandedComplexMatrix(n, lau.lower, lau.upper, diags)


def principal_submatrix(M: BandedComplexMatrix, start: int, stop: int) -> BandedComplexMatrix:
    """Principal submatrix on 0-based index range [start, stop)."""
    if not 0 <= start < stop <= M.n:
        raise ValueError("invalid principal submatrix range")
    size = stop - start
    diags = {}
    for j, values in M.diagonals.items():
        length = size - abs(j)
        if length < 1:
            continue
        diags[j] = values[start : start + length]
    return BandedComplexMatrix(size, min(M.lower, size - 1), min(M.upper, size - 1), diags)


def principal_block(M: BandedComplexMatrix, j: int, k: int) -> BandedComplexMatrix:
    """j-th k x k principal block (1-based j), rows/cols (j-1)k .. jk - 1."""
    if j < 1 or k < 1 or j * k > M.n:
        raise ValueError("block does not fit in the matrix")
    return principal_submatrix(M, (j - 1) * k, j * k)
