"""Predicted limiting objects: arcsine mixtures, support sets, and frozen
empirical spectra.

The tridiagonal limit measure is the uniform-in-x mixture of arcsine
measures on the intervals [b(x) - 2 sqrt(d c)(x), b(x) + 2 sqrt(d c)(x)];
its support is the union of those intervals.  For banded symbols the
limiting set of a frozen Toeplitz matrix is located on the grid by the
equal-modulus criterion for the q-th and (q+1)-th modulus-ordered roots of
z^q (a_x(z) - lambda), and the frozen limit measures are approximated by
the spectra of finite Toeplitz sections (m = 300 by default).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .build import BandedComplexMatrix, derive_rng
from .linalg import ConvergenceError, eigenvalues, polynomial_roots
from .measures import PointCloud, padded_bbox
from .symbols import FrozenLaurentSymbol, TridiagonalSymbol, xi_support_tridiagonal

__all__ = [
    "Window",
    "arcsine_sample",
    "mu_sample",
    "xi_support_samples",
    "schmidt_spitzer_set",
    "frozen_esm",
    "root_modulus_gap",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @classmethod
    def from_points(cls, points, pad: float = 0.2) -> "Window":
        return cls(*padded_bbox(points, pad))

    def grid(self, n_re: int, n_im: int) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, n_re)
        im = np.linspace(self.im_min, self.im_max, n_im)
        return (re[:, None] + 1j * im[None, :]).ravel()

    def cell_diagonal(self, n_re: int, n_im: int) -> float:
        dre = (self.re_max - self.re_min) / max(n_re - 1, 1)
        dim = (self.im_max - self.im_min) / max(n_im - 1, 1)
        return math.hypot(dre, dim)


def _half_width(c: complex, d: complex) -> complex:
    return 2.0 * np.sqrt(complex(d * c) + 0.0)


def arcsine_sample(
    b: complex, c: complex, d: complex, count: int, seed: int
) -> PointCloud:
    """count i.i.d. draws b + 2 sqrt(d c) cos(pi U), U ~ Uniform[0, 1].

    Principal branch for the half-width; the sampled set is invariant under
    the branch choice.  d*c = 0 collapses to count copies of b.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = derive_rng(seed, "arcsine")
    u = rng.uniform(0.0, 1.0, count)
    return PointCloud(complex(b) + _half_width(c, d) * np.cos(np.pi * u))


def mu_sample(sym: TridiagonalSymbol, count: int, seed: int) -> PointCloud:
    """Sample the mixture measure: X ~ Uniform[0, 1], then an arcsine point
    on the interval frozen at x = X."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = derive_rng(seed, "mu-mixture")
    xs = rng.uniform(0.0, 1.0, count)
    u = rng.uniform(0.0, 1.0, count)
    b, c, d = sym.coefficient_arrays(xs)
    w = 2.0 * np.sqrt(d * c + 0.0)
    return PointCloud(b + w * np.cos(np.pi * u))


def xi_support_samples(
    sym: TridiagonalSymbol, nx: int = 200, per_interval: int = 101
) -> PointCloud:
    """Dense deterministic sampling of the support: the union over the x
    grid of the predicted intervals."""
    intervals = xi_support_tridiagonal(sym, nx)
    pts = np.concatenate([iv.sample(per_interval) for iv in intervals])
    return PointCloud(pts)


def _effective_coefficients(frozen: FrozenLaurentSymbol) -> np.ndarray:
    """Ascending coefficients of z^q a(z) with identically-zero leading
    powers trimmed away (roots dropped to infinity do not affect the
    ordering of the q-th and (q+1)-th moduli)."""
    base = frozen.polynomial_coefficients()
    q = frozen.lower
    while base.size > q + 2 and base[-1] == 0:
        base = base[:-1]
    return base


def root_modulus_gap(frozen: FrozenLaurentSymbol, lam: complex) -> float:
    """Relative modulus gap between the q-th and (q+1)-th modulus-ordered
    roots of z^q (a(z) - lambda); zero exactly on the limiting set."""
    coeffs = _effective_coefficients(frozen).copy()
    coeffs[frozen.lower] -= lam
    if coeffs[-1] == 0:
        raise ValueError("degenerate leading coefficient")
    moduli = np.sort(np.abs(polynomial_roots(coeffs)))
    m1, m2 = moduli[frozen.lower - 1], moduli[frozen.lower]
    if m2 == 0.0:
        return 0.0
    return float((m2 - m1) / m2)


def schmidt_spitzer_set(
    frozen: FrozenLaurentSymbol,
    window: Window,
    grid: tuple[int, int] = (400, 400),
    tol: float = 0.02,
) -> PointCloud:
    """Grid approximation of the limiting eigenvalue set of the frozen
    banded Toeplitz matrix.

    For each grid lambda the p + q roots of z^q (a(z) - lambda) are computed
    through companion-matrix eigenvalues and lambda is retained when the
    relative gap between the q-th and (q+1)-th modulus-ordered roots falls
    below tol.  Grid points with a degenerate leading coefficient are
    skipped (counted and logged).
    """
    p, q = frozen.upper, frozen.lower
    if p < 1 or q < 1:
        raise ValueError("need p >= 1 and q >= 1")
    base = _effective_coefficients(frozen)
    if base[-1] == 0:
        logger.warning("leading coefficient vanishes; every grid point skipped")
        return PointCloud(np.zeros(0, dtype=np.complex128))
    lams = window.grid(*grid)
    retained = []
    chunk = 16384
    for start in range(0, lams.size, chunk):
        block = lams[start : start + chunk]
        coeffs = np.broadcast_to(base, (block.size, base.size)).copy()
        coeffs[:, q] -= block
        moduli = np.sort(np.abs(polynomial_roots(coeffs)), axis=1)
        m1 = moduli[:, q - 1]
        m2 = moduli[:, q]
        with np.errstate(invalid="ignore", divide="ignore"):
            gap = np.where(m2 == 0.0, 0.0, (m2 - m1) / np.where(m2 == 0.0, 1.0, m2))
        retained.append(block[gap < tol])
    return PointCloud(np.concatenate(retained))


def default_window(range_cloud, pad: float = 0.2) -> Window:
    """Search window from the sampled symbol range, padded by 20 percent."""
    return Window.from_points(range_cloud, pad)


def frozen_esm(frozen: FrozenLaurentSymbol, m: int = 300) -> PointCloud:
    """Eigenvalues of the m x m Toeplitz matrix with the frozen symbol,
    the empirical stand-in for the frozen limit measure."""
    if m < 1:
        raise ValueError("m must be >= 1")
    diags = {}
    for j in range(-frozen.lower, frozen.upper + 1):
        length = m - abs(j)
        if length < 1:
            continue
        diags[j] = np.full(length, frozen.coefficient(j), dtype=np.complex128)
    matrix = BandedComplexMatrix(m, frozen.lower, frozen.upper, diags)
    spectrum = eigenvalues(matrix)
    if not spectrum.all_converged:
        raise ConvergenceError("frozen Toeplitz eigensolve did not converge")
    return PointCloud(spectrum.values)
