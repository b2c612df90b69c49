"""Laurent-polynomial symbols a(x, z) and their derived sets.

A symbol is a finite Laurent polynomial in z whose coefficients are
expressions in x on [0, 1].  The k-th Fourier coefficient of a Laurent
polynomial is the coefficient itself, so no numerical integration is needed
anywhere.  Tridiagonal symbols d(x) z^-1 + b(x) + c(x) z get a dedicated
type together with the support set built from intervals
[b(x) - 2 sqrt(d(x) c(x)), b(x) + 2 sqrt(d(x) c(x))].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprparse import ExprAst, eval_expr, eval_expr_array, format_expr, parse_expr
from .measures import PointCloud

__all__ = [
    "LaurentSymbol",
    "TridiagonalSymbol",
    "FrozenLaurentSymbol",
    "ComplexInterval",
    "eval_symbol",
    "symbol_range",
    "xi_support_tridiagonal",
]


@dataclass(frozen=True)
class FrozenLaurentSymbol:
    """A symbol with x fixed: constant complex coefficients per power."""

    lower: int
    upper: int
    coefficients: dict[int, complex]

    def coefficient(self, j: int) -> complex:
        return self.coefficients.get(j, 0j)

    def polynomial_coefficients(self, shift: complex = 0j) -> np.ndarray:
        """Ascending coefficients of z^q * (a(z) - shift), degree p + q."""
        coeffs = np.zeros(self.upper + self.lower + 1, dtype=np.complex128)
        for j, v in self.coefficients.items():
            coeffs[j + self.lower] = v
        coeffs[self.lower] -= shift
        return coeffs


@dataclass(frozen=True)
class LaurentSymbol:
    """Symbol a(x, z) = sum_{j=-q}^{p} a_j(x) z^j with expression coefficients.

    Missing powers are identically zero; the band [-q, p] itself is part of
    the symbol (it fixes the band structure of every matrix built from it).
    """

    lower: int  # q >= 0
    upper: int  # p >= 0
    coefficients: dict[int, ExprAst]

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError("band orders must be nonnegative")
        if self.lower + self.upper < 1:
            raise ValueError("need p + q >= 1")
        for j in self.coefficients:
            if not -self.lower <= j <= self.upper:
                raise ValueError(f"coefficient power {j} outside [-q, p]")

    @classmethod
    def from_strings(cls, coefficients: dict[int, str]) -> "LaurentSymbol":
        parsed = {j: parse_expr(src) for j, src in coefficients.items()}
        lower = max(0, -min(parsed)) if parsed else 0
        upper = max(0, max(parsed)) if parsed else 0
        return cls(lower, upper, parsed)

    def coefficient(self, j: int) -> ExprAst | None:
        return self.coefficients.get(j)

    def coefficient_values(self, j: int, xs: np.ndarray) -> np.ndarray:
        ast = self.coefficients.get(j)
        if ast is None:
            return np.zeros(np.shape(xs), dtype=np.complex128)
        return eval_expr_array(ast, xs)

    def freeze(self, x: float) -> FrozenLaurentSymbol:
        values = {j: eval_expr(ast, x) for j, ast in self.coefficients.items()}
        return FrozenLaurentSymbol(self.lower, self.upper, values)

    def as_strings(self) -> dict[int, str]:
        return {j: format_expr(ast) for j, ast in self.coefficients.items()}


@dataclass(frozen=True)
class TridiagonalSymbol:
    """a(x, z) = d(x) z^-1 + b(x) + c(x) z."""

    d: ExprAst
    b: ExprAst
    c: ExprAst

    @classmethod
    def from_strings(cls, d: str, b: str, c: str) -> "TridiagonalSymbol":
        return cls(parse_expr(d), parse_expr(b), parse_expr(c))

    def as_laurent(self) -> LaurentSymbol:
        return LaurentSymbol(1, 1, {-1: self.d, 0: self.b, 1: self.c})

    def coefficients_at(self, x: float) -> tuple[complex, complex, complex]:
        """(b0, c0, d0) at a fixed sampling point."""
        return eval_expr(self.b, x), eval_expr(self.c, x), eval_expr(self.d, x)

    def coefficient_arrays(self, xs: np.ndarray):
        return (
            eval_expr_array(self.b, xs),
            eval_expr_array(self.c, xs),
            eval_expr_array(self.d, xs),
        )


@dataclass(frozen=True)
class ComplexInterval:
    """Segment {center + t * half_width : t in [-1, 1]} in the plane.

    Flipping the sign of half_width represents the same set.
    """

    center: complex
    half_width: complex

    def sample(self, count: int) -> np.ndarray:
        t = np.linspace(-1.0, 1.0, count)
        return self.center + t * self.half_width

    def endpoints(self) -> tuple[complex, complex]:
        return self.center - self.half_width, self.center + self.half_width


def _as_laurent(sym) -> LaurentSymbol:
    if isinstance(sym, TridiagonalSymbol):
        return sym.as_laurent()
    return sym


def eval_symbol(sym, x: float, z: complex) -> complex:
    """a(x, z) = sum_j a_j(x) z^j for z on (or off) the unit circle, z != 0."""
    if z == 0:
        raise ValueError("symbol evaluation requires z != 0")
    lau = _as_laurent(sym)
    total = 0j
    for j, ast in lau.coefficients.items():
        total += eval_expr(ast, x) * z**j
    return total


def symbol_range(sym, nx: int, nt: int) -> PointCloud:
    """Sample a(x_r, e^{i t_s}) on the uniform grid x_r = r/nx (r = 0..nx),
    t_s = 2 pi s / nt (s = 0..nt-1).  Cloud size (nx + 1) * nt."""
    if nx < 1 or nt < 1:
        raise ValueError("nx and nt must be >= 1")
    lau = _as_laurent(sym)
    xs = np.arange(nx + 1) / nx
    zs = np.exp(2j * np.pi * np.arange(nt) / nt)
    values = np.zeros((nx + 1, nt), dtype=np.complex128)
    for j, ast in lau.coefficients.items():
        values += np.outer(eval_expr_array(ast, xs), zs**j)
    return PointCloud(values.ravel())


def _principal_half_width(dc: np.ndarray) -> np.ndarray:
    # +0.0 keeps the principal branch on the negative real axis.
    return 2.0 * np.sqrt(dc + 0.0)


def xi_support_tridiagonal(sym: TridiagonalSymbol, nx: int) -> list[ComplexInterval]:
    """Support intervals of the limit measure on the grid x_r = r/nx.

    Returns an interval with center b(x_r) and half-width 2 sqrt(d c)(x_r)
    for each r = 0..nx; d*c = 0 gives a degenerate (point) interval.
    """
    if nx < 1:
        raise ValueError("nx must be >= 1")
    xs = np.arange(nx + 1) / nx
    b, c, d = sym.coefficient_arrays(xs)
    w = _principal_half_width(d * c)
    return [ComplexInterval(complex(b[r]), complex(w[r])) for r in range(nx + 1)]
