"""Twisted Toeplitz spectra under structured random perturbations.

Library layout:

- :mod:`twistspec.exprparse`: expression language for coefficient functions
- :mod:`twistspec.symbols`: Laurent symbols, ranges, support intervals
- :mod:`twistspec.build`: matrix builders (deterministic, perturbed,
  randomized sampling points)
- :mod:`twistspec.linalg`: eigenvalues, banded log-determinants, block
  determinant identity
- :mod:`twistspec.potential`: continuants, frozen potentials, transfer
  diagnostics
- :mod:`twistspec.limits`: arcsine mixtures, Schmidt-Spitzer sets, frozen
  spectra
- :mod:`twistspec.measures`: point clouds and distances
- :mod:`twistspec.cli`: experiment runner and figure reproduction
"""

from .build import (
    BandedComplexMatrix,
    NoiseSpec,
    SamplingPoints,
    build_perturbed,
    build_randomized,
    build_twisted,
    sample_order_statistics,
)
from .exprparse import DomainError, ParseError, eval_expr, format_expr, parse_expr
from .limits import arcsine_sample, frozen_esm, mu_sample, schmidt_spitzer_set
from .linalg import Spectrum, block_det, eigenvalues, hessenberg_reduce, log_abs_det
from .measures import EmpiricalMeasure, PointCloud, esm, hausdorff, sliced_w1
from .potential import (
    FrozenSymbol,
    cone_diagnostics,
    continuant_log_det,
    frozen_gamma,
    gamma_field,
    integrated_gamma,
    theta_ratio,
)
from .symbols import (
    ComplexInterval,
    LaurentSymbol,
    TridiagonalSymbol,
    eval_symbol,
    symbol_range,
    xi_support_tridiagonal,
)

__version__ = "0.1.0"
