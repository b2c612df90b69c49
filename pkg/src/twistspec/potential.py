"""Logarithmic potentials via continuant recurrences and transfer matrices.

For a tridiagonal matrix the characteristic polynomial of the leading k x k
block satisfies the three-term recurrence

    D_k = (z - b_k) D_{k-1} - d_{k-1} c_{k-1} D_{k-2},   D_{-1} = 0, D_0 = 1.

|D_k| grows like rho^k and overflows double precision near k ~ 700, so the
recurrence is always run in rescaled form: a unit max-norm state pair plus
an accumulated log-scale.

The frozen-symbol potential is

    gamma(z) = log|c0| + log max(|xi1(z)|, |xi2(z)|)

with xi1, xi2 the roots of c0 w^2 + (b0 - z) w + d0 = 0, which simplifies to
log|zeta + sqrt(zeta^2 - 4 d0 c0)| - log 2 for zeta = z - b0 and the branch
of maximal modulus (the log-potential of the arcsine measure on the interval
of half-width 2 sqrt(d0 c0) around b0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .build import BandedComplexMatrix, build_twisted, principal_submatrix
from .symbols import TridiagonalSymbol

__all__ = [
    "FrozenSymbol",
    "ContinuantTrace",
    "ConeReport",
    "ThetaRatio",
    "continuant_log_det",
    "continuant_trace",
    "frozen_gamma",
    "gamma_field",
    "gamma_profile",
    "integrated_gamma",
    "cone_diagnostics",
    "theta_ratio",
    "sigma_margins",
    "SIGMA_MARGIN",
]

# Grid screen: z counts as off Sigma when both margins exceed this value.
SIGMA_MARGIN = 1e-3


@dataclass(frozen=True)
class FrozenSymbol:
    """Constant tridiagonal symbol d0 z^-1 + b0 + c0 z."""

    b0: complex
    c0: complex
    d0: complex

    @classmethod
    def from_symbol(cls, sym: TridiagonalSymbol, x: float) -> "FrozenSymbol":
        b0, c0, d0 = sym.coefficients_at(x)
        return cls(b0, c0, d0)

    def transfer_roots(self, z: complex) -> tuple[complex, complex]:
        """Roots of c0 w^2 + (b0 - z) w + d0 = 0 with |xi1| >= |xi2|.

        These are the eigenvalues of the continuant transfer matrix; they
        satisfy xi1 xi2 = d0/c0 and xi1 + xi2 = (z - b0)/c0.
        """
        if self.c0 == 0:
            raise ValueError("transfer roots need c0 != 0")
        A, B, C = self.c0, self.b0 - z, self.d0
        sq = np.sqrt(complex(B * B - 4.0 * A * C) + 0.0)
        # Pick the sign that avoids cancellation in B + sq.
        if abs(B + sq) < abs(B - sq):
            sq = -sq
        q = -0.5 * (B + sq)
        if q == 0:
            return 0j, 0j
        r1 = q / A
        r2 = C / q
        if abs(r1) >= abs(r2):
            return complex(r1), complex(r2)
        return complex(r2), complex(r1)


# ---------------------------------------------------------------------------
# Rescaled continuant recurrence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuantTrace:
    """Full rescaled history: states[k] is the unit max-norm pair
    (D_k, D_{k-1}) and the true pair equals exp(log_scales[k]) * states[k].
    ratios[k-1] is the growth factor |D_k| / |D_{k-1}|."""

    states: np.ndarray
    log_scales: np.ndarray
    ratios: np.ndarray
    log_det: float


def _tridiagonal_parts(M: BandedComplexMatrix):
    if not M.is_tridiagonal():
        raise ValueError("continuant recurrence requires a tridiagonal matrix")
    diag = M.diagonals.get(0)
    b = diag.tolist() if diag is not None else [0j] * M.n
    sup = M.diagonals.get(1)
    sub = M.diagonals.get(-1)
    c = sup.tolist() if sup is not None else [0j] * max(M.n - 1, 0)
    d = sub.tolist() if sub is not None else [0j] * max(M.n - 1, 0)
    return b, c, d


def _continuant_logmag_phase(zb: list, dc: list) -> tuple[float, complex]:
    """log-magnitude and phase of the final continuant for steps
    G_k = zb[k-1] G_{k-1} - dc[k-2] G_{k-2}."""
    cur, prev = 1.0 + 0j, 0j
    scale = 0.0
    for k in range(1, len(zb) + 1):
        new = zb[k - 1] * cur
        if k >= 2:
            new -= dc[k - 2] * prev
        m = max(abs(new), abs(cur))
        if m == 0.0:
            return -math.inf, 0j
        prev = cur / m
        cur = new / m
        scale += math.log(m)
    mag = abs(cur)
    if mag == 0.0:
        return -math.inf, 0j
    return scale + math.log(mag), cur / mag


def continuant_log_det(M: BandedComplexMatrix, z: complex) -> float:
    """log|det(M - zI)| for tridiagonal M via the O(n) continuant
    recurrence (signs drop under the absolute value)."""
    b, c, d = _tridiagonal_parts(M)
    zb = [z - v for v in b]
    dc = [c[m] * d[m] for m in range(M.n - 1)]
    logmag, _ = _continuant_logmag_phase(zb, dc)
    return logmag


def continuant_trace(M: BandedComplexMatrix, z: complex) -> ContinuantTrace:
    """Rescaled continuant run with the full normalized history retained."""
    b, c, d = _tridiagonal_parts(M)
    n = M.n
    zb = [z - v for v in b]
    dc = [c[m] * d[m] for m in range(n - 1)]
    states = np.zeros((n + 1, 2), dtype=np.complex128)
    scales = np.zeros(n + 1)
    ratios = np.zeros(n)
    states[0] = (1.0, 0.0)
    cur, prev = 1.0 + 0j, 0j
    scale = 0.0
    dead = False
    for k in range(1, n + 1):
        if dead:
            scales[k] = -math.inf
            continue
        new = zb[k - 1] * cur
        if k >= 2:
            new -= dc[k - 2] * prev
        ratios[k - 1] = abs(new) / abs(cur) if cur != 0 else math.inf
        m = max(abs(new), abs(cur))
        if m == 0.0:
            dead = True
            scales[k] = -math.inf
            continue
        prev = cur / m
        cur = new / m
        scale += math.log(m)
        states[k] = (cur, prev)
        scales[k] = scale
    if dead or cur == 0:
        log_det = -math.inf
    else:
        log_det = scale + math.log(abs(cur))
    return ContinuantTrace(states, scales, ratios, log_det)


# ---------------------------------------------------------------------------
# Frozen-symbol potential gamma and its field over x
# ---------------------------------------------------------------------------


def _log_abs(value: complex) -> float:
    mag = abs(value)
    return math.log(mag) if mag > 0 else -math.inf


def frozen_gamma(f: FrozenSymbol, z: complex) -> float:
    """gamma(z) = log|c0| + log max(|xi1|, |xi2|); for c0 = 0 the frozen
    matrix is triangular and gamma(z) = log|z - b0|."""
    if f.c0 == 0:
        return _log_abs(z - f.b0)
    zeta = z - f.b0
    sq = np.sqrt(complex(zeta * zeta - 4.0 * f.d0 * f.c0) + 0.0)
    big = max(abs(zeta + sq), abs(zeta - sq))
    if big == 0.0:
        return -math.inf
    return math.log(big) - math.log(2.0)


def gamma_field(sym: TridiagonalSymbol, x: float, z: complex) -> float:
    """gamma of the symbol frozen at x."""
    return frozen_gamma(FrozenSymbol.from_symbol(sym, x), z)


def gamma_profile(sym: TridiagonalSymbol, xs: np.ndarray, z: complex) -> np.ndarray:
    """Vectorized gamma(x, z) over an array of x values."""
    xs = np.asarray(xs, dtype=np.float64)
    b, c, d = sym.coefficient_arrays(xs)
    zeta = z - b
    sq = np.sqrt((zeta * zeta - 4.0 * d * c) + 0.0)
    big = np.maximum(np.abs(zeta + sq), np.abs(zeta - sq))
    with np.errstate(divide="ignore"):
        general = np.log(big) - math.log(2.0)
        degenerate = np.log(np.abs(zeta))
    return np.where(c == 0, degenerate, general)


def _simpson_weights(nodes: int) -> np.ndarray:
    """Composite Simpson weights on a uniform grid (already including the
    spacing h = 1/(nodes-1)); odd interval counts use a 3/8 tail."""
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    h = 1.0 / (nodes - 1)
    if nodes == 2:
        return np.array([0.5, 0.5]) * h
    w = np.zeros(nodes)
    intervals = nodes - 1
    if intervals % 2 == 0:
        w[0] = w[-1] = 1.0 / 3.0
        w[1:-1:2] = 4.0 / 3.0
        w[2:-1:2] = 2.0 / 3.0
    else:
        m = intervals - 3  # even
        if m > 0:
            w[0] = 1.0 / 3.0
            w[1:m:2] = 4.0 / 3.0
            w[2:m:2] = 2.0 / 3.0
            w[m] = 1.0 / 3.0
        w[m : m + 4] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    return w * h


def integrated_gamma(sym: TridiagonalSymbol, z: complex, nodes: int = 401) -> float:
    """Composite Simpson quadrature of t -> gamma(t, z) over [0, 1].

    Propagates -inf if any node hits a singular value; perturb z in that
    case."""
    xs = np.linspace(0.0, 1.0, nodes)
    values = gamma_profile(sym, xs, z)
    if np.any(np.isneginf(values)):
        return -math.inf
    return float(np.dot(_simpson_weights(nodes), values))


# ---------------------------------------------------------------------------
# Cone-invariance diagnostics for the conjugated transfer recurrence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeReport:
    """Per-step growth of the conjugated recurrence Y_k = B_k Y_{k-1}."""

    ratios: np.ndarray
    cone_ok: np.ndarray
    delta_hat: float
    rho: float
    eta: float

    @property
    def band(self) -> tuple[float, float]:
        return (self.rho - 2.0 * self.delta_hat, self.rho + 2.0 * self.delta_hat)

    @property
    def cone_preserved(self) -> bool:
        return bool(np.all(self.cone_ok))

    @property
    def ratios_in_band(self) -> bool:
        lo, hi = self.band
        slack = 64.0 * np.finfo(float).eps * max(self.rho, 1.0)
        return bool(np.all((self.ratios >= lo - slack) & (self.ratios <= hi + slack)))

    @property
    def gap_condition_met(self) -> bool:
        return self.delta_hat < min(self.rho / 4.0, (self.rho - self.eta) / 4.0)


def cone_diagnostics(M: BandedComplexMatrix, f: FrozenSymbol, z: complex) -> ConeReport:
    """Run the diagonalized transfer recurrence from Y_0 = (1, -1)/(xi1-xi2)
    and report growth ratios, cone membership |v_k| <= |u_k|, and the
    measured perturbation amplitude delta_hat = max_k max-entry |E_k|.

    Rejects z on the frozen limiting set (|xi1| = |xi2|) and requires
    c0 != 0; the index conveniences d_0 := d0 and c_n := c0 extend the
    matrix entries at the boundary.
    """
    if f.c0 == 0:
        raise ValueError("cone diagnostics need c0 != 0")
    xi1, xi2 = f.transfer_roots(z)
    rho, eta = abs(xi1), abs(xi2)
    if rho - eta <= 1e-12 * max(rho, 1.0):
        raise ValueError("z lies on the frozen limiting set (|xi1| = |xi2|)")
    b, c, d = _tridiagonal_parts(M)
    n = M.n
    det_s = xi1 - xi2
    # S = [[xi1, xi2], [1, 1]], Sinv = [[1, -xi2], [-1, xi1]] / det_s
    y_u = 1.0 / det_s
    y_v = -1.0 / det_s
    ratios = np.zeros(n)
    cone_ok = np.zeros(n, dtype=bool)
    delta_hat = 0.0
    for k in range(1, n + 1):
        bk = b[k - 1]
        ck = c[k - 1] if k <= n - 1 else f.c0
        dk = d[k - 2] if k >= 2 else f.d0
        if ck == 0:
            raise ValueError(f"zero superdiagonal entry at step {k}")
        a11 = (z - bk) / ck
        a12 = -dk / ck
        # B_k = Sinv @ [[a11, a12], [1, 0]] @ S
        t11 = (a11 * xi1 + a12) - xi2 * xi1
        t12 = (a11 * xi2 + a12) - xi2 * xi2
        t21 = -(a11 * xi1 + a12) + xi1 * xi1
        t22 = -(a11 * xi2 + a12) + xi1 * xi2
        b11, b12 = t11 / det_s, t12 / det_s
        b21, b22 = t21 / det_s, t22 / det_s
        step_delta = max(abs(b11 - xi1), abs(b12), abs(b21), abs(b22 - xi2))
        delta_hat = max(delta_hat, step_delta)
        w_u = b11 * y_u + b12 * y_v
        w_v = b21 * y_u + b22 * y_v
        ratios[k - 1] = abs(w_u) / abs(y_u) if y_u != 0 else math.inf
        cone_ok[k - 1] = abs(w_v) <= abs(w_u)
        m = max(abs(w_u), abs(w_v))
        if m == 0.0:
            y_u, y_v = 0j, 0j
        else:
            y_u, y_v = w_u / m, w_v / m
    return ConeReport(ratios, cone_ok, delta_hat, rho, eta)


# ---------------------------------------------------------------------------
# Theta ratio of interface determinants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaRatio:
    value: complex
    predicted: complex  # xi1(jk/n, z)^{-2}
    x: float


def sigma_margins(
    sym: TridiagonalSymbol, z: complex, grid: int = 401
) -> tuple[float, float]:
    """Screen for the exceptional set: minima over an x grid of
    |xi1| - |xi2| and |xi1^2 - 1|.  Both must exceed SIGMA_MARGIN for z to
    count as off the set."""
    xs = np.linspace(0.0, 1.0, grid)
    b, c, d = sym.coefficient_arrays(xs)
    if np.any(c == 0):
        raise ValueError("c(x) vanishes on the grid; the screen is undefined")
    zeta = z - b
    sq = np.sqrt((zeta * zeta - 4.0 * d * c) + 0.0)
    r1 = (zeta + sq) / (2.0 * c)
    r2 = (zeta - sq) / (2.0 * c)
    swap = np.abs(r2) > np.abs(r1)
    xi1 = np.where(swap, r2, r1)
    xi2 = np.where(swap, r1, r2)
    gap = float(np.min(np.abs(xi1) - np.abs(xi2)))
    unit = float(np.min(np.abs(xi1 * xi1 - 1.0)))
    return gap, unit


def _logdet_phase_block(M: BandedComplexMatrix, z: complex, start: int, stop: int):
    block = principal_submatrix(M, start, stop)
    b, c, d = _tridiagonal_parts(block)
    zb = [v - z for v in b]  # det(M - zI) directly, no sign juggling
    dc = [c[m] * d[m] for m in range(block.n - 1)]
    return _continuant_logmag_phase(zb, dc)


def theta_ratio(
    sym: TridiagonalSymbol,
    n: int,
    k: int,
    j: int,
    z: complex,
    build: Callable = build_twisted,
) -> ThetaRatio:
    """Interface determinant ratio between consecutive k x k blocks:

        Theta = c(jk/n) d(jk/n) det(R_{k-1}^{(j)} - z) det(R_k^{(j+1)'} - z)
                / (det(R_k^{(j)} - z) det(R_k^{(j+1)} - z))

    computed via rescaled continuants with phase tracking, together with the
    predicted limit xi1(jk/n, z)^{-2}.
    """
    if k < 2:
        raise ValueError("need block size k >= 2")
    if not 1 <= j <= n / k - 1:
        raise ValueError("need 1 <= j <= n/k - 1")
    gap, unit = sigma_margins(sym, z)
    if gap <= SIGMA_MARGIN or unit <= SIGMA_MARGIN:
        raise ValueError(
            f"z = {z} is too close to the exceptional set "
            f"(margins {gap:.2e}, {unit:.2e}); pick a different z"
        )
    M = build(sym, n)
    s0 = (j - 1) * k
    s1 = j * k
    num1 = _logdet_phase_block(M, z, s0, s1 - 1)  # R_{k-1}^{(j)}
    num2 = _logdet_phase_block(M, z, s1 + 1, s1 + k)  # R_k^{(j+1)'}
    den1 = _logdet_phase_block(M, z, s0, s1)  # R_k^{(j)}
    den2 = _logdet_phase_block(M, z, s1, s1 + k)  # R_k^{(j+1)}
    if not (math.isfinite(den1[0]) and math.isfinite(den2[0])):
        raise ValueError("z hits a block eigenvalue; perturb z and retry")
    x_j = j * k / n
    b0, c0, d0 = sym.coefficients_at(x_j)
    log_mag = num1[0] + num2[0] - den1[0] - den2[0]
    phase = num1[1] * num2[1] / (den1[1] * den2[1])
    value = c0 * d0 * math.exp(log_mag) * phase
    xi1, _ = FrozenSymbol(b0, c0, d0).transfer_roots(z)
    return ThetaRatio(complex(value), complex(xi1 ** (-2)), x_j)
