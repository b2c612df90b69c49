"""Dense complex eigenvalues, banded log-determinants, block determinants.

Eigenvalue architecture.  A dense Hessenberg + shifted-QR solve (LAPACK, or
the self-contained ``qr`` backend) is backward stable with respect to a
FULL-matrix perturbation of size eps * ||A||.  The matrices built here are
so non-normal that such a dense perturbation visibly moves the spectrum for
n beyond a few hundred: computed eigenvalues drift toward the full-matrix
perturbation regime instead of the structured one.  The default ``auto``
backend therefore refines the dense-solver output with an Ehrlich-Aberth
iteration whose Newton corrections are evaluated directly from the banded
entries:

- tridiagonal: the characteristic polynomial and its derivative via the
  rescaled three-term continuant recurrence;
- wider bands: the boundary-value formulation.  det(A - z I) vanishes
  exactly where the trailing p x p minor of the ordered product of per-row
  companion transfer matrices vanishes; the minor is evolved on the p-th
  exterior power so no subdominant information is lost to rounding.

The refined roots carry an entrywise (band-structured) backward error, which
is the perturbation class these matrices are stable against.  Cross-checks:
closed-form spectra, the trace identity, and log|det| consistency.

Balancing: tridiagonal starts are computed from an exact per-step graded
similarity that equalizes |subdiagonal| and |superdiagonal| (the scaling is
never materialized, so it cannot underflow); the ``qr`` backend has an
explicit Osborne pass.  Both are on by default with an off switch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack as _lapack

from .build import BandedComplexMatrix

__all__ = [
    "Spectrum",
    "HessenbergMatrix",
    "ConvergenceError",
    "hessenberg_reduce",
    "balance_matrix",
    "eigenvalues",
    "log_abs_det",
    "block_det",
    "polynomial_roots",
    "pair_eigenvalues",
]

_EPS = float(np.finfo(np.float64).eps)

_ABERTH_MAX_SWEEPS = 240
_ABERTH_TOL = 1e-13


class ConvergenceError(RuntimeError):
    """Eigenvalue iteration hit its iteration cap."""


@dataclass(frozen=True)
class Spectrum:
    """Multiset of eigenvalues with per-eigenvalue convergence flags.

    ``residuals`` (refined backends only) holds the relative Aberth
    correction each eigenvalue achieved.  Strongly non-normal deterministic
    matrices stall above machine precision because their root positions are
    genuinely uncertain at that scale under entrywise rounding; such points
    still count as converged (the iteration settled) as long as they are
    below the wildness ceiling.
    """

    values: np.ndarray
    converged: np.ndarray
    iterations: int
    residuals: np.ndarray | None = None

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


@dataclass(frozen=True)
class HessenbergMatrix:
    """Dense upper Hessenberg matrix, unitarily similar to its source."""

    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]


def _as_dense(M) -> np.ndarray:
    if isinstance(M, BandedComplexMatrix):
        return M.to_dense()
    return np.array(M, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Balancing and Hessenberg reduction
# ---------------------------------------------------------------------------


def balance_matrix(a: np.ndarray) -> np.ndarray:
    """Iterative radix-2 diagonal scaling to even out row/column norms."""
    A = a.astype(np.complex128, copy=True)
    n = A.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(A[:, i]))) - abs(A[i, i])
            r = float(np.sum(np.abs(A[i, :]))) - abs(A[i, i])
            if c == 0.0 or r == 0.0:
                continue
            total = c + r
            f = 1.0
            while c < r / 2.0:
                c *= 2.0
                r /= 2.0
                f *= 2.0
            while c > r * 2.0:
                c /= 2.0
                r *= 2.0
                f /= 2.0
            if c + r < 0.95 * total:
                done = False
                A[i, :] /= f
                A[:, i] *= f
    return A


def _hessenberg_dense(a: np.ndarray) -> np.ndarray:
    H = a.astype(np.complex128, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        col = H[k + 1 :, k]
        norm = float(np.linalg.norm(col))
        if norm == 0.0:
            continue
        v = col.copy()
        if v[0] != 0:
            alpha = -(v[0] / abs(v[0])) * norm
        else:
            alpha = -norm
        v[0] -= alpha
        vnorm = float(np.linalg.norm(v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 1, k] = alpha
        H[k + 2 :, k] = 0.0
    return H


def hessenberg_reduce(M) -> HessenbergMatrix:
    """Unitary similarity to upper Hessenberg form via Householder
    reflectors; tridiagonal input passes through unchanged."""
    if isinstance(M, BandedComplexMatrix) and M.lower <= 1:
        return HessenbergMatrix(M.to_dense())
    return HessenbergMatrix(_hessenberg_dense(_as_dense(M)))


# ---------------------------------------------------------------------------
# Reference shifted-QR iteration (qr backend)
# ---------------------------------------------------------------------------


def _eig2(a, b, c, d) -> tuple[complex, complex]:
    mid = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    return mid + disc, mid - disc


def _wilkinson_shift(H: np.ndarray, hi: int) -> complex:
    e1, e2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
    return e1 if abs(e1 - H[hi, hi]) <= abs(e2 - H[hi, hi]) else e2


def _qr_sweep(H: np.ndarray, lo: int, hi: int, shift: complex) -> None:
    """One explicit shifted QR step, restricted to the active block."""
    idx = np.arange(lo, hi + 1)
    H[idx, idx] -= shift
    rot: list[tuple[complex, complex]] = []
    for k in range(lo, hi):
        x = H[k, k]
        y = H[k + 1, k]
        r = float(np.hypot(abs(x), abs(y)))
        if r == 0.0:
            u, v = 1.0 + 0j, 0j
        else:
            u, v = x / r, y / r
        rot.append((u, v))
        row_k = H[k, k : hi + 1].copy()
        row_k1 = H[k + 1, k : hi + 1]
        H[k, k : hi + 1] = np.conj(u) * row_k + np.conj(v) * row_k1
        H[k + 1, k : hi + 1] = -v * row_k + u * row_k1
        H[k + 1, k] = 0.0
    for k in range(lo, hi):
        u, v = rot[k - lo]
        col_k = H[lo : k + 2, k].copy()
        col_k1 = H[lo : k + 2, k + 1]
        H[lo : k + 2, k] = col_k * u + col_k1 * v
        H[lo : k + 2, k + 1] = -col_k * np.conj(v) + col_k1 * np.conj(u)
    H[idx, idx] += shift


def _qr_iterate(hess: np.ndarray, cap_factor: int = 30):
    H = hess.astype(np.complex128, copy=True)
    n = H.shape[0]
    values = np.zeros(n, dtype=np.complex128)
    converged = np.zeros(n, dtype=bool)
    cap = cap_factor * n
    total = 0
    stall = 0
    hi = n - 1
    while hi >= 0:
        for i in range(1, hi + 1):
            if abs(H[i, i - 1]) <= _EPS * (abs(H[i - 1, i - 1]) + abs(H[i, i])):
                H[i, i - 1] = 0.0
        if hi == 0 or H[hi, hi - 1] == 0.0:
            values[hi] = H[hi, hi]
            converged[hi] = True
            hi -= 1
            stall = 0
            continue
        if hi == 1 or H[hi - 1, hi - 2] == 0.0:
            e1, e2 = _eig2(
                H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]
            )
            values[hi - 1], values[hi] = e1, e2
            converged[hi - 1] = converged[hi] = True
            hi -= 2
            stall = 0
            continue
        if total >= cap:
            # Hard cap: report the current diagonal, flagged unconverged.
            for i in range(hi + 1):
                values[i] = H[i, i]
                converged[i] = False
            break
        lo = hi - 1
        while lo > 0 and H[lo, lo - 1] != 0.0:
            lo -= 1
        total += 1
        stall += 1
        if stall % 10 == 0:
            shift = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            shift = _wilkinson_shift(H, hi)
        _qr_sweep(H, lo, hi, shift)
    return values, converged, total


# ---------------------------------------------------------------------------
# Structured Ehrlich-Aberth refinement
# ---------------------------------------------------------------------------


def _tridiagonal_arrays(M: BandedComplexMatrix):
    n = M.n
    b = M.diagonals.get(0)
    b = b if b is not None else np.zeros(n, dtype=np.complex128)
    c = M.diagonals.get(1)
    c = c if c is not None else np.zeros(max(n - 1, 0), dtype=np.complex128)
    d = M.diagonals.get(-1)
    d = d if d is not None else np.zeros(max(n - 1, 0), dtype=np.complex128)
    return b, c, d


def _graded_balance_tridiagonal(b, c, d):
    """Exact per-step diagonal similarity that equalizes |c_i| and |d_i|.

    Only the rescaled entries are formed, never the cumulative scaling, so
    the transform cannot overflow or underflow."""
    mags_c = np.abs(c)
    mags_d = np.abs(d)
    step = np.where(
        (mags_c == 0) | (mags_d == 0),
        1.0,
        np.sqrt(mags_c / np.where(mags_d == 0, 1.0, mags_d)),
    )
    return b, c / step, d * step


def _tridiagonal_newton_ratios(b, dc, z):
    """p(z)/p'(z) for p(z) = det(zI - T), via the rescaled continuant."""
    n = b.size
    cur = np.ones(z.size, dtype=np.complex128)
    prev = np.zeros(z.size, dtype=np.complex128)
    curp = np.zeros(z.size, dtype=np.complex128)
    prevp = np.zeros(z.size, dtype=np.complex128)
    for k in range(1, n + 1):
        zb = z - b[k - 1]
        new = zb * cur - dc[k - 1] * prev
        newp = cur + zb * curp - dc[k - 1] * prevp
        m = np.maximum(
            np.maximum(np.abs(new), np.abs(cur)),
            np.maximum(np.abs(newp), 1e-300),
        )
        prev = cur / m
        prevp = curp / m
        cur = new / m
        curp = newp / m
    with np.errstate(all="ignore"):
        return np.where(curp != 0, cur / curp, 0.0)


_ABERTH_STALL_SWEEPS = 10
_ABERTH_WILD = 1e-2


def _aberth_sweeps(newton_fn, starts, max_sweeps=_ABERTH_MAX_SWEEPS, tol=_ABERTH_TOL):
    """Simultaneous (Jacobi) Ehrlich-Aberth iteration.

    All points stay active every sweep; freezing converged points lets two
    points settle on one root, so it is deliberately avoided.  Each point
    keeps its best position (smallest relative correction) so far; the loop
    ends when everything reaches ``tol`` or when nothing has improved for
    several sweeps (the evaluation noise floor of badly non-normal input).
    Returns (positions, converged flags, residuals, sweeps).
    """
    z = starts.astype(np.complex128).copy()
    best_z = z.copy()
    best_rel = np.full(z.size, np.inf)
    since_improvement = 0
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        N = newton_fn(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        S = np.sum(1.0 / diff, axis=1)
        with np.errstate(all="ignore"):
            corr = N / (1.0 - N * S)
        corr = np.where(np.isfinite(corr), corr, N)
        z = z - corr
        rel = np.abs(corr) / (1.0 + np.abs(z))
        improved = rel < best_rel
        best_z[improved] = z[improved]
        best_rel[improved] = rel[improved]
        if (best_rel <= tol).all():
            break
        since_improvement = 0 if improved.any() else since_improvement + 1
        if since_improvement >= _ABERTH_STALL_SWEEPS:
            break
    converged = best_rel <= _ABERTH_WILD
    return best_z, converged, best_rel, sweeps


def _refine_tridiagonal(M: BandedComplexMatrix, starts: np.ndarray):
    b, c, d = _tridiagonal_arrays(M)
    dc = np.concatenate(([0j], c * d))
    return _aberth_sweeps(lambda z: _tridiagonal_newton_ratios(b, dc, z), starts)


# -- banded boundary-value formulation --------------------------------------


def _row_band_coefficients(M: BandedComplexMatrix) -> np.ndarray:
    """Per-row band template g[i, j + q] = entry (i, i + j), continued past
    the matrix edge with the nearest stored value (those positions multiply
    zero boundary values, so any finite continuation is equivalent)."""
    n, q, p = M.n, M.lower, M.upper
    g = np.zeros((n, p + q + 1), dtype=np.complex128)
    for j in range(-q, p + 1):
        vals = M.diagonals.get(j)
        if vals is None or vals.size == 0:
            continue
        idx = np.arange(n) + min(j, 0)
        idx = np.clip(idx, 0, vals.size - 1)
        g[:, j + q] = vals[idx]
    return g


def _compound_basis(K: int, p: int):
    combos = list(itertools.combinations(range(K), p))
    return combos, combos.index(tuple(range(K - p, K)))


def _compound_apply(C, Cd, combos, w, wd):
    """One transfer step on the p-th exterior power, with the directional
    derivative carried along by the product rule."""
    npts, D = w.shape
    p = len(combos[0])
    new = np.zeros_like(w)
    newd = np.zeros_like(wd)
    for a, rows in enumerate(combos):
        for bidx, cols in enumerate(combos):
            if p == 1:
                m = C[:, rows[0], cols[0]]
                md = Cd[:, rows[0], cols[0]]
            elif p == 2:
                r0, r1 = rows
                c0, c1 = cols
                m = C[:, r0, c0] * C[:, r1, c1] - C[:, r0, c1] * C[:, r1, c0]
                md = (
                    Cd[:, r0, c0] * C[:, r1, c1]
                    + C[:, r0, c0] * Cd[:, r1, c1]
                    - Cd[:, r0, c1] * C[:, r1, c0]
                    - C[:, r0, c1] * Cd[:, r1, c0]
                )
            else:
                sub = C[:, rows, :][:, :, cols]
                subd = Cd[:, rows, :][:, :, cols]
                m = np.linalg.det(sub)
                md = np.einsum("nij,nji->n", _adjugate(sub), subd)
            new[:, a] += m * w[:, bidx]
            newd[:, a] += md * w[:, bidx] + m * wd[:, bidx]
    return new, newd


def _adjugate(A):
    det = np.linalg.det(A)
    inv = np.linalg.inv(A)
    return inv * det[:, None, None]


def _banded_newton_ratios(g: np.ndarray, q: int, p: int, z: np.ndarray):
    """p(z)/p'(z) for a banded matrix via the boundary-value transfer
    product, evolved on the p-th exterior power.

    g holds the per-row band template; row i contributes the companion step
    of sum_j g[i, j + q] u_{i + j} = z u_i.  The characteristic polynomial
    vanishes exactly where the trailing p x p minor of the ordered product
    does.
    """
    n = g.shape[0]
    K = p + q
    npts = z.size
    combos, target = _compound_basis(K, p)
    D = len(combos)
    shift_rows = np.arange(K - 1)
    w = np.zeros((npts, D), dtype=np.complex128)
    w[:, target] = 1.0
    wd = np.zeros((npts, D), dtype=np.complex128)
    constant = bool(np.all(g == g[0]))
    C = np.zeros((npts, K, K), dtype=np.complex128)
    Cd = np.zeros((npts, K, K), dtype=np.complex128)
    C[:, shift_rows, shift_rows + 1] = 1.0
    for i in range(n):
        if i == 0 or not constant:
            row = g[i]
            lead = row[K]
            C[:, K - 1, :] = -(row[:K][None, :] / lead)
            C[:, K - 1, q] += z / lead
            Cd[:, K - 1, q] = 1.0 / lead
        w, wd = _compound_apply(C, Cd, combos, w, wd)
        s = np.maximum(np.abs(w).max(axis=1), 1e-300)
        w /= s[:, None]
        wd /= s[:, None]
    det = w[:, target]
    ddet = wd[:, target]
    with np.errstate(all="ignore"):
        return np.where(ddet != 0, det / ddet, 0.0)


def _refine_banded(M: BandedComplexMatrix, starts: np.ndarray):
    g = _row_band_coefficients(M)
    q, p = M.lower, M.upper
    # Trim identically-zero leading offsets (effective upper order).
    while p > 1 and np.all(g[:, -1] == 0):
        g = g[:, :-1]
        p -= 1
    lead = np.abs(g[:, -1])
    if lead.min() <= 1e-8 * max(lead.max(), 1.0):
        return None  # propagation breaks down; caller keeps dense results
    return _aberth_sweeps(lambda z: _banded_newton_ratios(g, q, p, z), starts)


# ---------------------------------------------------------------------------
# Public eigenvalue interface
# ---------------------------------------------------------------------------


def _lapack_eigvals(dense: np.ndarray) -> Spectrum:
    n = dense.shape[0]
    try:
        vals = np.linalg.eigvals(dense)
        return Spectrum(vals, np.ones(n, dtype=bool), 0)
    except np.linalg.LinAlgError:
        return Spectrum(
            np.full(n, np.nan, dtype=np.complex128), np.zeros(n, dtype=bool), 0
        )


def eigenvalues(M, balance: bool = True, backend: str = "auto") -> Spectrum:
    """All eigenvalues of a banded (or dense) complex matrix.

    Backends: ``auto`` (default) runs the dense solve and then the
    structured Ehrlich-Aberth refinement for banded input; ``lapack`` is the
    raw dense solve; ``qr`` is the self-contained Hessenberg + shifted-QR
    reference.  ``balance`` controls the graded tridiagonal pre-balance of
    the ``auto`` starts and the explicit Osborne pass of ``qr``; the LAPACK
    path always balances internally.
    """
    if backend == "qr":
        dense = _as_dense(M)
        if dense.shape[0] == 1:
            return Spectrum(dense.diagonal().copy(), np.ones(1, dtype=bool), 0)
        work = balance_matrix(dense) if balance else dense
        vals, conv, iters = _qr_iterate(_hessenberg_dense(work))
        return Spectrum(vals, conv, iters)
    if backend == "lapack" or not isinstance(M, BandedComplexMatrix):
        return _lapack_eigvals(_as_dense(M))
    if backend != "auto":
        raise ValueError(f"unknown backend {backend!r}")

    n = M.n
    if n <= 2:
        return _lapack_eigvals(M.to_dense())
    if M.is_tridiagonal():
        b, c, d = _tridiagonal_arrays(M)
        if balance:
            bb, cb, db = _graded_balance_tridiagonal(b, c, d)
            dense = (
                np.diag(bb) + np.diag(cb, 1) + np.diag(db, -1)
                if n > 1
                else np.diag(bb)
            )
        else:
            dense = M.to_dense()
        start = _lapack_eigvals(dense)
        if not start.all_converged:
            return start
        roots, ok, res, sweeps = _refine_tridiagonal(M, start.values)
        return Spectrum(roots, ok, sweeps, res)
    start = _lapack_eigvals(M.to_dense())
    if not start.all_converged:
        return start
    refined = _refine_banded(M, start.values)
    if refined is None:
        return start
    roots, ok, res, sweeps = refined
    return Spectrum(roots, ok, sweeps, res)


# ---------------------------------------------------------------------------
# Banded log-determinant and the block identity
# ---------------------------------------------------------------------------


def log_abs_det(M: BandedComplexMatrix, z: complex) -> float:
    """log|det(M - zI)| via banded LU with partial pivoting.

    Log-magnitudes of the pivots are accumulated directly, so there is no
    overflow for n up to 1e5; returns -inf when z is an eigenvalue to
    machine precision.
    """
    n = M.n
    kl = min(M.lower, n - 1)
    ku = min(M.upper, n - 1)
    ab = np.zeros((2 * kl + ku + 1, n), dtype=np.complex128, order="F")
    row0 = kl + ku
    for j, values in M.diagonals.items():
        ab[row0 - j, max(j, 0) : n + min(j, 0)] = values
    ab[row0, :] -= z
    lu, _, info = _lapack.zgbtrf(ab, kl, ku)
    if info < 0:
        raise RuntimeError(f"zgbtrf failed with info={info}")
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(np.abs(lu[row0, :]))))


def block_det(M, N, x: complex, y: complex) -> complex:
    """det of the 2 x 2 block assembly of M (r x r) and N (s x s) coupled by
    single corner entries x (bottom-left block) and y (top-right block):

        det = det M * det N - x * y * det M' * det N'

    where M' drops the last row/column of M and N' the first of N; empty
    minors count as 1.
    """
    M = np.asarray(M, dtype=np.complex128)
    N = np.asarray(N, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError("M must be square and nonempty")
    if N.ndim != 2 or N.shape[0] != N.shape[1] or N.shape[0] < 1:
        raise ValueError("N must be square and nonempty")
    r, s = M.shape[0], N.shape[0]
    det_m = complex(np.linalg.det(M))
    det_n = complex(np.linalg.det(N))
    det_mp = complex(np.linalg.det(M[: r - 1, : r - 1])) if r > 1 else 1.0 + 0j
    det_np = complex(np.linalg.det(N[1:, 1:])) if s > 1 else 1.0 + 0j
    return det_m * det_n - x * y * det_mp * det_np


def polynomial_roots(coeffs) -> np.ndarray:
    """Roots of polynomials given by ascending coefficients, via companion
    matrix eigenvalues (same QR kernel as :func:`eigenvalues`).

    Accepts a stack of coefficient vectors of common degree; the leading
    coefficient must be nonzero everywhere.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    m = c.shape[-1] - 1
    if m < 1:
        raise ValueError("need a polynomial of degree >= 1")
    lead = c[..., -1]
    if np.any(lead == 0):
        raise ValueError("leading coefficient must be nonzero")
    comp = np.zeros(c.shape[:-1] + (m, m), dtype=np.complex128)
    idx = np.arange(m - 1)
    comp[..., idx + 1, idx] = 1.0
    comp[..., :, -1] = -c[..., :-1] / lead[..., None]
    return np.linalg.eigvals(comp)


def pair_eigenvalues(a, b) -> float:
    """Greedy minimum-distance pairing of two eigenvalue multisets; returns
    the worst matched distance.  Order-insensitive up to the pairing."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.size != b.size:
        raise ValueError("multisets must have equal size")
    used = np.zeros(b.size, dtype=bool)
    worst = 0.0
    for i in np.lexsort((a.imag, a.real)):
        dist = np.abs(b - a[i])
        dist[used] = np.inf
        k = int(np.argmin(dist))
        used[k] = True
        worst = max(worst, float(dist[k]))
    return worst
