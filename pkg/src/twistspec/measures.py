"""Point clouds, empirical spectral measures, and distances between them.

Distances: sliced Wasserstein-1 over a fixed fan of projection directions,
Hausdorff distance between point sets, and sampled logarithmic potentials.
All operations are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "PointCloud",
    "EmpiricalMeasure",
    "esm",
    "sliced_w1",
    "hausdorff",
    "sample_log_potential",
    "padded_bbox",
]


@dataclass(frozen=True)
class PointCloud:
    """Finite multiset of complex numbers, uniformly weighted when used
    as a probability measure."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128).ravel()
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform probability measure on a nonempty point cloud."""

    cloud: PointCloud

    def __post_init__(self):
        if len(self.cloud) < 1:
            raise ValueError("empirical measure needs at least one point")

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points

    @property
    def weight(self) -> float:
        return 1.0 / len(self.cloud)


def esm(spectrum) -> EmpiricalMeasure:
    """Empirical spectral measure of a converged Spectrum."""
    if not bool(np.all(spectrum.converged)):
        raise ValueError("spectrum has unconverged eigenvalues")
    return EmpiricalMeasure(PointCloud(spectrum.values))


def _points_of(obj) -> np.ndarray:
    if isinstance(obj, EmpiricalMeasure):
        return obj.points
    if isinstance(obj, PointCloud):
        return obj.points
    return np.asarray(obj, dtype=np.complex128).ravel()


def _w1_sorted(a: np.ndarray, b: np.ndarray) -> float:
    """Exact W1 between uniform measures on sorted 1-D samples.

    Integrates |F_a^{-1} - F_b^{-1}| over the merged quantile grid, which
    reduces to the sorted coupling mean when the sizes agree.
    """
    na, nb = a.size, b.size
    if na == nb:
        return float(np.mean(np.abs(a - b)))
    levels = np.union1d(np.arange(1, na) / na, np.arange(1, nb) / nb)
    edges = np.concatenate(([0.0], levels, [1.0]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    qa = a[np.minimum((mids * na).astype(np.intp), na - 1)]
    qb = b[np.minimum((mids * nb).astype(np.intp), nb - 1)]
    return float(np.sum(widths * np.abs(qa - qb)))


def sliced_w1(P, Q, K: int = 32) -> float:
    """Average of 1-D Wasserstein-1 distances over K fixed directions.

    Directions are the deterministic angles k*pi/K, k = 0..K-1, so repeated
    evaluations are reproducible without projection noise.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    p = _points_of(P)
    q = _points_of(Q)
    if p.size == 0 or q.size == 0:
        raise ValueError("cannot compare an empty cloud")
    total = 0.0
    for k in range(K):
        theta = k * np.pi / K
        c, s = np.cos(theta), np.sin(theta)
        pa = np.sort(p.real * c + p.imag * s)
        qa = np.sort(q.real * c + q.imag * s)
        total += _w1_sorted(pa, qa)
    return total / K


def _as_xy(points: np.ndarray) -> np.ndarray:
    return np.column_stack((points.real, points.imag))


def hausdorff(P, Q) -> float:
    """max(sup_p inf_q |p-q|, sup_q inf_p |p-q|) between two point sets."""
    p = _points_of(P)
    q = _points_of(Q)
    if p.size == 0 or q.size == 0:
        raise ValueError("cannot compare an empty cloud")
    tp = cKDTree(_as_xy(p))
    tq = cKDTree(_as_xy(q))
    d_pq = tq.query(_as_xy(p))[0].max()
    d_qp = tp.query(_as_xy(q))[0].max()
    return float(max(d_pq, d_qp))


def sample_log_potential(P, z: complex) -> float:
    """Mean of log|p - z| over the cloud; -inf when z hits a point."""
    p = _points_of(P)
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(np.abs(p - z))))


def padded_bbox(points, pad: float = 0.2) -> tuple[float, float, float, float]:
    """Bounding box (re_min, re_max, im_min, im_max) padded by a fraction
    of the larger side; degenerate boxes get a minimal positive extent."""
    p = _points_of(points)
    re_min, re_max = float(p.real.min()), float(p.real.max())
    im_min, im_max = float(p.imag.min()), float(p.imag.max())
    side = max(re_max - re_min, im_max - im_min, 1e-3)
    m = pad * side
    return (re_min - m, re_max + m, im_min - m, im_max + m)
