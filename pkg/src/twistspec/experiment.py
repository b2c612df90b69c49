"""Experiment runner: build, solve, compare against the predicted limit,
and write run artifacts (CSV, metrics.json, SVG).

Every run directory receives:

- ``eigenvalues.csv``: header ``re,im``, one row per eigenvalue, 17
  significant digits (reruns with the same config are bit-identical);
- ``limit_samples.csv``: samples of the predicted limit measure (the
  arcsine mixture for tridiagonal symbols, frozen Toeplitz spectra for
  wider bands);
- ``metrics.json``: distances, runtimes, seed, RNG id, config echo, with
  stable key order;
- ``scatter.svg``: blue symbol range, black limit support, red eigenvalues.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .build import build_perturbed, build_randomized, build_twisted, RNG_ALGORITHM
from .config import ExperimentConfig
from .limits import frozen_esm, mu_sample, xi_support_samples
from .linalg import ConvergenceError, Spectrum, eigenvalues
from .measures import EmpiricalMeasure, PointCloud, hausdorff, sliced_w1
from .svg import ScatterLayer, render_scatter
from .symbols import symbol_range

__all__ = ["run_experiment", "reproduce_figure", "write_cloud_csv", "read_cloud_csv"]

FIGURES = ("fig1", "fig2", "fig4", "fig5")

# Frozen sampling points of the right-hand figure panels.
FROZEN_XS = {
    "fig4": (0.0, 0.25, 0.5, 0.75, 1.0),
    "fig5": tuple(np.linspace(0.0, 1.0, 9)),
}


def write_cloud_csv(path: Path, points: np.ndarray, extra: dict[str, np.ndarray] | None = None) -> None:
    cols = {"re": points.real, "im": points.imag}
    if extra:
        cols.update(extra)
    lines = [",".join(cols)]
    arrays = list(cols.values())
    for row in zip(*arrays):
        lines.append(",".join(format(v, ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_cloud_csv(path: Path) -> np.ndarray:
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.shape == ():
        data = data.reshape(1)
    return np.asarray(data["re"]) + 1j * np.asarray(data["im"])


def _write_metrics(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _build_matrix(cfg: ExperimentConfig, n: int):
    if cfg.mode == "deterministic":
        return build_twisted(cfg.symbol, n)
    if cfg.mode == "perturbed":
        return build_perturbed(cfg.symbol, n, cfg.sigma_value(n), cfg.noise, cfg.seed)
    return build_randomized(cfg.symbol, n, cfg.seed)


def _limit_clouds(cfg: ExperimentConfig) -> tuple[PointCloud, PointCloud]:
    """(limit measure sample, support sample) for the configured symbol."""
    tri = cfg.tridiagonal()
    if tri is not None:
        mu = mu_sample(tri, cfg.limit_samples, cfg.seed)
        support = xi_support_samples(tri, nx=200, per_interval=101)
        return mu, support
    # Banded: the conjectured limit is the x-mixture of the frozen limit
    # measures; both the sample and the support proxy come from frozen
    # Toeplitz spectra on an x grid.
    clouds = [frozen_esm(cfg.symbol.freeze(x), 300) for x in np.linspace(0.0, 1.0, 5)]
    pts = np.concatenate([c.points for c in clouds])
    return PointCloud(pts), PointCloud(pts)


def _support_distances(values: np.ndarray, support: PointCloud) -> dict:
    tree = cKDTree(np.column_stack((support.points.real, support.points.imag)))
    d = tree.query(np.column_stack((values.real, values.imag)))[0]
    return {
        "eig_to_support_median": float(np.median(d)),
        "eig_to_support_p95": float(np.quantile(d, 0.95)),
        "eig_to_support_max": float(d.max()),
        "eig_within_0.05": float(np.mean(d < 0.05)),
    }


def _run_single(cfg: ExperimentConfig, n: int, out_dir: Path,
                mu: PointCloud, support: PointCloud, range_cloud: PointCloud) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    matrix = _build_matrix(cfg, n)
    t1 = time.perf_counter()
    spectrum: Spectrum = eigenvalues(matrix)
    t2 = time.perf_counter()
    unconverged = int(np.sum(~spectrum.converged))
    if unconverged:
        raise ConvergenceError(
            f"{unconverged} of {n} eigenvalues failed to converge"
        )
    values = spectrum.values
    distances = {
        "sliced_w1_vs_limit": sliced_w1(
            EmpiricalMeasure(PointCloud(values)), mu, cfg.angles
        ),
        "hausdorff_support_vs_range": hausdorff(support, range_cloud),
    }
    distances.update(_support_distances(values, support))
    t3 = time.perf_counter()

    write_cloud_csv(out_dir / "eigenvalues.csv", values)
    write_cloud_csv(out_dir / "limit_samples.csv", mu.points)
    svg = render_scatter(
        [
            ScatterLayer(range_cloud.points, "#3465c0", 0.8, "symbol range"),
            ScatterLayer(support.points, "#222222", 0.8, "limit support"),
            ScatterLayer(values, "#d03030", 2.0, "eigenvalues"),
        ]
    )
    (out_dir / "scatter.svg").write_text(svg)
    metrics = {
        "config": cfg.echo(),
        "n": n,
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "mode": cfg.mode,
        "sigma": cfg.sigma_value(n) if cfg.mode == "perturbed" else None,
        "unconverged": unconverged,
        "eigensolver_sweeps": spectrum.iterations,
        "distances": distances,
        "runtimes_s": {
            "build": round(t1 - t0, 6),
            "eigensolve": round(t2 - t1, 6),
            "distances": round(t3 - t2, 6),
        },
    }
    _write_metrics(out_dir / "metrics.json", metrics)
    return metrics


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Run the configured experiment for every n; one subdirectory per n
    when several sizes are requested.  Returns the metrics dictionaries."""
    mu, support = _limit_clouds(cfg)
    range_cloud = symbol_range(cfg.symbol, cfg.range_nx, cfg.range_nt)
    single = len(cfg.n_values) == 1
    tasks = [
        (n, cfg.out_dir if single else cfg.out_dir / f"n{n}")
        for n in cfg.n_values
    ]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_run_single, cfg, n, path, mu, support, range_cloud)
                for n, path in tasks
            ]
            return [f.result() for f in futures]
    return [_run_single(cfg, n, path, mu, support, range_cloud) for n, path in tasks]


def _figure_panels_small(figure: str, cfg: ExperimentConfig) -> list[dict]:
    """fig1/fig2: left panel deterministic, right panel perturbed."""
    results = []
    for panel, mode in (("left", "deterministic"), ("right", "perturbed")):
        sub = ExperimentConfig(**{**cfg.__dict__})
        sub.mode = mode
        sub.out_dir = cfg.out_dir / panel
        results.extend(run_experiment(sub))
    return results


def _figure_panels_banded(figure: str, cfg: ExperimentConfig) -> list[dict]:
    """fig4/fig5: left panel range + unperturbed + perturbed spectra, right
    panel range + frozen Toeplitz spectra (m = 300)."""
    n = cfg.n_values[0]
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    range_cloud = symbol_range(cfg.symbol, cfg.range_nx, cfg.range_nt)

    t0 = time.perf_counter()
    det = eigenvalues(build_twisted(cfg.symbol, n))
    pert = eigenvalues(
        build_perturbed(cfg.symbol, n, cfg.sigma_value(n), cfg.noise, cfg.seed)
    )
    t1 = time.perf_counter()
    if not (det.all_converged and pert.all_converged):
        raise ConvergenceError("figure eigensolve did not converge")
    left = out / "left"
    left.mkdir(exist_ok=True)
    write_cloud_csv(left / "eigenvalues.csv", pert.values)
    write_cloud_csv(left / "eigenvalues_deterministic.csv", det.values)
    (left / "scatter.svg").write_text(
        render_scatter(
            [
                ScatterLayer(range_cloud.points, "#3465c0", 0.8, "symbol range"),
                ScatterLayer(det.values, "#2a9d2a", 2.0, "unperturbed eigenvalues"),
                ScatterLayer(pert.values, "#d03030", 2.0, "perturbed eigenvalues"),
            ]
        )
    )
    xs = FROZEN_XS[figure]
    frozen = [(x, frozen_esm(cfg.symbol.freeze(float(x)), 300)) for x in xs]
    t2 = time.perf_counter()
    right = out / "right"
    right.mkdir(exist_ok=True)
    frozen_pts = np.concatenate([c.points for _, c in frozen])
    frozen_x = np.concatenate([np.full(len(c), x) for x, c in frozen])
    write_cloud_csv(right / "frozen_spectra.csv", frozen_pts, {"x": frozen_x})
    (right / "scatter.svg").write_text(
        render_scatter(
            [
                ScatterLayer(range_cloud.points, "#3465c0", 0.8, "symbol range"),
                ScatterLayer(frozen_pts, "#d03030", 1.6, "frozen spectra"),
            ]
        )
    )
    metrics = {
        "config": cfg.echo(),
        "figure": figure,
        "n": n,
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "frozen_x": [float(x) for x in xs],
        "frozen_m": 300,
        "runtimes_s": {
            "spectra": round(t1 - t0, 6),
            "frozen": round(t2 - t1, 6),
        },
    }
    _write_metrics(out / "metrics.json", metrics)
    return [metrics]


def reproduce_figure(figure: str, cfg: ExperimentConfig) -> list[dict]:
    """Reproduce one of the paper-style figures into cfg.out_dir."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    if figure in ("fig1", "fig2"):
        return _figure_panels_small(figure, cfg)
    return _figure_panels_banded(figure, cfg)
