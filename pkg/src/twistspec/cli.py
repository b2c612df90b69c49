"""Command-line interface.

Subcommands:

- ``spectrum``: build the configured matrix, solve, compare with the
  predicted limit, write run artifacts;
- ``potential``: tables of the frozen potential and its x integral over a
  z grid;
- ``limit``: sample the limit measure, the support, and (for banded
  symbols) the frozen limiting sets;
- ``compare``: distances between two CSV point clouds;
- ``figure``: reproduce fig1/fig2/fig4/fig5.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    ExperimentConfig,
    config_from_mapping,
    load_config,
)
from .experiment import (
    read_cloud_csv,
    reproduce_figure,
    run_experiment,
    write_cloud_csv,
)
from .limits import Window, frozen_esm, mu_sample, schmidt_spitzer_set, xi_support_samples
from .linalg import ConvergenceError
from .measures import PointCloud, hausdorff, sliced_w1
from .potential import gamma_profile, integrated_gamma
from .symbols import symbol_range

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--preset", help="symbol preset (fig1|fig2|ex4|ex5)")
    parser.add_argument("--n", help="matrix size or comma list")
    parser.add_argument("--seed", help="master seed")
    parser.add_argument("--sigma", help="perturbation scale (number or 1/n)")
    parser.add_argument("--noise", help="noise distribution tag")
    parser.add_argument("--mode", help="deterministic | perturbed | randomized")
    parser.add_argument("--samples", help="limit-measure sample count")
    parser.add_argument("--out", type=Path, help="output directory")


def _mapping_from_args(args: argparse.Namespace) -> dict[str, str]:
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(load_config(args.config))
    overrides = {
        "symbol.preset": args.preset,
        "n": args.n,
        "seed": args.seed,
        "sigma": args.sigma,
        "noise.dist": args.noise,
        "mode": args.mode,
        "samples": args.samples,
        "out": str(args.out) if args.out else None,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    return mapping


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return config_from_mapping(_mapping_from_args(args))


def _cmd_spectrum(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    results = run_experiment(cfg, jobs=args.jobs)
    for metrics in results:
        print(
            f"n={metrics['n']}: sliced_w1={metrics['distances']['sliced_w1_vs_limit']:.6f}"
            f"  out={cfg.out_dir}"
        )
    return EXIT_OK


def _parse_xs(arg: str | None, default=(0.0, 0.5, 1.0)) -> list[float]:
    if not arg:
        return list(default)
    return [float(part) for part in arg.split(",")]


def _cmd_potential(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    tri = cfg.tridiagonal()
    if tri is None:
        raise ConfigError("potential tables require a tridiagonal symbol")
    xs = _parse_xs(args.x)
    re = np.linspace(args.re_min, args.re_max, args.grid)
    im = np.linspace(args.im_min, args.im_max, args.grid)
    zs = (re[:, None] + 1j * im[None, :]).ravel()
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    header = ["re", "im"] + [f"gamma_x{fmt_x(x)}" for x in xs] + ["integrated_gamma"]
    rows = []
    for z in zs:
        gam = [float(gamma_profile(tri, np.array([x]), complex(z))[0]) for x in xs]
        rows.append([z.real, z.imag] + gam + [integrated_gamma(tri, complex(z))])
    out = cfg.out_dir / "potential.csv"
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(v, ".17g") for v in row))
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(rows)} grid points)")
    return EXIT_OK


def fmt_x(x: float) -> str:
    return format(x, "g").replace(".", "p").replace("-", "m")


def _cmd_limit(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    tri = cfg.tridiagonal()
    wrote = []
    if tri is not None:
        mu = mu_sample(tri, cfg.limit_samples, cfg.seed)
        write_cloud_csv(cfg.out_dir / "limit_samples.csv", mu.points)
        xi = xi_support_samples(tri)
        write_cloud_csv(cfg.out_dir / "xi_support.csv", xi.points)
        wrote += ["limit_samples.csv", "xi_support.csv"]
    else:
        xs = _parse_xs(args.x)
        rng_cloud = symbol_range(cfg.symbol, cfg.range_nx, cfg.range_nt)
        window = Window.from_points(rng_cloud, 0.2)
        pts, labels, frozen_pts, frozen_x = [], [], [], []
        for x in xs:
            frozen = cfg.symbol.freeze(x)
            lam = schmidt_spitzer_set(frozen, window, grid=(args.grid, args.grid))
            pts.append(lam.points)
            labels.append(np.full(len(lam), x))
            esm_cloud = frozen_esm(frozen, 300)
            frozen_pts.append(esm_cloud.points)
            frozen_x.append(np.full(len(esm_cloud), x))
        write_cloud_csv(
            cfg.out_dir / "lambda_sets.csv",
            np.concatenate(pts),
            {"x": np.concatenate(labels)},
        )
        write_cloud_csv(
            cfg.out_dir / "frozen_spectra.csv",
            np.concatenate(frozen_pts),
            {"x": np.concatenate(frozen_x)},
        )
        wrote += ["lambda_sets.csv", "frozen_spectra.csv"]
    print(f"wrote {', '.join(wrote)} in {cfg.out_dir}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    a = PointCloud(read_cloud_csv(args.cloud_a))
    b = PointCloud(read_cloud_csv(args.cloud_b))
    result = {
        "sliced_w1": sliced_w1(a, b, args.angles),
        "hausdorff": hausdorff(a, b),
        "size_a": len(a),
        "size_b": len(b),
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_figure(args: argparse.Namespace) -> int:
    mapping = _mapping_from_args(args)
    mapping.setdefault("symbol.preset", {"fig1": "fig1", "fig2": "fig2", "fig4": "ex4", "fig5": "ex5"}[args.figure])
    mapping.setdefault("out", f"runs/{args.figure}")
    mapping.setdefault("n", "500")
    cfg = config_from_mapping(mapping)
    reproduce_figure(args.figure, cfg)
    print(f"figure {args.figure} written to {cfg.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistspec",
        description="Twisted Toeplitz spectra under structured random perturbations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="run a spectral experiment")
    _add_common_flags(sp)
    sp.add_argument("--jobs", type=int, default=1, help="parallel runs over n values")
    sp.set_defaults(func=_cmd_spectrum)

    pot = sub.add_parser("potential", help="potential tables over a z grid")
    _add_common_flags(pot)
    pot.add_argument("--x", help="comma list of frozen x values")
    pot.add_argument("--re-min", type=float, default=-3.0)
    pot.add_argument("--re-max", type=float, default=3.0)
    pot.add_argument("--im-min", type=float, default=-3.0)
    pot.add_argument("--im-max", type=float, default=3.0)
    pot.add_argument("--grid", type=int, default=41)
    pot.set_defaults(func=_cmd_potential)

    lim = sub.add_parser("limit", help="sample limit measures and supports")
    _add_common_flags(lim)
    lim.add_argument("--x", help="frozen x values for banded symbols")
    lim.add_argument("--grid", type=int, default=400)
    lim.set_defaults(func=_cmd_limit)

    cmp_ = sub.add_parser("compare", help="distances between two CSV clouds")
    cmp_.add_argument("cloud_a", type=Path)
    cmp_.add_argument("cloud_b", type=Path)
    cmp_.add_argument("--angles", type=int, default=32)
    cmp_.set_defaults(func=_cmd_compare)

    fig = sub.add_parser("figure", help="reproduce a figure")
    fig.add_argument("figure", choices=["fig1", "fig2", "fig4", "fig5"])
    _add_common_flags(fig)
    fig.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
