#!/usr/bin/env python3
"""Desk-scale check of the perturbed log-determinant limit: for a constant
tridiagonal symbol with entrywise noise of amplitude n^{-1/2}, tabulate
|1/n log|det(P_n - z)| - gamma(z)| over a z set and a size ladder.

Uses O(n) continuants only, so it runs well past eigensolver sizes.
"""

import argparse
from pathlib import Path

import numpy as np

from twistspec.build import NoiseSpec, build_perturbed
from twistspec.potential import FrozenSymbol, continuant_log_det, frozen_gamma
from twistspec.symbols import TridiagonalSymbol


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,1000,2000,4000,8000")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--out", type=Path, default=Path("runs/potential_error.csv"))
    args = ap.parse_args()

    sym = TridiagonalSymbol.from_strings(d="1", b="0", c="1")
    frozen = FrozenSymbol(0, 1, 1)
    angles = np.linspace(0.0, 2.0 * np.pi, 12, endpoint=False)
    zs = 2.6 * np.exp(1j * angles)  # distance >= 0.6 from [-2, 2]
    noise = NoiseSpec("uniform-sym")

    rows = ["n,seed,max_abs_error"]
    for n in (int(s) for s in args.sizes.split(",")):
        worst = []
        for seed in range(args.seeds):
            P = build_perturbed(sym, n, n**-0.5, noise, seed)
            err = max(
                abs(continuant_log_det(P, complex(z)) / n - frozen_gamma(frozen, complex(z)))
                for z in zs
            )
            worst.append(err)
            rows.append(f"{n},{seed},{err:.10f}")
        print(f"n={n:6d}  max over z, median over seeds: {np.median(worst):.5f}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
