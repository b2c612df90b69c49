#!/usr/bin/env python3
"""Reproduce all four figures at their default sizes into runs/<figure>/."""

import argparse
import sys

from twistspec.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default=None, help="override matrix size")
    ap.add_argument("--seed", default=None)
    args = ap.parse_args()

    for figure in ("fig1", "fig2", "fig4", "fig5"):
        argv = ["figure", figure]
        if args.n:
            argv += ["--n", args.n]
        if args.seed:
            argv += ["--seed", args.seed]
        code = cli_main(argv)
        if code != 0:
            sys.exit(code)


if __name__ == "__main__":
    main()
