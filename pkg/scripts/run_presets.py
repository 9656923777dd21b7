#!/usr/bin/env python3
"""Run every named experiment preset and collect the outputs in one place.

Usage:
    python scripts/run_presets.py [--seed SEED] [--outdir results]

Produces, per preset, either a sweep CSV (fig5, fig7) or a report JSON plus
two density CSVs (fig3, fig4, fig6).  Plot with the gnuplot scripts next to
this file.
"""

import argparse
import pathlib
import sys

from softber import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for preset in sorted(cli.PRESETS):
        sweep = "snr_sweep" in cli.PRESETS[preset]
        out = outdir / (f"{preset}.csv" if sweep else f"{preset}.json")
        print(f"[{preset}] -> {out}")
        code = cli.main([
            "--preset", preset, "--seed", str(args.seed), "--output", str(out),
        ])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
