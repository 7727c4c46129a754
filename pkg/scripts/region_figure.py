#!/usr/bin/env python3
"""Emit an SVG comparing the achievable two-way relay region against the
cut-set bound and the no-relay two-way region."""

import argparse
from pathlib import Path

from latrelay.rates import TwrcParams, cutset_degraded, two_way_no_relay, twrc_region
from latrelay.svgplot import emit_plot, rectangle_region


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("regions.svg"))
    args = ap.parse_args()

    params = TwrcParams.physically_degraded(P1=4.0, P2=2.0, PR=8.0, NR=1.0,
                                            N1p=1.0, N2p=0.5)
    ach = twrc_region(params)
    outer = cutset_degraded(params)
    norelay = two_way_no_relay(params)
    svg = emit_plot(
        [rectangle_region("cut-set bound", outer.R1, outer.R2),
         rectangle_region("achievable (list DF)", ach.R1, ach.R2),
         rectangle_region("two-way, no relay", norelay.R1, norelay.R2)],
        title="Two-way relay rate regions")
    args.out.write_text(svg)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
