#!/usr/bin/env python3
"""Regenerate the long-time energy-conservation series.

Writes results/<preset>/energy_<alpha>.csv for both benchmark problems on
the wide domain (-40, 40) up to T = 10 (fig2: velocity kick, fig4: hump at
rest).  Every series should show a relative energy drift at the level of
the linear-solver tolerance, far below 1e-8.
"""

import sys

from fracsg.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results"
    for preset in ("fig2", "fig4"):
        code = main(["energy", "--preset", preset, "--out", f"{out}/{preset}"])
        if code != 0:
            sys.exit(code)
        print(f"wrote {out}/{preset}/energy_*.csv")
