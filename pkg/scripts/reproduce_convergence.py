#!/usr/bin/env python3
"""Regenerate both convergence tables.

Writes results/<preset>/convergence.csv for the velocity-kick benchmark
(table1: alpha = 1.3, 1.75, 1.99, 2) and the hump-at-rest benchmark
(table2: alpha = 1.3, 1.6, 1.9, 2), ladder (h, tau) = (1/5, 1/50) down to
(1/40, 1/400) at T = 1.  Takes a minute or two.
"""

import sys

from fracsg.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results"
    for preset in ("table1", "table2"):
        code = main(["convergence", "--preset", preset, "--out", f"{out}/{preset}"])
        if code != 0:
            sys.exit(code)
        print(f"wrote {out}/{preset}/convergence.csv")
