#!/usr/bin/env python3
"""Emit the multiplication-count table for all structured kernels.

Equivalent to `bilinear-kernels count-table`; kept as a script so the table
can be regenerated (and diffed) without remembering CLI flags.

Usage:
    python scripts/count_table.py [max_n] [out.csv]
"""

import sys

from bilinear_kernels.cli import main

if __name__ == "__main__":
    max_n = sys.argv[1] if len(sys.argv) > 1 else "8"
    argv = ["count-table", "--max-n", max_n]
    if len(sys.argv) > 2:
        argv += ["--out", sys.argv[2]]
    sys.exit(main(argv))
