#!/usr/bin/env python3
"""Regenerate the omega reference table and the efficiency table.

Writes omega_table.csv (rho, omega1, omega2, omega3 at 10 decimals on a
0.01 grid) and are_table.csv next to it. Both files are byte-stable
across reruns.
"""

import argparse
import pathlib
import sys

from rankmoments.cli import main as cli_main


def run(out_dir: pathlib.Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    rc = cli_main(["tables", "--grid", "0(0.01)1",
                   "--out", str(out_dir / "omega_table.csv")])
    if rc != 0:
        return rc
    return cli_main(["are", "--grid", "0(0.01)1",
                     "--out", str(out_dir / "are_table.csv")])


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="tables", type=pathlib.Path)
    args = parser.parse_args()
    sys.exit(run(args.out_dir))
