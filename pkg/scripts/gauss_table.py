"""Gauss sums with relation defects for the systems used in the acceptance run.

    python scripts/gauss_table.py --N 2-12 --output json
"""
import sys

from rrhermite.cli import main

SYSTEMS = "A1,A2,A3,A4,D4,B3,C3,F4,G2"

if __name__ == "__main__":
    sys.exit(main(["gauss", "--systems", SYSTEMS, "--relations", *sys.argv[1:]]))
