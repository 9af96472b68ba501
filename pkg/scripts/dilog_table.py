"""Dilogarithm table as CSV on stdout.

    python scripts/dilog_table.py --max-rank 8 > table.csv
"""
import sys

from rrhermite.cli import main

if __name__ == "__main__":
    sys.exit(main(["dilog-table", "--output", "csv", *sys.argv[1:]]))
