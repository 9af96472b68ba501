"""Run the identity registry and the constant-term matrix; exit 1 on any failure.

    python scripts/verify_all.py --order 20 --parallelism 4 --output json
"""
import sys

from rrhermite.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify-all", *sys.argv[1:]]))
