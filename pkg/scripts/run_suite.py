"""Run the full acceptance suite and print one line per check.

    python3 scripts/run_suite.py [--config PATH] [--out DIR] [--threads N]
"""

import sys

from twophase.cli import main

if __name__ == "__main__":
    sys.exit(main(["suite", *sys.argv[1:]]))
