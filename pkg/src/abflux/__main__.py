"""
Entry point for running the command-line tool via `python -m abflux`.
"""

import sys

from abflux.cli import main

if __name__ == "__main__":
    sys.exit(main())
