"""Module entry point for python -m pegcluster."""

import sys

from pegcluster.cli import main

if __name__ == "__main__":
    sys.exit(main())
