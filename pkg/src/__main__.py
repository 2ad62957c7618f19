#!/usr/bin/env python3
"""`python -m src` runs primlc."""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
