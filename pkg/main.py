#!/usr/bin/env python
"""
hopfcheck
Verifies bialgebra presentations of GL(2) deformations by noncommutative rewriting.
"""

from src.cli import main

if __name__ == "__main__":
    main()
