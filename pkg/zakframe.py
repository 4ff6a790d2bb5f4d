#!/usr/bin/env python3
"""
ZakFrame command-line launcher
Run: python zakframe.py --help
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
