#!/usr/bin/env python3
"""Run the twoweight command line from a source checkout."""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = ROOT / "src"
if not sys.path or sys.path[0] != str(SRC_ROOT):
	sys.path.insert(0, str(SRC_ROOT))

from twoweight.cli import main


if __name__ == "__main__":
	sys.exit(main())
