#!/usr/bin/env python3
"""Regenerate the frozen end-to-end outputs under tests/golden/.

The fixture league, attribute set, and run configuration are fixed; the
acceptance suite rebuilds the same documents in memory and compares them
byte for byte. Run this only when an intentional behavior change makes
the stored bytes stale, and review the diff.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from galois_forecast.golden import write_golden_files  # noqa: E402


def main() -> None:
    out_dir = ROOT / "tests" / "golden"
    written = write_golden_files(out_dir)
    for path in written:
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
