#!/usr/bin/env python3
"""Write a synthetic demo league as CSV files for trying out the CLI."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from galois_forecast.synthetic import SyntheticLeagueConfig, write_csvs  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directory", type=Path, nargs="?", default=Path("demo_data"))
    parser.add_argument("--teams", type=int, default=20)
    parser.add_argument("--seasons", type=int, default=4)
    parser.add_argument("--seed", type=int, default=20_100)
    args = parser.parse_args()
    matches, budgets = write_csvs(
        SyntheticLeagueConfig(n_teams=args.teams, n_seasons=args.seasons, seed=args.seed),
        args.directory,
    )
    print(f"wrote {matches}")
    print(f"wrote {budgets}")


if __name__ == "__main__":
    main()
