#!/usr/bin/env python3
"""Backtest the pipeline on a seeded synthetic league and print the series.

Generates a 20-team, 4-season league, builds the match context, forecasts
the final season week by week, and compares the hit rate against the
always-home and weighted-random baselines. Use --csv/--json to keep the
artifacts for plotting.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from galois_forecast.attributes import AttributeSpec, Team, build_monster  # noqa: E402
from galois_forecast.cli import canonical_json_bytes  # noqa: E402
from galois_forecast.forecast import (  # noqa: E402
    BaselineConfig,
    InferenceSettings,
    SelectionPolicy,
    evaluate,
)
from galois_forecast.league import MatchKind  # noqa: E402
from galois_forecast.synthetic import SyntheticLeagueConfig, make_dataset  # noqa: E402


def experiment_specs() -> list[AttributeSpec]:
    return [
        AttributeSpec(17, 1.2, Team.HOME),
        AttributeSpec(17, 1.2, Team.AWAY),
        AttributeSpec(17, 3.0, Team.HOME),
        AttributeSpec(17, 3.0, Team.AWAY),
        AttributeSpec(12, 3.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 3.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(12, 8.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 8.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(11, 15.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(11, 15.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(4, 9.0, Team.HOME, n_matches=5, match_kind=MatchKind.ALL),
        AttributeSpec(4, 9.0, Team.AWAY, n_matches=5, match_kind=MatchKind.ALL),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20_100)
    parser.add_argument("--teams", type=int, default=20)
    parser.add_argument("--seasons", type=int, default=4)
    parser.add_argument("--lookback", type=int, default=38)
    parser.add_argument("--gamma", default="13/20")
    parser.add_argument("--home-reduction", type=float, default=0.85)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--csv", type=Path, default=None, help="write the per-week series")
    parser.add_argument("--json", type=Path, default=None, help="write the full report")
    args = parser.parse_args()

    dataset = make_dataset(
        SyntheticLeagueConfig(n_teams=args.teams, n_seasons=args.seasons, seed=args.seed)
    )
    specs = experiment_specs()
    monster = build_monster(dataset, specs)
    policy = SelectionPolicy(
        args.lookback, tuple(s.label for s in specs), Fraction(args.gamma)
    )
    season = dataset.seasons[-1]
    weeks = [(season, w) for w in dataset.weeks_of(season)]
    report = evaluate(
        dataset,
        monster,
        policy,
        weeks,
        InferenceSettings(home_reduction=args.home_reduction),
        BaselineConfig(trials=args.trials),
    )

    print(f"league: {args.teams} teams x {args.seasons} seasons (seed {args.seed})")
    print(f"target season: {season}, lookback {args.lookback} weeks, gamma {args.gamma}")
    print(
        f"pipeline: {report.total_hits}/{report.total_matches} "
        f"= {report.hit_rate:.4f} (pool: {report.pool_hit_rate:.4f})"
    )
    for baseline in report.baselines:
        spread = f" +/- {baseline.std_rate:.4f}" if baseline.std_rate else ""
        print(f"  {baseline.name:>18}: {baseline.mean_rate:.4f}{spread}")
    print("week series (hits/matches):")
    for row in report.weeks:
        print(f"  week {row.week:>2}: {row.hits:>2}/{row.matches}")

    if args.csv:
        args.csv.write_text(report.to_csv_text(), encoding="utf-8")
        print(f"series -> {args.csv}")
    if args.json:
        args.json.write_bytes(canonical_json_bytes(report.to_json_dict()))
        print(f"report -> {args.json}")
    return 0 if report.beat_all_baselines else 1


if __name__ == "__main__":
    raise SystemExit(main())
