"""Seeded synthetic leagues for experiments, fixtures, and oracle tests.

Teams have fixed strength tiers with budgets to match; fixtures follow a
double round robin (circle method). Results are sampled from a strength
gap model with home advantage, except for injected deterministic
regularities: a top-tier side hosting a bottom-tier side always wins, and
a bottom-tier side hosting a top-tier side always loses. Those rules give
the miner stable patterns that show up through budget and standing
attributes.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

from .league import LeagueDataset, MatchRecord, TeamMeta


@dataclass(frozen=True)
class SyntheticLeagueConfig:
    n_teams: int = 20
    n_seasons: int = 4
    seed: int = 20_100
    start_year: int = 2010
    division: str = "1"
    top_tier: int = 3
    bottom_tier: int = 3
    regularities: bool = True

    def __post_init__(self) -> None:
        if self.n_teams < 4 or self.n_teams % 2:
            raise ValueError("n_teams must be an even number >= 4")
        if self.n_seasons < 1:
            raise ValueError("n_seasons must be >= 1")


def season_label(start_year: int) -> str:
    return f"{start_year}-{(start_year + 1) % 100:02d}"


def team_name(index: int) -> str:
    return f"T{index + 1:02d}"


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Single round robin by the circle method; n even."""
    order = list(range(n))
    rounds = []
    for r in range(n - 1):
        pairs = []
        for i in range(n // 2):
            a, b = order[i], order[n - 1 - i]
            if (r + i) % 2 == 0:
                pairs.append((a, b))
            else:
                pairs.append((b, a))
        rounds.append(pairs)
        order = [order[0]] + [order[-1]] + order[1:-1]
    return rounds


def _clip(x: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, x))


def _sample_outcome(rng: random.Random, gap: float) -> str:
    """Result from the home side's strength surplus (gap in [-1, 1])."""
    p_home = _clip(0.46 + 0.52 * gap, 0.04, 0.94)
    p_draw = _clip(0.22 - 0.12 * abs(gap), 0.04, 1.0 - p_home - 0.02)
    r = rng.random()
    if r < p_home:
        return "1"
    if r < p_home + p_draw:
        return "X"
    return "2"


def _goals_for(rng: random.Random, outcome: str) -> tuple[int, int]:
    if outcome == "X":
        g = rng.randrange(0, 3)
        return g, g
    winner = 1 + (rng.random() < 0.45) + (rng.random() < 0.15)
    loser = rng.randrange(0, winner)
    return (winner, loser) if outcome == "1" else (loser, winner)


def generate_league(
    config: SyntheticLeagueConfig,
) -> tuple[list[MatchRecord], list[TeamMeta]]:
    rng = random.Random(config.seed)
    n = config.n_teams
    strengths = [(n - 1 - i) / (n - 1) for i in range(n)]
    budgets = [round(100.0 * 0.82**i, 2) for i in range(n)]
    top = set(range(config.top_tier))
    bottom = set(range(n - config.bottom_tier, n))

    first_half = _round_robin(n)
    schedule = first_half + [[(b, a) for a, b in rounds] for rounds in first_half]

    matches: list[MatchRecord] = []
    metas: list[TeamMeta] = []
    for s in range(config.n_seasons):
        season = season_label(config.start_year + s)
        for i in range(n):
            metas.append(
                TeamMeta(
                    team=team_name(i),
                    season=season,
                    budget=budgets[i],
                    division=config.division,
                )
            )
        for week0, pairs in enumerate(schedule):
            for home, away in pairs:
                if config.regularities and home in top and away in bottom:
                    outcome = "1"
                elif config.regularities and home in bottom and away in top:
                    outcome = "2"
                else:
                    outcome = _sample_outcome(rng, strengths[home] - strengths[away])
                hg, ag = _goals_for(rng, outcome)
                matches.append(
                    MatchRecord(
                        season=season,
                        week=week0 + 1,
                        home_team=team_name(home),
                        away_team=team_name(away),
                        home_goals=hg,
                        away_goals=ag,
                        division=config.division,
                    )
                )
    return matches, metas


def make_dataset(config: SyntheticLeagueConfig) -> LeagueDataset:
    matches, metas = generate_league(config)
    budgets = {(m.season, m.team): m for m in metas}
    return LeagueDataset(tuple(matches), budgets)


def write_csvs(config: SyntheticLeagueConfig, directory: str | Path) -> tuple[Path, Path]:
    """Write matches.csv and budgets.csv for CLI use; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    matches, metas = generate_league(config)
    matches_path = directory / "matches.csv"
    budgets_path = directory / "budgets.csv"
    with open(matches_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["season", "week", "home", "away", "home_goals", "away_goals", "division"])
        for m in matches:
            writer.writerow(
                [m.season, m.week, m.home_team, m.away_team, m.home_goals, m.away_goals, m.division]
            )
    with open(budgets_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["season", "team", "budget", "division"])
        for meta in metas:
            writer.writerow([meta.season, meta.team, meta.budget, meta.division])
    return matches_path, budgets_path
