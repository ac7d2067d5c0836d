"""League match data: ingestion, standings, histories, and season fix-ups.

The canonical inputs are two CSV files (UTF-8, header row required):

* matches: ``season,week,home,away,home_goals,away_goals,division``
* budgets: ``season,team,budget,division``

Seasons are year pairs like ``2009-10`` and order chronologically by their
leading year. Weeks of consecutive seasons are glued into one continuous
timeline so history windows can reach back across a season boundary.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence


class MatchKind(str, Enum):
    """Which side of a team's past matches a query considers."""

    AS_HOME = "AS_HOME"
    AS_AWAY = "AS_AWAY"
    ALL = "ALL"


class IngestError(ValueError):
    """A row could not be parsed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ValueError):
    """The parsed dataset violates structural rules."""

    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class UnknownSeasonError(KeyError):
    pass


_SEASON_RE = re.compile(r"^(\d{4})-(\d{2,4})$")


def season_start_year(season: str) -> int:
    m = _SEASON_RE.match(season)
    if not m:
        raise ValueError(f"malformed season {season!r}, expected e.g. 2009-10")
    return int(m.group(1))


def division_rank(division: str) -> tuple[int, object]:
    """Sort key where smaller means higher division (1 beats 2)."""
    m = re.match(r"^(\d+)", division.strip())
    if m:
        return (0, int(m.group(1)))
    return (1, division)


@dataclass(frozen=True)
class MatchRecord:
    season: str
    week: int
    home_team: str
    away_team: str
    home_goals: int
    away_goals: int
    division: str

    @property
    def outcome(self) -> str:
        if self.home_goals > self.away_goals:
            return "1"
        if self.home_goals == self.away_goals:
            return "X"
        return "2"

    @property
    def match_id(self) -> str:
        return f"{self.season}|{self.week}|{self.home_team}|{self.away_team}"

    def involves(self, team: str) -> bool:
        return team in (self.home_team, self.away_team)

    def result_for(self, team: str) -> str:
        """'W', 'D', or 'L' from the given team's perspective."""
        if team == self.home_team:
            diff = self.home_goals - self.away_goals
        elif team == self.away_team:
            diff = self.away_goals - self.home_goals
        else:
            raise ValueError(f"{team!r} did not play in {self.match_id}")
        return "W" if diff > 0 else "D" if diff == 0 else "L"

    def goal_diff_for(self, team: str) -> int:
        if team == self.home_team:
            return self.home_goals - self.away_goals
        if team == self.away_team:
            return self.away_goals - self.home_goals
        raise ValueError(f"{team!r} did not play in {self.match_id}")


@dataclass(frozen=True)
class TeamMeta:
    team: str
    season: str
    budget: float
    division: str


@dataclass(frozen=True)
class StandingsRow:
    team: str
    points: int
    goal_diff: int
    position: int


@dataclass(frozen=True)
class StandingsTable:
    season: str
    through_week: int
    rows: tuple[StandingsRow, ...]

    def position(self, team: str) -> int:
        for row in self.rows:
            if row.team == team:
                return row.position
        raise KeyError(f"{team!r} not in standings for {self.season}")


class WeekZero(NamedTuple):
    """Substitute position for the start of a season, with its basis."""

    position: int
    basis: str  # final-previous-season | relegated-from-higher | promoted-from-lower | no-history


def _matches_kind(match: MatchRecord, team: str, kind: MatchKind) -> bool:
    if kind is MatchKind.ALL:
        return True
    if kind is MatchKind.AS_HOME:
        return match.home_team == team
    return match.away_team == team


@dataclass
class LeagueDataset:
    """Validated, immutable match data with query indexes.

    Matches are stored sorted by (season, week, home, away); all queries
    are pure reads, so a dataset can be shared freely.
    """

    matches: tuple[MatchRecord, ...]
    budgets: Mapping[tuple[str, str], TeamMeta] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ordered = sorted(
            self.matches,
            key=lambda m: (season_start_year(m.season), m.week, m.home_team, m.away_team),
        )
        self.matches = tuple(ordered)
        self.seasons: tuple[str, ...] = tuple(
            sorted({m.season for m in self.matches}, key=season_start_year)
        )
        self._season_max_week = {
            s: max((m.week for m in self.matches if m.season == s), default=0)
            for s in self.seasons
        }
        self._offsets: dict[str, int] = {}
        running = 0
        for s in self.seasons:
            self._offsets[s] = running
            running += self._season_max_week[s]

        self._team_timeline: dict[str, list[tuple[int, MatchRecord]]] = {}
        self._pair_timeline: dict[frozenset, list[tuple[int, MatchRecord]]] = {}
        self._by_week: dict[tuple[str, int], list[MatchRecord]] = {}
        self._season_team_matches: dict[tuple[str, str], list[MatchRecord]] = {}
        self._division_teams: dict[tuple[str, str], set[str]] = {}
        self._team_division: dict[tuple[str, str], str] = {}
        for m in self.matches:
            g = self.global_week(m.season, m.week)
            for team in (m.home_team, m.away_team):
                self._team_timeline.setdefault(team, []).append((g, m))
                self._season_team_matches.setdefault((m.season, team), []).append(m)
                self._division_teams.setdefault((m.season, m.division), set()).add(team)
                self._team_division.setdefault((m.season, team), m.division)
            self._pair_timeline.setdefault(
                frozenset((m.home_team, m.away_team)), []
            ).append((g, m))
            self._by_week.setdefault((m.season, m.week), []).append(m)
        self._standings_cache: dict[tuple, StandingsTable] = {}

    def global_week(self, season: str, week: int) -> int:
        """Week index on the continuous timeline across seasons."""
        if season not in self._offsets:
            raise UnknownSeasonError(season)
        return self._offsets[season] + week

    def max_week(self, season: str) -> int:
        if season not in self._season_max_week:
            raise UnknownSeasonError(season)
        return self._season_max_week[season]

    def matches_at(self, season: str, week: int) -> tuple[MatchRecord, ...]:
        return tuple(self._by_week.get((season, week), ()))

    def weeks_of(self, season: str) -> tuple[int, ...]:
        return tuple(range(1, self.max_week(season) + 1))

    def teams_of(self, season: str, division: str | None = None) -> tuple[str, ...]:
        if division is None:
            teams: set[str] = set()
            for (s, _d), ts in self._division_teams.items():
                if s == season:
                    teams |= ts
            return tuple(sorted(teams))
        return tuple(sorted(self._division_teams.get((season, division), ())))

    def division_of(self, team: str, season: str) -> str | None:
        div = self._team_division.get((season, team))
        if div is None:
            meta = self.budgets.get((season, team))
            div = meta.division if meta else None
        return div

    def previous_season(self, season: str) -> str | None:
        if season not in self._offsets:
            raise UnknownSeasonError(season)
        idx = self.seasons.index(season)
        return self.seasons[idx - 1] if idx > 0 else None

    def budget_of(self, team: str, season: str) -> float | None:
        meta = self.budgets.get((season, team))
        return meta.budget if meta else None


def ingest(
    matches_path: str | Path, budgets_path: str | Path | None = None
) -> LeagueDataset:
    """Read and validate the CSV inputs into a dataset.

    Parse failures raise :class:`IngestError` with the offending line;
    structural problems (duplicate fixtures, non-contiguous weeks, bad
    values) are collected and raised together as :class:`ValidationError`.
    """
    matches = _read_matches(Path(matches_path))
    budgets = _read_budgets(Path(budgets_path)) if budgets_path else {}
    problems: list[str] = []

    seen: set[tuple[str, int, str, str]] = set()
    for m in matches:
        key = (m.season, m.week, m.home_team, m.away_team)
        if key in seen:
            problems.append(f"duplicate fixture {m.match_id}")
        seen.add(key)
        if m.home_team == m.away_team:
            problems.append(f"{m.match_id}: team plays itself")
        if m.week < 1:
            problems.append(f"{m.match_id}: week must be >= 1")
        if m.home_goals < 0 or m.away_goals < 0:
            problems.append(f"{m.match_id}: negative goals")

    by_season: dict[str, set[int]] = {}
    for m in matches:
        by_season.setdefault(m.season, set()).add(m.week)
    for season, weeks in sorted(by_season.items()):
        expected = set(range(1, max(weeks) + 1))
        if weeks != expected:
            missing = sorted(expected - weeks)
            problems.append(f"season {season}: missing weeks {missing}")

    for meta in budgets.values():
        if meta.budget <= 0:
            problems.append(f"budget for {meta.team} in {meta.season} must be > 0")

    if problems:
        raise ValidationError(problems)
    return LeagueDataset(tuple(matches), budgets)


def _require_columns(reader: csv.DictReader, required: Sequence[str], path: Path) -> None:
    names = reader.fieldnames or []
    missing = [c for c in required if c not in names]
    if missing:
        raise IngestError(1, f"{path.name}: missing columns {missing}")


def _read_matches(path: Path) -> list[MatchRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return []
        _require_columns(
            reader,
            ["season", "week", "home", "away", "home_goals", "away_goals", "division"],
            path,
        )
        for row in reader:
            line = reader.line_num
            try:
                season = row["season"].strip()
                season_start_year(season)
                records.append(
                    MatchRecord(
                        season=season,
                        week=int(row["week"]),
                        home_team=row["home"].strip(),
                        away_team=row["away"].strip(),
                        home_goals=int(row["home_goals"]),
                        away_goals=int(row["away_goals"]),
                        division=row["division"].strip(),
                    )
                )
            except (ValueError, TypeError, AttributeError) as exc:
                raise IngestError(line, f"{path.name}: {exc}") from exc
    return records


def _read_budgets(path: Path) -> dict[tuple[str, str], TeamMeta]:
    budgets: dict[tuple[str, str], TeamMeta] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return {}
        _require_columns(reader, ["season", "team", "budget", "division"], path)
        for row in reader:
            line = reader.line_num
            try:
                season = row["season"].strip()
                season_start_year(season)
                team = row["team"].strip()
                meta = TeamMeta(
                    team=team,
                    season=season,
                    budget=float(row["budget"]),
                    division=row["division"].strip(),
                )
            except (ValueError, TypeError, AttributeError) as exc:
                raise IngestError(line, f"{path.name}: {exc}") from exc
            if (season, team) in budgets:
                raise IngestError(line, f"{path.name}: duplicate budget for {team} {season}")
            budgets[(season, team)] = meta
    return budgets


def standings(
    dataset: LeagueDataset,
    season: str,
    through_week: int,
    window: int | None = None,
    kind: MatchKind = MatchKind.ALL,
    division: str | None = None,
) -> StandingsTable:
    """Classification table over matches played up to (and including) a week.

    ``window`` keeps only each team's most recent matches of the given
    kind; None means the whole season so far. Points are 3-1-0; ties break
    by goal difference, then team identifier.
    """
    if season not in dataset._offsets:
        raise UnknownSeasonError(season)
    if through_week < 1:
        raise ValueError("through_week must be >= 1; week 0 uses the season fix-up")
    key = (season, through_week, window, kind, division)
    cached = dataset._standings_cache.get(key)
    if cached is not None:
        return cached

    teams = dataset.teams_of(season, division)
    scored = []
    for team in teams:
        played = [
            m
            for m in dataset._season_team_matches.get((season, team), ())
            if m.week <= through_week and _matches_kind(m, team, kind)
        ]
        if window is not None:
            played = played[-window:] if window > 0 else []
        points = sum(3 if m.result_for(team) == "W" else 1 if m.result_for(team) == "D" else 0 for m in played)
        goal_diff = sum(m.goal_diff_for(team) for m in played)
        scored.append((team, points, goal_diff))
    scored.sort(key=lambda t: (-t[1], -t[2], t[0]))
    rows = tuple(
        StandingsRow(team=t, points=p, goal_diff=gd, position=i + 1)
        for i, (t, p, gd) in enumerate(scored)
    )
    table = StandingsTable(season=season, through_week=through_week, rows=rows)
    dataset._standings_cache[key] = table
    return table


def week_zero_position(dataset: LeagueDataset, team: str, season: str) -> WeekZero:
    """Standing substitute for the first week of a season.

    Same division as last season: the team's final position then. Coming
    down from a higher division: first position. Coming up from a lower
    one, or no history at all: last position.
    """
    current_division = dataset.division_of(team, season)
    n_teams = len(dataset.teams_of(season, current_division))
    previous = dataset.previous_season(season)
    if previous is None:
        return WeekZero(max(n_teams, 1), "no-history")
    previous_division = dataset.division_of(team, previous)
    if previous_division is None:
        return WeekZero(max(n_teams, 1), "no-history")
    if current_division is None or division_rank(previous_division) == division_rank(
        current_division
    ):
        table = standings(
            dataset,
            previous,
            dataset.max_week(previous),
            window=None,
            kind=MatchKind.ALL,
            division=previous_division,
        )
        return WeekZero(table.position(team), "final-previous-season")
    if division_rank(previous_division) < division_rank(current_division):
        return WeekZero(1, "relegated-from-higher")
    return WeekZero(max(n_teams, 1), "promoted-from-lower")


def history(
    dataset: LeagueDataset,
    team: str,
    before: tuple[str, int],
    n: int | None,
    kind: MatchKind = MatchKind.ALL,
    opponent: str | None = None,
) -> list[MatchRecord]:
    """The team's most recent matches strictly before a week, oldest first.

    The timeline is continuous across seasons. ``opponent`` restricts the
    query to direct encounters between the two teams. May return fewer
    than ``n`` matches; the caller rescales thresholds accordingly.
    """
    if n is not None and n <= 0:
        return []
    season, week = before
    cutoff = dataset.global_week(season, week)
    if opponent is not None:
        timeline = dataset._pair_timeline.get(frozenset((team, opponent)), [])
    else:
        timeline = dataset._team_timeline.get(team, [])
    picked = [
        m
        for g, m in timeline
        if g < cutoff and _matches_kind(m, team, kind)
    ]
    if n is not None:
        picked = picked[-n:]
    return picked


def rescale_threshold(gamma_old: float, available: int, needed: int) -> float:
    """Shrink a threshold in proportion to the history actually available."""
    if needed < 1:
        raise ValueError("needed must be >= 1")
    if available < 0:
        raise ValueError("available must be >= 0")
    if available >= needed:
        return gamma_old
    return gamma_old * available / needed
