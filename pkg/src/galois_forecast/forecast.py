"""Contextual selection, per-week knowledge bases, forecasting, evaluation.

A selection policy fixes a lookback window (in weeks, on the continuous
timeline) and an attribute subset. Every match of a given week shares the
same window, so the mined knowledge base is computed once per week. The
evaluation harness scores the pipeline week by week against configurable
baselines: always-home, seeded weighted-random pickers, and an optional
file of externally collected picks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from statistics import pstdev
from typing import Mapping, Sequence

from .attributes import OUTCOME_LABELS, MonsterContext
from .fca import FormalContext
from .implications import FractionLike, as_fraction, mine_association_rules
from .inference import (
    Fact,
    Forecast,
    InferenceError,
    KnowledgeBase,
    PropagationMode,
    forecast_match,
)
from .league import LeagueDataset, MatchRecord


class SelectionError(ValueError):
    """The selection policy does not fit the monster context."""


@dataclass(frozen=True)
class SelectionPolicy:
    """Lookback window, attribute subset, and confidence threshold."""

    lookback_weeks: int
    attribute_subset: tuple[str, ...]
    min_confidence: Fraction

    def __post_init__(self) -> None:
        if self.lookback_weeks < 1:
            raise SelectionError("lookback_weeks must be >= 1")
        gamma = as_fraction(self.min_confidence)
        if not 0 < gamma <= 1:
            raise SelectionError(f"min_confidence must be in (0, 1], got {gamma}")
        object.__setattr__(self, "min_confidence", gamma)
        object.__setattr__(self, "attribute_subset", tuple(self.attribute_subset))


@dataclass(frozen=True)
class InferenceSettings:
    mode: PropagationMode = PropagationMode.MIN_PRODUCT
    home_reduction: float = 0.85


def _selection_columns(monster: MonsterContext, policy: SelectionPolicy) -> list[int]:
    ctx = monster.context
    unknown = [a for a in policy.attribute_subset if a not in ctx.attribute_index]
    if unknown:
        raise SelectionError(f"unknown attribute labels: {unknown}")
    columns: list[int] = []
    for label in policy.attribute_subset:
        j = ctx.attribute_index[label]
        if j not in columns:
            columns.append(j)
    for label in OUTCOME_LABELS:
        j = ctx.attribute_index[label]
        if j not in columns:
            columns.append(j)
    return columns


def _window_rows(
    monster: MonsterContext, target_global_week: int, lookback: int
) -> list[int]:
    lo = target_global_week - lookback
    hi = target_global_week - 1
    return [i for i, g in enumerate(monster.global_weeks) if lo <= g <= hi]


def select_context(
    monster: MonsterContext, match_id: str, policy: SelectionPolicy
) -> FormalContext:
    """Subcontext of the rows strictly before the match, within the lookback.

    The target match is never part of its own selection: only strictly
    earlier weeks qualify. The selection can legitimately be empty early
    in the data; callers fall back to prior-only forecasts then.
    """
    try:
        idx = monster.match_index[match_id]
    except KeyError:
        raise SelectionError(f"unknown match {match_id!r}") from None
    rows = _window_rows(monster, monster.global_weeks[idx], policy.lookback_weeks)
    return monster.context.subcontext(rows, _selection_columns(monster, policy))


def contextual_kb(subctx: FormalContext, gamma: FractionLike) -> KnowledgeBase:
    """Knowledge base of a selection: its rules above gamma, plus priors.

    An empty (degenerate) selection yields a rule-free knowledge base whose
    priors are all 1; forecasts built on it are prior-only by construction.
    """
    if subctx.n_objects == 0:
        return KnowledgeBase.from_context(subctx, rules=(), degenerate=True)
    rules = mine_association_rules(subctx, gamma, 0)
    return KnowledgeBase.from_context(subctx, rules=rules)


@dataclass(frozen=True)
class MatchForecast:
    """Pipeline output for one fixture."""

    match: MatchRecord
    forecast: Forecast | None
    error: str | None
    selection_objects: tuple[str, ...]
    degenerate: bool

    @property
    def pick(self) -> str | None:
        return self.forecast.pick if self.forecast else None

    @property
    def hit(self) -> bool:
        return self.forecast is not None and self.forecast.pick == self.match.outcome

    def to_json_dict(self) -> dict:
        doc: dict = {"match": self.match.match_id}
        if self.forecast is not None:
            doc.update(self.forecast.to_json_dict())
            doc["match"] = self.match.match_id
        doc["degenerate"] = self.degenerate
        if self.error is not None:
            doc["error"] = self.error
        return doc


def _facts_for(monster: MonsterContext, idx: int, policy: SelectionPolicy) -> list[Fact]:
    ctx = monster.context
    row = ctx.rows[idx]
    facts = []
    for label in policy.attribute_subset:
        j = ctx.attribute_index[label]
        if row >> j & 1:
            facts.append(Fact(label, 1.0))
    return facts


def forecast_week(
    dataset: LeagueDataset,
    monster: MonsterContext,
    policy: SelectionPolicy,
    season: str,
    week: int,
    settings: InferenceSettings = InferenceSettings(),
) -> list[MatchForecast]:
    """Forecast every fixture of a week; one failing match does not abort it.

    All fixtures of a week share the same selection window, so the
    knowledge base is mined once and reused.
    """
    fixtures = dataset.matches_at(season, week)
    if not fixtures:
        return []
    g = dataset.global_week(season, week)
    rows = _window_rows(monster, g, policy.lookback_weeks)
    subctx = monster.context.subcontext(rows, _selection_columns(monster, policy))
    kb = contextual_kb(subctx, policy.min_confidence)
    selection_objects = subctx.objects

    results = []
    for match in fixtures:
        idx = monster.match_index[match.match_id]
        if match.match_id in subctx.object_index:
            raise SelectionError(f"selection for {match.match_id} contains itself")
        try:
            facts = _facts_for(monster, idx, policy)
            fc = forecast_match(kb, facts, settings.home_reduction, settings.mode)
            results.append(
                MatchForecast(match, fc, None, selection_objects, kb.degenerate)
            )
        except InferenceError as exc:
            results.append(
                MatchForecast(match, None, str(exc), selection_objects, kb.degenerate)
            )
    return results


@dataclass(frozen=True)
class WeekScore:
    season: str
    week: int
    matches: int
    hits: int
    pool_matches: int
    pool_hits: int

    @property
    def hit_rate(self) -> float:
        return self.hits / self.matches if self.matches else 0.0


@dataclass(frozen=True)
class BaselineScore:
    name: str
    mean_hits: float
    mean_rate: float
    std_rate: float
    per_week_mean_hits: tuple[float, ...]
    covered: int


@dataclass
class EvaluationReport:
    weeks: tuple[WeekScore, ...]
    baselines: tuple[BaselineScore, ...]
    forecasts: tuple[MatchForecast, ...]
    pool_size: int

    @property
    def total_matches(self) -> int:
        return sum(w.matches for w in self.weeks)

    @property
    def total_hits(self) -> int:
        return sum(w.hits for w in self.weeks)

    @property
    def hit_rate(self) -> float:
        return self.total_hits / self.total_matches if self.total_matches else 0.0

    @property
    def pool_matches(self) -> int:
        return sum(w.pool_matches for w in self.weeks)

    @property
    def pool_hits(self) -> int:
        return sum(w.pool_hits for w in self.weeks)

    @property
    def pool_hit_rate(self) -> float:
        return self.pool_hits / self.pool_matches if self.pool_matches else 0.0

    @property
    def beat_all_baselines(self) -> bool:
        return all(self.hit_rate > b.mean_rate for b in self.baselines)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "pool_size": self.pool_size,
            "weeks": [
                {
                    "season": w.season,
                    "week": w.week,
                    "matches": w.matches,
                    "hits": w.hits,
                    "hit_rate": w.hit_rate,
                    "pool_matches": w.pool_matches,
                    "pool_hits": w.pool_hits,
                }
                for w in self.weeks
            ],
            "totals": {
                "matches": self.total_matches,
                "hits": self.total_hits,
                "hit_rate": self.hit_rate,
                "pool_matches": self.pool_matches,
                "pool_hits": self.pool_hits,
                "pool_hit_rate": self.pool_hit_rate,
            },
            "baselines": [
                {
                    "name": b.name,
                    "mean_hits": b.mean_hits,
                    "mean_rate": b.mean_rate,
                    "std_rate": b.std_rate,
                    "covered": b.covered,
                    "per_week_mean_hits": list(b.per_week_mean_hits),
                }
                for b in self.baselines
            ],
            "beat_all_baselines": self.beat_all_baselines,
        }

    def to_csv_text(self) -> str:
        headers = ["season", "week", "matches", "hits", "hit_rate", "pool_matches", "pool_hits"]
        headers.extend(b.name for b in self.baselines)
        lines = [",".join(headers)]
        for i, w in enumerate(self.weeks):
            cells = [
                w.season,
                str(w.week),
                str(w.matches),
                str(w.hits),
                f"{w.hit_rate:.6f}",
                str(w.pool_matches),
                str(w.pool_hits),
            ]
            cells.extend(f"{b.per_week_mean_hits[i]:.6f}" for b in self.baselines)
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def tally_picks(
    picks: Sequence[str | None], outcomes: Sequence[str]
) -> tuple[int, int]:
    """(hits, covered) for a pick sequence; None picks are uncovered."""
    hits = 0
    covered = 0
    for pick, actual in zip(picks, outcomes):
        if pick is None:
            continue
        covered += 1
        if pick == actual:
            hits += 1
    return hits, covered


def expected_weighted_rate(
    probabilities: tuple[float, float, float], outcomes: Sequence[str]
) -> float:
    """Closed-form hit rate of a weighted-random picker on given outcomes."""
    if not outcomes:
        return 0.0
    freq = {o: outcomes.count(o) / len(outcomes) for o in ("1", "X", "2")}
    p1, px, p2 = probabilities
    return p1 * freq["1"] + px * freq["X"] + p2 * freq["2"]


def _draw_pick(rng: random.Random, probabilities: tuple[float, float, float]) -> str:
    r = rng.random()
    p1, px, _ = probabilities
    if r < p1:
        return "1"
    if r < p1 + px:
        return "X"
    return "2"


@dataclass(frozen=True)
class BaselineConfig:
    always_home: bool = True
    weighted: tuple[tuple[float, float, float], ...] = (
        (0.55, 0.23, 0.22),
        (0.65, 0.18, 0.17),
    )
    trials: int = 1000
    seed: int = 7_031
    most_voted: Mapping[str, str] | None = None  # match_id -> pick


def weighted_name(probabilities: tuple[float, float, float]) -> str:
    return "weighted_" + "_".join(str(round(p * 100)) for p in probabilities)


def _score_weighted(
    probabilities: tuple[float, float, float],
    week_outcomes: Sequence[Sequence[str]],
    trials: int,
    seed: int,
) -> BaselineScore:
    n_weeks = len(week_outcomes)
    total = sum(len(w) for w in week_outcomes)
    week_sums = [0] * n_weeks
    trial_rates = []
    rng = random.Random(seed)
    for _ in range(trials):
        trial_hits = 0
        for wi, outcomes in enumerate(week_outcomes):
            week_hits = 0
            for actual in outcomes:
                if _draw_pick(rng, probabilities) == actual:
                    week_hits += 1
            week_sums[wi] += week_hits
            trial_hits += week_hits
        trial_rates.append(trial_hits / total if total else 0.0)
    mean_rate = sum(trial_rates) / trials if trials else 0.0
    return BaselineScore(
        name=weighted_name(probabilities),
        mean_hits=mean_rate * total,
        mean_rate=mean_rate,
        std_rate=pstdev(trial_rates) if trials > 1 else 0.0,
        per_week_mean_hits=tuple(s / trials for s in week_sums) if trials else (0.0,) * n_weeks,
        covered=total,
    )


def evaluate(
    dataset: LeagueDataset,
    monster: MonsterContext,
    policy: SelectionPolicy,
    weeks: Sequence[tuple[str, int]],
    settings: InferenceSettings = InferenceSettings(),
    baselines: BaselineConfig = BaselineConfig(),
    pool_size: int = 15,
) -> EvaluationReport:
    """Run the pipeline over the given weeks and score it against baselines.

    A hit is a pick equal to the actual outcome. Pool tallies score only
    the first ``pool_size`` fixtures of each week, mirroring a betting
    slip; both tallies are reported.
    """
    week_scores = []
    all_forecasts: list[MatchForecast] = []
    week_outcome_lists: list[list[str]] = []
    for season, week in weeks:
        forecasts = forecast_week(dataset, monster, policy, season, week, settings)
        picks = [f.pick for f in forecasts]
        outcomes = [f.match.outcome for f in forecasts]
        hits, _ = tally_picks(picks, outcomes)
        pool_hits, _ = tally_picks(picks[:pool_size], outcomes[:pool_size])
        week_scores.append(
            WeekScore(
                season=season,
                week=week,
                matches=len(forecasts),
                hits=hits,
                pool_matches=min(pool_size, len(forecasts)),
                pool_hits=pool_hits,
            )
        )
        all_forecasts.extend(forecasts)
        week_outcome_lists.append(outcomes)

    baseline_scores: list[BaselineScore] = []
    if baselines.always_home:
        per_week = tuple(
            float(sum(1 for o in outcomes if o == "1")) for outcomes in week_outcome_lists
        )
        total = sum(len(w) for w in week_outcome_lists)
        hits = sum(per_week)
        baseline_scores.append(
            BaselineScore(
                name="always_home",
                mean_hits=hits,
                mean_rate=hits / total if total else 0.0,
                std_rate=0.0,
                per_week_mean_hits=per_week,
                covered=total,
            )
        )
    for bi, probabilities in enumerate(baselines.weighted):
        baseline_scores.append(
            _score_weighted(
                probabilities, week_outcome_lists, baselines.trials, baselines.seed + bi
            )
        )
    if baselines.most_voted is not None:
        per_week = []
        hits = 0
        covered = 0
        offset = 0
        for (season, week), outcomes in zip(weeks, week_outcome_lists):
            week_hits = 0
            for f in all_forecasts[offset : offset + len(outcomes)]:
                pick = baselines.most_voted.get(f.match.match_id)
                if pick is None:
                    continue
                covered += 1
                if pick == f.match.outcome:
                    week_hits += 1
            hits += week_hits
            per_week.append(float(week_hits))
            offset += len(outcomes)
        baseline_scores.append(
            BaselineScore(
                name="most_voted",
                mean_hits=float(hits),
                mean_rate=hits / covered if covered else 0.0,
                std_rate=0.0,
                per_week_mean_hits=tuple(per_week),
                covered=covered,
            )
        )

    return EvaluationReport(
        weeks=tuple(week_scores),
        baselines=tuple(baseline_scores),
        forecasts=tuple(all_forecasts),
        pool_size=pool_size,
    )
