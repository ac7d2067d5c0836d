"""Parametrized boolean match attributes and the universal match context.

Eighteen numbered templates turn quantitative team measures into boolean
attributes via a strict ``measure > threshold`` test. Templates are
parametrized by threshold, team side, a past-match count, and a match-kind
filter; which parameters apply depends on the template (see
``KIND_PARAMS``). Boolean combinations of attributes are supported as
expression trees. Evaluating a list of specs over a whole dataset yields
the monster context: one row per match, one column per spec label, plus
the three mutually exclusive outcome columns ``1``, ``X``, ``2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

from .fca import FormalContext
from .implications import support
from .league import (
    LeagueDataset,
    MatchKind,
    MatchRecord,
    history,
    rescale_threshold,
    standings,
    week_zero_position,
)

OUTCOME_LABELS = ("1", "X", "2")


class Team(str, Enum):
    HOME = "HOME"
    AWAY = "AWAY"


class SpecError(ValueError):
    """An attribute spec has missing, extra, or invalid parameters."""


class EvaluationError(RuntimeError):
    """An attribute could not be evaluated (e.g. missing budget data)."""


KIND_DESCRIPTIONS = {
    1: "non-consecutive wins in the last matches",
    2: "non-consecutive losses in the last matches",
    3: "non-consecutive draws in the last matches",
    4: "points collected in the last matches",
    5: "position in the classification over the last matches",
    6: "positions above the opponent over the last matches",
    7: "positions below the opponent over the last matches",
    8: "wins in the last direct encounters",
    9: "losses in the last direct encounters",
    10: "draws in the last direct encounters",
    11: "position in the classification",
    12: "positions above the opponent in the classification",
    13: "positions below the opponent in the classification",
    14: "consecutive wins",
    15: "consecutive losses",
    16: "consecutive draws",
    17: "budget a multiple of the opponent's",
    18: "budget a fraction of the opponent's",
}

# Required parameters per template, mirroring the per-row parameter lists.
KIND_PARAMS: dict[int, frozenset[str]] = {}
for _k in range(1, 10):
    KIND_PARAMS[_k] = frozenset({"team", "n_matches", "match_kind"})
KIND_PARAMS[10] = frozenset({"n_matches", "match_kind"})
for _k in range(11, 17):
    KIND_PARAMS[_k] = frozenset({"team", "match_kind"})
for _k in (17, 18):
    KIND_PARAMS[_k] = frozenset({"team"})

# Templates whose measure is counted over an explicit number of matches;
# only these rescale their threshold when history runs short.
RESCALING_KINDS = frozenset({1, 2, 3, 4, 8, 9, 10})
POSITION_KINDS = frozenset({5, 6, 7, 11, 12, 13})
STREAK_KINDS = frozenset({14, 15, 16})
BUDGET_KINDS = frozenset({17, 18})


@dataclass(frozen=True)
class AttributeSpec:
    """One instantiated template; the label is canonical and injective."""

    kind: int
    threshold: float
    team: Team | None = None
    n_matches: int | None = None
    match_kind: MatchKind | None = None

    def __post_init__(self) -> None:
        if self.kind not in KIND_PARAMS:
            raise SpecError(f"unknown attribute kind {self.kind}")
        required = KIND_PARAMS[self.kind]
        given = {
            name
            for name, value in (
                ("team", self.team),
                ("n_matches", self.n_matches),
                ("match_kind", self.match_kind),
            )
            if value is not None
        }
        if given != required:
            raise SpecError(
                f"kind {self.kind} requires parameters {sorted(required)}, got {sorted(given)}"
            )
        if self.threshold < 0:
            raise SpecError("threshold must be >= 0")
        if self.n_matches is not None and self.n_matches < 1:
            raise SpecError("n_matches must be >= 1")

    @property
    def label(self) -> str:
        parts = [f"ID_{self.kind}"]
        if self.team is not None:
            parts.append(self.team.value)
        parts.append(f"T_{float(self.threshold)}")
        if self.n_matches is not None:
            parts.append(f"N_{self.n_matches}")
        if self.match_kind is not None:
            parts.append(f"K_{self.match_kind.value}")
        return "_".join(parts)

    def to_json_dict(self) -> dict:
        doc: dict = {"kind": self.kind, "threshold": self.threshold}
        if self.team is not None:
            doc["team"] = self.team.value
        if self.n_matches is not None:
            doc["n_matches"] = self.n_matches
        if self.match_kind is not None:
            doc["match_kind"] = self.match_kind.value
        return doc


Spec = Union[AttributeSpec, "CompositeSpec"]

_COMPOSITE_OPS = ("AND", "OR", "NOT")


@dataclass(frozen=True)
class CompositeSpec:
    """Boolean combination of attribute specs (AND / OR / NOT tree)."""

    op: str
    children: tuple[Spec, ...]

    def __post_init__(self) -> None:
        if self.op not in _COMPOSITE_OPS:
            raise SpecError(f"unknown composite op {self.op!r}")
        if self.op == "NOT" and len(self.children) != 1:
            raise SpecError("NOT takes exactly one child")
        if self.op in ("AND", "OR") and len(self.children) < 2:
            raise SpecError(f"{self.op} takes at least two children")

    @property
    def label(self) -> str:
        inner = ",".join(child.label for child in self.children)
        return f"{self.op}({inner})"

    def to_json_dict(self) -> dict:
        return {"op": self.op, "children": [c.to_json_dict() for c in self.children]}


def spec_from_json_dict(doc: dict) -> Spec:
    if "op" in doc:
        children = tuple(spec_from_json_dict(c) for c in doc.get("children", []))
        return CompositeSpec(op=doc["op"], children=children)
    try:
        return AttributeSpec(
            kind=int(doc["kind"]),
            threshold=float(doc["threshold"]),
            team=Team(doc["team"]) if "team" in doc else None,
            n_matches=int(doc["n_matches"]) if "n_matches" in doc else None,
            match_kind=MatchKind(doc["match_kind"]) if "match_kind" in doc else None,
        )
    except KeyError as exc:
        raise SpecError(f"spec is missing key {exc}") from exc
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def load_specs(path: str | Path) -> list[Spec]:
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, list):
        raise SpecError("attribute config must be a JSON list of specs")
    return [spec_from_json_dict(entry) for entry in doc]


def save_specs(specs: Sequence[Spec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump([s.to_json_dict() for s in specs], handle, indent=2)
        handle.write("\n")


def load_preset(name: str) -> list[Spec]:
    """Packaged attribute sets: ``baseline``, ``strict``, or ``home_tilted``."""
    package = resources.files("galois_forecast").joinpath("presets", f"{name}.json")
    try:
        doc = json.loads(package.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SpecError(f"unknown preset {name!r}") from None
    return [spec_from_json_dict(entry) for entry in doc]


@dataclass(frozen=True)
class EvaluationDetail:
    """Outcome of one attribute evaluation, with provenance flags.

    Flags: ``rescaled`` (threshold shrunk for short history), ``week_zero``
    (standing substituted at a season start), ``cross_division`` (history
    reached matches from another division).
    """

    value: bool
    measure: float | None
    threshold: float
    flags: frozenset[str]


def _sides(spec: AttributeSpec, match: MatchRecord) -> tuple[str, str]:
    # Kind 10 has no team parameter (draws are symmetric); evaluate it from
    # the fixture's home side so the match-kind filter has a reference team.
    if spec.team is Team.AWAY:
        return match.away_team, match.home_team
    return match.home_team, match.away_team


def _count_results(matches: Sequence[MatchRecord], team: str, wanted: str) -> int:
    return sum(1 for m in matches if m.result_for(team) == wanted)


def _points(matches: Sequence[MatchRecord], team: str) -> int:
    total = 0
    for m in matches:
        r = m.result_for(team)
        total += 3 if r == "W" else 1 if r == "D" else 0
    return total


def _streak(matches: Sequence[MatchRecord], team: str, wanted: str) -> int:
    run = 0
    for m in reversed(matches):
        if m.result_for(team) == wanted:
            run += 1
        else:
            break
    return run


def evaluate_detailed(
    spec: Spec, match: MatchRecord, dataset: LeagueDataset
) -> EvaluationDetail:
    """Evaluate a spec for one match, reporting provenance flags."""
    if isinstance(spec, CompositeSpec):
        details = [evaluate_detailed(c, match, dataset) for c in spec.children]
        flags = frozenset().union(*(d.flags for d in details))
        if spec.op == "NOT":
            value = not details[0].value
        elif spec.op == "AND":
            value = all(d.value for d in details)
        else:
            value = any(d.value for d in details)
        return EvaluationDetail(value, None, 0.0, flags)

    subject, opponent = _sides(spec, match)
    when = (match.season, match.week)
    flags: set[str] = set()
    threshold = spec.threshold
    kind = spec.kind

    if kind in BUDGET_KINDS:
        own = dataset.budget_of(subject, match.season)
        other = dataset.budget_of(opponent, match.season)
        if own is None or other is None:
            missing = subject if own is None else opponent
            raise EvaluationError(
                f"no budget for {missing!r} in {match.season}; kinds 17/18 need budget data"
            )
        if kind == 17:
            value = own > threshold * other
            measure = own / other
        else:
            value = other > threshold * own
            measure = other / own
        return EvaluationDetail(value, measure, threshold, frozenset(flags))

    if kind in POSITION_KINDS:
        through = match.week - 1
        if through == 0:
            own_pos = week_zero_position(dataset, subject, match.season).position
            opp_pos = week_zero_position(dataset, opponent, match.season).position
            flags.add("week_zero")
        else:
            table = standings(
                dataset,
                match.season,
                through,
                window=spec.n_matches if kind in (5, 6, 7) else None,
                kind=spec.match_kind,
                division=match.division,
            )
            own_pos = table.position(subject)
            opp_pos = table.position(opponent)
        if kind in (5, 11):
            measure = float(own_pos)
        elif kind in (6, 12):
            measure = float(opp_pos - own_pos)
        else:
            measure = float(own_pos - opp_pos)
        return EvaluationDetail(measure > threshold, measure, threshold, frozenset(flags))

    if kind in (8, 9, 10):
        past = history(
            dataset, subject, when, spec.n_matches, spec.match_kind, opponent=opponent
        )
    else:
        past = history(
            dataset,
            subject,
            when,
            spec.n_matches if kind in RESCALING_KINDS else None,
            spec.match_kind,
        )

    if any(m.division != match.division for m in past):
        flags.add("cross_division")
    if kind in RESCALING_KINDS and len(past) < spec.n_matches:
        threshold = rescale_threshold(threshold, len(past), spec.n_matches)
        flags.add("rescaled")

    if kind in (1, 8, 14):
        wanted = "W"
    elif kind in (2, 9, 15):
        wanted = "L"
    else:
        wanted = "D"

    if kind in STREAK_KINDS:
        measure = float(_streak(past, subject, wanted))
    elif kind == 4:
        measure = float(_points(past, subject))
    else:
        measure = float(_count_results(past, subject, wanted))
    return EvaluationDetail(measure > threshold, measure, threshold, frozenset(flags))


def evaluate(spec: Spec, match: MatchRecord, dataset: LeagueDataset) -> bool:
    return evaluate_detailed(spec, match, dataset).value


def evaluate_composite(
    spec: CompositeSpec, match: MatchRecord, dataset: LeagueDataset
) -> bool:
    return evaluate_detailed(spec, match, dataset).value


@dataclass
class MonsterContext:
    """The universal context: every match against every configured attribute.

    ``provenance`` maps (object index, attribute index) to the flags raised
    while evaluating that cell; cells without flags are absent.
    """

    context: FormalContext
    matches: tuple[MatchRecord, ...]
    global_weeks: tuple[int, ...]
    provenance: dict[tuple[int, int], frozenset[str]]

    @property
    def match_index(self) -> dict[str, int]:
        if not hasattr(self, "_match_index"):
            self._match_index = {m.match_id: i for i, m in enumerate(self.matches)}
        return self._match_index

    def incidence_count(self) -> int:
        return sum(row.bit_count() for row in self.context.rows)


def build_monster(dataset: LeagueDataset, specs: Sequence[Spec]) -> MonsterContext:
    """Evaluate every spec on every match; columns follow declaration order.

    The three outcome columns are appended last; exactly one of them is set
    per row. Duplicate spec labels are rejected.
    """
    labels = [spec.label for spec in specs]
    duplicates = {l for l in labels if labels.count(l) > 1}
    if duplicates:
        raise SpecError(f"duplicate attribute labels: {sorted(duplicates)}")
    overlap = set(labels) & set(OUTCOME_LABELS)
    if overlap:
        raise SpecError(f"attribute labels collide with outcomes: {sorted(overlap)}")

    all_labels = tuple(labels) + OUTCOME_LABELS
    rows: list[int] = []
    provenance: dict[tuple[int, int], frozenset[str]] = {}
    for i, match in enumerate(dataset.matches):
        row = 0
        for j, spec in enumerate(specs):
            detail = evaluate_detailed(spec, match, dataset)
            if detail.value:
                row |= 1 << j
            if detail.flags:
                provenance[(i, j)] = detail.flags
        outcome_pos = len(specs) + OUTCOME_LABELS.index(match.outcome)
        row |= 1 << outcome_pos
        rows.append(row)

    ctx = FormalContext(
        objects=tuple(m.match_id for m in dataset.matches),
        attributes=all_labels,
        rows=tuple(rows),
    )
    global_weeks = tuple(dataset.global_week(m.season, m.week) for m in dataset.matches)
    return MonsterContext(ctx, dataset.matches, global_weeks, provenance)


def strictness(monster: MonsterContext, label: str) -> Fraction:
    """Support of one column; low support marks a strict attribute."""
    ctx = monster.context
    if label not in ctx.attribute_index:
        raise KeyError(f"unknown attribute label {label!r}")
    return support(ctx, 1 << ctx.attribute_index[label])


def strictness_ranking(monster: MonsterContext) -> list[tuple[str, Fraction]]:
    """All non-outcome columns ordered from strictest (lowest support) up."""
    pairs = [
        (label, strictness(monster, label))
        for label in monster.context.attributes
        if label not in OUTCOME_LABELS
    ]
    pairs.sort(key=lambda p: (p[1], p[0]))
    return pairs
