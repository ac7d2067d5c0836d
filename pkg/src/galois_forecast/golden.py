"""One fixed fixture run used for byte-level reproducibility checks.

Everything here is pinned: the synthetic league seed, the attribute set,
the selection policy, and the inference settings. `build_golden_documents`
returns the four canonical output artifacts as bytes; the stored copies
live in tests/golden/ and must never drift between runs or platforms.
"""

from __future__ import annotations

from pathlib import Path

from .attributes import AttributeSpec, Team, build_monster
from .cli import canonical_json_bytes, lattice_documents
from .forecast import (
    BaselineConfig,
    InferenceSettings,
    SelectionPolicy,
    evaluate,
    forecast_week,
    select_context,
)
from .implications import as_fraction, mine_association_rules, rules_to_json_doc
from .league import MatchKind
from .synthetic import SyntheticLeagueConfig, make_dataset

LEAGUE = SyntheticLeagueConfig(n_teams=8, n_seasons=2, seed=321)
GAMMA = "13/20"
LOOKBACK = 14
FORECAST_WEEK = ("2011-12", 9)
LATTICE_SELECTION = ("2011-12", 5, "T01", "T04", 10)
RULES_SELECTION = ("2011-12", 6, "T03", "T01", 14)


def golden_specs() -> list[AttributeSpec]:
    return [
        AttributeSpec(17, 1.5, Team.HOME),
        AttributeSpec(17, 1.5, Team.AWAY),
        AttributeSpec(12, 2.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 2.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.HOME, n_matches=4, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.AWAY, n_matches=4, match_kind=MatchKind.ALL),
    ]


def build_golden_documents() -> dict[str, bytes]:
    dataset = make_dataset(LEAGUE)
    specs = golden_specs()
    monster = build_monster(dataset, specs)
    policy = SelectionPolicy(LOOKBACK, tuple(s.label for s in specs), as_fraction(GAMMA))
    settings = InferenceSettings()

    season, week = FORECAST_WEEK
    results = forecast_week(dataset, monster, policy, season, week, settings)
    forecasts_doc = {
        "schema_version": 1,
        "season": season,
        "week": week,
        "config": {
            "lookback": LOOKBACK,
            "gamma": str(as_fraction(GAMMA)),
            "mode": settings.mode.value,
            "home_reduction": settings.home_reduction,
        },
        "forecasts": [r.to_json_dict() for r in results],
    }

    weeks = [(season, w) for w in dataset.weeks_of(season)]
    report = evaluate(
        dataset, monster, policy, weeks, settings, BaselineConfig(trials=200)
    )

    l_season, l_week, l_home, l_away, l_lookback = LATTICE_SELECTION
    l_policy = SelectionPolicy(l_lookback, policy.attribute_subset, policy.min_confidence)
    l_ctx = select_context(monster, f"{l_season}|{l_week}|{l_home}|{l_away}", l_policy)
    _, dot_text = lattice_documents(l_ctx)

    r_season, r_week, r_home, r_away, r_lookback = RULES_SELECTION
    r_policy = SelectionPolicy(r_lookback, policy.attribute_subset, policy.min_confidence)
    r_ctx = select_context(monster, f"{r_season}|{r_week}|{r_home}|{r_away}", r_policy)
    rules = mine_association_rules(r_ctx, GAMMA, 0)

    return {
        "forecasts.json": canonical_json_bytes(forecasts_doc),
        "report.json": canonical_json_bytes(report.to_json_dict()),
        "lattice.dot": dot_text.encode("utf-8"),
        "rules.json": canonical_json_bytes(rules_to_json_doc(r_ctx, rules, GAMMA, 0)),
    }


def write_golden_files(out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, blob in build_golden_documents().items():
        path = out_dir / name
        path.write_bytes(blob)
        written.append(path)
    return written
