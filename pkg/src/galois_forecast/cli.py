"""Command-line entry point: ingest, lattice, mine, forecast, evaluate, serve.

Relative --data/--budgets/--attributes paths resolve against the
GALOIS_DATA_DIR environment variable when set. All outputs are UTF-8
JSON, CSV, or DOT, written through one canonical serializer so repeated
runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import click

from . import attributes as attr_mod
from . import forecast as forecast_mod
from .fca import FormalContext, enumerate_concepts, lattice_to_dot, lattice_to_json_doc
from .implications import as_fraction, mine_association_rules, rules_to_json_doc, rules_to_text
from .inference import PropagationMode
from .league import IngestError, LeagueDataset, ValidationError, ingest


def canonical_json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


class CliError(click.ClickException):
    exit_code = 2


def resolve_path(value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    if not path.is_absolute():
        root = os.environ.get("GALOIS_DATA_DIR")
        if root and not path.exists():
            candidate = Path(root) / path
            if candidate.exists():
                return candidate
    return path


@dataclass
class Runtime:
    """Loaded dataset, monster context, and defaults shared by commands and serve."""

    dataset: LeagueDataset
    specs: list[attr_mod.Spec]
    monster: attr_mod.MonsterContext
    lookback: int
    gamma: str
    mode: PropagationMode
    home_reduction: float
    seed: int

    def policy(self, gamma: str | None = None, lookback: int | None = None) -> forecast_mod.SelectionPolicy:
        return forecast_mod.SelectionPolicy(
            lookback_weeks=lookback if lookback is not None else self.lookback,
            attribute_subset=tuple(s.label for s in self.specs),
            min_confidence=as_fraction(gamma if gamma is not None else self.gamma),
        )

    def settings(self) -> forecast_mod.InferenceSettings:
        return forecast_mod.InferenceSettings(
            mode=self.mode, home_reduction=self.home_reduction
        )


def load_specs_arg(value: str) -> list[attr_mod.Spec]:
    if value in ("baseline", "strict", "home_tilted"):
        return attr_mod.load_preset(value)
    path = resolve_path(value)
    if path is None or not path.exists():
        raise CliError(f"attribute set {value!r} not found")
    try:
        return attr_mod.load_specs(path)
    except (attr_mod.SpecError, json.JSONDecodeError) as exc:
        raise CliError(f"bad attribute set {value!r}: {exc}") from exc


def load_runtime(
    data: str,
    budgets: str | None,
    attributes: str,
    lookback: int,
    gamma: str,
    mode: str,
    home_reduction: float,
    seed: int,
) -> Runtime:
    try:
        dataset = ingest(resolve_path(data), resolve_path(budgets))
    except (IngestError, ValidationError, OSError) as exc:
        raise CliError(f"ingest failed: {exc}") from exc
    specs = load_specs_arg(attributes)
    try:
        monster = attr_mod.build_monster(dataset, specs)
    except (attr_mod.SpecError, attr_mod.EvaluationError) as exc:
        raise CliError(f"building the match context failed: {exc}") from exc
    try:
        mode_value = PropagationMode(mode)
    except ValueError:
        raise CliError(f"unknown mode {mode!r}") from None
    return Runtime(
        dataset=dataset,
        specs=specs,
        monster=monster,
        lookback=lookback,
        gamma=gamma,
        mode=mode_value,
        home_reduction=home_reduction,
        seed=seed,
    )


data_option = click.option("--data", required=True, help="matches CSV")
budgets_option = click.option("--budgets", default=None, help="budgets CSV")
attributes_option = click.option(
    "--attributes", default="baseline", show_default=True,
    help="attribute set: preset name or JSON path",
)
lookback_option = click.option("--lookback", default=38, show_default=True, type=int)
gamma_option = click.option(
    "--gamma", default="0.7", show_default=True, help="confidence threshold (exact rational)"
)
mode_option = click.option(
    "--mode", default="min-product", show_default=True,
    type=click.Choice([m.value for m in PropagationMode]),
)
reduction_option = click.option("--home-reduction", default=0.85, show_default=True, type=float)
seed_option = click.option("--seed", default=7031, show_default=True, type=int)


@click.group()
def main() -> None:
    """FCA mining and qualitative match-outcome forecasting."""


@main.command("ingest")
@data_option
@budgets_option
@click.option("--out", default=None, help="write the validation summary as JSON")
def cmd_ingest(data: str, budgets: str | None, out: str | None) -> None:
    """Validate the input files and print a summary."""
    try:
        dataset = ingest(resolve_path(data), resolve_path(budgets))
    except (IngestError, ValidationError, OSError) as exc:
        raise CliError(str(exc)) from exc
    summary = {
        "schema_version": 1,
        "matches": len(dataset.matches),
        "seasons": {s: sum(1 for m in dataset.matches if m.season == s) for s in dataset.seasons},
        "teams": len({t for m in dataset.matches for t in (m.home_team, m.away_team)}),
        "divisions": sorted({m.division for m in dataset.matches}),
        "budget_rows": len(dataset.budgets),
    }
    if out:
        Path(out).write_bytes(canonical_json_bytes(summary))
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


def _select_for_match(runtime: Runtime, season: str, week: int, home: str, away: str,
                      gamma: str, lookback: int):
    match_id = f"{season}|{week}|{home}|{away}"
    try:
        policy = runtime.policy(gamma=gamma, lookback=lookback)
        return forecast_mod.select_context(runtime.monster, match_id, policy), policy
    except (forecast_mod.SelectionError, ValueError, ZeroDivisionError) as exc:
        raise CliError(str(exc)) from exc


def lattice_documents(subctx: FormalContext) -> tuple[bytes, str]:
    lattice = enumerate_concepts(subctx)
    return canonical_json_bytes(lattice_to_json_doc(lattice)), lattice_to_dot(lattice)


@main.command("lattice")
@data_option
@budgets_option
@attributes_option
@click.option("--season", default=None)
@click.option("--week", default=None, type=int)
@click.option("--home", default=None)
@click.option("--away", default=None)
@lookback_option
@click.option("--cxt", default=None, help="standalone context file (.cxt or .json) instead of a selection")
@click.option("--out", required=True, help="output directory for lattice.json and lattice.dot")
def cmd_lattice(data, budgets, attributes, season, week, home, away, lookback, cxt, out) -> None:
    """Export the concept lattice of a contextual selection as JSON and DOT."""
    if cxt:
        path = resolve_path(cxt)
        text = Path(path).read_text(encoding="utf-8")
        try:
            if path.suffix == ".json":
                subctx = FormalContext.from_json_dict(json.loads(text))
            else:
                subctx = FormalContext.from_cxt(text)
        except ValueError as exc:
            raise CliError(f"bad context file: {exc}") from exc
    else:
        if not all([season, week, home, away]):
            raise CliError("either --cxt or all of --season/--week/--home/--away are required")
        runtime = load_runtime(data, budgets, attributes, lookback, "0.7", "min-product", 0.85, 0)
        subctx, _ = _select_for_match(runtime, season, week, home, away, "0.7", lookback)
    json_bytes, dot_text = lattice_documents(subctx)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "lattice.json").write_bytes(json_bytes)
    (out_dir / "lattice.dot").write_text(dot_text, encoding="utf-8")
    click.echo(f"wrote {out_dir / 'lattice.json'} and {out_dir / 'lattice.dot'}")


@main.command("mine")
@data_option
@budgets_option
@attributes_option
@click.option("--season", required=True)
@click.option("--week", required=True, type=int)
@click.option("--home", required=True)
@click.option("--away", required=True)
@lookback_option
@gamma_option
@click.option("--min-support", default="0", show_default=True)
@click.option("--out", required=True, help="rules JSON path")
@click.option("--text", "text_out", default=None, help="also write a plain-text rule list")
def cmd_mine(data, budgets, attributes, season, week, home, away, lookback, gamma,
             min_support, out, text_out) -> None:
    """Mine the association rules of a match's contextual selection."""
    runtime = load_runtime(data, budgets, attributes, lookback, gamma, "min-product", 0.85, 0)
    subctx, _ = _select_for_match(runtime, season, week, home, away, gamma, lookback)
    try:
        rules = mine_association_rules(subctx, gamma, min_support)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    Path(out).write_bytes(canonical_json_bytes(rules_to_json_doc(subctx, rules, gamma, min_support)))
    if text_out:
        Path(text_out).write_text(rules_to_text(subctx, rules), encoding="utf-8")
    click.echo(f"{len(rules)} rules -> {out}")


@main.command("forecast")
@data_option
@budgets_option
@attributes_option
@click.option("--season", required=True)
@click.option("--week", required=True, type=int)
@click.option("--home", default=None, help="restrict to one fixture")
@click.option("--away", default=None)
@lookback_option
@gamma_option
@mode_option
@reduction_option
@click.option("--out", required=True, help="forecasts JSON path")
def cmd_forecast(data, budgets, attributes, season, week, home, away, lookback, gamma,
                 mode, home_reduction, out) -> None:
    """Forecast the fixtures of one week."""
    runtime = load_runtime(data, budgets, attributes, lookback, gamma, mode, home_reduction, 0)
    try:
        results = forecast_mod.forecast_week(
            runtime.dataset, runtime.monster, runtime.policy(), season, week, runtime.settings()
        )
    except (forecast_mod.SelectionError, KeyError, ValueError, ZeroDivisionError) as exc:
        raise CliError(str(exc)) from exc
    if home or away:
        results = [
            r for r in results
            if (home is None or r.match.home_team == home)
            and (away is None or r.match.away_team == away)
        ]
        if not results:
            raise CliError(f"no fixture {home or '*'} vs {away or '*'} in {season} week {week}")
    doc = {
        "schema_version": 1,
        "season": season,
        "week": week,
        "config": {
            "lookback": lookback,
            "gamma": str(as_fraction(gamma)),
            "mode": mode,
            "home_reduction": home_reduction,
        },
        "forecasts": [r.to_json_dict() for r in results],
    }
    Path(out).write_bytes(canonical_json_bytes(doc))
    click.echo(f"{len(results)} forecasts -> {out}")


def _read_most_voted(path: Path) -> dict[str, str]:
    picks = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            key = f"{row['season']}|{int(row['week'])}|{row['home']}|{row['away']}"
            picks[key] = row["pick"].strip()
    return picks


@main.command("evaluate")
@data_option
@budgets_option
@attributes_option
@click.option("--season", required=True, help="season to forecast")
@click.option("--from-week", default=1, show_default=True, type=int)
@click.option("--to-week", default=None, type=int)
@lookback_option
@gamma_option
@mode_option
@reduction_option
@seed_option
@click.option("--trials", default=1000, show_default=True, type=int)
@click.option("--most-voted", default=None, help="CSV of externally collected picks")
@click.option("--out", required=True, help="report JSON path")
@click.option("--csv", "csv_out", default=None, help="per-week CSV series path")
@click.pass_context
def cmd_evaluate(ctx, data, budgets, attributes, season, from_week, to_week, lookback,
                 gamma, mode, home_reduction, seed, trials, most_voted, out, csv_out) -> None:
    """Backtest a season; exit 0 only if the pipeline beat every baseline."""
    runtime = load_runtime(data, budgets, attributes, lookback, gamma, mode, home_reduction, seed)
    if season not in runtime.dataset.seasons:
        raise CliError(f"unknown season {season!r}")
    last = to_week if to_week is not None else runtime.dataset.max_week(season)
    weeks = [(season, w) for w in range(from_week, last + 1)]
    most_voted_picks = None
    if most_voted:
        try:
            most_voted_picks = _read_most_voted(resolve_path(most_voted))
        except (OSError, KeyError, ValueError) as exc:
            raise CliError(f"bad most-voted file: {exc}") from exc
    baselines = forecast_mod.BaselineConfig(trials=trials, seed=seed, most_voted=most_voted_picks)
    try:
        report = forecast_mod.evaluate(
            runtime.dataset, runtime.monster, runtime.policy(), weeks, runtime.settings(), baselines
        )
    except (forecast_mod.SelectionError, ValueError, ZeroDivisionError) as exc:
        raise CliError(str(exc)) from exc
    Path(out).write_bytes(canonical_json_bytes(report.to_json_dict()))
    if csv_out:
        Path(csv_out).write_text(report.to_csv_text(), encoding="utf-8")
    click.echo(
        f"hit rate {report.hit_rate:.4f} over {report.total_matches} matches; "
        f"beat all baselines: {report.beat_all_baselines}"
    )
    ctx.exit(0 if report.beat_all_baselines else 1)


@main.command("serve")
@data_option
@budgets_option
@attributes_option
@lookback_option
@gamma_option
@mode_option
@reduction_option
@seed_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def cmd_serve(data, budgets, attributes, lookback, gamma, mode, home_reduction, seed,
              host, port) -> None:
    """Serve the explorer JSON API (and nothing else) over HTTP."""
    import uvicorn

    from .server import create_app

    runtime = load_runtime(data, budgets, attributes, lookback, gamma, mode, home_reduction, seed)
    uvicorn.run(create_app(runtime), host=host, port=port)


if __name__ == "__main__":
    main()
