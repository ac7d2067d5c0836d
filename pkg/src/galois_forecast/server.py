"""JSON API behind the explorer UI.

Every endpoint reuses the same functions as the CLI commands, so anything
shown in a client is reproducible by an equivalent CLI invocation. The
loaded dataset is cached in process and read-only; compute endpoints are
idempotent.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException, Query, Response
from pydantic import BaseModel

from . import attributes as attr_mod
from . import forecast as forecast_mod
from .cli import Runtime, canonical_json_bytes, lattice_documents
from .implications import as_fraction, mine_association_rules, rules_to_json_doc
from .inference import InferenceError, PropagationMode

SCHEMA_VERSION = 1


class Selection(BaseModel):
    season: str
    week: int
    home: str
    away: str
    lookback: int | None = None
    gamma: str | None = None


class RecomputeRequest(BaseModel):
    specs: list[dict]
    selection: Selection


class WhatIfRequest(BaseModel):
    selection: Selection
    specs: list[dict] | None = None
    mode: str | None = None
    home_reduction: float | None = None


def _parse_gamma(value: str | None, default: str) -> Fraction:
    try:
        gamma = as_fraction(value if value is not None else default)
    except (ValueError, ZeroDivisionError):
        raise HTTPException(status_code=422, detail=f"malformed gamma {value!r}") from None
    if not 0 < gamma <= 1:
        raise HTTPException(status_code=422, detail=f"gamma must be in (0, 1], got {gamma}")
    return gamma


def _parse_specs(entries: list[dict]) -> list[attr_mod.Spec]:
    try:
        return [attr_mod.spec_from_json_dict(e) for e in entries]
    except attr_mod.SpecError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def create_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="galois-forecast explorer API")

    def working_runtime(spec_entries: list[dict] | None) -> Runtime:
        """The served runtime, or a recomputed one for an edited attribute set."""
        if spec_entries is None:
            return runtime
        specs = _parse_specs(spec_entries)
        try:
            monster = attr_mod.build_monster(runtime.dataset, specs)
        except (attr_mod.SpecError, attr_mod.EvaluationError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return Runtime(
            dataset=runtime.dataset,
            specs=specs,
            monster=monster,
            lookback=runtime.lookback,
            gamma=runtime.gamma,
            mode=runtime.mode,
            home_reduction=runtime.home_reduction,
            seed=runtime.seed,
        )

    def select(rt: Runtime, sel: Selection):
        gamma = _parse_gamma(sel.gamma, rt.gamma)
        lookback = sel.lookback if sel.lookback is not None else rt.lookback
        if lookback < 1:
            raise HTTPException(status_code=422, detail="lookback must be >= 1")
        policy = rt.policy(gamma=str(gamma), lookback=lookback)
        match_id = f"{sel.season}|{sel.week}|{sel.home}|{sel.away}"
        try:
            subctx = forecast_mod.select_context(rt.monster, match_id, policy)
        except forecast_mod.SelectionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return subctx, policy, gamma

    @app.get("/api/v1/summary")
    def summary() -> dict:
        dataset = runtime.dataset
        return {
            "schema_version": SCHEMA_VERSION,
            "seasons": list(dataset.seasons),
            "matches": len(dataset.matches),
            "teams": len({t for m in dataset.matches for t in (m.home_team, m.away_team)}),
            "divisions": sorted({m.division for m in dataset.matches}),
            "attributes": len(runtime.specs),
            "incidence": runtime.monster.incidence_count(),
            "defaults": {
                "lookback": runtime.lookback,
                "gamma": str(as_fraction(runtime.gamma)),
                "mode": runtime.mode.value,
                "home_reduction": runtime.home_reduction,
            },
        }

    @app.get("/api/v1/attributes")
    def attributes() -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "specs": [s.to_json_dict() for s in runtime.specs],
            "labels": [s.label for s in runtime.specs],
        }

    @app.get("/api/v1/presets")
    def presets() -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "presets": {
                name: [s.to_json_dict() for s in attr_mod.load_preset(name)]
                for name in ("baseline", "strict", "home_tilted")
            },
        }

    @app.get("/api/v1/matches")
    def matches(season: str = Query(...), week: int = Query(...)) -> dict:
        fixtures = runtime.dataset.matches_at(season, week)
        if not fixtures:
            raise HTTPException(status_code=404, detail=f"no fixtures in {season} week {week}")
        return {
            "schema_version": SCHEMA_VERSION,
            "fixtures": [
                {
                    "match": m.match_id,
                    "home": m.home_team,
                    "away": m.away_team,
                    "home_goals": m.home_goals,
                    "away_goals": m.away_goals,
                    "outcome": m.outcome,
                }
                for m in fixtures
            ],
        }

    @app.get("/api/v1/strictness")
    def strictness() -> dict:
        ranking = attr_mod.strictness_ranking(runtime.monster)
        return {
            "schema_version": SCHEMA_VERSION,
            "ranking": [
                {"label": label, "support": str(supp), "support_float": float(supp)}
                for label, supp in ranking
            ],
        }

    @app.get("/api/v1/lattice")
    def lattice(
        season: str = Query(...),
        week: int = Query(...),
        home: str = Query(...),
        away: str = Query(...),
        lookback: int | None = Query(None),
    ) -> Response:
        sel = Selection(season=season, week=week, home=home, away=away, lookback=lookback)
        subctx, _, _ = select(runtime, sel)
        json_bytes, _ = lattice_documents(subctx)
        # Raw bytes from the shared serializer: byte-identical to the CLI export.
        return Response(content=json_bytes, media_type="application/json")

    @app.get("/api/v1/rules")
    def rules(
        season: str = Query(...),
        week: int = Query(...),
        home: str = Query(...),
        away: str = Query(...),
        lookback: int | None = Query(None),
        gamma: str | None = Query(None),
    ) -> Response:
        sel = Selection(
            season=season, week=week, home=home, away=away, lookback=lookback, gamma=gamma
        )
        subctx, _, gamma_value = select(runtime, sel)
        mined = mine_association_rules(subctx, gamma_value, 0)
        doc = rules_to_json_doc(subctx, mined, gamma_value, 0)
        doc["schema_version"] = SCHEMA_VERSION
        doc["rule_count"] = len(mined)
        return Response(content=canonical_json_bytes(doc), media_type="application/json")

    @app.post("/api/v1/recompute")
    def recompute(request: RecomputeRequest) -> dict:
        rt = working_runtime(request.specs)
        subctx, _, gamma_value = select(rt, request.selection)
        mined = mine_association_rules(subctx, gamma_value, 0)
        return {
            "schema_version": SCHEMA_VERSION,
            "rule_count": len(mined),
            "rules": rules_to_json_doc(subctx, mined, gamma_value, 0)["rules"],
            "strictness": [
                {"label": label, "support": str(supp), "support_float": float(supp)}
                for label, supp in attr_mod.strictness_ranking(rt.monster)
            ],
        }

    @app.post("/api/v1/whatif")
    def whatif(request: WhatIfRequest) -> dict:
        rt = working_runtime(request.specs)
        sel = request.selection
        gamma = _parse_gamma(sel.gamma, rt.gamma)
        lookback = sel.lookback if sel.lookback is not None else rt.lookback
        if lookback < 1:
            raise HTTPException(status_code=422, detail="lookback must be >= 1")
        try:
            mode = PropagationMode(request.mode) if request.mode else rt.mode
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown mode {request.mode!r}") from None
        reduction = (
            request.home_reduction if request.home_reduction is not None else rt.home_reduction
        )
        if not 0 < reduction <= 1:
            raise HTTPException(status_code=422, detail="home_reduction must be in (0, 1]")
        settings = forecast_mod.InferenceSettings(mode=mode, home_reduction=reduction)
        policy = rt.policy(gamma=str(gamma), lookback=lookback)
        try:
            results = forecast_mod.forecast_week(
                rt.dataset, rt.monster, policy, sel.season, sel.week, settings
            )
        except (forecast_mod.SelectionError, InferenceError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        wanted = [
            r for r in results
            if r.match.home_team == sel.home and r.match.away_team == sel.away
        ]
        if not wanted:
            raise HTTPException(
                status_code=404,
                detail=f"no fixture {sel.home} vs {sel.away} in {sel.season} week {sel.week}",
            )
        result = wanted[0]
        doc = result.to_json_dict()
        doc["schema_version"] = SCHEMA_VERSION
        doc["selection_size"] = len(result.selection_objects)
        return doc

    return app
