#!/usr/bin/env python3
"""Record serve API responses as fixtures for the explorer UI tests.

Runs the API in process against the demo synthetic league and stores the
JSON bodies under frontend/fixtures/. The UI test suite replays these
files; regenerate them whenever the API schema or the demo league changes.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from galois_forecast.attributes import AttributeSpec, Team, save_specs  # noqa: E402
from galois_forecast.cli import load_runtime  # noqa: E402
from galois_forecast.league import MatchKind  # noqa: E402
from galois_forecast.server import create_app  # noqa: E402
from galois_forecast.synthetic import SyntheticLeagueConfig, write_csvs  # noqa: E402

SEASON = "2011-12"


def demo_specs() -> list[AttributeSpec]:
    return [
        AttributeSpec(17, 1.5, Team.HOME),
        AttributeSpec(17, 1.5, Team.AWAY),
        AttributeSpec(12, 2.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 2.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.HOME, n_matches=4, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.AWAY, n_matches=4, match_kind=MatchKind.ALL),
    ]


def main() -> None:
    out_dir = ROOT / "frontend" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        matches, budgets = write_csvs(
            SyntheticLeagueConfig(n_teams=8, n_seasons=2, seed=321), tmp
        )
        spec_path = Path(tmp) / "specs.json"
        save_specs(demo_specs(), spec_path)
        runtime = load_runtime(
            str(matches), str(budgets), str(spec_path),
            lookback=14, gamma="0.65", mode="min-product", home_reduction=0.85, seed=1,
        )
        client = TestClient(create_app(runtime))

        def record(name: str, response) -> None:
            assert response.status_code == 200, f"{name}: {response.status_code}"
            path = out_dir / f"{name}.json"
            path.write_text(
                json.dumps(response.json(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            print(f"wrote {path}")

        record("summary", client.get("/api/v1/summary"))
        record("attributes", client.get("/api/v1/attributes"))
        record("presets", client.get("/api/v1/presets"))
        record("strictness", client.get("/api/v1/strictness"))
        record(
            "matches",
            client.get("/api/v1/matches", params={"season": SEASON, "week": 9}),
        )
        record(
            "lattice",
            client.get(
                "/api/v1/lattice",
                params={
                    "season": SEASON, "week": 5, "home": "T01", "away": "T04",
                    "lookback": 10,
                },
            ),
        )
        record(
            "rules",
            client.get(
                "/api/v1/rules",
                params={
                    "season": SEASON, "week": 6, "home": "T03", "away": "T01",
                    "lookback": 14, "gamma": "0.65",
                },
            ),
        )
        record(
            "whatif",
            client.post(
                "/api/v1/whatif",
                json={
                    "selection": {
                        "season": SEASON, "week": 9, "home": "T01", "away": "T07",
                        "lookback": 14, "gamma": "0.65",
                    }
                },
            ),
        )

        # Threshold edit round trip: the recompute response for an edited
        # working set, plus a direct mine with the same config for comparison.
        edited = [s.to_json_dict() for s in demo_specs()]
        edited[0]["threshold"] = 2.5
        record(
            "recompute",
            client.post(
                "/api/v1/recompute",
                json={
                    "specs": edited,
                    "selection": {
                        "season": SEASON, "week": 6, "home": "T03", "away": "T01",
                        "lookback": 14, "gamma": "0.65",
                    },
                },
            ),
        )
        edited_path = Path(tmp) / "edited.json"
        edited_path.write_text(json.dumps(edited), encoding="utf-8")
        edited_runtime = load_runtime(
            str(matches), str(budgets), str(edited_path),
            lookback=14, gamma="0.65", mode="min-product", home_reduction=0.85, seed=1,
        )
        edited_client = TestClient(create_app(edited_runtime))
        record(
            "recompute_direct_mine",
            edited_client.get(
                "/api/v1/rules",
                params={
                    "season": SEASON, "week": 6, "home": "T03", "away": "T01",
                    "lookback": 14, "gamma": "0.65",
                },
            ),
        )
        # Degenerate selection: the very first week has no history at all.
        record(
            "lattice_degenerate",
            client.get(
                "/api/v1/lattice",
                params={
                    "season": runtime.dataset.seasons[0], "week": 1,
                    "home": "T01", "away": "T08", "lookback": 10,
                },
            ),
        )


if __name__ == "__main__":
    main()
