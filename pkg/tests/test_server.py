import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from galois_forecast.attributes import AttributeSpec, Team, save_specs
from galois_forecast.cli import Runtime, load_runtime, main
from galois_forecast.league import MatchKind
from galois_forecast.server import create_app
from galois_forecast.synthetic import SyntheticLeagueConfig, write_csvs

SEASON = "2011-12"


def demo_specs():
    return [
        AttributeSpec(17, 1.5, Team.HOME),
        AttributeSpec(17, 1.5, Team.AWAY),
        AttributeSpec(12, 2.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 2.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.HOME, n_matches=4, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.AWAY, n_matches=4, match_kind=MatchKind.ALL),
    ]


@pytest.fixture(scope="module")
def paths(tmp_path_factory):
    directory = tmp_path_factory.mktemp("serve_demo")
    matches, budgets = write_csvs(
        SyntheticLeagueConfig(n_teams=8, n_seasons=2, seed=321), directory
    )
    spec_path = directory / "specs.json"
    save_specs(demo_specs(), spec_path)
    return {"dir": directory, "matches": matches, "budgets": budgets, "specs": spec_path}


@pytest.fixture(scope="module")
def runtime(paths) -> Runtime:
    return load_runtime(
        str(paths["matches"]), str(paths["budgets"]), str(paths["specs"]),
        lookback=14, gamma="0.65", mode="min-product", home_reduction=0.85, seed=1,
    )


@pytest.fixture(scope="module")
def client(runtime):
    return TestClient(create_app(runtime))


class TestReadEndpoints:
    def test_summary(self, client):
        doc = client.get("/api/v1/summary").json()
        assert doc["schema_version"] == 1
        assert doc["matches"] == 112
        assert doc["defaults"]["gamma"] == "13/20"

    def test_attributes(self, client):
        doc = client.get("/api/v1/attributes").json()
        assert len(doc["specs"]) == 6
        assert doc["labels"][0] == "ID_17_HOME_T_1.5"

    def test_presets(self, client):
        doc = client.get("/api/v1/presets").json()
        assert set(doc["presets"]) == {"baseline", "strict", "home_tilted"}

    def test_matches(self, client):
        doc = client.get("/api/v1/matches", params={"season": SEASON, "week": 5}).json()
        assert len(doc["fixtures"]) == 4
        assert all(f["outcome"] in "1X2" for f in doc["fixtures"])

    def test_matches_unknown_week_404(self, client):
        response = client.get("/api/v1/matches", params={"season": SEASON, "week": 99})
        assert response.status_code == 404

    def test_strictness(self, client):
        doc = client.get("/api/v1/strictness").json()
        labels = [r["label"] for r in doc["ranking"]]
        assert "1" not in labels
        supports = [r["support_float"] for r in doc["ranking"]]
        assert supports == sorted(supports)


class TestLatticeEndpoint:
    def test_byte_identical_with_cli_export(self, client, paths, tmp_path):
        params = {"season": SEASON, "week": 5, "home": "T01", "away": "T04", "lookback": 10}
        response = client.get("/api/v1/lattice", params=params)
        assert response.status_code == 200

        out = tmp_path / "cli_out"
        result = CliRunner().invoke(
            main,
            [
                "lattice",
                "--data", str(paths["matches"]),
                "--budgets", str(paths["budgets"]),
                "--attributes", str(paths["specs"]),
                "--season", SEASON, "--week", "5", "--home", "T01", "--away", "T04",
                "--lookback", "10", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert response.content == (out / "lattice.json").read_bytes()

    def test_unknown_match_404(self, client):
        response = client.get(
            "/api/v1/lattice",
            params={"season": SEASON, "week": 5, "home": "NOPE", "away": "T04"},
        )
        assert response.status_code == 404


class TestRulesEndpoint:
    def test_rule_count_matches_cli_mine(self, client, paths, tmp_path):
        params = {
            "season": SEASON, "week": 6, "home": "T03", "away": "T01",
            "lookback": 14, "gamma": "0.65",
        }
        doc = client.get("/api/v1/rules", params=params).json()

        out = tmp_path / "rules.json"
        result = CliRunner().invoke(
            main,
            [
                "mine",
                "--data", str(paths["matches"]),
                "--budgets", str(paths["budgets"]),
                "--attributes", str(paths["specs"]),
                "--season", SEASON, "--week", "6", "--home", "T03", "--away", "T01",
                "--lookback", "14", "--gamma", "0.65", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        cli_doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["rule_count"] == len(cli_doc["rules"])
        assert doc["rules"] == cli_doc["rules"]

    def test_invalid_gamma_422(self, client):
        response = client.get(
            "/api/v1/rules",
            params={"season": SEASON, "week": 6, "home": "T03", "away": "T01", "gamma": "0"},
        )
        assert response.status_code == 422
        response = client.get(
            "/api/v1/rules",
            params={"season": SEASON, "week": 6, "home": "T03", "away": "T01", "gamma": "zebra"},
        )
        assert response.status_code == 422


class TestRecompute:
    def test_edited_threshold_matches_direct_mine(self, client, runtime, paths, tmp_path):
        edited = [s.to_json_dict() for s in demo_specs()]
        edited[0]["threshold"] = 2.5  # tighten the home budget attribute
        body = {
            "specs": edited,
            "selection": {
                "season": SEASON, "week": 6, "home": "T03", "away": "T01",
                "lookback": 14, "gamma": "0.65",
            },
        }
        doc = client.post("/api/v1/recompute", json=body).json()

        edited_path = tmp_path / "edited.json"
        edited_path.write_text(json.dumps(edited), encoding="utf-8")
        out = tmp_path / "rules.json"
        result = CliRunner().invoke(
            main,
            [
                "mine",
                "--data", str(paths["matches"]),
                "--budgets", str(paths["budgets"]),
                "--attributes", str(edited_path),
                "--season", SEASON, "--week", "6", "--home", "T03", "--away", "T01",
                "--lookback", "14", "--gamma", "0.65", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        cli_doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["rule_count"] == len(cli_doc["rules"])
        assert doc["rules"] == cli_doc["rules"]
        assert any(r["label"].startswith("ID_17_HOME_T_2.5") for r in doc["strictness"])

    def test_bad_spec_422(self, client):
        body = {
            "specs": [{"kind": 99, "threshold": 1}],
            "selection": {"season": SEASON, "week": 6, "home": "T03", "away": "T01"},
        }
        assert client.post("/api/v1/recompute", json=body).status_code == 422

    def test_raising_threshold_never_raises_support(self, client):
        """Monotonicity as displayed by the strictness panel."""
        base = [s.to_json_dict() for s in demo_specs()]
        tighter = json.loads(json.dumps(base))
        tighter[0]["threshold"] = 4.0
        selection = {"season": SEASON, "week": 6, "home": "T03", "away": "T01"}
        before = client.post(
            "/api/v1/recompute", json={"specs": base, "selection": selection}
        ).json()
        after = client.post(
            "/api/v1/recompute", json={"specs": tighter, "selection": selection}
        ).json()
        def support_of(doc, prefix):
            for row in doc["strictness"]:
                if row["label"].startswith(prefix):
                    return row["support_float"]
            raise AssertionError(prefix)
        assert support_of(after, "ID_17_HOME_T_4.0") <= support_of(before, "ID_17_HOME_T_1.5")


class TestWhatIf:
    def test_matches_cli_forecast(self, client, paths, tmp_path):
        body = {
            "selection": {
                "season": SEASON, "week": 9, "home": "T01", "away": "T07",
                "lookback": 14, "gamma": "0.65",
            }
        }
        doc = client.post("/api/v1/whatif", json=body).json()

        out = tmp_path / "fc.json"
        result = CliRunner().invoke(
            main,
            [
                "forecast",
                "--data", str(paths["matches"]),
                "--budgets", str(paths["budgets"]),
                "--attributes", str(paths["specs"]),
                "--season", SEASON, "--week", "9", "--home", "T01", "--away", "T07",
                "--lookback", "14", "--gamma", "0.65", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        cli_entry = json.loads(out.read_text(encoding="utf-8"))["forecasts"][0]
        for key in ("c1", "cx", "c2", "pick", "prior_only", "trace"):
            assert doc[key] == cli_entry[key]

    def test_home_reduction_override(self, client):
        base = {
            "selection": {"season": SEASON, "week": 9, "home": "T01", "away": "T07"},
        }
        strong = dict(base, home_reduction=0.01)
        baseline_doc = client.post("/api/v1/whatif", json=base).json()
        reduced_doc = client.post("/api/v1/whatif", json=strong).json()
        assert reduced_doc["c1"] < baseline_doc["c1"]
        assert reduced_doc["pick"] != "1"

    def test_invalid_gamma_422(self, client):
        body = {
            "selection": {"season": SEASON, "week": 9, "home": "T01", "away": "T07", "gamma": "2"},
        }
        assert client.post("/api/v1/whatif", json=body).status_code == 422

    def test_unknown_fixture_404(self, client):
        body = {"selection": {"season": SEASON, "week": 9, "home": "T01", "away": "T02"}}
        assert client.post("/api/v1/whatif", json=body).status_code == 404

    def test_edited_specs_change_the_trace(self, client):
        body = {
            "selection": {"season": SEASON, "week": 9, "home": "T01", "away": "T07"},
            "specs": [demo_specs()[0].to_json_dict()],
        }
        doc = client.post("/api/v1/whatif", json=body).json()
        assert doc["pick"] in ("1", "X", "2")
