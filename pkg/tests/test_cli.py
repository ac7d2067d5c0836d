import json

import pytest
from click.testing import CliRunner

from galois_forecast.attributes import AttributeSpec, Team, save_specs
from galois_forecast.cli import main
from galois_forecast.fca import FormalContext
from galois_forecast.league import MatchKind
from galois_forecast.synthetic import SyntheticLeagueConfig, write_csvs


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    directory = tmp_path_factory.mktemp("demo")
    matches, budgets = write_csvs(
        SyntheticLeagueConfig(n_teams=8, n_seasons=2, seed=321), directory
    )
    specs = [
        AttributeSpec(17, 1.5, Team.HOME),
        AttributeSpec(17, 1.5, Team.AWAY),
        AttributeSpec(12, 2.0, Team.HOME, match_kind=MatchKind.ALL),
        AttributeSpec(12, 2.0, Team.AWAY, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.HOME, n_matches=4, match_kind=MatchKind.ALL),
        AttributeSpec(4, 7.0, Team.AWAY, n_matches=4, match_kind=MatchKind.ALL),
    ]
    spec_path = directory / "specs.json"
    save_specs(specs, spec_path)
    return {"dir": directory, "matches": matches, "budgets": budgets, "specs": spec_path}


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def common_args(demo):
    return [
        "--data", demo["matches"], "--budgets", demo["budgets"],
        "--attributes", demo["specs"],
    ]


class TestIngest:
    def test_valid_files(self, demo):
        result = run("ingest", "--data", demo["matches"], "--budgets", demo["budgets"])
        assert result.exit_code == 0
        summary = json.loads(result.output)
        assert summary["matches"] == 8 * 14  # 4 per week, 14 weeks, 2 seasons
        assert summary["teams"] == 8

    def test_malformed_row_exits_nonzero_with_line(self, demo, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "season,week,home,away,home_goals,away_goals,division\n"
            "2010-11,1,A,B,2,0,1\n"
            "2010-11,oops,A,C,1,0,1\n",
            encoding="utf-8",
        )
        result = run("ingest", "--data", bad)
        assert result.exit_code == 2
        assert "line 3" in result.output

    def test_duplicate_fixture_listed(self, demo, tmp_path):
        bad = tmp_path / "dup.csv"
        bad.write_text(
            "season,week,home,away,home_goals,away_goals,division\n"
            "2010-11,1,A,B,2,0,1\n"
            "2010-11,1,A,B,1,1,1\n",
            encoding="utf-8",
        )
        result = run("ingest", "--data", bad)
        assert result.exit_code == 2
        assert "duplicate fixture" in result.output

    def test_data_dir_env_resolution(self, demo, monkeypatch, tmp_path):
        monkeypatch.setenv("GALOIS_DATA_DIR", str(demo["dir"]))
        runner = CliRunner()
        result = runner.invoke(main, ["ingest", "--data", "matches.csv"])
        assert result.exit_code == 0


class TestLattice:
    def test_from_cxt_file(self, tmp_path):
        diamond = FormalContext.from_incidence(["o1", "o2"], ["a1", "a2"], [[1, 0], [0, 1]])
        cxt = tmp_path / "diamond.cxt"
        cxt.write_text(diamond.to_cxt(), encoding="utf-8")
        out = tmp_path / "out"
        result = run("lattice", "--data", "unused.csv", "--cxt", cxt, "--out", out)
        assert result.exit_code == 0
        dot = (out / "lattice.dot").read_text(encoding="utf-8")
        assert dot.count(" -> ") == 4
        doc = json.loads((out / "lattice.json").read_text(encoding="utf-8"))
        assert len(doc["concepts"]) == 4

    def test_from_json_context(self, tmp_path):
        ctx = FormalContext.from_incidence(["o"], ["a"], [[1]])
        path = tmp_path / "ctx.json"
        path.write_text(json.dumps(ctx.to_json_dict()), encoding="utf-8")
        out = tmp_path / "out"
        result = run("lattice", "--data", "unused.csv", "--cxt", path, "--out", out)
        assert result.exit_code == 0
        doc = json.loads((out / "lattice.json").read_text(encoding="utf-8"))
        assert len(doc["concepts"]) == 1

    def test_from_selection(self, demo, tmp_path):
        out = tmp_path / "sel"
        result = run(
            "lattice", *common_args(demo),
            "--season", "2011-12", "--week", "5", "--home", "T01", "--away", "T04",
            "--lookback", "10", "--out", out,
        )
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "lattice.json").read_text(encoding="utf-8"))
        assert doc["concepts"]

    def test_requires_selection_or_cxt(self, demo, tmp_path):
        result = run("lattice", *common_args(demo), "--out", tmp_path / "x")
        assert result.exit_code == 2


class TestMine:
    def test_writes_rule_documents(self, demo, tmp_path):
        out = tmp_path / "rules.json"
        text = tmp_path / "rules.txt"
        result = run(
            "mine", *common_args(demo),
            "--season", "2011-12", "--week", "6", "--home", "T03", "--away", "T01",
            "--lookback", "14", "--gamma", "0.65", "--out", out, "--text", text,
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["min_confidence"] == "13/20"
        assert doc["rules"]
        assert "=>" in text.read_text(encoding="utf-8")

    def test_bad_gamma_rejected(self, demo, tmp_path):
        result = run(
            "mine", *common_args(demo),
            "--season", "2011-12", "--week", "6", "--home", "T03", "--away", "T01",
            "--gamma", "0", "--out", tmp_path / "r.json",
        )
        assert result.exit_code == 2

    def test_bad_attribute_file(self, demo, tmp_path):
        bad = tmp_path / "bad_specs.json"
        bad.write_text('[{"kind": 99, "threshold": 1}]', encoding="utf-8")
        result = run(
            "mine", "--data", demo["matches"], "--budgets", demo["budgets"],
            "--attributes", bad,
            "--season", "2011-12", "--week", "6", "--home", "T03", "--away", "T01",
            "--out", tmp_path / "r.json",
        )
        assert result.exit_code == 2
        assert "bad attribute set" in result.output


class TestForecastCommand:
    def test_week_forecasts_deterministic(self, demo, tmp_path):
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        for out in (first, second):
            result = run(
                "forecast", *common_args(demo),
                "--season", "2011-12", "--week", "9",
                "--lookback", "14", "--gamma", "0.65", "--out", out,
            )
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()
        doc = json.loads(first.read_text(encoding="utf-8"))
        assert len(doc["forecasts"]) == 4
        for entry in doc["forecasts"]:
            assert entry["pick"] in ("1", "X", "2")

    def test_single_fixture_filter(self, demo, tmp_path):
        out = tmp_path / "one.json"
        result = run(
            "forecast", *common_args(demo),
            "--season", "2011-12", "--week", "9", "--home", "T01",
            "--lookback", "14", "--out", out,
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert len(doc["forecasts"]) == 1

    def test_missing_fixture(self, demo, tmp_path):
        result = run(
            "forecast", *common_args(demo),
            "--season", "2011-12", "--week", "9", "--home", "NOPE",
            "--out", tmp_path / "x.json",
        )
        assert result.exit_code == 2


class TestEvaluateCommand:
    def test_beats_baselines_and_exits_zero(self, demo, tmp_path):
        out = tmp_path / "report.json"
        series = tmp_path / "series.csv"
        result = run(
            "evaluate", *common_args(demo),
            "--season", "2011-12", "--lookback", "14", "--gamma", "0.65",
            "--trials", "100", "--out", out, "--csv", series,
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["beat_all_baselines"] is True
        assert series.read_text(encoding="utf-8").startswith("season,week,")

    def test_unknown_season_is_an_error(self, demo, tmp_path):
        result = run(
            "evaluate", *common_args(demo),
            "--season", "1999-00", "--out", tmp_path / "r.json",
        )
        assert result.exit_code == 2
