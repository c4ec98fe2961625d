# test_cli.py

import io

import orjson
import pandas as pd
import pytest
from click.testing import CliRunner

from cli import cli


@pytest.fixture
def runner():
    return CliRunner()


def write_problem(tmp_path, payload):
    path = tmp_path / "problem.json"
    path.write_bytes(orjson.dumps(payload))
    return str(path)


def test_curve_csv(runner):
    result = runner.invoke(cli, ["curve", "--scheme", "rate-cr", "--from", "0", "--to", "4", "--points", "5"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert list(frame.columns[:2]) == ["control", "distortion"]
    assert "alpha" in frame.columns
    assert len(frame) == 5
    assert frame["distortion"].iloc[0] == pytest.approx(11.0)
    assert frame["distortion"].is_monotonic_decreasing


def test_curve_json_to_file(runner, tmp_path):
    out = tmp_path / "curves" / "hybrid.json"
    result = runner.invoke(cli, [
        "curve", "--scheme", "channel-hybrid", "--from", "0.1", "--to", "10", "--points", "4",
        "--log", "--format", "json", "--threshold", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    payload = orjson.loads(out.read_bytes())
    assert payload["scheme"] == "channel-hybrid"
    assert payload["dMax"] == pytest.approx(11.0)
    assert len(payload["points"]) == 4
    assert "p_star" in payload["points"][0]["extras"]


def test_curve_problem_file(runner, tmp_path):
    problem = write_problem(tmp_path, {"covA": [[2.0, 0.0], [0.0, 1.0]], "covB": [[1.0, 0.0], [0.0, 4.0]]})
    result = runner.invoke(cli, ["curve", problem, "--scheme", "dim", "--from", "0", "--to", "2", "--points", "3"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert frame["distortion"].iloc[0] == pytest.approx(8.0)


def test_missing_scheme_is_usage_error(runner):
    result = runner.invoke(cli, ["curve", "--from", "0", "--to", "1"])
    assert result.exit_code == 1


def test_invalid_range_exit_code(runner):
    result = runner.invoke(cli, ["curve", "--scheme", "rate-cr", "--from", "3", "--to", "1"])
    assert result.exit_code == 1


def test_threshold_needs_two_components(runner, tmp_path):
    problem = write_problem(tmp_path, {"lambda": [2.0], "lambdaHat": [1.0]})
    result = runner.invoke(cli, ["curve", problem, "--scheme", "rate-cr", "--from", "0", "--to", "1", "--threshold"])
    assert result.exit_code == 1


def test_non_commuting_problem(runner, tmp_path):
    problem = write_problem(tmp_path, {
        "source": {"cov": [[1.0, 0.0], [0.0, 2.0]]},
        "reconstruction": {"cov": [[2.0, 0.5], [0.5, 1.0]]},
    })
    result = runner.invoke(cli, ["summary", problem])
    assert result.exit_code == 1
    assert "commute" in result.output


def test_malformed_problem(runner, tmp_path):
    problem = write_problem(tmp_path, {"lambda": [1.0, 2.0]})
    assert runner.invoke(cli, ["summary", problem]).exit_code == 1
    assert runner.invoke(cli, ["summary", str(tmp_path / "missing.json")]).exit_code == 1


def test_table_check(runner):
    result = runner.invoke(cli, ["table", "--check"])
    assert result.exit_code == 0, result.output
    assert "CR R_1" in result.stdout
    assert "R=2.1" in result.stdout


def test_table_check_skipped_for_other_problems(runner, tmp_path):
    problem = write_problem(tmp_path, {"lambda": [1.0, 2.0], "lambdaHat": [3.0, 4.0]})
    result = runner.invoke(cli, ["table", problem, "--check", "--format", "json"])
    assert result.exit_code == 0
    rows = orjson.loads(result.stdout)
    assert [row["rate"] for row in rows] == [0.1, 2.1, 4.1]


def test_summary(runner):
    result = runner.invoke(cli, ["summary"])
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["lambda"] == [2.0, 3.0, 1.0]
    assert payload["dMin"] == pytest.approx(0.636919, abs=1e-6)


def test_simulate_report(runner):
    result = runner.invoke(cli, ["simulate", "--scheme", "uncoded", "--power", "1", "--samples", "50000", "--seed", "3"])
    assert result.exit_code in (0, 2)
    payload = orjson.loads(result.stdout)
    assert payload["samples"] == 50000
    assert payload["theoreticalDistortion"] == pytest.approx(7.535898, abs=1e-6)


def test_simulate_too_few_samples(runner):
    result = runner.invoke(cli, ["simulate", "--scheme", "dim", "--keep", "1", "--samples", "10"])
    assert result.exit_code == 2


def test_schema(runner):
    result = runner.invoke(cli, ["schema", "problem"])
    assert result.exit_code == 0
    assert "lambdaHat" in orjson.loads(result.stdout)["properties"]
