import json

import pytest
from click.testing import CliRunner

from shadow_orbits.cli import main
from shadow_orbits.reporting import canonical_json


@pytest.fixture
def runner():
    return CliRunner()


def test_zeta_sl2_stdout(runner):
    result = runner.invoke(main, ["zeta", "--algebra", "sl2", "--p", "5", "--m", "1"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["level1_count"] == 124
    assert payload["truncation"][1]["value"] == 15500


def test_table_not_prime_exits_2(runner):
    result = runner.invoke(main, ["table", "--q", "9"])
    assert result.exit_code == 2


def test_verify_infeasible_exits_2(runner):
    result = runner.invoke(main, ["verify", "thmA", "--algebra", "sl3", "--p", "5", "--r", "2"])
    assert result.exit_code == 2
    assert "infeasible" in result.output


def test_verify_passes_exit_0(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(main, ["verify", "thmB", "--algebra", "sl2", "--p", "3", "--r", "1", "--out", str(out)])
    assert result.exit_code == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] is True


def test_shadow_csv_format(runner):
    result = runner.invoke(
        main,
        ["shadow", "--algebra", "sl3", "--p", "5", "--element", "[[0,1,0],[0,0,0],[0,0,0]]", "--format", "csv"],
    )
    assert result.exit_code == 0
    assert result.output.startswith("key,value")
    assert "label,J" in result.output


def test_shadow_bad_json_exits_2(runner):
    result = runner.invoke(main, ["shadow", "--element", "not json"])
    assert result.exit_code == 2


def test_threads_env_accepted(runner, monkeypatch):
    monkeypatch.setenv("SHADOW_ORBITS_THREADS", "2")
    result = runner.invoke(main, ["zeta", "--algebra", "sl2", "--p", "3", "--m", "1"])
    assert result.exit_code == 0


def test_canonical_json_rules():
    text = canonical_json({"b": 2**60, "a": [True, None, 7]})
    assert text == '{"a":[true,null,7],"b":"1152921504606846976"}'
    with pytest.raises(TypeError):
        canonical_json({"x": 1.5})


def test_worker_count_leaves_bytes_alone(runner, tmp_path):
    outputs = []
    for threads in ("1", "2"):
        out = tmp_path / f"table-{threads}.json"
        result = runner.invoke(main, ["table", "--q", "5", "--threads", threads, "--out", str(out)])
        assert result.exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_csv_of_table_report(runner, tmp_path):
    out = tmp_path / "table.csv"
    result = runner.invoke(main, ["table", "--q", "5", "--out", str(out), "--format", "csv"])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "S,d,z,delta,target,value,poly,oracle,match"
    assert any(line.startswith("J,4,1,2,R,620") for line in lines)
    assert "rank,count" in lines
