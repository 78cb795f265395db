import json
import pathlib

import pytest

from quboplan.cli import main

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def test_plan_writes_json_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "plan.json"
    code = main(["plan", str(SCENARIOS / "demo3.scn"), "-o", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema"] == 1
    assert payload["status"] == "ok"
    assert payload["robots"][0]["moves"] == 4
    assert payload["preprocess"]["original"] == 45


def test_plan_missing_file_exits_two(capsys):
    assert main(["plan", "nowhere.scn"]) == 2
    assert "error" in capsys.readouterr().err


def test_plan_rejects_bad_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("[map]\n..\n.\n\n[robots]\n0 0 1 1\n")
    assert main(["plan", str(bad)]) == 2
    assert "inconsistent row length" in capsys.readouterr().err


def test_plan_infeasible_exits_one(tmp_path, capsys):
    scn = tmp_path / "walled.scn"
    scn.write_text("[map]\n...\n..#\n.#.\n\n[robots]\n0 0 2 2\n\n[solver]\nbackend = exhaustive\n")
    code = main(["plan", str(scn)])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["robots"][0]["status"] == "infeasible"


def test_plan_seed_override_changes_output_seed(tmp_path):
    out1 = tmp_path / "a.json"
    main(["plan", str(SCENARIOS / "demo3.scn"), "--seed", "123", "-o", str(out1)])
    assert json.loads(out1.read_text())["seed"] == 123


def test_bench_deterministic_without_timings(tmp_path):
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    args = ["bench", str(SCENARIOS / "demo3.scn"), "--repeats", "2"]
    assert main(args + ["-o", str(first)]) == 0
    assert main(args + ["-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_render_writes_svg(tmp_path, capsys):
    out = tmp_path / "demo.svg"
    code = main(["render", str(SCENARIOS / "demo3.scn"), "-o", str(out)])
    assert code == 0
    assert out.read_text().startswith("<svg ")


def test_export_qubo_text_format(capsys):
    code = main(["export-qubo", str(SCENARIOS / "demo3.scn")])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    head = lines[0].split()
    assert len(head) == 2
    assert int(head[0]) >= 1
    for line in lines[1:]:
        a, b, w = line.split()
        assert int(a) <= int(b)
        float(w)


def test_export_qubo_raw_is_larger(capsys):
    main(["export-qubo", str(SCENARIOS / "demo3.scn")])
    folded_lines = len(capsys.readouterr().out.splitlines())
    main(["export-qubo", str(SCENARIOS / "demo3.scn"), "--raw"])
    raw_lines = len(capsys.readouterr().out.splitlines())
    assert raw_lines > folded_lines


def test_oracle_check_small_run(capsys):
    code = main(["oracle-check", "--samples", "4", "--runs", "2",
                 "--seed", "3", "--threshold", "0.5"])
    assert code == 0
    out = capsys.readouterr().out
    assert json.loads(out)["runs"] == 8
