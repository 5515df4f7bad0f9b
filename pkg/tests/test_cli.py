import json
from pathlib import Path

import pytest

from polyhardy.cli import main, run_scenario
from polyhardy.serialize import load_json

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def write_scenario(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def dc_scenario(name="dc-small"):
    return {
        "name": name,
        "kind": "dc-check",
        "params": {
            "caps": [6, 5],
            "symbol": {"monomial": [1]},
            "factors": [{"kind": "model", "zeros": [[0.0, 0.0]]}],
            "seed": 1,
        },
    }


def beurling_scenario(**extra):
    params = {"cap": 24, "zeros": [[0.35, 0.0]], "seed": 2}
    params.update(extra)
    return {"name": "beurling-small", "kind": "beurling-roundtrip", "params": params}


def test_run_pass_writes_report(tmp_path):
    sc = write_scenario(tmp_path / "dc.json", dc_scenario())
    out = tmp_path / "dc.report.json"
    code = main(["run", str(sc), "--out", str(out), "--quiet"])
    assert code == 0
    report = load_json(out)
    for key in ("name", "kind", "version", "seed", "verdict", "residuals",
                "tolerances", "outputs", "timings"):
        assert key in report
    assert report["verdict"] == "pass"
    assert report["kind"] == "dc-check"
    assert report["residuals"]["max_commutator"] <= report["tolerances"]["max_commutator"]


def test_run_default_report_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_scenario(tmp_path / "dc.json", dc_scenario())
    assert main(["run", "dc.json", "--quiet"]) == 0
    assert (tmp_path / "dc.report.json").exists()


def test_exit_one_when_residual_exceeds_tolerance(tmp_path):
    sc = write_scenario(tmp_path / "b.json", beurling_scenario())
    out = tmp_path / "b.report.json"
    code = main(["run", str(sc), "--out", str(out), "--tol", "0.0", "--quiet"])
    assert code == 1
    assert load_json(out)["verdict"] == "fail"


def test_exit_two_on_precondition_failure(tmp_path, capsys):
    # linear symbol needs more forward degrees than the cap offers
    sc = write_scenario(
        tmp_path / "t5.json",
        {
            "name": "overflow",
            "kind": "theorem5",
            "params": {"caps": [4, 8], "phis": [{"kind": "linear", "c": [0.5, 0.0]}]},
        },
    )
    code = main(["run", str(sc), "--quiet"])
    assert code == 2
    assert "DegreeOverflow" in capsys.readouterr().err


def test_exit_three_on_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["run", str(bad), "--quiet"]) == 3
    missing = tmp_path / "nope.json"
    assert main(["run", str(missing), "--quiet"]) == 3
    unknown = write_scenario(
        tmp_path / "unk.json", {"name": "x", "kind": "frobnicate", "params": {}}
    )
    assert main(["run", str(unknown), "--quiet"]) == 3
    capsys.readouterr()


def test_reports_are_deterministic_across_runs(tmp_path):
    sc = write_scenario(
        tmp_path / "sn.json",
        {
            "name": "sn-deterministic",
            "kind": "sn-example",
            "params": {
                "caps": [6, 16],
                "random": {"count": 2, "modulus_max": 0.6, "separation": 0.15},
                "seed": 7,
            },
        },
    )
    outs = []
    for i in (0, 1):
        out = tmp_path / f"r{i}.json"
        assert main(["run", str(sc), "--out", str(out), "--quiet"]) == 0
        rep = load_json(out)
        rep.pop("timings")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_seed_flag_changes_random_draws(tmp_path):
    sc = write_scenario(tmp_path / "b.json", beurling_scenario())
    sc_rand = write_scenario(
        tmp_path / "br.json",
        {
            "name": "b-rand",
            "kind": "beurling-roundtrip",
            "params": {"cap": 24, "random": {"count": 2}, "seed": 3},
        },
    )
    zs = []
    for seed in (11, 12):
        out = tmp_path / f"s{seed}.json"
        assert main(["run", str(sc_rand), "--out", str(out), "--seed", str(seed), "--quiet"]) == 0
        rep = load_json(out)
        assert rep["seed"] == seed
        zs.append(rep["outputs"]["zeros"])
    assert zs[0] != zs[1]
    # explicit zeros are untouched by the seed
    out = tmp_path / "fixed.json"
    assert main(["run", str(sc), "--out", str(out), "--seed", "99", "--quiet"]) == 0
    assert load_json(out)["outputs"]["zeros"] == [[0.35, 0.0]]


def test_tolerance_precedence(tmp_path, monkeypatch):
    # environment < scenario tol < --tol flag
    monkeypatch.setenv("POLYHARDY_TOL", "1e-2")
    code, rep = run_scenario(beurling_scenario())
    assert code == 0
    assert rep["tolerances"]["theta_interior_error"] == 1e-2
    code, rep = run_scenario(beurling_scenario(tol=1e-5))
    assert rep["tolerances"]["theta_interior_error"] == 1e-5
    code, rep = run_scenario(beurling_scenario(tol=1e-5), args_tol=1e-7)
    assert rep["tolerances"]["theta_interior_error"] == 1e-7
    monkeypatch.delenv("POLYHARDY_TOL")
    code, rep = run_scenario(beurling_scenario())
    assert rep["tolerances"]["theta_interior_error"] == 1e-8


def test_json_flag_prints_report(tmp_path, capsys):
    sc = write_scenario(tmp_path / "dc.json", dc_scenario())
    out = tmp_path / "r.json"
    assert main(["run", str(sc), "--out", str(out), "--json"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["verdict"] == "pass"


def test_suite_aggregates_and_reports_worst_exit(tmp_path, capsys):
    d = tmp_path / "suite"
    d.mkdir()
    write_scenario(d / "a.json", dc_scenario("a"))
    write_scenario(d / "b.json", dc_scenario("b"))
    (d / "broken.json").write_text("{oops", encoding="utf-8")
    out_dir = tmp_path / "reports"
    code = main(["suite", str(d), "--out", str(out_dir)])
    assert code == 3
    assert (out_dir / "a.report.json").exists()
    assert (out_dir / "b.report.json").exists()
    text = capsys.readouterr().out
    assert "2/3 scenarios passed" in text


def test_suite_empty_directory_passes(tmp_path, capsys):
    d = tmp_path / "empty"
    d.mkdir()
    assert main(["suite", str(d), "--out", str(tmp_path / "rep")]) == 0
    assert "0/0 scenarios passed" in capsys.readouterr().out
    assert main(["suite", str(tmp_path / "missing"), "--quiet"]) == 3
    capsys.readouterr()


def test_suite_skips_previous_reports(tmp_path, capsys):
    d = tmp_path / "suite"
    d.mkdir()
    write_scenario(d / "a.json", dc_scenario("a"))
    write_scenario(d / "a.report.json", {"verdict": "pass"})
    assert main(["suite", str(d), "--out", str(tmp_path / "rep")]) == 0
    assert "1/1 scenarios passed" in capsys.readouterr().out


def test_bundled_scenarios_all_pass(tmp_path):
    assert SCENARIO_DIR.is_dir()
    code = main(["suite", str(SCENARIO_DIR), "--out", str(tmp_path / "rep"), "--quiet"])
    assert code == 0
    reports = sorted((tmp_path / "rep").glob("*.report.json"))
    assert len(reports) == 9
    assert all(load_json(p)["verdict"] == "pass" for p in reports)
