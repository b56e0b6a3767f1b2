from __future__ import annotations

import csv
import json
import shutil

import pytest

from aslgames.cli import corpus_dir, main
from aslgames.game import import_json
from aslgames.solver import assign_utilities, backtrack_solve, render_report

from conftest import solve_corpus


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, _, err = run(capsys, "validate", "ipd")
    assert code == 0 and "valid" in err


def test_validate_directory_path(capsys):
    code, _, _ = run(capsys, "validate", str(corpus_dir("fishers")))
    assert code == 0


def test_validate_bad_probability(tmp_path, capsys):
    src = corpus_dir("metanorms")
    rules = (src / "rules.asl").read_text().replace("withProb 0.4] where [role(P1,individual)",
                                                    "withProb 0.5] where [role(P1,individual)")
    (tmp_path / "rules.asl").write_text(rules)
    code, _, err = run(capsys, "validate", "--agents", str(src / "agents.asl"),
                       "--states", str(src / "states.asl"), "--rules", str(tmp_path / "rules.asl"),
                       "--format", "json")
    assert code == 1
    payload = json.loads(err)
    assert payload["valid"] is False
    assert [d["category"] for d in payload["diagnostics"] if d["severity"] == "error"] == ["probability"]


def test_validate_syntax_error(tmp_path, capsys):
    (tmp_path / "description.asl").write_text("agent(a).\nrule(g, choice, 0, if x then).\n")
    code, _, err = run(capsys, "validate", "--description", str(tmp_path / "description.asl"))
    assert code == 1 and ":2:" in err


def test_validate_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "validate", "--rules", str(tmp_path / "nope.asl"))
    assert code == 2


def test_usage_error(capsys):
    assert run(capsys, "build", "--threshold", "lots")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "solve", "ipd", "--selection", "random")[0] == 2


def test_build_json_norms(capsys):
    code, out, err = run(capsys, "build", "examples/norms", "--threshold", "0")
    assert code == 0
    data = json.loads(out)
    terminals = {n["id"]: n["fluents"] for n in data["nodes"] if n["kind"] == "terminal"}
    assert sorted(terminals) == [3, 4, 6, 7]
    assert "seen(j, i)" not in terminals[4] and "~seen(j, i)" in terminals[4]
    assert "terminals=4" in err


def test_build_metanorms_state_nodes(capsys):
    code, out, _ = run(capsys, "build", "examples/metanorms", "--threshold", "1")
    data = json.loads(out)
    assert len([n for n in data["nodes"] if "fluents" in n]) == 9


def test_build_max_rounds_zero(capsys):
    code, out, _ = run(capsys, "build", "ipd", "--max-rounds", "0")
    assert code == 0 and len(json.loads(out)["nodes"]) == 1


def test_build_dot_to_file(tmp_path, capsys):
    out = tmp_path / "g.dot"
    code, stdout, _ = run(capsys, "build", "norms", "--format", "dot", "--out", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("digraph")


def test_build_threshold_inf(capsys):
    code, out, _ = run(capsys, "build", "ipd", "--threshold", "inf")
    assert code == 0
    assert len(json.loads(out)["nodes"]) == 249


def test_build_no_participants(tmp_path, capsys):
    (tmp_path / "description.asl").write_text(
        "agent(a).\ninitially(x).\nrule(g, boundary, 3, if agent(A) then participates(A) where []).\n")
    code, _, err = run(capsys, "build", str(tmp_path))
    assert code == 1 and "participates" in err


def test_solve_norms(capsys):
    code, out, _ = run(capsys, "solve", "norms")
    dist = json.loads(out)["outcome_dist"]
    assert dist["4"] == {"num": 2, "den": 5} and dist["7"] == {"num": 3, "den": 5}


def test_solve_race_with_criteria_file(capsys):
    code, out, _ = run(capsys, "solve", "examples/fishers", "--threshold", "1",
                       "--utilities", "criteria-file", "fishers.criteria", "--format", "table")
    assert code == 0
    rows = [line.split() for line in out.splitlines() if line.strip().endswith(("0.62", "0.38"))]
    assert len(rows) == 2


def test_solve_ipd_all(capsys):
    code, out, _ = run(capsys, "solve", "ipd", "--selection", "all")
    data = json.loads(out)
    assert len(data["alternatives"]) == 1
    assert data["root_value"] == {"alice": {"num": 9, "den": 1}, "bob": {"num": 9, "den": 1}}


def test_solve_fishers_needs_criteria(capsys):
    assert run(capsys, "solve", "fishers", "--utilities", "payoff")[0] == 1


def test_solve_report_dir(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "race", "--report-dir", str(tmp_path / "rep"))
    assert code == 0
    files = {p.name for p in (tmp_path / "rep").iterdir()}
    assert {"outcomes.csv", "criteria.csv", "report.json", "outcomes.png", "tree.png"} <= files
    rows = list(csv.DictReader((tmp_path / "rep" / "outcomes.csv").open()))
    probs = sorted(r["exact"] for r in rows if r["exact"] != "0")
    assert probs == ["5/13", "8/13"]
    assert (tmp_path / "rep" / "outcomes.png").read_bytes()[:4] == b"\x89PNG"


def test_eval_tables(capsys):
    code, out, _ = run(capsys, "eval", "announce", "--seed", "1")
    assert code == 0
    assert out.splitlines()[1].split()[:2] == ["violence", "0.0000"]
    code, out, _ = run(capsys, "eval", "race", "--format", "json")
    assert json.loads(out)["criteria"]["violence"]["value"] == 0


def test_eval_constant_criterion(tmp_path, capsys):
    crit = tmp_path / "c.criteria"
    crit.write_text("criteria:\n  seven:\n    constant: 7\n")
    code, out, _ = run(capsys, "eval", "norms", "--criteria", str(crit))
    assert code == 0 and "7.0000" in out


def test_eval_without_criteria(capsys):
    assert run(capsys, "eval", "norms")[0] == 2


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("ASL_SEED", "1")
    _, env_out, _ = run(capsys, "solve", "announce")
    monkeypatch.delenv("ASL_SEED")
    _, flag_out, _ = run(capsys, "solve", "announce", "--seed", "1")
    assert env_out == flag_out
    monkeypatch.setenv("ASL_SEED", "x")
    assert run(capsys, "solve", "announce")[0] == 2


def test_trace_logs_activations(capsys):
    code, _, err = run(capsys, "build", "norms", "--trace")
    assert code == 0 and "trace: activate" in err
    import logging
    logging.getLogger("aslgames.trace").handlers.clear()
    logging.getLogger("aslgames.trace").setLevel(logging.WARNING)


def test_copied_corpus_directory(tmp_path, capsys):
    shutil.copytree(corpus_dir("fishers"), tmp_path / "fish")
    code, out, _ = run(capsys, "eval", str(tmp_path / "fish"), "--threshold", "1")
    assert code == 0 and "violence" in out


def test_build_then_solve_matches_solve(capsys):
    _, built, _ = run(capsys, "build", "metanorms")
    g = import_json(built)
    assign_utilities(g)
    piped = render_report(backtrack_solve(g), g, "json")
    _, direct, _ = run(capsys, "solve", "metanorms")
    assert piped == direct


def test_examples_listing(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and "fishers" in out
