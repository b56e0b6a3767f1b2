from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from aslgames.builder import BuildConfig, build_full_game
from aslgames.cli import corpus_dir
from aslgames.description import load_directory, lower, parse_description
from aslgames.solver import UtilitySpec, assign_utilities, backtrack_solve, evaluate_criteria, load_criteria_file

FISHERS_CRITERIA = corpus_dir("fishers") / "fishers.criteria"


def corpus_kb(name: str, seed: int = 0):
    return lower(load_directory(corpus_dir(name)), seed=seed)


def build_corpus(name: str, thres: float = 0, seed: int = 0, max_rounds: int = 10):
    kb = corpus_kb(name, seed)
    game, ann = build_full_game(kb, BuildConfig(thres=thres, seed=seed, max_rounds=max_rounds))
    return kb, game


def solve_corpus(name: str, thres: float = 0, seed: int = 0, selection: str = "first"):
    """Build, assign utilities and solve a bundled corpus; returns (kb, game, report, criteria)."""
    kb, game = build_corpus(name, thres, seed)
    if name == "fishers":
        spec, criteria = load_criteria_file(FISHERS_CRITERIA)
    else:
        spec, criteria = UtilitySpec(), []
    assign_utilities(game, spec, kb)
    report = backtrack_solve(game, selection)
    evaluate_criteria(report, criteria, game, kb)
    return kb, game, report, criteria


def kb_from_text(agents: str = "", states: str = "", rules: str = "", seed: int = 0):
    d = parse_description({"agents": agents, "states": states, "rules": rules})
    return lower(d, seed=seed)


# (corpus, threshold, seed) for every configuration the suite exercises
CONFIGS = [
    ("ipd", 0, 0), ("ipd", 1, 0), ("ipd", 2, 0),
    ("metanorms", 0, 0), ("metanorms", 1, 0),
    ("fishers", 0, 0), ("fishers", 1, 0), ("fishers", 2, 0), ("fishers", 2, 1),
]


@pytest.fixture(scope="session")
def corpus_games():
    return {cfg: build_corpus(*cfg) for cfg in CONFIGS}


def F(x) -> Fraction:
    return Fraction(x)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
