"""Command-line front end: validate, build, solve and eval."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .builder import BuildConfig, build_full_game
from .description import AslDescription, errors_only, load_description, load_directory, lower, validate
from .errors import AslError, AslSyntaxError, InvalidDescription
from .game import ExtensiveGame, export, format_state
from .solver import (
    POLICIES,
    Criterion,
    SolveReport,
    UtilitySpec,
    assign_utilities,
    backtrack_solve,
    decimal,
    evaluate_criteria,
    load_criteria_file,
    render_report,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

# bundled corpus name -> (directory, default threshold)
EXAMPLES = {
    "ipd": ("ipd", 0.0),
    "norms": ("metanorms", 0.0),
    "metanorms": ("metanorms", 1.0),
    "fishers": ("fishers", 0.0),
    "race": ("fishers", 1.0),
    "announce": ("fishers", 2.0),
}


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


@dataclass
class RunConfig:
    source: str | None = None
    agents: str | None = None
    states: str | None = None
    rules: str | None = None
    description: str | None = None
    id: str | None = None
    threshold: float | None = None
    max_rounds: int = 10
    seed: int = 0
    format: str | None = None
    utilities: str = "auto"
    criteria: str | None = None
    selection: str = "first"
    trace: bool = False
    out: str | None = None
    report_dir: str | None = None
    extra: dict = field(default_factory=dict)


def corpus_dir(name: str) -> Path:
    return Path(str(resources.files("aslgames") / "corpora" / name))


def resolve_source(source: str) -> tuple[Path, float]:
    """Map a directory or bundled example name to (directory, default threshold)."""
    path = Path(source)
    if path.is_dir():
        key = path.name
        return path, EXAMPLES[key][1] if key in EXAMPLES and not (path / "description.asl").exists() else 0.0
    key = path.name
    if key in EXAMPLES:
        sub, thres = EXAMPLES[key]
        return corpus_dir(sub), thres
    raise FileNotFoundError(f"no such description directory or bundled example: {source}")


def parse_threshold(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threshold must be an integer or 'inf', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("threshold must be non-negative")
    return float(value)


def _seed_default() -> int:
    env = os.environ.get("ASL_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ASL_SEED must be an integer, got {env!r}") from None


def load_config_description(cfg: RunConfig) -> tuple[AslDescription, Path | None, float]:
    """Read the description named by ``cfg``; also return its directory and default threshold."""
    explicit = any((cfg.agents, cfg.states, cfg.rules, cfg.description))
    if explicit and cfg.source:
        raise UsageError("give either a source directory or --agents/--states/--rules/--description")
    if explicit:
        if cfg.description and any((cfg.agents, cfg.states, cfg.rules)):
            raise UsageError("--description cannot be combined with --agents/--states/--rules")
        for p in (cfg.agents, cfg.states, cfg.rules, cfg.description):
            if p is not None and not Path(p).is_file():
                raise FileNotFoundError(f"no such file: {p}")
        d = load_description(agents=cfg.agents, states=cfg.states, rules=cfg.rules, description=cfg.description)
        base = Path(cfg.description or cfg.rules or cfg.states or cfg.agents).parent
        return d, base, 0.0
    if not cfg.source:
        raise UsageError("no description given: pass a directory, an example name or --rules/--description")
    directory, thres = resolve_source(cfg.source)
    return load_directory(directory), directory, thres


def _criteria_path(cfg: RunConfig, directory: Path | None) -> Path | None:
    choice = cfg.criteria if cfg.criteria else cfg.utilities
    if choice == "payoff":
        return None
    if choice == "auto":
        found = sorted(directory.glob("*.criteria")) if directory else []
        return found[0] if found else None
    path = Path(choice)
    if not path.exists() and directory is not None and (directory / path.name).exists():
        path = directory / path.name
    if not path.is_file():
        raise FileNotFoundError(f"no such criteria file: {choice}")
    return path


@dataclass
class Pipeline:
    game: ExtensiveGame
    kb: object
    report: SolveReport | None = None
    criteria: list[Criterion] = field(default_factory=list)


def run_build(cfg: RunConfig) -> tuple[Pipeline, Path | None]:
    d, directory, default_thres = load_config_description(cfg)
    kb = lower(d, seed=cfg.seed)
    thres = default_thres if cfg.threshold is None else cfg.threshold
    bcfg = BuildConfig(id=cfg.id, thres=thres, max_rounds=cfg.max_rounds, seed=cfg.seed)
    game, _ = build_full_game(kb, bcfg)
    return Pipeline(game, kb), directory


def run_solve(cfg: RunConfig) -> Pipeline:
    pipe, directory = run_build(cfg)
    crit_path = _criteria_path(cfg, directory)
    if crit_path is not None:
        spec, criteria = load_criteria_file(crit_path)
    else:
        spec, criteria = UtilitySpec(), []
    assign_utilities(pipe.game, spec, pipe.kb)
    pipe.report = backtrack_solve(pipe.game, cfg.selection)
    pipe.criteria = criteria
    evaluate_criteria(pipe.report, criteria, pipe.game, pipe.kb)
    return pipe


def _write(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        sys.stdout.write(text)
        return
    path = Path(out)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text, encoding="utf-8")


def write_report_dir(pipe: Pipeline, directory: str | Path) -> list[Path]:
    """Write CSV tables and PNG figures describing a solved game."""
    from .plotting import plot_game_tree, plot_outcome_distribution

    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    game, report = pipe.game, pipe.report
    written = []
    path = out / "outcomes.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "fluents", "probability", "exact", *[f"u_{p}" for p in game.players]])
        for z in game.terminals:
            p = report.outcome_dist[z]
            u = game.utilities[z] if game.utilities else ()
            w.writerow([z, format_state(game.annotation.fluents.get(z, ())), decimal(p, 4), str(p),
                        *[str(v) for v in u]])
    written.append(path)
    path = out / "criteria.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["criterion", "expectation", "exact"])
        for name, v in report.criterion_expectations.items():
            w.writerow([name, decimal(v, 4), str(v)])
    written.append(path)
    path = out / "report.json"
    path.write_text(render_report(report, game, "json"), encoding="utf-8")
    written.append(path)
    written.append(plot_outcome_distribution(report, game, out / "outcomes.png"))
    tree = plot_game_tree(game, out / "tree.png", report)
    if tree is not None:
        written.append(tree)
    return written


# --- commands -----------------------------------------------------------------

def cmd_validate(cfg: RunConfig) -> int:
    try:
        d, _, _ = load_config_description(cfg)
    except AslSyntaxError as exc:
        if cfg.format == "json":
            diag = {"category": "syntax", "severity": "error", "message": exc.message,
                    "file": exc.file, "line": exc.line, "column": exc.column}
            print(json.dumps({"valid": False, "diagnostics": [diag]}, indent=2), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    diags = validate(d)
    errors = errors_only(diags)
    if cfg.format == "json":
        payload = {"valid": not errors, "diagnostics": [x.to_json() for x in diags]}
        print(json.dumps(payload, indent=2), file=sys.stderr)
    else:
        for x in diags:
            print(str(x), file=sys.stderr)
        counts = f"{len(d.agents_base)} agent clauses, {len(d.states_base)} state clauses, {len(d.rules_base)} rules"
        print(f"{'invalid' if errors else 'valid'}: {counts}; {len(errors)} errors, "
              f"{len(diags) - len(errors)} warnings", file=sys.stderr)
    return EXIT_DOMAIN if errors else EXIT_OK


def cmd_build(cfg: RunConfig) -> int:
    pipe, _ = run_build(cfg)
    fmt = cfg.format or "json"
    _write(export(pipe.game, format=fmt), cfg.out)
    c = pipe.game.counts()
    print(" ".join(f"{k}={v}" for k, v in c.items()), file=sys.stderr)
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    pipe = run_solve(cfg)
    _write(render_report(pipe.report, pipe.game, cfg.format or "json"), cfg.out)
    if cfg.report_dir:
        for path in write_report_dir(pipe, cfg.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def expectations_table(report: SolveReport) -> str:
    rows = list(report.criterion_expectations.items())
    width = max([len(k) for k, _ in rows] + [9])
    lines = [f"{'criterion':<{width}}  expectation  exact"]
    for k, v in rows:
        lines.append(f"{k:<{width}}  {decimal(v, 4):>11}  {v}")
    return "\n".join(lines) + "\n"


def cmd_eval(cfg: RunConfig) -> int:
    pipe = run_solve(cfg)
    if not pipe.criteria:
        raise UsageError("no criteria to evaluate: pass --criteria FILE")
    report = pipe.report
    if (cfg.format or "table") == "json":
        data = {"criteria": {k: {"num": v.numerator, "den": v.denominator, "value": float(v)}
                             for k, v in report.criterion_expectations.items()}}
        if report.alternatives:
            data["alternatives"] = [{k: float(v) for k, v in a.criterion_expectations.items()}
                                    for a in report.alternatives]
        text = json.dumps(data, indent=2) + "\n"
    else:
        text = expectations_table(report)
        for i, alt in enumerate(report.alternatives[1:], start=1):
            text += f"\n# equilibrium combination {i}\n" + expectations_table(alt)
    _write(text, cfg.out)
    if cfg.report_dir:
        for path in write_report_dir(pipe, cfg.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_examples(cfg: RunConfig) -> int:
    for name, (sub, thres) in EXAMPLES.items():
        t = "inf" if math.isinf(thres) else int(thres)
        print(f"{name:<10} {corpus_dir(sub)} threshold={t}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "build": cmd_build, "solve": cmd_solve, "eval": cmd_eval,
            "examples": cmd_examples}


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("source", nargs="?", help="description directory or bundled example name")
    p.add_argument("--agents", help="agents base file")
    p.add_argument("--states", help="states base file")
    p.add_argument("--rules", help="rules base file")
    p.add_argument("--description", help="single file holding all three bases")


def _add_build(p: argparse.ArgumentParser) -> None:
    p.add_argument("--id", help="only use rules with this id")
    p.add_argument("--threshold", type=parse_threshold, help="maximum rule priority (integer or inf)")
    p.add_argument("--max-rounds", type=int, default=10)
    p.add_argument("--seed", type=int, help="random seed (default: $ASL_SEED or 0)")
    p.add_argument("--trace", action="store_true", help="log rule activations to standard error")
    p.add_argument("--out", help="write the main output here instead of standard output")


def _add_solve(p: argparse.ArgumentParser) -> None:
    p.add_argument("--utilities", nargs="+", default=["auto"], metavar="SPEC",
                   help="'payoff', a criteria file, or 'criteria-file PATH' (default: payoff unless "
                        "the source directory ships a .criteria file)")
    p.add_argument("--selection", choices=POLICIES, default="first")
    p.add_argument("--report-dir", help="also write CSV tables and PNG figures to this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aslgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="check a description for errors")
    _add_source(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p = sub.add_parser("build", help="build and export the extensive-form game")
    _add_source(p)
    _add_build(p)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p = sub.add_parser("solve", help="solve by round-wise backtracking and report outcomes")
    _add_source(p)
    _add_build(p)
    _add_solve(p)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p = sub.add_parser("eval", help="expected value of evaluation criteria under the solution")
    _add_source(p)
    _add_build(p)
    _add_solve(p)
    p.add_argument("--criteria", help="criteria file (default: the one shipped with the source)")
    p.add_argument("--format", choices=("json", "table"), default="table")
    sub.add_parser("examples", help="list bundled example descriptions")
    return parser


def _utilities_arg(values: Sequence[str]) -> str:
    values = list(values)
    if values and values[0] == "criteria-file":
        values = values[1:]
    if len(values) != 1:
        raise UsageError("--utilities takes 'payoff' or a criteria file path")
    return values[0]


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for name in ("source", "agents", "states", "rules", "description", "id", "threshold", "format",
                 "selection", "out", "report_dir", "criteria"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if hasattr(ns, "max_rounds"):
        if ns.max_rounds < 0:
            raise UsageError("--max-rounds must be non-negative")
        cfg.max_rounds = ns.max_rounds
    cfg.seed = ns.seed if getattr(ns, "seed", None) is not None else _seed_default()
    cfg.trace = getattr(ns, "trace", False)
    if hasattr(ns, "utilities"):
        cfg.utilities = _utilities_arg(ns.utilities)
    return cfg


def _enable_trace() -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("trace: %(message)s"))
    logger = logging.getLogger("aslgames.trace")
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        if cfg.trace:
            _enable_trace()
        return COMMANDS[ns.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidDescription as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DOMAIN
    except (AslError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
