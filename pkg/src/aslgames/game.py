"""Extensive-form games built from rounds, with fluent annotations and exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import UnsupportedFormat
from .terms import Term, format_term, order_key

CHANCE = "chance"
SCHEMA = "aslgames.game/1"

State = tuple[Term, ...]


@dataclass(frozen=True)
class InfoSet:
    id: int
    player: str
    nodes: tuple[int, ...]
    actions: tuple[Term, ...]


@dataclass(frozen=True)
class RoundInfo:
    """Where one game round sits inside a full game."""

    root: int
    nodes: tuple[int, ...]
    leaves: tuple[int, ...]  # state nodes closing the round (chance children included)
    infosets: tuple[int, ...]


@dataclass
class FluentAnnotation:
    fluents: dict[int, State] = field(default_factory=dict)
    round_index: dict[int, int] = field(default_factory=dict)

    def __contains__(self, node: int) -> bool:
        return node in self.fluents

    def __getitem__(self, node: int) -> State:
        return self.fluents[node]


@dataclass
class ExtensiveGame:
    players: list[str]
    root: int = 1
    children: dict[int, list[int]] = field(default_factory=dict)
    parent: dict[int, int] = field(default_factory=dict)
    label: dict[int, Term] = field(default_factory=dict)  # action on the edge into a node
    chance_prob: dict[int, Fraction] = field(default_factory=dict)  # probability of the edge into a node
    turn: dict[int, str] = field(default_factory=dict)
    infosets: dict[int, InfoSet] = field(default_factory=dict)
    node_infoset: dict[int, int] = field(default_factory=dict)
    utilities: dict[int, tuple[Fraction, ...]] | None = None
    annotation: FluentAnnotation = field(default_factory=FluentAnnotation)
    rounds: list[RoundInfo] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.children.setdefault(self.root, [])

    # structure -----------------------------------------------------------
    @property
    def nodes(self) -> list[int]:
        return sorted(self.children)

    def add_node(self, node: int, parent: int, *, action: Term | None = None,
                 prob: Fraction | None = None) -> None:
        if node in self.children:
            raise ValueError(f"node {node} already exists")
        self.children[node] = []
        self.children[parent].append(node)
        self.parent[node] = parent
        if action is not None:
            self.label[node] = action
        if prob is not None:
            self.chance_prob[node] = Fraction(prob)

    def is_terminal(self, node: int) -> bool:
        return not self.children[node]

    def is_chance(self, node: int) -> bool:
        return self.turn.get(node) == CHANCE

    @property
    def terminals(self) -> list[int]:
        return [x for x in self.nodes if not self.children[x]]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(self.parent[x], x) for x in self.nodes if x in self.parent]

    def path(self, node: int) -> list[int]:
        out = [node]
        while out[-1] in self.parent:
            out.append(self.parent[out[-1]])
        return out[::-1]

    def depth(self, node: int) -> int:
        return len(self.path(node)) - 1

    def actions_at(self, node: int) -> tuple[Term, ...]:
        return self.infosets[self.node_infoset[node]].actions

    def child_for(self, node: int, action: Term) -> int:
        for c in self.children[node]:
            if self.label.get(c) == action:
                return c
        raise KeyError(f"no edge labelled {format_term(action)} at node {node}")

    def player_index(self, player: str) -> int:
        return self.players.index(player)

    def walk(self) -> Iterator[int]:
        """Nodes in breadth-first order from the root."""
        queue = [self.root]
        for x in queue:
            yield x
            queue.extend(self.children[x])

    @property
    def chance_nodes(self) -> list[int]:
        return [x for x in self.nodes if self.is_chance(x)]

    def counts(self) -> dict[str, int]:
        return {
            "nodes": len(self.children),
            "terminals": len(self.terminals),
            "chance_nodes": len(self.chance_nodes),
            "infosets": len(self.infosets),
            "rounds": len(self.rounds),
        }

    def subround(self, info: RoundInfo) -> "GameRound":
        """The embedded round ``info`` as a standalone game."""
        g = ExtensiveGame(list(self.players), root=info.root)
        members = set(info.nodes)
        for x in sorted(members - {info.root}, key=lambda n: info.nodes.index(n)):
            g.add_node(x, self.parent[x], action=self.label.get(x), prob=self.chance_prob.get(x))
        for x in info.nodes:
            if x in self.turn and self.children[x] and all(c in members for c in self.children[x]):
                g.turn[x] = self.turn[x]
        for w in info.infosets:
            g.infosets[w] = self.infosets[w]
            for x in self.infosets[w].nodes:
                g.node_infoset[x] = w
        for x in info.leaves:
            if x in self.annotation.fluents:
                g.annotation.fluents[x] = self.annotation.fluents[x]
        if info.root in self.annotation.fluents:
            g.annotation.fluents[info.root] = self.annotation.fluents[info.root]
        g.rounds = [info]
        return GameRound(g, self.annotation.fluents.get(info.root, ()))

    # equality ------------------------------------------------------------
    def structure(self) -> tuple:
        return (
            tuple(self.players), self.root,
            tuple((x, tuple(self.children[x])) for x in self.nodes),
            tuple(sorted(self.label.items())),
            tuple(sorted(self.chance_prob.items())),
            tuple(sorted(self.turn.items())),
            tuple(sorted(self.infosets.items())),
            tuple(sorted((self.utilities or {}).items())),
            tuple(sorted(self.annotation.fluents.items())),
            tuple(sorted(self.annotation.round_index.items())),
            tuple(self.rounds),
        )


@dataclass
class GameRound:
    game: ExtensiveGame
    root_state: State = ()


@dataclass
class NormalFormGame:
    players: list[str]
    actions: list[tuple[Term, ...]]
    payoffs: dict[tuple[int, ...], tuple[Fraction, ...]]
    # full utility vectors of the enclosing game, when built from a round
    outcomes: dict[tuple[int, ...], tuple[Fraction, ...]] | None = None

    def payoff(self, profile: Sequence[int]) -> tuple[Fraction, ...]:
        return self.payoffs[tuple(profile)]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)


# --- structural checks -------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    condition: int
    message: str
    nodes: tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"condition {self.condition}: {self.message} (nodes {list(self.nodes)})"


def validate_game_round(gamma: GameRound | ExtensiveGame) -> list[Violation]:
    """Check the four round conditions; an empty list means a well-formed round.

    1. the root is not a chance node; 2. at most one information set per
    player; 3. nodes in one information set are at equal depth; 4. children of
    chance nodes are terminal.
    """
    g = gamma.game if isinstance(gamma, GameRound) else gamma
    out: list[Violation] = []
    if g.is_chance(g.root):
        out.append(Violation(1, "root is a chance node", (g.root,)))
    by_player: dict[str, list[InfoSet]] = {}
    for w in g.infosets.values():
        by_player.setdefault(w.player, []).append(w)
    for player, sets in by_player.items():
        if len(sets) > 1:
            out.append(Violation(2, f"player {player} has {len(sets)} information sets",
                                 tuple(x for w in sets for x in w.nodes)))
    for w in g.infosets.values():
        depths = {g.depth(x) for x in w.nodes}
        if len(depths) > 1:
            out.append(Violation(3, f"information set {w.id} spans depths {sorted(depths)}", w.nodes))
    for x in g.chance_nodes:
        bad = tuple(c for c in g.children[x] if g.children[c])
        if bad:
            out.append(Violation(4, f"chance node {x} has non-terminal children", bad))
    return out


def validate_tree(g: ExtensiveGame) -> list[str]:
    """Generic well-formedness: rooted tree, labels match information sets, chance sums."""
    problems = []
    if len(g.edges) != len(g.children) - 1:
        problems.append("edge count is not node count minus one")
    for x in g.nodes:
        if x != g.root and x not in g.parent:
            problems.append(f"node {x} has no parent")
    seen = set(g.walk())
    if seen != set(g.children):
        problems.append("some nodes are unreachable from the root")
    for x in g.nodes:
        if not g.children[x]:
            continue
        if g.is_chance(x):
            total = sum((g.chance_prob[c] for c in g.children[x]), Fraction(0))
            if total != 1:
                problems.append(f"chance node {x} probabilities sum to {total}")
        else:
            labels = tuple(g.label.get(c) for c in g.children[x])
            if x not in g.node_infoset:
                problems.append(f"decision node {x} has no information set")
            elif labels != g.actions_at(x):
                problems.append(f"edge labels at node {x} differ from its information set actions")
    return problems


def validate_perfect_recall(game: ExtensiveGame) -> bool:
    """True iff every player's own history is the same at all nodes of each information set."""

    def experience(node: int, player: str) -> tuple:
        hist = []
        path = game.path(node)
        for a, b in zip(path, path[1:]):
            if game.turn.get(a) == player:
                hist.append((game.node_infoset[a], game.label[b]))
        return tuple(hist)

    for w in game.infosets.values():
        exps = {experience(x, w.player) for x in w.nodes}
        if len(exps) > 1:
            return False
    return True


# --- serialization -----------------------------------------------------------

def _frac(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def _unfrac(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def sorted_fluents(state: Iterable[Term]) -> list[Term]:
    """Display order for state fluents (alphabetical on the printed form)."""
    return sorted(state, key=lambda t: (format_term(t).lstrip("~("), format_term(t)))


def format_state(state: Iterable[Term]) -> str:
    return ", ".join(format_term(f) for f in sorted_fluents(state))


def node_kind(g: ExtensiveGame, x: int) -> str:
    if not g.children[x]:
        return "terminal"
    return "chance" if g.is_chance(x) else "decision"


def to_json_dict(g: ExtensiveGame) -> dict:
    nodes = []
    for x in g.nodes:
        entry: dict = {"id": x, "kind": node_kind(g, x), "parent": g.parent.get(x)}
        if x in g.label:
            entry["action"] = format_term(g.label[x])
        if x in g.chance_prob:
            entry["prob"] = _frac(g.chance_prob[x])
        if g.children[x] and not g.is_chance(x) and x in g.turn:
            entry["player"] = g.turn[x]
            entry["infoset"] = g.node_infoset[x]
        if x in g.annotation.fluents:
            entry["fluents"] = [format_term(f) for f in g.annotation.fluents[x]]
        if x in g.annotation.round_index:
            entry["round"] = g.annotation.round_index[x]
        if g.utilities is not None and x in g.utilities:
            entry["utility"] = [_frac(u) for u in g.utilities[x]]
        nodes.append(entry)
    return {
        "schema": SCHEMA,
        "players": list(g.players),
        "root": g.root,
        "nodes": nodes,
        "infosets": [
            {"id": w.id, "player": w.player, "nodes": list(w.nodes),
             "actions": [format_term(a) for a in w.actions]}
            for w in sorted(g.infosets.values(), key=lambda w: w.id)
        ],
        "rounds": [
            {"root": r.root, "nodes": list(r.nodes), "leaves": list(r.leaves), "infosets": list(r.infosets)}
            for r in g.rounds
        ],
    }


def from_json_dict(data: dict) -> ExtensiveGame:
    from .parser import parse_term

    if data.get("schema") != SCHEMA:
        raise UnsupportedFormat(f"unknown game schema {data.get('schema')!r}")
    g = ExtensiveGame(list(data["players"]), root=data["root"])
    utilities: dict[int, tuple[Fraction, ...]] = {}
    for entry in data["nodes"]:
        x = entry["id"]
        if entry["parent"] is not None:
            action = parse_term(entry["action"]) if "action" in entry else None
            prob = _unfrac(entry["prob"]) if "prob" in entry else None
            g.add_node(x, entry["parent"], action=action, prob=prob)
        if entry["kind"] == "chance":
            g.turn[x] = CHANCE
        elif "player" in entry:
            g.turn[x] = entry["player"]
            g.node_infoset[x] = entry["infoset"]
        if "fluents" in entry:
            g.annotation.fluents[x] = tuple(parse_term(f) for f in entry["fluents"])
        if "round" in entry:
            g.annotation.round_index[x] = entry["round"]
        if "utility" in entry:
            utilities[x] = tuple(_unfrac(u) for u in entry["utility"])
    for w in data["infosets"]:
        g.infosets[w["id"]] = InfoSet(w["id"], w["player"], tuple(w["nodes"]),
                                      tuple(parse_term(a) for a in w["actions"]))
    g.rounds = [RoundInfo(r["root"], tuple(r["nodes"]), tuple(r["leaves"]), tuple(r["infosets"]))
                for r in data["rounds"]]
    g.utilities = utilities or None
    return g


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _num(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_dot(g: ExtensiveGame) -> str:
    lines = ["digraph game {", "  node [fontname=\"Helvetica\"];", "  edge [fontname=\"Helvetica\"];"]
    for x in g.nodes:
        kind = node_kind(g, x)
        parts = [str(x)]
        if kind == "decision":
            parts.append(g.turn.get(x, "?"))
        if x in g.annotation.fluents:
            parts.append(format_state(g.annotation.fluents[x]))
        if g.utilities is not None and x in g.utilities:
            parts.append("(" + ", ".join(_num(u) for u in g.utilities[x]) + ")")
        shape = {"decision": "circle", "chance": "diamond", "terminal": "box"}[kind]
        if x in g.annotation.fluents and kind != "terminal":
            shape = "doublecircle"
        label = _dot_escape("\\n".join(parts)).replace("\\\\n", "\\n")
        lines.append(f'  n{x} [shape={shape}, label="{label}"];')
    for a, b in g.edges:
        if b in g.chance_prob:
            lab = _num(g.chance_prob[b])
        else:
            lab = format_term(g.label[b]) if b in g.label else ""
        lines.append(f'  n{a} -> n{b} [label="{_dot_escape(lab)}"];')
    for w in sorted(g.infosets.values(), key=lambda w: w.id):
        for a, b in zip(w.nodes, w.nodes[1:]):
            lines.append(f"  n{a} -> n{b} [style=dashed, dir=none, constraint=false];")
        if len(w.nodes) > 1:
            members = " ".join(f"n{x}" for x in w.nodes)
            lines.append(f"  {{ rank=same; {members} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(game: ExtensiveGame, annotation: FluentAnnotation | None = None, format: str = "json") -> bytes:
    """Serialize ``game`` (with ``annotation`` if given) as ``dot`` or ``json`` bytes."""
    if annotation is not None and annotation is not game.annotation:
        game = ExtensiveGame(**{**game.__dict__, "annotation": annotation})
    if format == "json":
        return (json.dumps(to_json_dict(game), indent=2) + "\n").encode("utf-8")
    if format == "dot":
        return to_dot(game).encode("utf-8")
    raise UnsupportedFormat(f"unsupported export format {format!r}; use dot or json")


def import_json(data: bytes | str) -> ExtensiveGame:
    return from_json_dict(json.loads(data))


def sort_players(agents: Iterable[Term]) -> list[Term]:
    return sorted(set(agents), key=order_key)


__all__ = [
    "CHANCE", "ExtensiveGame", "FluentAnnotation", "GameRound", "InfoSet", "NormalFormGame",
    "RoundInfo", "Violation", "export", "format_state", "import_json", "validate_game_round",
    "validate_perfect_recall", "validate_tree",
]
