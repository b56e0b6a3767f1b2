"""Build game rounds from states and chain them into the full game."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import KnowledgeBase, substitute
from .errors import InstantiationError, NodeBudgetExceeded, NoMovers, NoParticipants
from .game import CHANCE, ExtensiveGame, FluentAnnotation, GameRound, InfoSet, RoundInfo, State
from .interpreter import get_control_conseqs, get_simple_conseqs, simple_conseqs_with_origin
from .terms import Struct, Sym, Term, Var, format_term, is_ground, order_key

log = logging.getLogger(__name__)
trace = logging.getLogger("aslgames.trace")

TERMINAL = Sym("terminal")


@dataclass
class BuildConfig:
    id: str | None = None  # None: use every rule regardless of its id
    thres: float = 0
    max_rounds: int = 10
    seed: int = 0
    node_budget: int = 10**6

    def __post_init__(self) -> None:
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")
        if self.thres < 0:
            raise ValueError("thres must be non-negative")


@dataclass
class RoundResult:
    round: GameRound
    fluents: dict[int, State] = field(default_factory=dict)
    tau: dict[int, int] = field(default_factory=dict)
    info: RoundInfo | None = None


def stage_participants_and_roles(kb: KnowledgeBase, cfg: BuildConfig) -> tuple[list[Term], list[Term]]:
    """Assert the participants and then their roles; return both fluent lists."""
    kb.reset_random(cfg.seed)
    phi = get_simple_conseqs(kb, cfg.id, "boundary", cfg.thres)
    if not phi:
        raise NoParticipants("no agent participates: the game would have no players")
    kb.assert_facts(phi)
    rho = get_simple_conseqs(kb, cfg.id, "position", cfg.thres)
    kb.assert_facts(rho)
    if trace.isEnabledFor(logging.INFO):
        trace.info("participants %s", ", ".join(format_term(f) for f in phi))
        trace.info("roles %s", ", ".join(format_term(f) for f in rho))
    return phi, rho


def derive_initial_state(kb: KnowledgeBase) -> State:
    goal_var = Var("F")
    out: list[Term] = []
    for s in kb.solve(Struct("initially", (goal_var,))):
        f = substitute(goal_var, s)
        if not is_ground(f):
            raise InstantiationError(f"initially/1 produced non-ground fluent {format_term(f)}")
        if f not in out:
            out.append(f)
    return tuple(out)


def _is_terminal(kb: KnowledgeBase) -> bool:
    return kb.knows(("terminal", 0)) and kb.succeeds(TERMINAL)


def _movers(kb: KnowledgeBase, cfg: BuildConfig) -> list[tuple[Term, tuple[Term, ...]]]:
    """Movers in standard order, each with its ordered action list."""
    actions: dict[Term, list[tuple[int, Term]]] = {}
    for f, act in simple_conseqs_with_origin(kb, cfg.id, "choice", cfg.thres):
        if isinstance(f, Struct) and f.functor == "can" and f.arity == 2:
            actions.setdefault(f.args[0], []).append((act.rule.index, f.args[1]))
    out = []
    for agent in sorted(actions, key=order_key):
        ordered = sorted(actions[agent], key=lambda pair: (pair[0], order_key(pair[1])))
        acts: list[Term] = []
        for _, a in ordered:
            if a not in acts:
                acts.append(a)
        out.append((agent, tuple(acts)))
    return out


def player_name(agent: Term) -> str:
    return format_term(agent)


def _build_round(kb: KnowledgeBase, cfg: BuildConfig, s_t: State, game: ExtensiveGame,
                 root: int, next_id: int, next_infoset: int) -> tuple[RoundResult, int, int]:
    """Expand one round at ``root`` into ``game``; ``s_t`` must already be asserted."""
    movers = _movers(kb, cfg)
    if not movers:
        raise NoMovers(f"no agent can act at state {{{', '.join(format_term(f) for f in s_t)}}}")
    agent_of = {player_name(agent): agent for agent, _ in movers}
    members = [root]
    infosets = []
    w = [root]
    for agent, acts in movers:
        name = player_name(agent)
        if name not in game.players:
            game.players.append(name)
        wid = next_infoset
        next_infoset += 1
        game.infosets[wid] = InfoSet(wid, name, tuple(w), acts)
        infosets.append(wid)
        nxt = []
        for x in w:
            game.turn[x] = name
            game.node_infoset[x] = wid
            for a in acts:
                game.add_node(next_id, x, action=a)
                members.append(next_id)
                nxt.append(next_id)
                next_id += 1
        w = nxt

    result = RoundResult(GameRound(game, s_t))
    leaves: list[int] = []
    for z in w:
        path = game.path(z)
        path = path[path.index(root):]
        mu = [Struct("does", (agent_of[game.turn[a]], game.label[b])) for a, b in zip(path, path[1:])]
        with kb.assumed(mu):
            t = 1 if _is_terminal(kb) else 0
            dist = get_control_conseqs(kb, cfg.id, cfg.thres, state=s_t)
        if len(dist) == 1:
            result.fluents[z] = dist.states[0]
            result.tau[z] = t
            leaves.append(z)
        else:
            game.turn[z] = CHANCE
            for state, p in dist.items():
                game.add_node(next_id, z, prob=p)
                members.append(next_id)
                result.fluents[next_id] = state
                result.tau[next_id] = t
                leaves.append(next_id)
                next_id += 1
        if next_id > cfg.node_budget:
            raise NodeBudgetExceeded(f"node budget {cfg.node_budget} exceeded while expanding node {root}")
    result.info = RoundInfo(root, tuple(members), tuple(leaves), tuple(infosets))
    return result, next_id, next_infoset


def build_game_round(kb: KnowledgeBase, cfg: BuildConfig, s_t: State, root: int = 1) -> RoundResult:
    """Model every way ``s_t`` can evolve in one simultaneous-move round.

    Participants and roles must already be staged. The state is asserted for
    the duration of the call.
    """
    game = ExtensiveGame([], root=root)
    game.annotation.fluents[root] = tuple(s_t)
    with kb.assumed(s_t):
        result, _, _ = _build_round(kb, cfg, tuple(s_t), game, root, root + 1, 0)
    game.annotation.fluents.update(result.fluents)
    game.rounds = [result.info]
    return result


def build_full_game(kb: KnowledgeBase, cfg: BuildConfig | None = None) -> tuple[ExtensiveGame, FluentAnnotation]:
    """Expand rounds breadth-first from the initial state.

    A node is left as a leaf when its round index reached ``max_rounds``, its
    state satisfies ``terminal``, the joint action leading to it triggered
    termination, or no agent can act in it.
    """
    cfg = cfg or BuildConfig()
    phi, _ = stage_participants_and_roles(kb, cfg)
    s0 = derive_initial_state(kb)
    players = sorted((f.args[0] for f in phi), key=order_key)
    game = ExtensiveGame([player_name(a) for a in players], root=1)
    ann = game.annotation
    ann.fluents[1] = s0
    ann.round_index[1] = 0
    queue = deque([1])
    next_id, next_infoset = 2, 0
    while queue:
        n = queue.popleft()
        if ann.round_index[n] >= cfg.max_rounds:
            continue
        s_t = ann.fluents[n]
        with kb.assumed(s_t):
            if _is_terminal(kb):
                continue
            try:
                result, next_id, next_infoset = _build_round(kb, cfg, s_t, game, n, next_id, next_infoset)
            except NoMovers as exc:
                log.debug("leaving node %d as a leaf: %s", n, exc)
                continue
        game.rounds.append(result.info)
        for z in result.info.leaves:
            ann.fluents[z] = result.fluents[z]
            ann.round_index[z] = ann.round_index[n] + 1
            if result.tau[z] == 0:
                queue.append(z)
        if len(queue) > cfg.node_budget:
            raise NodeBudgetExceeded(f"frontier of {len(queue)} nodes exceeds the node budget")
    return game, ann


__all__ = [
    "BuildConfig", "RoundResult", "build_full_game", "build_game_round",
    "derive_initial_state", "stage_participants_and_roles",
]
