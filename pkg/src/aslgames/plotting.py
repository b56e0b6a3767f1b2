"""Matplotlib figures for solved games."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .game import ExtensiveGame, format_state  # noqa: E402
from .solver import SolveReport  # noqa: E402
from .terms import format_term  # noqa: E402


def plot_outcome_distribution(report: SolveReport, game: ExtensiveGame, path: str | Path,
                              title: str | None = None) -> Path:
    """Bar chart of the induced probability of every terminal node."""
    path = Path(path)
    nodes = game.terminals
    probs = [float(report.outcome_dist[z]) for z in nodes]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(nodes) + 2), 3.2))
    ax.bar([str(z) for z in nodes], probs, color="#3b6ea5")
    ax.set_xlabel("terminal node")
    ax.set_ylabel("probability")
    ax.set_ylim(0, 1.05)
    if len(nodes) > 24:
        ax.tick_params(axis="x", labelrotation=90, labelsize=6)
    for i, p in enumerate(probs):
        if p >= 0.005 and len(nodes) <= 40:
            ax.text(i, p + 0.02, f"{p:.2f}", ha="center", fontsize=7)
    ax.set_title(title or "Induced outcome distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _layout(game: ExtensiveGame) -> dict[int, tuple[float, float]]:
    pos: dict[int, tuple[float, float]] = {}
    counter = [0]

    def place(x: int, depth: int) -> float:
        kids = game.children[x]
        if not kids:
            xpos = float(counter[0])
            counter[0] += 1
        else:
            xs = [place(c, depth + 1) for c in kids]
            xpos = sum(xs) / len(xs)
        pos[x] = (xpos, -float(depth))
        return xpos

    place(game.root, 0)
    return pos


def plot_game_tree(game: ExtensiveGame, path: str | Path, report: SolveReport | None = None,
                   title: str | None = None, max_nodes: int = 400) -> Path | None:
    """Draw the tree; edge width follows the reach probability when ``report`` is given."""
    if len(game.children) > max_nodes:
        return None
    path = Path(path)
    pos = _layout(game)
    leaves = len(game.terminals)
    fig, ax = plt.subplots(figsize=(max(5.0, 0.6 * leaves + 1), max(3.0, 1.1 * (1 - min(y for _, y in pos.values())) + 1)))
    reach = {}
    if report is not None:
        reach = {game.root: 1.0}
        for x in game.walk():
            for c in game.children[x]:
                if game.is_chance(x):
                    p = float(game.chance_prob[c])
                else:
                    i = game.children[x].index(c)
                    p = float(report.profile[game.node_infoset[x]][i])
                reach[c] = reach[x] * p
    for a, b in game.edges:
        (x0, y0), (x1, y1) = pos[a], pos[b]
        width = 0.6 + 3 * reach.get(b, 0.0)
        ax.plot([x0, x1], [y0, y1], color="#555555", lw=width, zorder=1)
        if b in game.chance_prob:
            lab = str(game.chance_prob[b])
        else:
            lab = format_term(game.label[b]) if b in game.label else ""
        ax.text((x0 + x1) / 2, (y0 + y1) / 2, lab, fontsize=6, ha="center", va="center",
                bbox=dict(boxstyle="round,pad=0.1", fc="white", ec="none", alpha=0.8), zorder=3)
    for w in game.infosets.values():
        if len(w.nodes) > 1:
            xs = [pos[x][0] for x in w.nodes]
            y = pos[w.nodes[0]][1]
            ax.plot([min(xs), max(xs)], [y, y], ls="--", color="#c44e52", lw=1, zorder=0)
    for x, (px, py) in pos.items():
        if game.is_chance(x):
            marker, color = "D", "#dd8452"
        elif game.children[x]:
            marker, color = "o", "#4c72b0"
        else:
            marker, color = "s", "#55a868"
        ax.scatter([px], [py], marker=marker, s=60, color=color, zorder=2)
        text = str(x)
        if game.children[x] and not game.is_chance(x):
            text += f" {game.turn.get(x, '')}"
        ax.text(px, py + 0.12, text, fontsize=7, ha="center", zorder=4)
        if not game.children[x] and report is not None:
            ax.text(px, py - 0.25, f"{float(report.outcome_dist[x]):.2f}", fontsize=6, ha="center")
    ax.set_axis_off()
    ax.set_title(title or "Game tree")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def state_caption(game: ExtensiveGame, node: int) -> str:
    return format_state(game.annotation.fluents.get(node, ()))


__all__ = ["plot_game_tree", "plot_outcome_distribution"]
