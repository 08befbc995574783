"""Deterministic matplotlib renderings of schemas, element graphs, results.

Layouts are computed from declaration order alone (no randomness), so the
same inputs always produce the same figure.
"""

from __future__ import annotations

import math
from pathlib import Path as FsPath

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .fibration import Triple
from .instance import Instance
from .presentation import SchemaPresentation


def _circle(n: int, radius: float = 1.0) -> list[tuple[float, float]]:
    if n == 1:
        return [(0.0, 0.0)]
    return [
        (radius * math.cos(2 * math.pi * k / n + math.pi / 2),
         radius * math.sin(2 * math.pi * k / n + math.pi / 2))
        for k in range(n)
    ]


def _save(fig, path: str | FsPath) -> None:
    fig.savefig(FsPath(path), dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_schema(schema: SchemaPresentation, path: str | FsPath) -> None:
    """Draw objects on a circle with labelled arrows between them."""
    pos = dict(zip(schema.objects, _circle(len(schema.objects))))
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(schema.name)
    for obj, (x, y) in pos.items():
        ax.add_patch(plt.Circle((x, y), 0.08, color="#1f77b4", zorder=3))
        ax.annotate(obj, (x, y), textcoords="offset points", xytext=(0, 12),
                    ha="center", fontsize=10, zorder=4)
    for i, g in enumerate(schema.generators):
        x1, y1 = pos[g.source]
        x2, y2 = pos[g.target]
        if g.source == g.target:
            loop = plt.Circle((x1, y1 - 0.18), 0.12, fill=False, color="#555555")
            ax.add_patch(loop)
            ax.annotate(g.name, (x1, y1 - 0.36), ha="center", fontsize=8)
            continue
        # Bow parallel arrows apart so both labels stay readable.
        rad = 0.15 + 0.1 * (i % 3)
        ax.annotate(
            "", xy=(x2, y2), xytext=(x1, y1),
            arrowprops={"arrowstyle": "-|>", "color": "#555555",
                        "connectionstyle": f"arc3,rad={rad}"},
        )
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        ax.annotate(g.name, (mx, my + rad * 0.5), ha="center", fontsize=8,
                    color="#333333")
    lim = 1.6
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    _save(fig, path)


def render_elements(inst: Instance, triples: list[Triple], path: str | FsPath) -> None:
    """Draw rows as one column of dots per table, with triple edges."""
    fig, ax = plt.subplots(figsize=(max(6, 2 * len(inst.schema.objects)), 6))
    ax.axis("off")
    ax.set_title(f"elements of {inst.schema.name}")
    pos: dict[tuple[str, str], tuple[float, float]] = {}
    for i, obj in enumerate(inst.schema.objects):
        rids = inst.rows[obj]
        ax.annotate(obj, (float(i), 1.0), ha="center", fontsize=11, weight="bold")
        for j, rid in enumerate(rids):
            x, y = float(i), -float(j)
            pos[(obj, rid)] = (x, y)
            ax.plot([x], [y], "o", color="#1f77b4", markersize=6)
            ax.annotate(rid, (x, y), textcoords="offset points", xytext=(8, -3),
                        fontsize=8)
    for t in triples:
        x1, y1 = pos[(t.subject.table, t.subject.row_id)]
        x2, y2 = pos[(t.object.table, t.object.row_id)]
        ax.annotate(
            "", xy=(x2, y2), xytext=(x1, y1),
            arrowprops={"arrowstyle": "-|>", "color": "#999999", "lw": 0.8,
                        "connectionstyle": "arc3,rad=0.1"},
        )
    _save(fig, path)


def render_result_counts(
    objects: list[str], rows: list[dict[str, str]], path: str | FsPath
) -> None:
    """Bar chart: per shape object, how often each row occurs in the results."""
    fig, axes = plt.subplots(
        1, max(1, len(objects)), figsize=(max(6, 3 * len(objects)), 4), squeeze=False
    )
    for ax, obj in zip(axes[0], objects):
        counts: dict[str, int] = {}
        for assignment in rows:
            rid = assignment[obj]
            counts[rid] = counts.get(rid, 0) + 1
        labels = sorted(counts)
        ax.bar(range(len(labels)), [counts[k] for k in labels], color="#1f77b4")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
        ax.set_title(obj, fontsize=10)
        ax.set_ylabel("occurrences")
    if not objects:
        axes[0][0].axis("off")
        axes[0][0].annotate("no result columns", (0.5, 0.5), ha="center")
    fig.suptitle(f"{len(rows)} results")
    fig.tight_layout()
    _save(fig, path)
