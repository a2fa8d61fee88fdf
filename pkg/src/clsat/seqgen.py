"""Automatic branching-sequence generation for pebbling and GTn formulas.

The pebbling generators walk the pebbling graph (the high-level problem
description, not its CNF) and emit label variables in the order that makes a
fast-backtracking first-UIP learner derive the node clauses bottom-up. The
GTn generator emits the simple row-by-row pattern; it is an approximate
sequence and the solver is expected to fall back to its heuristic after it.
"""

from __future__ import annotations

import sys

from .engine import BranchingSequence
from .generators import PebblingGraph, gtn_var


def _with_recursion_room(n: int):
    limit = max(sys.getrecursionlimit(), 4 * n + 100)
    sys.setrecursionlimit(limit)


def peb_seq_1uip(graph: PebblingGraph) -> BranchingSequence:
    """Branching sequence for any single-target pebbling graph with distinct
    labels (first-UIP learning, fast backtracking).

    Predecessors are processed from highest to lowest (heights tied on larger
    node id first, which reproduces the published orderings); the lowest
    predecessor contributes no labels. Unit-labeled nodes are handled first,
    bottom-up, with their outgoing edges removed: learning a unit clause
    sends the solver back to level zero, so their subsequences must not
    interleave with the rest.
    """
    labels = {n.id: n.label for n in graph.nodes}
    seen_vars: set[int] = set()
    for lab in labels.values():
        for v in lab:
            if v in seen_vars:
                raise ValueError("pebbling sequence needs distinct node labels")
            seen_vars.add(v)
    heights = graph.heights()
    # sort every predecessor list once: increasing height, ties larger id first
    preds = {
        n.id: sorted(n.preds, key=lambda p: (heights[p], -p)) for n in graph.nodes
    }
    unit_nodes = {n.id for n in graph.nodes if len(n.label) == 1}
    sources = graph.sources()
    for nid in list(preds):
        kept = [p for p in preds[nid] if p not in unit_nodes]
        if kept != preds[nid]:
            preds[nid] = kept
            if not kept:
                sources.add(nid)

    out: list[int] = []
    visited: set[int] = set()
    visited_as_high: set[int] = set()

    def wrapper(v: int) -> None:
        if preds[v]:
            sub(v, len(preds[v]))

    def sub(v: int, i: int) -> None:
        u = preds[v][i - 1]
        if i == 1:
            # lowest predecessor: no labels, only the recursion
            if u not in visited and u not in sources:
                visited.add(u)
                wrapper(u)
            return
        lab = labels[u]
        out.extend(lab[:-1])
        if u not in visited_as_high and u not in sources:
            visited_as_high.add(u)
            out.append(lab[-1])
            if u not in visited:
                visited.add(u)
                wrapper(u)
        sub(v, i - 1)
        for j in range(len(lab) - 2, 0, -1):
            out.extend(lab[:j])
            sub(v, i - 1)
        sub(v, i - 1)

    _with_recursion_room(len(graph.nodes) * 8)
    for u in sorted(unit_nodes, key=lambda n: (heights[n], n)):
        if u == graph.target:
            continue
        out.extend(labels[u])
        wrapper(u)
    wrapper(graph.target)
    return BranchingSequence(tuple(out))


def grid_peb_seq_1uip(graph: PebblingGraph) -> BranchingSequence:
    """Specialized sequence for grid (pyramid) pebbling graphs.

    One walk from the target: emit the left predecessor's first label; on its
    first visit as a left child also emit its second label, recurse into it,
    and then recurse into the right predecessor. Equals the general algorithm
    on grids.
    """
    layout = _grid_layout(graph)
    sources = graph.sources()
    out: list[int] = []
    visited: set[int] = set()
    visited_as_left: set[int] = set()

    def rec(v: int) -> None:
        if v in sources:
            return
        left, right = layout[v]
        out.append(graph.node(left).label[0])
        if left not in visited_as_left and left not in sources:
            visited_as_left.add(left)
            out.append(graph.node(left).label[1])
            if left not in visited:
                visited.add(left)
                rec(left)
            if right not in visited and right not in sources:
                visited.add(right)
                rec(right)

    _with_recursion_room(len(graph.nodes) * 4)
    rec(graph.target)
    return BranchingSequence(tuple(out))


def _grid_layout(graph: PebblingGraph) -> dict[int, tuple[int, int]]:
    """Validate the pyramid shape and return each internal node's
    (left, right) predecessor pair (left = smaller id)."""
    n = len(graph.nodes)
    layers = int((2 * n) ** 0.5)
    while layers * (layers + 1) // 2 > n:
        layers -= 1
    if layers * (layers + 1) // 2 != n:
        raise ValueError("not a grid pebbling graph: node count is not triangular")
    layout: dict[int, tuple[int, int]] = {}
    nid = 0
    below: list[int] = []
    for width in range(layers, 0, -1):
        current = []
        for pos in range(width):
            nid += 1
            node = graph.node(nid)
            if len(node.label) != 2:
                raise ValueError("not a grid pebbling graph: labels must have 2 variables")
            expected = () if not below else (below[pos], below[pos + 1])
            if tuple(node.preds) != expected:
                raise ValueError("not a grid pebbling graph: wrong predecessor wiring")
            if below:
                layout[nid] = (below[pos], below[pos + 1])
            current.append(nid)
        below = current
    return layout


def gtn_seq(n: int) -> BranchingSequence:
    """Approximate branching sequence for the GTn ordering formula.

    Row by row, left to right: for j = 1..n emit the variables "i above j"
    for i = 1..n-1 (i != j), then emit the final row once more. The total is
    n(n-1) entries; the sequence is incomplete by design.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    out: list[int] = []
    rows = list(range(1, n + 1)) + [n]
    for j in rows:
        for i in range(1, n):
            if i != j:
                out.append(gtn_var(i, j, n))
    return BranchingSequence(tuple(out))
