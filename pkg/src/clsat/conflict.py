"""Conflict-graph construction, cut-based learning schemes, and derivation extraction.

A conflict graph is a snapshot of the reasons behind one conflict: its nodes
are the trail literals that feed the conflict (each labeled by the literal
that is true on the trail), plus one "virtual" node for the conflicting
clause's latest-falsified literal, so the conflict variable appears with both
polarities. Decision literals are the sources; every other node's
predecessors are exactly the falsified literals of its antecedent clause. The
empty-clause sink is kept implicit: both conflict literals have an edge to it.

A cut partitions the nodes into a reason side (holding every decision) and a
conflict side (holding the sink and at least one conflict literal). The
negations of the reason-side nodes with an edge across the cut form the
learned clause.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Protocol

from .formula import canonical_literals

_INF = math.inf


class TrailState(Protocol):
    """What conflict analysis needs to know about a solver's trail."""

    current_level: int

    def trail_literal(self, var: int) -> int: ...

    def reason_literals(self, var: int) -> tuple[int, ...] | None: ...

    def var_level(self, var: int) -> int: ...

    def var_position(self, var: int) -> int: ...


@dataclass(frozen=True)
class ConflictGraph:
    nodes: tuple[int, ...]  # all node literals, in trail order (virtual node last)
    preds: dict[int, tuple[int, ...]]
    antecedents: dict[int, tuple[int, ...] | None]  # None exactly for decisions
    decisions: frozenset[int]
    conflict_var: int
    conflict_literals: tuple[int, int]  # (earlier-assigned, later/virtual)
    level: dict[int, int]
    position: dict[int, float]
    conflict_level: int

    def successors(self) -> dict[int, tuple[int, ...]]:
        succ: dict[int, list[int]] = {n: [] for n in self.nodes}
        for n in self.nodes:
            for p in self.preds[n]:
                succ[p].append(n)
        return {k: tuple(v) for k, v in succ.items()}


@dataclass(frozen=True)
class Cut:
    """A reason/conflict-side partition, stored as the conflict-side node set.

    The empty-clause sink is implicitly on the conflict side; the reason side
    is every graph node not listed here.
    """

    conflict_side: frozenset[int]


@dataclass(frozen=True)
class TrivialDerivation:
    """A linear resolution derivation: base clause, then one known-clause
    resolution per step, with all pivot variables distinct."""

    base: tuple[int, ...]
    steps: tuple[tuple[tuple[int, ...], int], ...]  # (known clause, pivot variable)
    result: tuple[int, ...]

    def intermediates(self):
        """Yield the running clause after each resolution step."""
        cur = set(self.base)
        for ant, pivot in self.steps:
            pos, neg = pivot, -pivot
            if pos in cur:
                cur = (cur - {pos}) | (set(ant) - {neg})
            else:
                cur = (cur - {neg}) | (set(ant) - {pos})
            yield canonical_literals(cur)


@dataclass(frozen=True)
class LearnedClauseRecord:
    clause: tuple[int, ...]
    cut: Cut
    derivation: TrivialDerivation
    scheme: str
    conflict_index: int
    backjump_level: int = 0
    redundant: bool = False  # FirstNewCut fell back to an already-known clause


def build_conflict_graph(
    state: TrailState,
    conflicting: tuple[int, ...] | None = None,
    clash_decision: int | None = None,
) -> ConflictGraph:
    """Build the conflict graph for a falsified clause or a branch clash.

    For a falsified clause, the latest-falsified literal becomes the virtual
    conflict node, implied by the clause itself. For a clash (a branch that
    contradicts the current value of its variable, possible only when
    branching on assigned literals is allowed), the branched literal is a
    reason-less source and the trail literal keeps its recorded reason.
    """
    preds: dict[int, tuple[int, ...]] = {}
    antecedents: dict[int, tuple[int, ...] | None] = {}
    decisions: set[int] = set()
    level: dict[int, int] = {}
    position: dict[int, float] = {}

    if clash_decision is not None:
        d = clash_decision
        v = abs(d)
        if state.reason_literals(v) is None:
            raise ValueError("cannot analyze a clash between two decisions")
        preds[d] = ()
        antecedents[d] = None
        decisions.add(d)
        level[d] = state.current_level
        position[d] = _INF
        conflict_var = v
        conflict_literals = (-d, d)
        pending = [-d]
    elif conflicting is not None and len(conflicting) > 0:
        lits = sorted(conflicting, key=lambda l: state.var_position(abs(l)))
        lstar = lits[-1]
        conflict_var = abs(lstar)
        preds[lstar] = tuple(-x for x in lits if x != lstar)
        antecedents[lstar] = tuple(conflicting)
        level[lstar] = state.var_level(conflict_var)
        position[lstar] = _INF
        conflict_literals = (-lstar, lstar)
        pending = [-x for x in lits]
    else:
        raise ValueError("need a nonempty conflicting clause or a clash literal")

    seen = set(preds)
    while pending:
        node = pending.pop()
        if node in seen:
            continue
        seen.add(node)
        v = abs(node)
        level[node] = state.var_level(v)
        position[node] = state.var_position(v)
        reason = state.reason_literals(v)
        if reason is None:
            decisions.add(node)
            preds[node] = ()
            antecedents[node] = None
        else:
            # antecedents are kept as stored; canonicalize only when emitting
            antecedents[node] = reason
            ps = tuple(-x for x in reason if x != node)
            preds[node] = ps
            pending.extend(p for p in ps if p not in seen)

    nodes = tuple(sorted(seen, key=lambda n: position[n]))
    return ConflictGraph(
        nodes=nodes,
        preds=preds,
        antecedents=antecedents,
        decisions=frozenset(decisions),
        conflict_var=conflict_var,
        conflict_literals=conflict_literals,
        level=level,
        position=position,
        conflict_level=state.current_level,
    )


def frontier(g: ConflictGraph, cut: Cut) -> set[int]:
    """Reason-side nodes with an edge into the conflict side (or into the sink)."""
    side = cut.conflict_side
    out = set()
    for n in side:
        for p in g.preds[n]:
            if p not in side:
                out.add(p)
    for cl in g.conflict_literals:
        if cl not in side:
            out.add(cl)
    return out


def cut_to_clause(g: ConflictGraph, cut: Cut) -> tuple[int, ...]:
    """The learned clause of a cut: negations of its frontier literals."""
    return canonical_literals(-u for u in frontier(g, cut))


def cut_is_valid(g: ConflictGraph, cut: Cut) -> bool:
    """Check the side conditions: decisions on the reason side, at least one
    conflict literal (plus the implicit sink) on the conflict side."""
    side = cut.conflict_side
    if not side <= set(g.nodes):
        return False
    if side & g.decisions:
        return False
    return any(cl in side for cl in g.conflict_literals)


def scheme_first_uip(g: ConflictGraph) -> Cut:
    """First-UIP cut: conflict side holds everything at the conflict level
    strictly after the first unique implication point, both conflict literals
    (when they are not the UIP or a decision), and all level-0 nodes of the
    graph, so learned clauses never mention level-0-falsified literals.

    The resulting clause has exactly one conflict-level literal: the negation
    of the UIP.
    """
    lvl = g.conflict_level
    side = {n for n in g.nodes if g.level[n] == 0 and n not in g.decisions}
    seen = set(side)
    heap: list[tuple[float, int]] = []

    def mark(n: int) -> None:
        if n in seen:
            return
        seen.add(n)
        if g.level[n] == lvl:
            heappush(heap, (-g.position[n], n))

    for cl in g.conflict_literals:
        mark(cl)
    if not heap:
        raise ValueError("conflict has no node at the conflict level")
    while True:
        _, n = heappop(heap)
        if not heap or n in g.decisions:
            uip = n
            break
        side.add(n)
        for p in g.preds[n]:
            mark(p)
    side.update(
        cl for cl in g.conflict_literals if cl != uip and cl not in g.decisions
    )
    return Cut(frozenset(side))


def scheme_decision(g: ConflictGraph) -> Cut:
    """Decision cut: the reason side is exactly the decision literals."""
    return Cut(frozenset(n for n in g.nodes if n not in g.decisions))


def scheme_relsat(g: ConflictGraph) -> Cut:
    """rel-sat cut: conflict side = implied nodes of the conflict level plus
    the conflict literals; implied literals of lower levels stay on the
    reason side (and so may appear in the clause)."""
    lvl = g.conflict_level
    side = {n for n in g.nodes if n not in g.decisions and g.level[n] == lvl}
    side.update(cl for cl in g.conflict_literals if cl not in g.decisions)
    return Cut(frozenset(side))


def minimize_cut(g: ConflictGraph, cut: Cut) -> Cut:
    """Shrink a cut's clause: while some non-decision frontier node has all
    its predecessors in the frontier, move it to the conflict side.

    A frontier node with no predecessors at all (a literal implied by a known
    unit clause) satisfies the condition vacuously and is absorbed.
    """
    side = set(cut.conflict_side)
    s = frontier(g, Cut(frozenset(side)))
    changed = True
    while changed:
        changed = False
        for v in sorted(s, key=lambda n: -g.position[n]):
            if v in g.decisions:
                continue
            if all(p in s for p in g.preds[v]):
                s.remove(v)
                side.add(v)
                changed = True
                break
    return Cut(frozenset(side))


def scheme_first_new_cut(
    g: ConflictGraph, known: set[tuple[int, ...]]
) -> tuple[Cut, bool]:
    """FirstNewCut: grow the cut from the conflict until its minimized clause
    is not already known.

    Starts from {sink, one conflict literal} (the one assigned later, unless
    it is a decision). Each round the latest conflict-side node that still has
    movable predecessors absorbs them (the sink counts as latest, so the other
    conflict literal crosses first); decisions never move. Returns the
    minimized cut and a flag that is True when even the terminal cut's clause
    was already known (non-redundancy could not be honored).
    """
    earlier, later = g.conflict_literals
    c = later if later not in g.decisions else earlier
    other = earlier if c == later else later
    side = {c}
    while True:
        cand = minimize_cut(g, Cut(frozenset(side)))
        clause = cut_to_clause(g, cand)
        if clause not in known:
            return cand, False
        if other not in side and other not in g.decisions:
            side.add(other)
            continue
        expanded = False
        for n in sorted(side, key=lambda n: -g.position[n]):
            movable = [
                p for p in g.preds[n] if p not in side and p not in g.decisions
            ]
            if movable:
                side.update(movable)
                expanded = True
                break
        if not expanded:
            return cand, True


def full_conflict_cut(g: ConflictGraph) -> Cut:
    """Every non-decision node on the conflict side; at decision level zero
    this cut's clause is the empty clause."""
    return scheme_decision(g)


def extract_trivial_derivation(g: ConflictGraph, cut: Cut) -> TrivialDerivation:
    """Derive the cut's clause by resolving antecedents of conflict-side nodes.

    Starting from the antecedent of the latest conflict-side node (always a
    conflict literal), resolve in reverse assignment order with each
    conflict-side node's antecedent on that node's variable. Nodes whose
    variable is absent from the running clause are skipped. Pivots are
    distinct and every antecedent is a known clause, so the derivation is
    trivial; its final clause equals the cut's clause.
    """
    side = sorted(cut.conflict_side, key=lambda n: g.position[n], reverse=True)
    if not side:
        raise ValueError("conflict side is empty")
    base_node = side[0]
    if base_node not in g.conflict_literals:
        raise ValueError("latest conflict-side node is not a conflict literal")
    if g.antecedents[base_node] is None:
        raise ValueError("conflict-side node has no antecedent")
    base = canonical_literals(g.antecedents[base_node])
    running = set(base)
    steps: list[tuple[tuple[int, ...], int]] = []
    for y in side[1:]:
        if -y not in running:
            continue
        ant = g.antecedents[y]
        if ant is None:
            raise ValueError("decision literal on the conflict side")
        running = (running - {-y}) | (set(ant) - {y})
        steps.append((canonical_literals(ant), abs(y)))
    result = canonical_literals(running)
    expected = cut_to_clause(g, cut)
    if result != expected:
        raise AssertionError(
            f"derivation yields {result} but the cut's clause is {expected}"
        )
    return TrivialDerivation(base=base, steps=tuple(steps), result=result)
