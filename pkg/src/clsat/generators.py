"""Benchmark formula generators: pebbling graphs/formulas and GTn ordering formulas."""

from __future__ import annotations

import random
from itertools import product
from typing import Iterable, NamedTuple

from .formula import Clause, CnfFormula


class PebNode(NamedTuple):
    id: int
    label: tuple[int, ...]  # the variables of the node's disjunction label
    preds: tuple[int, ...]  # predecessor node ids (all smaller than id)


class PebblingGraph(NamedTuple):
    """A labeled DAG with a single target node.

    Nodes are numbered 1..n in topological order (predecessors have smaller
    ids). Sources are the indegree-zero nodes; the target is the unique sink.
    """

    nodes: tuple[PebNode, ...]
    target: int

    def node(self, nid: int) -> PebNode:
        return self.nodes[nid - 1]

    def sources(self) -> set[int]:
        return {n.id for n in self.nodes if not n.preds}

    def heights(self) -> dict[int, int]:
        """Height of each node: 1 for sources, else 1 + max predecessor height."""
        h: dict[int, int] = {}
        for n in self.nodes:
            h[n.id] = 1 + max((h[p] for p in n.preds), default=0)
        return h

    def num_label_vars(self) -> int:
        return sum(len(n.label) for n in self.nodes)


def validate_pebbling_graph(g: PebblingGraph) -> None:
    seen_vars: set[int] = set()
    pred_of_someone: set[int] = set()
    for i, n in enumerate(g.nodes, start=1):
        if n.id != i:
            raise ValueError("node ids must be dense and ascending from 1")
        if not n.label:
            raise ValueError(f"node {n.id} has an empty label")
        for v in n.label:
            if v <= 0:
                raise ValueError(f"node {n.id} label contains non-variable {v}")
            if v in seen_vars:
                raise ValueError(f"variable {v} appears in two node labels")
            seen_vars.add(v)
        for p in n.preds:
            if not 1 <= p < n.id:
                raise ValueError(f"node {n.id} has non-topological predecessor {p}")
        pred_of_someone.update(n.preds)
    sinks = {n.id for n in g.nodes} - pred_of_someone
    if sinks != {g.target}:
        raise ValueError(f"graph must have the target as its unique sink, sinks={sorted(sinks)}")


def gen_grid(layers: int) -> PebblingGraph:
    """Pyramid grid pebbling graph with `layers` layers.

    The bottom layer has `layers` nodes (the sources), each layer above has
    one fewer, the apex is the single target. Every node is labeled with two
    fresh variables; each non-source node's predecessors are the two adjacent
    nodes below it. Node ids run bottom-up, left to right.
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    total = layers * (layers + 1) // 2
    labels = zip(range(1, 2 * total, 2), range(2, 2 * total + 1, 2))
    preds: list[tuple[int, ...]] = [()] * layers
    start = 1
    for width in range(layers, 1, -1):
        preds.extend(zip(range(start, start + width - 1), range(start + 1, start + width)))
        start += width
    nodes = tuple(map(PebNode._make, zip(range(1, total + 1), labels, preds)))
    return PebblingGraph(nodes, total)


def gen_random_pebbling(
    nodes: int, max_indegree: int, max_label: int, seed: int
) -> PebblingGraph:
    """Seeded random pebbling graph, capped by a small grid to a single target.

    The first two nodes are sources; every later node draws its indegree
    uniformly from [2, min(max_indegree, #earlier)] and its predecessors
    uniformly from the earlier nodes. Label sizes are uniform in
    [1, max_label], all labels fresh. All sinks of the random part are then
    fed into a pyramid of 2-variable nodes whose apex is the unique target.
    """
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    if max_label < 1:
        raise ValueError("max_label must be >= 1")
    if nodes >= 3 and max_indegree < 2:
        raise ValueError("max_indegree must be >= 2 for graphs with 3+ nodes")
    rng = random.Random(seed)
    out: list[PebNode] = []
    var = 0

    def fresh(k: int) -> tuple[int, ...]:
        nonlocal var
        label = tuple(range(var + 1, var + 1 + k))
        var += k
        return label

    for i in range(1, nodes + 1):
        if i <= 2:
            preds: tuple[int, ...] = ()
        else:
            d = rng.randint(2, min(max_indegree, i - 1))
            preds = tuple(sorted(rng.sample(range(1, i), d)))
        out.append(PebNode(i, fresh(rng.randint(1, max_label)), preds))

    interior = {p for n in out for p in n.preds}
    layer = [n.id for n in out if n.id not in interior]
    nid = nodes
    while len(layer) > 1:
        nxt = []
        for pos in range(len(layer) - 1):
            nid += 1
            out.append(PebNode(nid, fresh(2), (layer[pos], layer[pos + 1])))
            nxt.append(nid)
        layer = nxt
    g = PebblingGraph(tuple(out), layer[0])
    validate_pebbling_graph(g)
    return g


def pebbling_to_cnf(g: PebblingGraph) -> CnfFormula:
    """CNF encoding of the pebbling constraints of `g`.

    Source clauses assert each source's label; precedence clauses say a node
    is pebbled once all its predecessors are (one clause per choice of one
    label variable from each predecessor); target clauses are negative units
    forbidding each target-label variable. Single-target graphs yield
    minimally unsatisfiable formulas.
    """
    validate_pebbling_graph(g)
    num_vars = max(v for n in g.nodes for v in n.label)
    clauses: list[Clause] = []
    for n in g.nodes:
        if not n.preds:
            clauses.append(Clause._trusted(tuple(sorted(n.label))))
    for n in g.nodes:
        if n.preds:
            pred_labels = [g.node(p).label for p in n.preds]
            for choice in product(*pred_labels):
                lits = [-v for v in choice] + list(n.label)
                lits.sort(key=abs)  # variables are distinct across labels
                clauses.append(Clause._trusted(tuple(lits)))
    for v in g.node(g.target).label:
        clauses.append(Clause._trusted((-v,)))
    return CnfFormula(num_vars, clauses)


def make_satisfiable(
    formula: CnfFormula, seed: int, pool: Iterable[int] | None = None
) -> CnfFormula:
    """Delete one seeded-uniform clause (index drawn from `pool`, default all).

    Single-target pebbling formulas are minimally unsatisfiable, so any
    deletion makes them satisfiable; GTn callers restrict the pool to the
    successor clauses.
    """
    if formula.size == 0:
        raise ValueError("cannot delete from an empty formula")
    indices = list(pool) if pool is not None else list(range(formula.size))
    if not indices:
        raise ValueError("empty deletion pool")
    drop = indices[random.Random(seed).randrange(len(indices))]
    kept = [c for i, c in enumerate(formula.clauses) if i != drop]
    return CnfFormula(formula.num_vars, kept)


def gtn_var(i: int, j: int, n: int) -> int:
    """Variable index of the order predicate "i above j" (i != j, both in 1..n)."""
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"no variable for pair ({i},{j}) with n={n}")
    return (i - 1) * (n - 1) + (j if j < i else j - 1)


def gen_gtn(n: int) -> CnfFormula:
    """Unsatisfiable ordering formula on n elements.

    Antisymmetry clauses for each unordered pair, transitivity clauses for
    every ordered triple of distinct elements, and one successor clause per
    element saying something lies above it. The successor clauses form the
    final block of the clause list (see gtn_successor_indices).
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    clauses: list[Clause] = []
    trusted = Clause._trusted
    var = gtn_var
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            a, b = var(i, j, n), var(j, i, n)
            clauses.append(trusted((-a, -b) if a < b else (-b, -a)))
    m = n - 1
    for i in range(1, n + 1):
        base_i = (i - 1) * m
        for j in range(1, n + 1):
            if j == i:
                continue
            base_j = (j - 1) * m
            a = base_i + (j if j < i else j - 1)
            for k in range(1, n + 1):
                if k == i or k == j:
                    continue
                b = base_j + (k if k < j else k - 1)
                c = base_i + (k if k < i else k - 1)
                lits = [-a, -b, c]
                lits.sort(key=abs)  # variables of a triple are distinct
                clauses.append(trusted(tuple(lits)))
    for j in range(1, n + 1):
        clauses.append(
            trusted(tuple(sorted(var(k, j, n) for k in range(1, n + 1) if k != j)))
        )
    return CnfFormula(n * (n - 1), clauses)


def gtn_successor_indices(n: int) -> range:
    """Clause indices of the successor block in gen_gtn(n)'s output."""
    total = n * (n - 1) // 2 + n * (n - 1) * (n - 2) + n
    return range(total - n, total)


def write_pebbling_graph(g: PebblingGraph) -> str:
    """Text form: header "p peb N", node lines "n <id> <vars> | <preds>", "t <id>"."""
    lines = [f"p peb {len(g.nodes)}"]
    for n in g.nodes:
        vars_part = " ".join(str(v) for v in n.label)
        preds_part = " ".join(str(p) for p in n.preds)
        lines.append(f"n {n.id} {vars_part} | {preds_part}".rstrip())
    lines.append(f"t {g.target}")
    return "\n".join(lines) + "\n"


def parse_pebbling_graph(text: str) -> PebblingGraph:
    count = -1
    nodes: dict[int, PebNode] = {}
    target = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 3 or parts[1] != "peb":
                raise ValueError(f"line {lineno}: malformed header")
            count = int(parts[2])
        elif parts[0] == "n":
            if "|" not in parts:
                raise ValueError(f"line {lineno}: node line missing '|'")
            bar = parts.index("|")
            nid = int(parts[1])
            label = tuple(int(t) for t in parts[2:bar])
            preds = tuple(int(t) for t in parts[bar + 1 :])
            nodes[nid] = PebNode(nid, label, preds)
        elif parts[0] == "t":
            target = int(parts[1])
        else:
            raise ValueError(f"line {lineno}: unrecognized line {line!r}")
    if count < 0 or target is None:
        raise ValueError("missing header or target line")
    if sorted(nodes) != list(range(1, count + 1)):
        raise ValueError("node ids must cover 1..N")
    g = PebblingGraph(tuple(nodes[i] for i in range(1, count + 1)), target)
    validate_pebbling_graph(g)
    return g
