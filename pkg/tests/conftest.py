"""Shared test oracles and corpus builders."""

from __future__ import annotations

import random
from itertools import product

from clsat import Clause, CnfFormula


def brute_force_satisfiable(formula: CnfFormula) -> bool:
    """Exhaustive assignment enumeration; only for small formulas."""
    n = formula.num_vars
    assert n <= 22, "brute force oracle limited to small formulas"
    clauses = [c.literals for c in formula.clauses]
    for bits in product((False, True), repeat=n):
        ok = True
        for cl in clauses:
            if not any((l > 0) == bits[abs(l) - 1] for l in cl):
                ok = False
                break
        if ok:
            return True
    return False


def reference_dpll(formula: CnfFormula) -> tuple[bool, int]:
    """Textbook recursive branching with unit propagation: lowest unassigned
    variable, FALSE branch first, terminating when every variable is
    assigned. Returns (satisfiable, number of branching nodes)."""
    n = formula.num_vars
    clauses = [c.literals for c in formula.clauses]
    decisions = 0

    def propagate(assign):
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                if any(assign.get(abs(l)) == (l > 0) for l in cl):
                    continue
                free = [l for l in cl if abs(l) not in assign]
                if not free:
                    return None
                if len(free) == 1:
                    assign[abs(free[0])] = free[0] > 0
                    changed = True
        return assign

    def search(assign):
        nonlocal decisions
        assign = propagate(dict(assign))
        if assign is None:
            return False
        free = [v for v in range(1, n + 1) if v not in assign]
        if not free:
            return True
        v = free[0]
        decisions += 1
        for value in (False, True):
            branch = dict(assign)
            branch[v] = value
            if search(branch):
                return True
        return False

    return search({}), decisions


def random_3cnf(num_vars: int, num_clauses: int, seed: int) -> CnfFormula:
    rng = random.Random(seed)
    clauses: list[tuple[int, ...]] = []
    seen = set()
    while len(clauses) < num_clauses:
        vs = rng.sample(range(1, num_vars + 1), 3)
        t = tuple(sorted((v if rng.random() < 0.5 else -v for v in vs), key=abs))
        if t not in seen:
            seen.add(t)
            clauses.append(t)
    return CnfFormula(num_vars, [Clause(c) for c in clauses])
