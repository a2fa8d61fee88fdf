"""Resolution proofs: checking, conversion from solver logs, trace extension,
and compilation of refutations into extended branching sequences.

A proof is a sequence of steps, each either an initial clause of the formula
it refutes or a resolvent of two earlier steps on a pivot variable. A
refutation ends in the empty clause.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .conflict import LearnedClauseRecord
from .engine import (
    RESTART,
    BranchingSequence,
    SolveResult,
    SolverConfig,
    solve,
)
from .formula import Clause, CnfFormula, canonical_literals


@dataclass(frozen=True)
class ResolutionStep:
    """One proof step: an initial clause (left is None) or the resolvent of
    steps left and right on the pivot variable."""

    clause: tuple[int, ...]
    left: int | None = None
    right: int | None = None
    pivot: int | None = None

    @property
    def is_initial(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class ResolutionProof:
    over: CnfFormula
    steps: tuple[ResolutionStep, ...]

    @property
    def size(self) -> int:
        """Number of clauses occurring in the proof."""
        return len(self.steps)

    def derived_count(self) -> int:
        return sum(1 for s in self.steps if not s.is_initial)


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    step: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def resolve_on(a: Iterable[int], b: Iterable[int], pivot: int) -> tuple[int, ...]:
    """Resolvent of two clauses on a pivot variable; raises if the pivot does
    not occur with opposite polarities or the result is tautological."""
    sa, sb = set(a), set(b)
    if not ((pivot in sa and -pivot in sb) or (-pivot in sa and pivot in sb)):
        raise ValueError(f"variable {pivot} is not a pivot of these clauses")
    return canonical_literals((sa | sb) - {pivot, -pivot})


def check_res_refutation(proof: ResolutionProof) -> CheckResult:
    """Validate every step and that the final clause is empty.

    Reports the first failing step: an initial clause missing from the
    formula, a bad pivot, or a wrong resolvent.
    """
    over = proof.over.clause_set()
    for i, st in enumerate(proof.steps):
        if st.is_initial:
            if st.right is not None or st.pivot is not None:
                return CheckResult(False, i, "initial step with resolvent fields")
            if st.clause not in over:
                return CheckResult(False, i, "initial clause not in the formula")
            continue
        if st.right is None or st.pivot is None:
            return CheckResult(False, i, "resolvent step missing antecedents")
        if not (0 <= st.left < i and 0 <= st.right < i):
            return CheckResult(False, i, "antecedent does not precede the step")
        lc = proof.steps[st.left].clause
        rc = proof.steps[st.right].clause
        if not (
            (st.pivot in lc and -st.pivot in rc)
            or (-st.pivot in lc and st.pivot in rc)
        ):
            return CheckResult(False, i, "bad pivot")
        try:
            expected = resolve_on(lc, rc, st.pivot)
        except ValueError:
            return CheckResult(False, i, "tautological resolvent")
        if expected != st.clause:
            return CheckResult(False, i, "wrong resolvent")
    if not proof.steps or proof.steps[-1].clause != ():
        return CheckResult(False, None, "proof does not end in the empty clause")
    return CheckResult(True)


def check_trivial(proof: ResolutionProof) -> CheckResult:
    """Check the trivial-derivation shape: distinct pivots, and every
    resolvent resolves the previous resolvent (or, for the first one, an
    initial step) against an initial step."""
    pivots: set[int] = set()
    prev_resolvent: int | None = None
    for i, st in enumerate(proof.steps):
        if st.is_initial:
            continue
        if st.pivot in pivots:
            return CheckResult(False, i, "duplicate pivot")
        pivots.add(st.pivot)
        left_init = proof.steps[st.left].is_initial
        right_init = proof.steps[st.right].is_initial
        if not (left_init or right_init):
            return CheckResult(False, i, "both antecedents are derived")
        for side, is_init in ((st.left, left_init), (st.right, right_init)):
            if not is_init and side != prev_resolvent:
                return CheckResult(
                    False, i, "derived antecedent is not the previous resolvent"
                )
        prev_resolvent = i
    return CheckResult(True)


def derivation_to_proof(derivation, extra_known: Iterable[Iterable[int]] = ()) -> ResolutionProof:
    """Lift a trivial derivation into a standalone resolution proof whose
    formula consists of the known clauses the derivation uses (plus any
    extras), so it can be checked with the generic checkers."""
    known: list[tuple[int, ...]] = [canonical_literals(c) for c in extra_known]
    known.append(derivation.base)
    for ant, _ in derivation.steps:
        known.append(ant)
    seen = []
    for c in known:
        if c not in seen:
            seen.append(c)
    num_vars = max((abs(l) for c in seen for l in c), default=0)
    over = CnfFormula(num_vars, [Clause(c) for c in seen])
    steps: list[ResolutionStep] = []
    index: dict[tuple[int, ...], int] = {}

    def initial(c: tuple[int, ...]) -> int:
        if c not in index:
            index[c] = len(steps)
            steps.append(ResolutionStep(clause=c))
        return index[c]

    cur = initial(derivation.base)
    cur_clause = derivation.base
    for ant, pivot in derivation.steps:
        ai = initial(ant)
        res = resolve_on(cur_clause, ant, pivot)
        steps.append(ResolutionStep(res, left=cur, right=ai, pivot=pivot))
        cur = len(steps) - 1
        cur_clause = res
    return ResolutionProof(over, tuple(steps))


def cl_to_res(
    records: Sequence[LearnedClauseRecord], formula: CnfFormula
) -> ResolutionProof:
    """Assemble a refutation from a learned-clause log ending in a level-zero
    conflict, by concatenating the trivial derivation of every learned clause
    (re-based onto the accumulated steps) and of the final conflict.

    Derived clauses are deduplicated and steps unused by the empty clause are
    pruned, so the result's derived count stays within num_vars * (learned+1).
    """
    if not records or records[-1].clause != ():
        raise ValueError("log does not end in a level-zero conflict")
    steps: list[ResolutionStep] = []
    index: dict[tuple[int, ...], int] = {}
    initial_set = formula.clause_set()
    known_now = set(initial_set)

    def step_for_known(c: tuple[int, ...]) -> int:
        if c in index:
            return index[c]
        if c not in known_now:
            raise ValueError(f"derivation references unknown clause {c}")
        index[c] = len(steps)
        steps.append(ResolutionStep(clause=c))
        return index[c]

    for rec in records:
        d = rec.derivation
        if d.result != rec.clause:
            raise ValueError("record derivation does not yield the learned clause")
        cur = step_for_known(d.base)
        cur_clause = d.base
        for ant, pivot in d.steps:
            ai = step_for_known(ant)
            res = resolve_on(cur_clause, ant, pivot)
            if res in index:
                cur = index[res]
            else:
                index[res] = len(steps)
                steps.append(ResolutionStep(res, left=cur, right=ai, pivot=pivot))
                cur = len(steps) - 1
            cur_clause = res
        known_now.add(rec.clause)

    if () not in index:
        raise ValueError("log never derives the empty clause")
    used: set[int] = set()
    stack = [index[()]]
    while stack:
        i = stack.pop()
        if i in used:
            continue
        used.add(i)
        st = steps[i]
        if not st.is_initial:
            stack.extend((st.left, st.right))
    keep = sorted(used)
    remap = {old: new for new, old in enumerate(keep)}
    out = []
    for old in keep:
        st = steps[old]
        if st.is_initial:
            out.append(st)
        else:
            out.append(
                ResolutionStep(st.clause, remap[st.left], remap[st.right], st.pivot)
            )
    return ResolutionProof(formula, tuple(out))


# --------------------------------------------------------------------- PT / CL--


def normalize_refutation(proof: ResolutionProof) -> ResolutionProof:
    """Simplify a refutation so no derived clause has a derivable strict
    subclause among resolvents of earlier step pairs.

    Repeatedly: recompute resolvents bottom-up (a step whose pivot vanished
    collapses onto its surviving antecedent), alias duplicate clauses and
    clauses subsumed by an earlier step, and replace a derived clause by any
    strict subclause obtainable by resolving two earlier steps. Finally prune
    steps unused by the empty clause.
    """
    Step = tuple  # ("i", clause) | ("r", left, right, pivot, clause)
    cur: list[Step] = []
    for st in proof.steps:
        if st.is_initial:
            cur.append(("i", st.clause))
        else:
            cur.append(("r", st.left, st.right, st.pivot, st.clause))

    for _ in range(len(cur) + 2):
        out: list[Step] = []
        alias: dict[int, int] = {}
        by_clause: dict[tuple[int, ...], int] = {}
        by_literal: dict[int, list[int]] = {}

        def emit(step: Step, old_idx: int) -> None:
            clause = step[-1]
            if clause in by_clause:
                alias[old_idx] = by_clause[clause]
                return
            # an earlier strictly smaller clause subsumes this one
            smaller = _find_subsuming(out, by_literal, clause)
            if smaller is not None:
                alias[old_idx] = smaller
                return
            if step[0] == "r":
                shrunk = _find_pair_shrink(out, by_literal, clause)
                if shrunk is not None:
                    l, r, piv, res = shrunk
                    emit(("r", l, r, piv, res), old_idx)
                    return
            new_idx = len(out)
            out.append(step)
            by_clause[clause] = new_idx
            for lit in clause:
                by_literal.setdefault(lit, []).append(new_idx)
            alias[old_idx] = new_idx

        for idx, step in enumerate(cur):
            if step[0] == "i":
                emit(step, idx)
                continue
            _, l, r, piv, _ = step
            l, r = alias[l], alias[r]
            lc, rc = out[l][-1], out[r][-1]
            has_l = piv in lc or -piv in lc
            has_r = piv in rc or -piv in rc
            if not has_l:
                alias[idx] = l
                continue
            if not has_r:
                alias[idx] = r
                continue
            try:
                res = resolve_on(lc, rc, piv)
            except ValueError:
                # shrinkage made the step tautological/degenerate: keep the
                # smaller antecedent
                alias[idx] = l if len(lc) <= len(rc) else r
                continue
            emit(("r", l, r, piv, res), idx)

        if out == cur:
            break
        cur = out
    else:
        raise RuntimeError("proof normalization did not converge")

    empties = [i for i, st in enumerate(cur) if st[-1] == ()]
    if not empties:
        raise ValueError("normalization lost the empty clause")
    used: set[int] = set()
    stack = [empties[0]]
    while stack:
        i = stack.pop()
        if i in used:
            continue
        used.add(i)
        if cur[i][0] == "r":
            stack.extend((cur[i][1], cur[i][2]))
    keep = sorted(used)
    remap = {old: new for new, old in enumerate(keep)}
    steps = []
    for old in keep:
        st = cur[old]
        if st[0] == "i":
            steps.append(ResolutionStep(clause=st[1]))
        else:
            steps.append(ResolutionStep(st[4], remap[st[1]], remap[st[2]], st[3]))
    return ResolutionProof(proof.over, tuple(steps))


def _find_subsuming(out, by_literal, clause) -> int | None:
    if not clause:
        return None
    candidates = None
    for lit in clause:
        ids = by_literal.get(lit, ())
        if candidates is None:
            candidates = set(ids)
        else:
            candidates |= set(ids)
    if not candidates:
        return None
    cs = set(clause)
    best = None
    for i in candidates:
        c = out[i][-1]
        if len(c) < len(cs) and set(c) <= cs:
            if best is None or i < best:
                best = i
    return best


def _find_pair_shrink(out, by_literal, clause):
    """A pair of earlier steps whose resolvent is a strict subclause of
    `clause`, or None. Returns (left, right, pivot, resolvent)."""
    cs = set(clause)
    for a, step_a in enumerate(out):
        ca = step_a[-1]
        if len(ca) > len(cs) + 1:
            continue
        for x in ca:
            rest = set(ca) - {x}
            if not rest <= cs:
                continue
            for b in by_literal.get(-x, ()):
                cb = out[b][-1]
                if len(cb) > len(cs) + 1:
                    continue
                rb = set(cb) - {-x}
                if not rb <= cs:
                    continue
                res = canonical_literals(rest | rb)
                if len(res) < len(cs):
                    return (a, b, abs(x), res)
    return None


def _support(proof: ResolutionProof) -> list[tuple[int, ...]]:
    """The derived clauses a replay must learn, in derivation order: all
    derived steps except the empty clause and, when both antecedents of the
    final step are themselves derived, the later-derived of those two units.

    Expects a normalized refutation whose final step resolves complementary
    unit clauses; rejects anything else.
    """
    last = proof.steps[-1]
    if last.clause != ():
        raise ValueError("not a refutation")
    if last.is_initial:
        raise ValueError("refutation does not end in a unit resolution")
    lu, ru = last.left, last.right
    for i in (lu, ru):
        if len(proof.steps[i].clause) != 1:
            raise ValueError("final step does not resolve two unit clauses")
    excluded: set[int] = {len(proof.steps) - 1}
    if not proof.steps[lu].is_initial and not proof.steps[ru].is_initial:
        excluded.add(max(lu, ru))
    return [
        st.clause
        for i, st in enumerate(proof.steps)
        if not st.is_initial and i not in excluded
    ]


def proof_trace_extension(
    formula: CnfFormula, proof: ResolutionProof
) -> tuple[CnfFormula, BranchingSequence]:
    """Extend a formula with trace variables for the derived clauses of one of
    its refutations, plus the branching sequence over those variables.

    Each supported derived clause C gets a fresh variable t and clauses
    (-x | t) for every literal x of C; branching the t's in derivation order
    makes a learner using the new-cut scheme rederive each C in one decision.
    """
    support, _ = _normalized_support(formula, proof)
    t0 = formula.num_vars
    clauses: list[Clause] = list(formula.clauses)
    for k, c in enumerate(support, start=1):
        for x in c:
            clauses.append(Clause((-x, t0 + k)))
    seq = BranchingSequence(tuple(t0 + k for k in range(1, len(support) + 1)))
    return CnfFormula(t0 + len(support), clauses), seq


def _fused_support(proof: ResolutionProof) -> list[tuple[int, ...]]:
    """Derived clauses at trivial-derivation granularity, in order.

    A left-linked resolution chain (each step feeding the next derived step as
    its left antecedent, used nowhere else) is one derivation; only its final
    resolvent is reported. This recovers the learned clauses of a solver log
    and drops the chain intermediates, which a replay can never learn
    individually. The empty clause is excluded.
    """
    steps = proof.steps
    uses: dict[int, int] = {}
    for st in steps:
        if not st.is_initial:
            uses[st.left] = uses.get(st.left, 0) + 1
            uses[st.right] = uses.get(st.right, 0) + 1
    derived = [i for i, st in enumerate(steps) if not st.is_initial]
    next_derived: dict[int, int] = {}
    for a, b in zip(derived, derived[1:]):
        next_derived[a] = b
    out = []
    for i in derived:
        if steps[i].clause == ():
            continue
        j = next_derived.get(i)
        if j is not None and steps[j].left == i and uses.get(i, 0) == 1:
            continue  # chain-internal
        out.append(steps[i].clause)
    return out


def res_to_clmm_sequence(
    formula: CnfFormula, proof: ResolutionProof
) -> BranchingSequence:
    """Compile a refutation into an extended branching sequence: for each
    supported derived clause (trivial-derivation granularity), its literals
    followed by a restart marker. Replayed with branching on assigned
    literals and a scheme that stays non-redundant on these conflicts, the
    solver learns those clauses in order and ends in a level-zero conflict."""
    support, _ = _normalized_replay_support(formula, proof)
    entries: list = []
    for c in support:
        entries.extend(c)
        entries.append(RESTART)
    return BranchingSequence(tuple(entries))


def _validated(formula: CnfFormula, proof: ResolutionProof) -> ResolutionProof:
    chk = check_res_refutation(proof)
    if not chk:
        raise ValueError(f"invalid refutation at step {chk.step}: {chk.reason}")
    fset = formula.clause_set()
    for st in proof.steps:
        if st.is_initial and st.clause not in fset:
            raise ValueError("proof uses an initial clause outside the formula")
    return normalize_refutation(ResolutionProof(formula, proof.steps))


def _normalized_support(formula: CnfFormula, proof: ResolutionProof):
    normalized = _validated(formula, proof)
    return _support(normalized), normalized


def _normalized_replay_support(formula: CnfFormula, proof: ResolutionProof):
    normalized = _validated(formula, proof)
    return _fused_support(normalized), normalized


@dataclass(frozen=True)
class ReplayReport:
    result: SolveResult
    support: tuple[tuple[int, ...], ...]
    learned: tuple[tuple[int, ...], ...]
    restarts_used: int

    @property
    def learned_support_in_order(self) -> bool:
        return self.learned == self.support


def replay_extended_sequence(
    formula: CnfFormula,
    proof: ResolutionProof,
    conflict_budget: int | None = None,
    learning: str = "decision",
) -> ReplayReport:
    """Run the extended-sequence replay of a refutation under branching on
    assigned literals.

    Each restart-delimited segment of the sequence branches one supported
    clause's literals false; the conflict's decision cut is exactly that
    clause, so the decision scheme relearns the support in order. Raises if
    any learned clause was already known at its conflict (the replay requires
    effectively non-redundant learning)."""
    support, normalized = _normalized_replay_support(formula, proof)
    entries: list = []
    for c in support:
        entries.extend(c)
        entries.append(RESTART)
    cfg = SolverConfig(
        learning=learning,
        sequence=BranchingSequence(tuple(entries)),
        cl_minus_minus=True,
        restart_policy="sequence_markers_only",
        conflict_budget=conflict_budget,
    )
    result = solve(formula, cfg)
    records = result.records or ()
    known = set(formula.clause_set())
    for r in records:
        if r.redundant or (r.scheme != "final" and r.clause in known):
            raise RuntimeError(
                "learning collided with an already-known clause during replay"
            )
        known.add(r.clause)
    learned = tuple(r.clause for r in records if r.scheme != "final")
    return ReplayReport(
        result=result,
        support=tuple(support),
        learned=learned,
        restarts_used=result.stats.restarts,
    )


# ------------------------------------------------------------------ RUP oracle


class UnitPropagationChecker:
    """Standalone incremental unit propagation, independent of the search
    engine, for reverse-unit-propagation checks: a clause C follows from the
    known clauses by unit propagation iff assuming every literal of C false
    yields a conflict."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self.values = [0] * (num_vars + 1)
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
        self.clauses: list[list[int]] = []
        self.trail: list[int] = []
        self.qhead = 0
        self.base_conflict = False

    def _value(self, lit: int) -> int:
        v = self.values[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit: int) -> None:
        self.values[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def add_clause(self, lits: Iterable[int]) -> None:
        """Add a clause at the base level (no assumptions may be active)."""
        assert self.qhead == len(self.trail), "add_clause during assumptions"
        cl = list(lits)
        if not cl:
            self.base_conflict = True
            self.clauses.append(cl)
            return
        if len(cl) == 1:
            self.clauses.append(cl)
            val = self._value(cl[0])
            if val == -1:
                self.base_conflict = True
            elif val == 0:
                self._assign(cl[0])
                if self._propagate():
                    self.base_conflict = True
            return
        # watch two non-false literals so the invariant holds under the
        # current base assignment
        cl.sort(key=lambda l: self._value(l), reverse=True)
        ci = len(self.clauses)
        self.clauses.append(cl)
        self.watches[_widx(cl[0])].append(ci)
        self.watches[_widx(cl[1])].append(ci)
        if any(self._value(l) == 1 for l in cl):
            return
        unassigned = [l for l in cl if self._value(l) == 0]
        if not unassigned:
            self.base_conflict = True
        elif len(unassigned) == 1:
            self._assign(unassigned[0])
            if self._propagate():
                self.base_conflict = True

    def _propagate(self) -> bool:
        """Propagate to fixpoint; True on conflict."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            neg = -lit
            wl = self.watches[_widx(neg)]
            i = j = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                cl = self.clauses[ci]
                if cl[0] == neg:
                    cl[0], cl[1] = cl[1], cl[0]
                if self._value(cl[0]) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(cl)):
                    if self._value(cl[k]) != -1:
                        cl[1], cl[k] = cl[k], cl[1]
                        self.watches[_widx(cl[1])].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if self._value(cl[0]) == -1:
                    while i < n:
                        wl[j] = wl[i]
                        i += 1
                        j += 1
                    del wl[j:]
                    return True
                self._assign(cl[0])
            del wl[j:]
        return False

    def conflicts_when_all_false(self, lits: Iterable[int]) -> bool:
        """Assume every given literal false, propagate, undo; report conflict."""
        if self.base_conflict:
            return True
        mark = len(self.trail)
        conflict = False
        for l in lits:
            val = self._value(l)
            if val == 1:
                conflict = True
                break
            if val == 0:
                self._assign(-l)
        if not conflict:
            conflict = self._propagate()
        for pos in range(len(self.trail) - 1, mark - 1, -1):
            self.values[abs(self.trail[pos])] = 0
        del self.trail[mark:]
        self.qhead = mark
        return conflict


def _widx(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


# ------------------------------------------------------------------- proof I/O


def write_proof(proof: ResolutionProof) -> str:
    """Text form, one step per line: "i <lits> 0" for initial clauses and
    "r <left> <right> <pivot> <lits> 0" for resolvents (1-based step refs)."""
    lines = []
    for st in proof.steps:
        lits = " ".join(str(l) for l in st.clause)
        body = f"{lits} 0" if lits else "0"
        if st.is_initial:
            lines.append(f"i {body}")
        else:
            lines.append(f"r {st.left + 1} {st.right + 1} {st.pivot} {body}")
    return "\n".join(lines) + "\n"


def parse_proof(text: str, over: CnfFormula) -> ResolutionProof:
    steps: list[ResolutionStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "i":
                body = [int(t) for t in parts[1:]]
                if not body or body[-1] != 0:
                    raise ValueError("missing terminator")
                steps.append(ResolutionStep(canonical_literals(body[:-1])))
            elif parts[0] == "r":
                left, right, pivot = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
                body = [int(t) for t in parts[4:]]
                if not body or body[-1] != 0:
                    raise ValueError("missing terminator")
                if not (0 <= left < len(steps) and 0 <= right < len(steps)):
                    raise ValueError("step reference out of range")
                steps.append(
                    ResolutionStep(canonical_literals(body[:-1]), left, right, pivot)
                )
            else:
                raise ValueError(f"unknown step kind {parts[0]!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return ResolutionProof(over, tuple(steps))
