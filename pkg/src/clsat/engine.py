"""Backtracking search engine: DPLL and clause learning with guided branching.

The solver runs two-watched-literal unit propagation over a trail of
assignments. Branching follows an optional branching sequence (each entry
names a literal that is set FALSE first; assigned variables are skipped),
falling back to a deterministic activity heuristic once the sequence is
exhausted. With learning enabled, every conflict is analyzed through a
conflict graph, one clause is learned under the configured scheme, and the
solver backjumps; with learning disabled the search is plain DPLL with
chronological backtracking.

A solver instance is single-threaded and must not be shared mid-solve;
separate instances over the same (immutable) formula may run concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable

from . import conflict as _ca
from .conflict import ConflictGraph, Cut, LearnedClauseRecord, TrivialDerivation
from .formula import CnfFormula, canonical_literals

__all__ = [
    "RESTART",
    "BranchingSequence",
    "SolverConfig",
    "SolveStats",
    "SolveResult",
    "Solver",
    "solve",
    "parse_sequence",
    "write_sequence",
]


class _RestartMarker:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "RESTART"


RESTART = _RestartMarker()

LEARNING_SCHEMES = ("none", "decision", "relsat", "first_uip", "first_new_cut")


@dataclass(frozen=True)
class BranchingSequence:
    """Ordered branching entries: literals (possibly repeated) and restart
    markers. The size of a sequence counts literal entries only."""

    entries: tuple = ()

    def __post_init__(self):
        for e in self.entries:
            if e is not RESTART and (not isinstance(e, int) or e == 0):
                raise ValueError(f"bad sequence entry {e!r}")

    def __len__(self) -> int:
        return sum(1 for e in self.entries if e is not RESTART)

    def literals(self) -> list[int]:
        return [e for e in self.entries if e is not RESTART]

    @property
    def restart_count(self) -> int:
        return sum(1 for e in self.entries if e is RESTART)

    @property
    def has_restarts(self) -> bool:
        return any(e is RESTART for e in self.entries)


def parse_sequence(text: str) -> BranchingSequence:
    """Parse the .seq format: one entry per line, a signed integer for a
    literal, "R" for a restart marker, "#" for comments."""
    entries: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "R":
            entries.append(RESTART)
        elif re.fullmatch(r"-?\d+", line):
            lit = int(line)
            if lit == 0:
                raise ValueError(f"line {lineno}: 0 is not a literal")
            entries.append(lit)
        else:
            raise ValueError(f"line {lineno}: bad sequence entry {line!r}")
    return BranchingSequence(tuple(entries))


def write_sequence(seq: BranchingSequence) -> str:
    return "".join(("R\n" if e is RESTART else f"{e}\n") for e in seq.entries)


@dataclass(frozen=True)
class SolverConfig:
    learning: str = "first_uip"
    sequence: BranchingSequence | None = None
    cl_minus_minus: bool = False
    restart_policy: str = "sequence_markers_only"  # or "off"
    conflict_budget: int | None = None
    decision_budget: int | None = None
    log_proof: bool = True
    graph_sink: Callable[[ConflictGraph], None] | None = None


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    learned_clauses: int = 0
    max_level: int = 0
    fallback_decisions: int = 0
    restarts: int = 0


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solve.

    status is "SAT" (model is total over all variables), "UNSAT", or
    "BUDGET_EXCEEDED". With learning and proof logging enabled, records holds
    one learned-clause record per conflict; for UNSAT it ends with the
    level-zero record whose clause is empty, and constitutes the refutation
    trace consumed by the proof bridge.
    """

    status: str
    model: dict[int, bool] | None
    records: tuple[LearnedClauseRecord, ...] | None
    stats: SolveStats

    @property
    def is_sat(self) -> bool:
        return self.status == "SAT"

    @property
    def is_unsat(self) -> bool:
        return self.status == "UNSAT"


def _widx(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


class Solver:
    def __init__(self, formula: CnfFormula, config: SolverConfig | None = None):
        cfg = config or SolverConfig()
        self._validate_config(cfg)
        self.cfg = cfg
        self.formula = formula
        n = formula.num_vars
        self.num_vars = n
        self.values = [0] * (n + 1)  # 0 unassigned, 1 true, -1 false (by variable)
        self.levels = [0] * (n + 1)
        self.reasons: list[int | None] = [None] * (n + 1)
        self.positions = [0] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.known: set[tuple[int, ...]] = set()
        self.stats = SolveStats()
        self.records: list[LearnedClauseRecord] = []
        self.activity = [0.0] * (2 * n + 2)
        self.act_inc = 1.0
        self._activity_touched = False
        self._low_free = 1
        self._dpll_levels: list[tuple[int, bool]] = []  # (decision lit, flipped)
        self._seq = tuple(cfg.sequence.entries) if cfg.sequence else ()
        self._seq_pos = 0
        self._pending_conflict: int | None = None
        self._finished = False
        for clause in formula.clauses:
            self._add_clause(list(clause.literals), init=True)

    @staticmethod
    def _validate_config(cfg: SolverConfig) -> None:
        if cfg.learning not in LEARNING_SCHEMES:
            raise ValueError(f"unknown learning scheme {cfg.learning!r}")
        if cfg.restart_policy not in ("off", "sequence_markers_only"):
            raise ValueError(f"unknown restart policy {cfg.restart_policy!r}")
        if cfg.cl_minus_minus and cfg.learning == "none":
            raise ValueError("branching on assigned literals requires learning")
        if cfg.sequence is not None and cfg.sequence.has_restarts:
            if cfg.learning == "none":
                raise ValueError("restart markers require learning")
            if not cfg.cl_minus_minus:
                raise ValueError("restart markers require the assigned-branch mode")
            if cfg.restart_policy == "off":
                raise ValueError("restart markers present but restarts are off")

    # ------------------------------------------------------------------ state
    @property
    def current_level(self) -> int:
        return len(self.trail_lim)

    def lit_value(self, lit: int) -> int:
        v = self.values[abs(lit)]
        return v if lit > 0 else -v

    def trail_literal(self, var: int) -> int:
        return var if self.values[var] > 0 else -var

    def reason_literals(self, var: int) -> tuple[int, ...] | None:
        ci = self.reasons[var]
        return None if ci is None else tuple(self.clauses[ci])

    def var_level(self, var: int) -> int:
        return self.levels[var]

    def var_position(self, var: int) -> int:
        return self.positions[var]

    def model(self) -> dict[int, bool]:
        return {v: self.values[v] > 0 for v in range(1, self.num_vars + 1)}

    # ------------------------------------------------------------- clause DB
    def _add_clause(self, lits: list[int], init: bool) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.known.add(canonical_literals(lits))
        if len(lits) == 0:
            if self._pending_conflict is None:
                self._pending_conflict = ci
        elif len(lits) == 1:
            if init:
                val = self.lit_value(lits[0])
                if val == 0:
                    self._enqueue(lits[0], ci)
                elif val < 0 and self._pending_conflict is None:
                    self._pending_conflict = ci
        else:
            self.watches[_widx(lits[0])].append(ci)
            self.watches[_widx(lits[1])].append(ci)
        return ci

    # ------------------------------------------------------------ propagation
    def _enqueue(self, lit: int, reason: int | None) -> None:
        v = abs(lit)
        self.values[v] = 1 if lit > 0 else -1
        self.levels[v] = self.current_level
        self.reasons[v] = reason
        self.positions[v] = len(self.trail)
        self.trail.append(lit)
        if reason is not None:
            self.stats.propagations += 1

    def propagate(self) -> int | None:
        """Run unit propagation to fixpoint; return a falsified clause index
        or None. Every implied literal is recorded with its implying clause."""
        values = self.values
        clauses = self.clauses
        watches = self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            neg = -lit
            wl = watches[_widx(neg)]
            i = j = 0
            nw = len(wl)
            while i < nw:
                ci = wl[i]
                i += 1
                cl = clauses[ci]
                if cl[0] == neg:
                    cl[0] = cl[1]
                    cl[1] = neg
                w0 = cl[0]
                v0 = values[w0] if w0 > 0 else -values[-w0]
                if v0 == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(cl)):
                    lk = cl[k]
                    vk = values[lk] if lk > 0 else -values[-lk]
                    if vk != -1:
                        cl[1] = lk
                        cl[k] = neg
                        watches[_widx(lk)].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if v0 == -1:
                    while i < nw:
                        wl[j] = wl[i]
                        i += 1
                        j += 1
                    del wl[j:]
                    return ci
                self._enqueue(w0, ci)
            del wl[j:]
        return None

    # -------------------------------------------------------------- trail ops
    def _decide(self, lit: int) -> None:
        self.trail_lim.append(len(self.trail))
        if self.cfg.learning == "none":
            self._dpll_levels.append((lit, False))
        if self.current_level > self.stats.max_level:
            self.stats.max_level = self.current_level
        self._enqueue(lit, None)

    def backjump(self, level: int) -> None:
        """Unwind the trail to the given decision level (no-op if already
        there or lower). Learned clauses are untouched."""
        if level >= self.current_level:
            return
        keep = self.trail_lim[level]
        low = self._low_free
        for pos in range(len(self.trail) - 1, keep - 1, -1):
            v = abs(self.trail[pos])
            self.values[v] = 0
            self.reasons[v] = None
            if v < low:
                low = v
        self._low_free = low
        del self.trail[keep:]
        del self.trail_lim[level:]
        del self._dpll_levels[level:]
        self.qhead = len(self.trail)

    def restart(self) -> None:
        self.stats.restarts += 1
        self.backjump(0)

    # -------------------------------------------------------------- branching
    def _next_decision(self):
        """Consume sequence entries (skipping assigned variables, unless the
        assigned-branch mode turns a contradicting entry into a clash); fall
        back to the activity heuristic when the sequence is exhausted.

        Returns ("decide", lit), ("fallback", lit), ("clash", lit) or
        ("restart", None).
        """
        seq = self._seq
        while self._seq_pos < len(seq):
            e = seq[self._seq_pos]
            self._seq_pos += 1
            if e is RESTART:
                return ("restart", None)
            v = abs(e)
            if v > self.num_vars:
                raise ValueError(f"sequence names unknown variable {v}")
            val = self.values[v]
            if val == 0:
                return ("decide", -e)
            if self.cfg.cl_minus_minus and self.lit_value(e) == 1:
                return ("clash", -e)
            # assigned (consistently, or plain mode): skip the entry
        if not self._activity_touched:
            v = self._low_free
            while self.values[v] != 0:
                v += 1
            self._low_free = v
            return ("fallback", -v)
        best = 0
        best_act = -1.0
        activity = self.activity
        for v in range(1, self.num_vars + 1):
            if self.values[v] != 0:
                continue
            a = activity[2 * v + 1]
            if a > best_act:
                best_act = a
                best = -v
            a = activity[2 * v]
            if a > best_act:
                best_act = a
                best = v
        return ("fallback", best)

    def _consume_restart_marker(self) -> None:
        """In the assigned-branch replay mode, a restart marker directly after
        a conflict fires before any further propagation: the construction
        learns one clause per sequence segment, then restarts immediately."""
        if not self.cfg.cl_minus_minus:
            return
        if self._seq_pos < len(self._seq) and self._seq[self._seq_pos] is RESTART:
            self._seq_pos += 1
            self.restart()

    def _bump(self, lits: Iterable[int]) -> None:
        inc = self.act_inc
        act = self.activity
        for l in lits:
            act[_widx(l)] += inc
        self._activity_touched = True

    def _decay_activity(self) -> None:
        self.act_inc /= 0.95
        if self.act_inc > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.act_inc *= 1e-100

    # ------------------------------------------------------------- learning
    def _analyze_and_learn(self, confl: int | None, clash: int | None) -> None:
        conflicting = tuple(self.clauses[confl]) if confl is not None else None
        g = _ca.build_conflict_graph(self, conflicting, clash_decision=clash)
        if self.cfg.graph_sink is not None:
            self.cfg.graph_sink(g)
        scheme = self.cfg.learning
        redundant = False
        if scheme == "first_uip":
            cut = _ca.scheme_first_uip(g)
        elif scheme == "decision":
            cut = _ca.scheme_decision(g)
        elif scheme == "relsat":
            cut = _ca.scheme_relsat(g)
        else:
            cut, redundant = _ca.scheme_first_new_cut(g, self.known)
        clause = _ca.cut_to_clause(g, cut)
        derivation = _ca.extract_trivial_derivation(g, cut)
        self._bump(clause)
        self._bump(l for l in derivation.base)
        for ant, _ in derivation.steps:
            self._bump(ant)
        self._decay_activity()
        backjump_level = self._install_learned(clause, g)
        if self.cfg.log_proof:
            self.records.append(
                LearnedClauseRecord(
                    clause=clause,
                    cut=cut,
                    derivation=derivation,
                    scheme=scheme,
                    conflict_index=self.stats.conflicts,
                    backjump_level=backjump_level,
                    redundant=redundant,
                )
            )
        self.stats.learned_clauses += 1

    def _install_learned(self, clause: tuple[int, ...], g: ConflictGraph) -> int:
        """Backjump and add the learned clause.

        Asserting clauses (exactly one literal at the conflict level) go to
        their assertion level, where the flipped literal is asserted with the
        new clause as its reason; unit clauses land at level zero. A
        non-asserting clause backtracks to one below the deepest decision in
        the conflict graph and flips that decision (a reason-less branch).
        """
        lvl = g.conflict_level
        at_conflict_level = [x for x in clause if g.level[-x] == lvl]
        if len(at_conflict_level) == 1:
            assert_lit = at_conflict_level[0]
            bt = max((g.level[-y] for y in clause if y != assert_lit), default=0)
            self.backjump(bt)
            ordered = [assert_lit] + sorted(
                (x for x in clause if x != assert_lit), key=lambda x: -g.level[-x]
            )
            ci = self._add_clause(ordered, init=False)
            val = self.lit_value(assert_lit)
            if val == 0:
                self._enqueue(assert_lit, ci)
            elif val < 0:
                self._pending_conflict = ci
            return bt
        decisions = [n for n in g.decisions]
        deepest = max(g.level[n] for n in decisions)
        flip_of = next(n for n in decisions if g.level[n] == deepest)
        self.backjump(deepest - 1)
        ordered = sorted(clause, key=lambda x: -g.level[-x])
        ci = self._add_clause(ordered, init=False)
        flip = -flip_of
        val = self.lit_value(flip)
        if val == 0:
            self.trail_lim.append(len(self.trail))
            if self.current_level > self.stats.max_level:
                self.stats.max_level = self.current_level
            self._enqueue(flip, None)
        elif val < 0:
            self._pending_conflict = ci
        return deepest - 1

    def _final_record(self, confl: int | None) -> None:
        if not self.cfg.log_proof or self.cfg.learning == "none":
            return
        if confl is not None and len(self.clauses[confl]) == 0:
            derivation = TrivialDerivation(base=(), steps=(), result=())
            record = LearnedClauseRecord(
                clause=(),
                cut=Cut(frozenset()),
                derivation=derivation,
                scheme="final",
                conflict_index=self.stats.conflicts,
            )
        else:
            g = _ca.build_conflict_graph(self, tuple(self.clauses[confl]))
            if self.cfg.graph_sink is not None:
                self.cfg.graph_sink(g)
            cut = _ca.full_conflict_cut(g)
            derivation = _ca.extract_trivial_derivation(g, cut)
            record = LearnedClauseRecord(
                clause=derivation.result,
                cut=cut,
                derivation=derivation,
                scheme="final",
                conflict_index=self.stats.conflicts,
            )
        self.records.append(record)

    # ---------------------------------------------------------------- dpll
    def _chrono_backtrack(self) -> bool:
        """Chronological backtracking: flip the deepest untried branch.
        Returns False when the whole tree is exhausted (UNSAT)."""
        while self._dpll_levels and self._dpll_levels[-1][1]:
            self.backjump(self.current_level - 1)
        if not self._dpll_levels:
            return False
        lit, _ = self._dpll_levels[-1]
        self.backjump(self.current_level - 1)
        self.trail_lim.append(len(self.trail))
        self._dpll_levels.append((-lit, True))
        self._enqueue(-lit, None)
        return True

    # ---------------------------------------------------------------- solve
    def _result(self, status: str) -> SolveResult:
        self._finished = True
        model = self.model() if status == "SAT" else None
        records = tuple(self.records) if self.cfg.log_proof else None
        if self.cfg.learning == "none":
            records = None
        return SolveResult(status=status, model=model, records=records, stats=self.stats)

    def solve(self) -> SolveResult:
        if self._finished:
            raise RuntimeError("solver instances are single-use")
        cfg = self.cfg
        stats = self.stats
        learning = cfg.learning != "none"
        while True:
            confl = self.propagate()
            if confl is None and self._pending_conflict is not None:
                ci = self._pending_conflict
                self._pending_conflict = None
                # an interleaved backjump may have defused the pending clause;
                # only a still-falsified clause is a conflict
                if all(self.lit_value(l) == -1 for l in self.clauses[ci]):
                    confl = ci
            if confl is not None:
                stats.conflicts += 1
                if cfg.conflict_budget is not None and stats.conflicts > cfg.conflict_budget:
                    return self._result("BUDGET_EXCEEDED")
                if not learning:
                    if self.current_level == 0 or not self._chrono_backtrack():
                        return self._result("UNSAT")
                    continue
                if self.current_level == 0:
                    self._final_record(confl)
                    return self._result("UNSAT")
                self._analyze_and_learn(confl, None)
                self._consume_restart_marker()
                continue
            if len(self.trail) == self.num_vars:
                return self._result("SAT")
            kind, lit = self._next_decision()
            if kind == "restart":
                if cfg.restart_policy == "off":
                    raise RuntimeError("restart marker with restarts disabled")
                self.restart()
                continue
            if cfg.decision_budget is not None and stats.decisions >= cfg.decision_budget:
                return self._result("BUDGET_EXCEEDED")
            stats.decisions += 1
            if kind == "fallback":
                stats.fallback_decisions += 1
            if kind == "clash":
                stats.conflicts += 1
                if cfg.conflict_budget is not None and stats.conflicts > cfg.conflict_budget:
                    return self._result("BUDGET_EXCEEDED")
                self.trail_lim.append(len(self.trail))
                if self.current_level > self.stats.max_level:
                    self.stats.max_level = self.current_level
                self._analyze_and_learn(None, lit)
                self._consume_restart_marker()
                continue
            self._decide(lit)

    # ---------------------------------------------------------------- debug
    def validate_trail(self) -> None:
        """Assert the trail invariants; raises AssertionError on violation."""
        seen: set[int] = set()
        level = 0
        for pos, lit in enumerate(self.trail):
            v = abs(lit)
            assert v not in seen, f"variable {v} appears twice on the trail"
            seen.add(v)
            assert self.lit_value(lit) == 1
            assert self.positions[v] == pos
            lv = self.levels[v]
            assert lv >= level, "decision levels must be nondecreasing"
            level = lv
            ci = self.reasons[v]
            if ci is None:
                # a branch opens its level: it sits at that level's boundary
                assert lv > 0 and self.trail_lim[lv - 1] == pos
            else:
                reason = self.clauses[ci]
                assert lit in reason, "implied literal missing from its reason"
                others = [l for l in reason if l != lit]
                for l in others:
                    assert self.lit_value(l) == -1, "reason literal not falsified"
                    assert self.positions[abs(l)] < pos, "reason literal assigned later"
                expected = max((self.levels[abs(l)] for l in others), default=0)
                assert lv == expected, "implied level is not the max reason level"


def solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveResult:
    """Solve a formula under the given configuration (fresh solver instance)."""
    return Solver(formula, config).solve()
