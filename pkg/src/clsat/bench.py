"""Benchmark harness: run solver configurations over formula families and
emit per-run rows as CSV and a markdown table.

Config labels map to solver settings as: dpll = no learning, default
heuristic; cl_default = first-UIP learning, default heuristic; cl_sequence =
first-UIP learning guided by the generated branching sequence. Rows are
emitted in construction order (family parameters, then variant, then config),
so output is deterministic apart from the wall-time column.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .engine import BranchingSequence, SolverConfig, solve
from .formula import CnfFormula
from .generators import (
    gen_grid,
    gen_gtn,
    gen_random_pebbling,
    gtn_successor_indices,
    make_satisfiable,
    pebbling_to_cnf,
)
from .seqgen import gtn_seq, peb_seq_1uip

CSV_HEADER = "family,params,variant,config,outcome,decisions,conflicts,learned,fallback,restarts,time_ms"

CONFIG_LABELS = ("dpll", "cl_default", "cl_sequence")

DEFAULT_CONFLICT_BUDGET = 10**6
DEFAULT_DECISION_BUDGET = 10**7


@dataclass(frozen=True)
class BenchRow:
    family: str
    params: str
    variant: str
    config: str
    outcome: str
    decisions: int
    conflicts: int
    learned: int
    fallback: int
    restarts: int
    time_ms: float

    def csv(self) -> str:
        return ",".join(
            str(x)
            for x in (
                self.family,
                self.params,
                self.variant,
                self.config,
                self.outcome,
                self.decisions,
                self.conflicts,
                self.learned,
                self.fallback,
                self.restarts,
                f"{self.time_ms:.1f}",
            )
        )


def _solver_config(
    label: str,
    sequence: BranchingSequence | None,
    conflict_budget: int,
    decision_budget: int,
) -> SolverConfig:
    if label == "dpll":
        return SolverConfig(
            learning="none",
            conflict_budget=conflict_budget,
            decision_budget=decision_budget,
            log_proof=False,
        )
    if label == "cl_default":
        return SolverConfig(
            learning="first_uip",
            conflict_budget=conflict_budget,
            decision_budget=decision_budget,
            log_proof=False,
        )
    if label == "cl_sequence":
        if sequence is None:
            raise ValueError("cl_sequence needs a generated branching sequence")
        return SolverConfig(
            learning="first_uip",
            sequence=sequence,
            conflict_budget=conflict_budget,
            decision_budget=decision_budget,
            log_proof=False,
        )
    raise ValueError(f"unknown config label {label!r}")


def run_case(
    family: str,
    params: str,
    variant: str,
    label: str,
    formula: CnfFormula,
    sequence: BranchingSequence | None,
    conflict_budget: int,
    decision_budget: int,
) -> BenchRow:
    cfg = _solver_config(label, sequence, conflict_budget, decision_budget)
    t0 = time.perf_counter()
    result = solve(formula, cfg)
    ms = (time.perf_counter() - t0) * 1000.0
    s = result.stats
    return BenchRow(
        family=family,
        params=params,
        variant=variant,
        config=label,
        outcome=result.status,
        decisions=s.decisions,
        conflicts=s.conflicts,
        learned=s.learned_clauses,
        fallback=s.fallback_decisions,
        restarts=s.restarts,
        time_ms=ms,
    )


def _cases(formula, sequence, variants, sat_seed, sat_pool=None):
    out = []
    for variant in variants:
        if variant == "unsat":
            out.append((variant, formula, sequence))
        elif variant == "sat":
            out.append(
                (variant, make_satisfiable(formula, sat_seed, pool=sat_pool), sequence)
            )
        else:
            raise ValueError(f"unknown variant {variant!r}")
    return out


def bench_grid(
    layers: list[int],
    variants: list[str],
    configs: list[str],
    sat_seed: int = 0,
    conflict_budget: int = DEFAULT_CONFLICT_BUDGET,
    decision_budget: int = DEFAULT_DECISION_BUDGET,
) -> list[BenchRow]:
    rows = []
    for L in layers:
        graph = gen_grid(L)
        formula = pebbling_to_cnf(graph)
        sequence = peb_seq_1uip(graph) if "cl_sequence" in configs else None
        for variant, f, seq in _cases(formula, sequence, variants, sat_seed):
            for label in configs:
                rows.append(
                    run_case(
                        "grid", f"layers={L}", variant, label, f, seq,
                        conflict_budget, decision_budget,
                    )
                )
    return rows


def bench_random_pebbling(
    nodes_list: list[int],
    variants: list[str],
    configs: list[str],
    seed: int = 1,
    max_indegree: int = 5,
    max_label: int = 6,
    sat_seed: int = 0,
    conflict_budget: int = DEFAULT_CONFLICT_BUDGET,
    decision_budget: int = DEFAULT_DECISION_BUDGET,
) -> list[BenchRow]:
    rows = []
    for nodes in nodes_list:
        graph = gen_random_pebbling(nodes, max_indegree, max_label, seed)
        formula = pebbling_to_cnf(graph)
        sequence = peb_seq_1uip(graph) if "cl_sequence" in configs else None
        params = f"nodes={nodes};d={max_indegree};l={max_label};seed={seed}"
        for variant, f, seq in _cases(formula, sequence, variants, sat_seed):
            for label in configs:
                rows.append(
                    run_case(
                        "random_pebbling", params, variant, label, f, seq,
                        conflict_budget, decision_budget,
                    )
                )
    return rows


def bench_gtn(
    ns: list[int],
    variants: list[str],
    configs: list[str],
    sat_seed: int = 0,
    conflict_budget: int = DEFAULT_CONFLICT_BUDGET,
    decision_budget: int = DEFAULT_DECISION_BUDGET,
) -> list[BenchRow]:
    rows = []
    for n in ns:
        formula = gen_gtn(n)
        sequence = gtn_seq(n) if "cl_sequence" in configs else None
        pool = gtn_successor_indices(n)
        for variant, f, seq in _cases(formula, sequence, variants, sat_seed, pool):
            for label in configs:
                rows.append(
                    run_case(
                        "gtn", f"n={n}", variant, label, f, seq,
                        conflict_budget, decision_budget,
                    )
                )
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"


def rows_to_markdown(rows: list[BenchRow]) -> str:
    cols = CSV_HEADER.split(",")
    lines = [
        "| " + " | ".join(cols) + " |",
        "| " + " | ".join("---" for _ in cols) + " |",
    ]
    for r in rows:
        lines.append("| " + " | ".join(r.csv().split(",")) + " |")
    return "\n".join(lines) + "\n"
