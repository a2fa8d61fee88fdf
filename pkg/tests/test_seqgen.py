import pytest

from clsat import (
    PebblingGraph,
    PebNode,
    SolverConfig,
    gen_grid,
    gen_random_pebbling,
    grid_peb_seq_1uip,
    gtn_seq,
    gtn_var,
    peb_seq_1uip,
    pebbling_to_cnf,
    solve,
)

# the published 4-layer grid walkthrough: nodes a..j bottom-up left-right,
# two fresh variables each; the emitted sequence is h1 h2 e1 e2 a1 b1 f1 f2 c1
GRID4_GOLDEN = (15, 16, 9, 10, 1, 3, 11, 12, 5)


def fig4_graph() -> PebblingGraph:
    # the published general walkthrough graph: sources c,f,g,d; a=(a1) above
    # {c,d}; e=(e1 e2 e3) above {f,g}; b=(b1) above {d,e,f}; target t above
    # {a,b}. Ids chosen so equal-height ties order as in the walkthrough.
    return PebblingGraph(
        (
            PebNode(1, (1, 2), ()),          # c
            PebNode(2, (3, 4), ()),          # f
            PebNode(3, (5, 6), ()),          # g
            PebNode(4, (7, 8), ()),          # d
            PebNode(5, (9,), (1, 4)),        # a
            PebNode(6, (10, 11, 12), (2, 3)),  # e
            PebNode(7, (13,), (2, 4, 6)),    # b
            PebNode(8, (14, 15), (5, 7)),    # t
        ),
        8,
    )

FIG4_GOLDEN = (9, 1, 13, 10, 11, 12, 3, 3, 10, 3, 3)


def test_grid4_golden_general():
    assert peb_seq_1uip(gen_grid(4)).entries == GRID4_GOLDEN


def test_grid4_golden_specialized():
    assert grid_peb_seq_1uip(gen_grid(4)).entries == GRID4_GOLDEN


def test_fig4_golden():
    assert peb_seq_1uip(fig4_graph()).entries == FIG4_GOLDEN


def test_one_layer_grid_empty_sequence():
    assert peb_seq_1uip(gen_grid(1)).entries == ()


def test_two_and_three_layer_sequences():
    assert grid_peb_seq_1uip(gen_grid(2)).entries == (1,)
    assert grid_peb_seq_1uip(gen_grid(3)).entries == (7, 8, 1, 3)


def test_specialization_agreement():
    for L in range(2, 13):
        g = gen_grid(L)
        assert peb_seq_1uip(g).entries == grid_peb_seq_1uip(g).entries


def test_grid_sequence_size_law():
    # (L-1)^2 literals: linear in node count with bounded ratio
    for L in range(2, 51):
        seq = grid_peb_seq_1uip(gen_grid(L))
        assert len(seq) == (L - 1) ** 2
        assert len(seq) / (L * (L + 1) / 2) <= 2.0


def test_sequence_variables_exist():
    for L in (2, 5, 9):
        g = gen_grid(L)
        nv = g.num_label_vars()
        assert all(1 <= v <= nv for v in peb_seq_1uip(g).literals())
    for n in (3, 5, 8):
        nv = n * (n - 1)
        assert all(1 <= v <= nv for v in gtn_seq(n).literals())


def test_rejects_repeated_labels():
    g = PebblingGraph(
        (PebNode(1, (1, 2), ()), PebNode(2, (3,), ()), PebNode(3, (4, 5), (1, 2))), 3
    )
    assert peb_seq_1uip(g).entries  # sanity: valid graph works
    broken = PebblingGraph(
        (
            PebNode(1, (1, 2), ()),
            PebNode(2, (1,), ()),
            PebNode(3, (4, 5), (1, 2)),
        ),
        3,
    )
    with pytest.raises(ValueError, match="distinct"):
        peb_seq_1uip(broken)


def test_grid_specialization_rejects_non_grids():
    g = gen_random_pebbling(7, 3, 3, seed=2)
    with pytest.raises(ValueError, match="grid"):
        grid_peb_seq_1uip(g)


def test_gtn_seq_n4_golden():
    n = 4
    expected_pairs = [
        (2, 1), (3, 1),
        (1, 2), (3, 2),
        (1, 3), (2, 3),
        (1, 4), (2, 4), (3, 4),
        (1, 4), (2, 4), (3, 4),
    ]
    expected = tuple(gtn_var(i, j, n) for i, j in expected_pairs)
    assert gtn_seq(4).entries == expected
    assert len(gtn_seq(4)) == 12


def test_gtn_seq_sizes():
    assert len(gtn_seq(3)) == 6
    for n in (3, 5, 9):
        assert len(gtn_seq(n)) == n * (n - 1)


def test_unsat_completeness_small():
    # guided first-UIP runs refute pebbling formulas without heuristic help
    for L in range(2, 9):
        g = gen_grid(L)
        seq = peb_seq_1uip(g)
        r = solve(pebbling_to_cnf(g), SolverConfig(learning="first_uip", sequence=seq))
        assert r.is_unsat
        assert r.stats.fallback_decisions == 0
        assert r.stats.decisions <= len(seq)
    for seed in (1, 2, 3):
        g = gen_random_pebbling(12, 4, 3, seed=seed)
        seq = peb_seq_1uip(g)
        r = solve(pebbling_to_cnf(g), SolverConfig(learning="first_uip", sequence=seq))
        assert r.is_unsat and r.stats.fallback_decisions == 0
