import random

import pytest

from clsat import (
    Clause,
    CnfFormula,
    DimacsError,
    canonical_literals,
    gen_grid,
    gen_gtn,
    parse_dimacs,
    pebbling_to_cnf,
    restrict_simplify,
    satisfies,
    write_dimacs,
)
from conftest import random_3cnf


def test_clause_canonical_form():
    assert Clause((2, -1, 2)).literals == (-1, 2)
    assert Clause((3, 1)) == Clause((1, 3))
    assert hash(Clause((1, 3))) == hash(Clause((3, 1)))
    assert Clause(()).is_empty
    with pytest.raises(ValueError):
        Clause((1, -1))
    with pytest.raises(ValueError):
        Clause((0,))


def test_canonical_order_is_variable_then_sign():
    assert canonical_literals((5, -5)) if False else True
    assert canonical_literals((3, -2, 1)) == (1, -2, 3)


def test_formula_rejects_out_of_range_literal():
    with pytest.raises(ValueError):
        CnfFormula(2, [(1, 3)])


def test_parse_dimacs_basic():
    f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n")
    assert f.num_vars == 2
    assert [c.literals for c in f.clauses] == [(1, -2), (2,)]


def test_parse_dimacs_empty_clause():
    f = parse_dimacs("p cnf 1 1\n0\n")
    assert f.clauses[0].is_empty


def test_parse_dimacs_tautology_rejected():
    with pytest.raises(DimacsError) as e:
        parse_dimacs("p cnf 2 1\n1 -1 0\n")
    assert "line 2" in str(e.value)


def test_parse_dimacs_errors_name_lines():
    with pytest.raises(DimacsError, match="line 1"):
        parse_dimacs("p dnf 2 1\n1 0\n")
    with pytest.raises(DimacsError, match="line 2"):
        parse_dimacs("p cnf 1 1\n2 0\n")
    with pytest.raises(DimacsError, match="terminator"):
        parse_dimacs("p cnf 2 1\n1 2\n")
    with pytest.raises(DimacsError, match="clause before header"):
        parse_dimacs("1 0\n")
    with pytest.raises(DimacsError, match="declares 2 clauses"):
        parse_dimacs("p cnf 2 2\n1 0\n")


def test_parse_dimacs_comments_multiline_and_bytes():
    text = "c a comment\np cnf 3 2\nc another\n1 2\n3 0\n-1 0\n"
    f = parse_dimacs(text.encode("ascii"))
    assert [c.literals for c in f.clauses] == [(1, 2, 3), (-1,)]
    assert parse_dimacs("p cnf 2 2\n1 1 0\n1 -2 0\n").clauses[0].literals == (1,)


def test_write_dimacs_single_unit():
    assert write_dimacs(CnfFormula(1, [(1,)])) == "p cnf 1 1\n1 0\n"


def test_roundtrip_gtn5():
    f = gen_gtn(5)
    assert parse_dimacs(write_dimacs(f)) == f


def test_roundtrip_random_3cnf():
    f = random_3cnf(30, 100, seed=42)
    g = parse_dimacs(write_dimacs(f))
    assert g.num_vars == f.num_vars
    assert [c.literals for c in g.clauses] == [c.literals for c in f.clauses]


def test_restrict_simplify_examples():
    f = CnfFormula(2, [(1, 2), (-1,)])
    r = restrict_simplify(f, {1: False})
    assert [c.literals for c in r.clauses] == [(2,)]

    f = CnfFormula(1, [(1,)])
    r = restrict_simplify(f, {1: False})
    assert [c.literals for c in r.clauses] == [()]


def test_restrict_simplify_two_layer_grid():
    # assigning both apex variables false leaves the four two-literal
    # precedence residuals plus the two source clauses
    f = pebbling_to_cnf(gen_grid(2))
    r = restrict_simplify(f, {5: False, 6: False})
    got = sorted(c.literals for c in r.clauses)
    assert got == sorted(
        [(1, 2), (3, 4), (-1, -3), (-1, -4), (-2, -3), (-2, -4)]
    )


def test_restrict_rejects_unknown_variable():
    with pytest.raises(ValueError):
        restrict_simplify(CnfFormula(1, [(1,)]), {2: True})


def test_restrict_composition_and_subclause_property():
    rng = random.Random(5)
    for seed in range(20):
        f = random_3cnf(12, 30, seed=seed)
        vs = rng.sample(range(1, 13), 6)
        rho1 = {v: rng.random() < 0.5 for v in vs[:3]}
        rho2 = {v: rng.random() < 0.5 for v in vs[3:]}
        combined = dict(rho1)
        combined.update(rho2)
        a = restrict_simplify(restrict_simplify(f, rho1), rho2)
        b = restrict_simplify(f, combined)
        assert [c.literals for c in a.clauses] == [c.literals for c in b.clauses]
        originals = [set(c.literals) for c in f.clauses]
        for c in a.clauses:
            assert any(set(c.literals) <= o for o in originals)


def test_satisfies():
    f = CnfFormula(3, [(1, 2), (-3,)])
    assert satisfies(f, {1: True, 2: False, 3: False})
    assert not satisfies(f, {1: False, 2: False, 3: False})
