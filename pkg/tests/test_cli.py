from clsat import parse_dimacs, parse_sequence
from clsat.bench import CSV_HEADER
from clsat.cli import main


def run(args):
    return main(args)


def test_gen_grid_to_file(tmp_path, capsys):
    out = tmp_path / "g.cnf"
    graph = tmp_path / "g.peb"
    assert run(["gen-grid", "--layers", "4", "-o", str(out), "--graph", str(graph)]) == 0
    f = parse_dimacs(out.read_text())
    assert f.num_vars == 20 and f.size == 2 * 4 * 3 + 4 + 2
    assert graph.read_text().startswith("p peb 10")


def test_gen_gtn_counts(tmp_path):
    out = tmp_path / "gt.cnf"
    assert run(["gen-gtn", "--n", "10", "-o", str(out)]) == 0
    f = parse_dimacs(out.read_text())
    assert f.size == 775
    sat_out = tmp_path / "gt_sat.cnf"
    assert run(["gen-gtn", "--n", "10", "--sat-seed", "3", "-o", str(sat_out)]) == 0
    assert parse_dimacs(sat_out.read_text()).size == 774


def test_gen_seq_grid_golden(tmp_path):
    graph = tmp_path / "g.peb"
    seq = tmp_path / "g.seq"
    run(["gen-grid", "--layers", "4", "-o", str(tmp_path / "x.cnf"), "--graph", str(graph)])
    assert run(["gen-seq", "--graph", str(graph), "-o", str(seq)]) == 0
    assert parse_sequence(seq.read_text()).entries == (15, 16, 9, 10, 1, 3, 11, 12, 5)
    seq2 = tmp_path / "g2.seq"
    assert run(["gen-seq", "--graph", str(graph), "--algorithm", "grid", "-o", str(seq2)]) == 0
    assert seq2.read_text() == seq.read_text()


def test_gen_seq_gtn(tmp_path):
    seq = tmp_path / "gt.seq"
    assert run(["gen-seq", "--gtn", "3", "-o", str(seq)]) == 0
    assert len(parse_sequence(seq.read_text())) == 6


def test_solve_exit_codes(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert run(["solve", str(cnf)]) == 20
    out = capsys.readouterr().out
    assert "UNSATISFIABLE" in out and "decisions=0" in out

    cnf2 = tmp_path / "s.cnf"
    cnf2.write_text("p cnf 2 1\n1 2 0\n")
    assert run(["solve", str(cnf2)]) == 10
    assert "v " in capsys.readouterr().out

    cnf3 = tmp_path / "b.cnf"
    cnf3.write_text("p cnf 2 1\n1 2 0\n")
    assert run(["solve", str(cnf3), "--decision-budget", "0"]) == 30


def test_solve_with_sequence_and_proof(tmp_path, capsys):
    cnf = tmp_path / "g.cnf"
    graph = tmp_path / "g.peb"
    seq = tmp_path / "g.seq"
    proof = tmp_path / "g.res"
    run(["gen-grid", "--layers", "3", "-o", str(cnf), "--graph", str(graph)])
    run(["gen-seq", "--graph", str(graph), "-o", str(seq)])
    assert run(["solve", str(cnf), "--sequence", str(seq), "--proof", str(proof)]) == 20
    out = capsys.readouterr().out
    assert "fallback=0" in out
    assert run(["verify-proof", str(cnf), str(proof)]) == 0
    assert "valid refutation" in capsys.readouterr().out


def test_verify_proof_invalid(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
    bad = tmp_path / "bad.res"
    bad.write_text("i 1 0\ni -1 0\nr 1 2 1 1 0\n")
    assert run(["verify-proof", str(cnf), str(bad)]) == 1
    assert "invalid at step" in capsys.readouterr().err


def test_pt_extend_and_replay(tmp_path, capsys):
    cnf = tmp_path / "g.cnf"
    graph = tmp_path / "g.peb"
    seq = tmp_path / "g.seq"
    proof = tmp_path / "g.res"
    run(["gen-grid", "--layers", "3", "-o", str(cnf), "--graph", str(graph)])
    run(["gen-seq", "--graph", str(graph), "-o", str(seq)])
    run(["solve", str(cnf), "--sequence", str(seq), "--proof", str(proof)])
    capsys.readouterr()

    pt_cnf = tmp_path / "pt.cnf"
    pt_seq = tmp_path / "pt.seq"
    assert run(["pt-extend", str(cnf), str(proof), "-o", str(pt_cnf), "--seq", str(pt_seq)]) == 0
    extended = parse_dimacs(pt_cnf.read_text())
    base = parse_dimacs(cnf.read_text())
    assert extended.num_vars > base.num_vars
    trace_seq = parse_sequence(pt_seq.read_text())
    assert len(trace_seq) == extended.num_vars - base.num_vars

    assert run(["res-replay", str(cnf), str(proof)]) == 20
    out = capsys.readouterr().out
    assert "in_order=True" in out


def test_solve_dump_graphs(tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 3 3\n-1 2 0\n-1 3 0\n-2 -3 0\n")
    seq = tmp_path / "f.seq"
    seq.write_text("-1\n")
    dump = tmp_path / "graphs.txt"
    assert run(["solve", str(cnf), "--sequence", str(seq), "--dump-graphs", str(dump)]) == 10
    text = dump.read_text()
    assert "# conflict 1" in text
    assert "node 1 decision" in text
    assert "edge 1 2" in text


def test_bench_csv_and_markdown(tmp_path):
    csv_path = tmp_path / "rows.csv"
    md_path = tmp_path / "rows.md"
    assert (
        run(
            [
                "bench",
                "--family", "grid",
                "--layers", "2..4",
                "--configs", "dpll,cl_sequence",
                "--variants", "unsat,sat",
                "--csv", str(csv_path),
                "--markdown", str(md_path),
            ]
        )
        == 0
    )
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 3 * 2 * 2
    seq_rows = [l for l in lines[1:] if ",cl_sequence," in l]
    for row in seq_rows:
        cols = row.split(",")
        assert cols[4] in ("SAT", "UNSAT")
        if cols[2] == "unsat":
            assert cols[8] == "0"  # guided refutations need no fallback
    assert md_path.read_text().startswith("| family |")


def test_bench_randpeb_family(tmp_path):
    csv_path = tmp_path / "r.csv"
    assert (
        run(
            [
                "bench",
                "--family", "randpeb",
                "--nodes", "6,8",
                "--seed", "2",
                "--max-indegree", "3",
                "--max-label", "3",
                "--configs", "cl_sequence",
                "--variants", "unsat",
                "--csv", str(csv_path),
                "--markdown", str(tmp_path / "r.md"),
            ]
        )
        == 0
    )
    rows = csv_path.read_text().strip().splitlines()[1:]
    assert len(rows) == 2
    for row in rows:
        cols = row.split(",")
        assert cols[0] == "random_pebbling"
        assert cols[4] == "UNSAT" and cols[8] == "0"


def test_bench_deterministic_modulo_time(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for path in (a, b):
        run(
            [
                "bench",
                "--family", "gtn",
                "--n", "3..5",
                "--configs", "cl_default,cl_sequence",
                "--variants", "unsat,sat",
                "--csv", str(path),
                "--markdown", str(tmp_path / "ignore.md"),
            ]
        )
    strip = lambda p: [",".join(l.split(",")[:-1]) for l in p.read_text().splitlines()]
    assert strip(a) == strip(b)


def test_cli_error_exit(tmp_path, capsys):
    assert run(["solve", str(tmp_path / "missing.cnf")]) == 1
    assert "error:" in capsys.readouterr().err
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 1 1\n2 0\n")
    assert run(["solve", str(bad)]) == 1
