import json

from regmat.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, build_parser, main, run
from regmat.colored_graph import dumps
from regmat.generators import cographic_splitting

from conftest import K4_EDGES


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip().startswith("{") else out), err


def test_matroid_info(capsys):
    code, rep, _ = call(capsys, "matroid", "info", "K33")
    assert code == EXIT_OK
    r = rep["result"]
    assert (r["rank"], r["n"], r["loopless"], r["tu_certified"]) == (5, 9, True, True)
    assert set(rep) == {"command", "input_hashes", "result", "duration_s", "version"}
    assert call(capsys, "matroid", "info", "r10")[1]["result"]["rank"] == 5


def test_matroid_info_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x",\n "ground": ["a"], "matrix": [[2,]]}')
    code, _, err = call(capsys, "matroid", "info", str(bad))
    assert code == EXIT_ERROR and "bad.json:2:" in err
    nontu = tmp_path / "u24.json"
    nontu.write_text(json.dumps({"name": "u", "ground": list("abcd"), "matrix": [[1, 0, 1, 1], [0, 1, 1, -1]]}))
    code, _, err = call(capsys, "matroid", "info", str(nontu))
    assert code == EXIT_ERROR and "NotTU" in err and "determinant" in err
    assert call(capsys, "matroid", "info", "nosuch")[0] == EXIT_ERROR
    assert call(capsys, "solve")[0] == EXIT_ERROR


def test_albanese_build(capsys, tmp_path):
    code, rep, _ = call(capsys, "albanese", "build", "K33", "--ell", "2", "--r", "1", "--j", "0", "--reduced")
    assert (rep["result"]["vertices"], rep["result"]["edges"]) == (16, 72)
    assert call(capsys, "albanese", "build", "K5", "--ell", "2", "--reduced")[1]["result"]["edges"] == 320
    out = tmp_path / "g.json"
    code, rep, _ = call(capsys, "albanese", "build", "K5", "--ell", "3", "--r", "0", "--j", "0", "--output", str(out))
    assert rep["result"] == {"edges": 10, "loops": 10, "params": {"ell": 3, "j": 0, "r": 0, "reduced": False}, "vertices": 1}
    assert json.loads(out.read_text())["graph"]


def test_solve(capsys):
    code, rep, _ = call(capsys, "solve", "K33", "--ell", "2", "--reduced")
    r = rep["result"]
    assert code == EXIT_NEGATIVE
    assert (r["solution_dim"], r["indivisible_exists"], r["augmented_rank_equal"]) == (15, False, True)
    code, rep, _ = call(capsys, "solve", "K5", "--ell", "2", "--reduced")
    assert rep["result"]["solution_dim"] == 103 and not rep["result"]["indivisible_exists"]
    code, rep, _ = call(capsys, "solve", "R10", "--ell", "3")
    assert code == EXIT_OK and rep["result"]["indivisible_exists"]


def test_distance_membership_cographic(capsys, tmp_path):
    assert call(capsys, "distance", "R10")[1]["result"]["distance"] == 2
    assert call(capsys, "distance", "K5")[1]["result"]["distance"] == 2
    from regmat.matroid import cographic

    f = tmp_path / "k4.json"
    f.write_text(dumps(cographic(K4_EDGES, name="K4*").to_json()))
    code, rep, _ = call(capsys, "distance", str(f))
    assert rep["result"]["distance"] == 1 and str(f) in rep["input_hashes"]
    code, rep, _ = call(capsys, "matroid", "is-cographic", "R10")
    assert code == EXIT_NEGATIVE and rep["result"]["minor_trace"] == [{"label": "e0", "op": "delete"}]
    assert call(capsys, "membership", "K33", "--ell", "3")[0] == EXIT_OK
    assert call(capsys, "membership", "K33", "--ell", "2")[0] == EXIT_NEGATIVE


def test_wheel_is_cographic(capsys, tmp_path):
    from regmat.matroid import graphic

    f = tmp_path / "w4.json"
    f.write_text(dumps(graphic([(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)], 5, name="W4").to_json()))
    code, rep, _ = call(capsys, "matroid", "is-cographic", str(f))
    assert code == EXIT_OK and rep["result"]["cographic"]


def test_split_reduce_minor_workflow(capsys, tmp_path):
    w = tmp_path / "w.json"
    w.write_text(dumps(cographic_splitting(K4_EDGES, 4, level=2).to_json()))
    code, rep, _ = call(capsys, "split", "verify", str(w))
    assert code == EXIT_OK and rep["result"]["passed"]
    s = tmp_path / "s.json"
    code, rep, _ = call(capsys, "split", "to-solution", str(w), "--r", "2", "--output", str(s))
    assert code == EXIT_OK and rep["result"]["valid"]
    s1 = tmp_path / "s1.json"
    code, rep, _ = call(capsys, "reduce", str(s), "--output", str(s1))
    assert rep["result"]["profiles_preserved"] and rep["result"]["guaranteed_exponent"] == 1
    code, rep, _ = call(capsys, "matroid", "minor", "--solution", str(s1), "--delete", "0-1")
    assert code == EXIT_OK and rep["result"]["valid"] and rep["result"]["indivisibility_exponent"] == 1
    code, rep, _ = call(capsys, "matroid", "minor", "K5", "--contract", "0-1")
    assert rep["result"]["rank"] == 3


def test_to_solution_agrees_with_solve(capsys, tmp_path):
    from regmat.matroid import cographic

    w = tmp_path / "w.json"
    w.write_text(dumps(cographic_splitting(K4_EDGES, 4).to_json()))
    code, rep, _ = call(capsys, "split", "to-solution", str(w), "--r", "1")
    assert rep["result"]["indivisibility_exponent"] == 1
    m = tmp_path / "m.json"
    m.write_text(dumps(cographic(K4_EDGES).to_json()))
    assert call(capsys, "solve", str(m), "--ell", "2")[1]["result"]["indivisible_exists"]


def test_reduce_j0_identical_file(capsys, tmp_path):
    w = tmp_path / "w.json"
    w.write_text(dumps(cographic_splitting(K4_EDGES, 4).to_json()))
    s, s2 = tmp_path / "s.json", tmp_path / "s2.json"
    call(capsys, "split", "to-solution", str(w), "--r", "1", "--output", str(s))
    call(capsys, "reduce", str(s), "--output", str(s2))
    assert s.read_bytes() == s2.read_bytes()


def test_split_verify_failure_exit_code(capsys, tmp_path):
    wit = cographic_splitting(K4_EDGES, 4).to_json()
    wit["level"] = 3
    w = tmp_path / "w.json"
    w.write_text(dumps(wit))
    code, rep, _ = call(capsys, "split", "verify", str(w))
    assert code == EXIT_NEGATIVE and not rep["result"]["passed"]


def test_reference_table_command(capsys):
    code, rep, _ = call(capsys, "--threads", "1", "verify-reference")
    assert code == EXIT_OK and rep["result"]["all_pass"]


def test_reference_table_alias():
    parser = build_parser()
    assert parser.parse_args(["verify-paper"]).func is parser.parse_args(["verify-reference"]).func


def test_determinism():
    a = run(["solve", "K33", "--ell", "3"]).to_json()
    b = run(["solve", "K33", "--ell", "3"]).to_json()
    assert dumps(a["result"]) == dumps(b["result"])


def test_text_format(capsys):
    code, out, _ = call(capsys, "--format", "text", "matroid", "info", "K33")
    assert code == EXIT_OK and "rank: 5" in out
