import json

import pytest

from mumall.cli import EX_NO, EX_OK, EX_RESOURCE, EX_USAGE, run
from mumall.encode import machine_suite
from mumall.kernel import check_focus_proof, check_proof, cut_node, dump, has_cut, id_proof, load
from mumall.syntax import atom, natom


def _json(capsys, argv):
    code = run([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


def test_parse_and_rank(capsys):
    code, [d] = _json(capsys, ["parse", "p * q"])
    assert code == EX_OK and d["formula"] == "p * q" and d["polarity"] == "positive"
    code, [d] = _json(capsys, ["rank", "mu^2 x. x"])
    assert code == EX_OK and d["rank"] == "3"
    code, [d] = _json(capsys, ["rank-ub", "mu^w x. x"])
    assert code == EX_OK and d["rank"] == "w"


def test_rank_limit_needs_upper_bound(capsys):
    assert run(["rank", "mu^w x. x"]) == EX_USAGE
    assert run(["rank", "mu^w x. x", "--upper"]) == EX_OK


def test_decide_exit_codes(capsys):
    assert run(["decide", "T => nu^3 x. x"]) == EX_OK
    assert run(["decide", "p, ~q"]) == EX_NO
    assert run(["fdecide", "p, ~p"]) == EX_OK
    assert run(["decide", "mu^6 x.(p * x) + 1, nu^6 x.(~p | x) & bot", "--max-nodes", "2"]) == EX_RESOURCE
    assert run(["decide", "mu^w x. x + 1"]) == EX_RESOURCE
    assert run(["decide", "mu^w x. x + 1", "--gamma-probe", "1"]) == EX_OK


def test_usage_errors(capsys):
    assert run(["decide", "p *"]) == EX_USAGE
    assert run(["nonsense"]) == EX_USAGE
    assert run(["rank", "mu^(w^2) x. x"]) == EX_USAGE
    assert run(["rank-ub", "mu^(w^2) x. x", "--alpha", "w^3"]) == EX_OK
    assert run([]) == EX_USAGE


def test_proof_output_is_checkable(tmp_path, capsys):
    f = tmp_path / "proof.json"
    assert run(["decide", "p * q, ~q, ~p", "--proof", str(f)]) == EX_OK
    assert check_proof(load(f.read_text())).valid
    assert run(["check", str(f), "--cut-free"]) == EX_OK
    g = tmp_path / "fproof.json"
    assert run(["fdecide", "p * q, ~q, ~p", "--proof", str(g)]) == EX_OK
    assert check_focus_proof(load(g.read_text())).valid
    assert run(["check", str(g)]) == EX_OK


def test_check_elim_focusize(tmp_path, capsys):
    c = cut_node(id_proof(natom("p"), atom("p")), id_proof(natom("p"), atom("p")), atom("p"))
    src = tmp_path / "cut.json"
    src.write_text(dump(c))
    assert run(["check", str(src)]) == EX_OK
    assert run(["check", str(src), "--cut-free"]) == EX_NO
    out = tmp_path / "free.json"
    assert run(["elim", str(src), "-o", str(out)]) == EX_OK
    assert not has_cut(load(out.read_text()))
    fout = tmp_path / "focus.json"
    assert run(["focusize", str(src), "-o", str(fout)]) == EX_OK
    assert check_focus_proof(load(fout.read_text())).valid
    assert run(["check", str(tmp_path / "missing.json")]) == EX_USAGE


def test_invalid_proof_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sequent": ["0"], "rule": "one"}))
    assert run(["check", str(bad)]) == EX_NO


def test_closure(capsys):
    code, [d] = _json(capsys, ["closure", "p, ~p", "1", "mu^2 x.(p*x)+1, nu^2 x.(~p|x)&bot"])
    assert code == EX_OK and d["agree"]


def test_minsky(tmp_path, capsys):
    code, [d] = _json(capsys, ["minsky", "compile", "--suite", "--beta", "2", "--input", "1"])
    assert code == EX_OK and d["sequent"][1] == "c0"
    code, rows = _json(capsys, ["minsky", "diff", "--suite", "--max-k", "3", "--max-counter", "1"])
    assert code == EX_OK and rows and all(r["agrees"] for r in rows if "agrees" in r)
    m = tmp_path / "m.json"
    m.write_text(json.dumps(machine_suite()[3].to_dict()))
    code, rows = _json(capsys, ["minsky", "diff", str(m), "--goal", "zero", "--max-k", "3", "--max-counter", "1"])
    assert code == EX_OK and all(r["agrees"] for r in rows if "agrees" in r)
    m.write_text("{}")
    assert run(["minsky", "diff", str(m)]) == EX_USAGE


@pytest.mark.parametrize("argv", [
    ["demo", "additive-units"],
    ["demo", "additive-units", "--beta", "w"],
    ["demo", "monotonicity", "--from", "2", "--to", "3"],
    ["demo", "monotonicity", "--kind", "nu", "--body", "x & bot", "--from", "1", "--to", "w"],
    ["demo", "eta-functor", "--focus"],
    ["demo", "rho-growth", "--max-k", "4", "--max-gamma", "3", "--n", "2"],
    ["demo", "sigma01", "--beta", "3"],
])
def test_demos(argv, capsys):
    assert run(argv) == EX_OK
    assert capsys.readouterr().out.strip()


def test_demo_bad_monotonicity(capsys):
    assert run(["demo", "monotonicity", "--from", "3", "--to", "2"]) in (EX_USAGE, EX_NO)


def test_help(capsys):
    assert run(["--help"]) == EX_OK
    assert "decide" in capsys.readouterr().out
