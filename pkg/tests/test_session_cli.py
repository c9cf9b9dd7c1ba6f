import io
import os
import subprocess
import sys
from pathlib import Path

import pytest

from cinf.cli import main
from cinf.errors import SexprSyntaxError, UnknownSymbol
from cinf.session import parse_session, print_session
from cinf.terms import free_support

CORPUS = sorted((Path(__file__).resolve().parent.parent / "corpus").glob("*.cinf"))


def run(*argv, env_seed=None):
    out = io.StringIO()
    old = os.environ.get("CINF_SEED")
    try:
        if env_seed is not None:
            os.environ["CINF_SEED"] = str(env_seed)
        code = main(list(argv), out)
    finally:
        if env_seed is not None:
            if old is None:
                del os.environ["CINF_SEED"]
            else:
                os.environ["CINF_SEED"] = old
    return out.getvalue(), code


# -- documents


def test_ring_definition():
    s = parse_session("(ring A (gens x) (rels (* x x)))")
    a = s.ring("A")
    assert a.generator_names == ("x",) and len(a.relations) == 1


def test_term_definition_support():
    s = parse_session("(term (+ x (sin y)))")
    assert free_support(s.terms[0].term) == {"x", "y"}


def test_duplicate_generator_is_a_syntax_error():
    with pytest.raises(SexprSyntaxError) as info:
        parse_session("(ring A (gens x x) (rels))")
    assert "duplicate generator" in str(info.value)
    assert str(info.value).startswith("1:9:")


def test_unknown_head_has_location():
    with pytest.raises(UnknownSymbol) as info:
        parse_session("(ring A (gens x) (rels))\n  (widget B)")
    assert str(info.value).startswith("2:4:")


def test_undefined_references():
    with pytest.raises(UnknownSymbol):
        parse_session("(hom h A A (images x))")
    with pytest.raises(UnknownSymbol):
        parse_session("(ring A (gens x) (rels y))")
    with pytest.raises(SexprSyntaxError):
        parse_session("(ring A (gens x) (rels))\n(hom h A A (images))")


def test_print_is_canonical():
    text = "(query member A x)\n(elem e A (+ x x))\n(ring A (gens x) (rels (* x 1)))\n(term t (* 2 3))"
    out = print_session(parse_session(text))
    assert out == (
        "(cinf-version 1)\n"
        "(ring A (gens x) (rels x))\n"
        "(elem e A (* 2 x))\n"
        "(term t 6)\n"
        "(query member A x)\n"
    )


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_roundtrip(path):
    s = parse_session(path.read_text())
    printed = print_session(s)
    assert parse_session(printed) == s
    assert print_session(parse_session(printed)) == printed


# -- commands


def test_member_examples():
    assert run("member", "--ideal", "(x)", "--elem", "(* x x)") == ("ProvenIn cofactors: (x)\n", 0)
    out, code = run("member", "--ideal", "(x)", "--elem", "1")
    assert out.splitlines()[0] == "RefutedNumerically at x=0" and code == 1


def test_hadamard_examples():
    assert run("hadamard", "--exact", "(* v1 v1)") == ("g1 = (+ x1 y1)\n", 0)
    out, code = run("hadamard", "--quad", "(exp v1)", "--x", "1", "--y", "0")
    assert out == "g1 = 1.71828182846\n" and code == 0


def test_term_commands(capsys):
    assert run("normalize", "(+ x x (* 0 y))") == ("(* 2 x)\n", 0)
    assert run("eval", "(+ x 1/2)", "--at", "x=1") == ("1.5\n", 0)
    out, code = run("eval", "(log x)", "--at", "x=-1")
    assert code == 1 and capsys.readouterr().err.startswith("error: DomainError")
    assert run("diff", "(* x x y)", "--var", "x") == ("(* 2 x y)\n", 0)


def test_file_commands(tmp_path):
    f = tmp_path / "s.cinf"
    f.write_text(
        "(ring A (gens x) (rels (* x x)))\n(ring B (gens x) (rels x))\n(ring C (gens x) (rels (+ x -1)))\n"
        "(hom h A B (images x))\n(hom k C B (images x))\n"
    )
    out, code = run("hom-check", str(f), "h")
    assert out.splitlines()[0] == "Verified" and code == 0
    out, code = run("hom-check", str(f), "k")
    assert out.startswith("RefutedAt 0") and code == 1
    out, code = run("coprod", str(f), "A", "B")
    assert "(gens x x_2)" in out and code == 0
    out, code = run("adjoin", str(f), "A", "--names", "t")
    assert "(gens x t)" in out and code == 0
    out, code = run("quotient", str(f), "A", "--ideal", "(x)")
    assert "(rels x (* x x))" in out or "(rels (* x x) x)" in out
    out, code = run("member", str(f), "A", "(* x x x)")
    assert out.startswith("ProvenIn") and code == 0
    out, code = run("ftt", str(f), "h", "--pairs", "((x 0))")
    assert code == 0 and out.startswith("factor status: Verified")
    assert run("print", str(f))[0] == print_session(parse_session(f.read_text()))


def test_unknown_exit_code(tmp_path):
    f = tmp_path / "u.cinf"
    f.write_text("(ring I (gens x) (rels (+ (* x x) (neg x))))\n(query equal I (exp (* x x)) (exp x))\n")
    out, code = run("run", str(f))
    assert code == 2 and "Unknown tried:" in out


def test_error_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.cinf"
    f.write_text("(ring A (gens x x) (rels))")
    out, code = run("run", str(f))
    assert code == 1 and out == ""
    assert capsys.readouterr().err.startswith("error: 1:9:")


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_exit_codes(path):
    out, code = run("run", str(path))
    lines = out.splitlines()
    has_error = any(l.startswith("error:") or "RefutedNumerically" in l or "RefutedAt" in l
                    for l in lines)
    has_unknown = any("Unknown" in l or "Unverified" in l for l in lines)
    if has_error:
        assert code == 1
    elif has_unknown:
        assert code == 2
    else:
        assert code == 0


def test_seed_flag_and_environment_agree():
    path = str(CORPUS[3])
    assert run("--seed", "7", "run", path) == run("run", path, env_seed=7)


def test_reports_are_deterministic_across_processes():
    outs = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed, CINF_SEED="3")
        proc = subprocess.run([sys.executable, "-m", "cinf.cli", "run", *map(str, CORPUS[:4])],
                              capture_output=True, env=env, check=False)
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and outs[0]
