import json
import subprocess
import sys

import pytest

from ncpit.cli import main

from conftest import FIXTURES, GOLDEN, M61


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def lines(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def strip(recs):
    for r in recs:
        r.pop("elapsed_s", None)
        r.pop("circuit", None)
    return recs


@pytest.mark.parametrize("name,extra", [
    ("commutator", ["--log2-sparsity", "1", "--trials", "1"]),
    ("zero", ["--log2-sparsity", "3", "--trials", "2"]),
])
def test_golden_jsonl(capsys, name, extra):
    code, out, _ = run(capsys, "test", "--circuit", str(FIXTURES / f"{name}.circ"), "--seed", "7",
                       "--modulus", str(M61), "--json", *extra)
    want = strip(lines((GOLDEN / f"test_{name}.jsonl").read_text()))
    assert strip(lines(out)) == want
    assert code == (1 if name == "commutator" else 0)


def test_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "test", "--circuit", str(FIXTURES / "zero.circ"), "--seed", "1")
    assert code == 0 and "verdict: Zero" in out
    code, out, _ = run(capsys, "test", "--circuit", str(FIXTURES / "commutator.circ"), "--seed", "1")
    assert code == 1 and "witness:" in out
    code, _, err = run(capsys, "test", "--circuit", str(tmp_path / "missing.circ"))
    assert code == 3 and "cannot read" in err
    bad = tmp_path / "bad.circ"
    bad.write_text("ncircuit v1 vars=1\ng0 = add g0 g0\noutput g0\n")
    code, _, _ = run(capsys, "test", "--circuit", str(bad))
    assert code == 4
    code, _, _ = run(capsys, "test", "--circuit", str(FIXTURES / "zero.circ"), "--modulus", "100")
    assert code == 2
    code, _, _ = run(capsys, "nonsense")
    assert code == 2


def test_saturating_circuit_needs_bounds(capsys, tmp_path):
    path = tmp_path / "binom.circ"
    assert run(capsys, "gen", "--kind", "binomial", "--log2-exponent", "70", "--out", str(path))[0] == 0
    code, _, err = run(capsys, "test", "--circuit", str(path), "--seed", "0")
    assert code == 2 and "--degree-log2" in err
    code, _, err = run(capsys, "test", "--circuit", str(path), "--seed", "0", "--degree-log2", "72")
    assert code == 2 and "--log2-sparsity" in err
    code, _, _ = run(capsys, "test", "--circuit", str(path), "--seed", "0", "--degree-log2", "72",
                     "--log2-sparsity", "3")
    assert code == 1


def test_missing_seed_is_printed(capsys):
    code, _, err = run(capsys, "test", "--circuit", str(FIXTURES / "zero.circ"), "--log2-sparsity", "2")
    assert code == 0 and err.startswith("seed: ")


def test_expand(capsys, tmp_path):
    out = tmp_path / "c.ncpoly"
    assert run(capsys, "expand", "--circuit", str(FIXTURES / "commutator.circ"), "--out", str(out))[0] == 0
    assert out.read_text() == (FIXTURES / "commutator.ncpoly").read_text()
    body = [ln for ln in out.read_text().splitlines()[1:] if ln and not ln.startswith("#")]
    assert len(body) == 2
    code, _, _ = run(capsys, "expand", "--circuit", str(FIXTURES / "power40.circ"))
    assert code == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--poly", str(FIXTURES / "commutator.ncpoly"), "--json")
    (rec,) = lines(out)
    assert code == 0 and rec["K"] == 1 and rec["coefficient_ok"] and rec["entry_nonzero"]
    assert "entry_poly" in rec
    code, out, _ = run(capsys, "verify", "--poly", str(FIXTURES / "commutator.ncpoly"))
    assert code == 0 and out.rstrip().endswith("PASS")


def test_isolate(capsys):
    code, out, _ = run(capsys, "isolate", "--poly", str(FIXTURES / "words.ncpoly"), "--json")
    (rec,) = lines(out)
    assert code == 0 and rec["index_set"] == [1] and rec["isolated"] == "x1x0"
    code, out, _ = run(capsys, "isolate", "--poly", str(FIXTURES / "commutator.ncpoly"), "--top")
    assert code == 0 and "I = {" in out


def test_gen_then_test(capsys, tmp_path):
    c = tmp_path / "z.circ"
    assert run(capsys, "gen", "--zero", "--vars", "4", "--size", "50", "--seed", "3", "--out", str(c))[0] == 0
    assert run(capsys, "test", "--circuit", str(c), "--seed", "9")[0] == 0
    c2, p2 = tmp_path / "r.circ", tmp_path / "r.ncpoly"
    assert run(capsys, "gen", "--vars", "3", "--degree", "5", "--terms", "6", "--seed", "3", "--out", str(c2),
               "--poly-out", str(p2))[0] == 0
    assert run(capsys, "test", "--circuit", str(c2), "--seed", "9", "--log2-sparsity", "3")[0] == 1
    assert run(capsys, "verify", "--poly", str(p2))[0] == 0
    assert run(capsys, "test", "--circuit", str(c2), "--seed", "9", "--method", "al")[0] == 1


def test_bench(capsys, tmp_path):
    for name in ("commutator", "power40", "zero"):
        (tmp_path / f"{name}.circ").write_text((FIXTURES / f"{name}.circ").read_text())
    code, out, _ = run(capsys, "bench", str(tmp_path), "--seed", "1", "--json")
    rows = {r["instance"]: r for r in lines(out)}
    assert code == 0
    assert rows["commutator.circ"]["nfa_dim"] == 2 and rows["commutator.circ"]["al_dim"] == 2
    assert rows["commutator.circ"]["nfa_verdict"] == rows["commutator.circ"]["al_verdict"] == "Nonzero"
    assert rows["power40.circ"]["nfa_dim"] == 2 and rows["power40.circ"]["al_dim"] == "inapplicable"
    assert rows["power40.circ"]["nfa_dim_reached"] <= 2
    assert rows["zero.circ"]["nfa_verdict"] == rows["zero.circ"]["al_verdict"] == "Zero"
    code, out, _ = run(capsys, "bench", str(tmp_path), "--seed", "1")
    header, *body = out.splitlines()
    assert header.split()[:3] == ["instance", "size", "nfa_dim"] and len(body) == 3
    assert run(capsys, "bench", str(tmp_path / "nope"))[0] == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ncpit", "test", "--circuit", str(FIXTURES / "commutator.circ"),
                        "--seed", "7", "--json"], capture_output=True, text=True)
    assert r.returncode == 1
    assert lines(r.stdout)[-1]["outcome"] == "Nonzero"
