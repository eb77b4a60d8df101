import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from posmodel import cli, invariant

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


def run(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_analyze_toy():
    code, text = run("analyze", DATA / "toy.th", DATA / "toy.mod")
    assert code == 0
    assert "positively-closed: model=toy verdict=False" in text
    assert "(relative to n_max=3)" in text


def test_axiom_failure_exits_3_with_witness():
    code, text = run("analyze", DATA / "toy.th", DATA / "bad.mod")
    assert code == 3
    assert "bad fails axiom 0" in text and "('a1',)" in text


def test_parse_error_exits_2(tmp_path):
    broken = tmp_path / "broken.th"
    broken.write_text("sort A\nrel R : Q\n")
    code, text = run("analyze", broken, DATA / "toy.mod")
    assert code == 2 and "input error" in text
    assert run("analyze", DATA / "missing.th", DATA / "toy.mod")[0] == 2
    assert run("dlat", "spec", DATA / "toy.th")[0] == 2
    assert run("nonsense")[0] == 2


def test_bad_prime_exits_2():
    assert run("dlat", "quotient", DATA / "chain3.dlat", "--prime", "1")[0] == 2
    assert run("posetal-import", DATA / "chain3.dlat", "--prime", "0,1,2")[0] == 2


def test_injected_fault_exits_4(monkeypatch):
    real = invariant.is_positively_closed_direct

    def flipped(cat, m):
        r = real(cat, m)
        return invariant.PCResult(not r.closed, None, r.n_max)

    monkeypatch.setattr(invariant, "is_positively_closed_direct", flipped)
    code, text = run("analyze", DATA / "unary.th", DATA / "r0.mod")
    assert code == 4 and "oracle disagreement" in text


def test_several_models_per_file():
    code, text = run("analyze", DATA / "toy.th", DATA / "pair.mod")
    assert code == 0
    assert "model=left" in text and "model=right" in text


def test_reports_are_deterministic():
    a = run("--structured", "analyze", DATA / "toy.th", DATA / "pair.mod")
    b = run("--structured", "analyze", DATA / "toy.th", DATA / "pair.mod")
    assert a == b


def test_env_nmax(monkeypatch):
    monkeypatch.setenv("POSMODEL_NMAX", "2")
    code, text = run("--structured", "dlat", "krull", DATA / "chain3.dlat")
    assert json.loads(text)["config"]["n_max"] == 2
    code, text = run("--nmax", "1", "--structured", "dlat", "krull", DATA / "chain3.dlat")
    assert json.loads(text)["config"]["n_max"] == 1


GOLDEN_CASES = {
    "analyze_r0": ["analyze", "unary.th", "r0.mod"],
    "posetal_chain3": ["posetal-import", "chain3.dlat", "--prime", "1,2"],
    "posetal_bool4": ["posetal-import", "bool4.dlat", "--prime", "1,3"],
    "posetal_two": ["posetal-import", "two.dlat", "--prime", "1"],
    "tv_full": ["tv", "unary.th", "r0.mod"],
    "redprod_principal": ["redprod", "unary.th", "r0.mod", "r0.mod", "--filter", "0"],
    "dlat_spec_chain3": ["dlat", "spec", "chain3.dlat"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_structured_golden(name, monkeypatch):
    monkeypatch.chdir(DATA)
    argv = ["--structured"] + GOLDEN_CASES[name]
    code, text = run(*argv)
    assert code == 0
    path = GOLDEN / f"{name}.json"
    if os.environ.get("POSMODEL_REGOLD"):
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(text)
    assert text == path.read_text()


def test_golden_contents():
    two = json.loads((GOLDEN / "posetal_two.json").read_text())
    assert two["verdicts"]["lm-isomorphic-to-quotient"] is True
    spec3 = json.loads((GOLDEN / "dlat_spec_chain3.json").read_text())
    assert spec3["findings"][0]["points"] == 2
    tv = json.loads((GOLDEN / "tv_full.json").read_text())
    assert tv["findings"][1]["verdict"] is True
    r0 = json.loads((GOLDEN / "analyze_r0.json").read_text())
    lm = [f for f in r0["findings"] if f["kind"] == "lm"]
    pc = [f for f in r0["findings"] if f["kind"] == "positively-closed"]
    assert lm[0]["classes"] == 3 and pc[0]["verdict"] is False


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "posmodel", "dlat", "krull", str(DATA / "chain3.dlat")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "krull: dim=1" in proc.stdout
