import csv
import io
import json

import pytest

from primspf.cli import ParseError, parse_matrix_set, run, serialize_matrix_set
from primspf.families import cerny_nz, builtin_example, uniform_nz


def test_round_trip():
    for M in (builtin_example("M2"), cerny_nz(6), uniform_nz(7, 3, 1)):
        assert parse_matrix_set(serialize_matrix_set(M)) == M


@pytest.mark.parametrize("text", [
    "",
    "2\n10\n01\n",
    "2 1\n10\n0a\n",
    "2 1\n10\n",
    "2 2\n10\n01\n",
    "2 1\n100\n01\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_matrix_set(text)


def test_parse_tolerates_comments_and_blank_lines():
    text = "# hi\n2 2\n\n10\n01\n\n\n11\n01\n"
    M = parse_matrix_set(text)
    assert M.m == 2 and M[1].to_strings() == ["11", "01"]


def test_check_m1():
    code, out = run(["check", "example:M1", "--json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["primitive"] and rep["exponent"] == 9


def test_spf_kbar_horizon_zero():
    code, out = run(["spf", "example:ex3.3", "--mode", "kbar", "--t-max", "0"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO("".join(ln + "\n" for ln in out.splitlines() if not ln.startswith("#")))))
    assert len(rows) == 1 and rows[0]["Kbar"] == "1/4"


def test_spf_csv_and_json_agree():
    code, out = run(["spf", "example:ex1.1"])
    assert code == 0 and out.startswith("# version=")
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert rows[-1]["K"] == "1" and len(rows) == 9
    code, js = run(["spf", "example:ex1.1", "--json"])
    data = json.loads(js)
    assert [r["K"] for r in data["rows"]] == [r["K"] for r in rows]
    assert data["meta"]["pruning"] == "on"


def test_spf_is_deterministic():
    assert run(["spf", "example:M1", "--no-prune"]) == run(["spf", "example:M1", "--no-prune"])


def test_gen_then_rt(tmp_path, monkeypatch):
    code, text = run(["gen", "--family", "cerny-nz", "--n", "4"])
    assert code == 0
    f = tmp_path / "c4.txt"
    f.write_text(text)
    assert run(["automata", str(f), "--op", "rt"]) == (0, "9\n")
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert run(["automata", "-", "--op", "rt", "--transpose"]) == (0, "9\n")


def test_automata_ops():
    assert run(["automata", "example:ex1.1", "--op", "sync"]) == (0, "True\n")
    code, out = run(["automata", "example:ex1.1", "--op", "eppstein", "--json"])
    assert code == 0 and json.loads(out)["eppstein"] >= 4


def test_approx_report():
    code, out = run(["approx", "example:ex3.3", "--tprime", "8", "--json"])
    rep = json.loads(out)
    assert code == 0 and 16 < float(rep["estimate_dec"]) < 17


def test_exit_codes(tmp_path):
    assert run(["check"])[0] == 1
    assert run(["check", str(tmp_path / "missing")])[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n12\n01\n")
    assert run(["check", str(bad)])[0] == 2
    assert run(["automata", "example:M2", "--op", "rt", "--state-cap", "2"])[0] == 3
    perm = tmp_path / "perm.txt"
    perm.write_text("3 1\n010\n001\n100\n")
    assert run(["approx", str(perm)])[0] == 4


def test_corpus_runner():
    code, out = run(["corpus", "--n", "3", "--count", "4"])
    assert code == 0
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert len(body) == 5
    assert run(["corpus", "--n", "3", "--count", "4"])[1] == out
