import json
import subprocess
import sys

import pytest

from revbisim.cli import main
from revbisim.core import ConfigStructure
from revbisim.corpus import PARALLEL_SWITCH
from revbisim.equivalences import replay_witness, witness_from_dict
from revbisim.terms import translate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def switch_file(tmp_path):
    p = tmp_path / "switch.cs"
    p.write_text(json.dumps(PARALLEL_SWITCH))
    return str(p)


def test_validate_unstable_file(capsys, switch_file):
    code, out, _ = run(capsys, "validate", switch_file)
    assert code == 1
    assert "boundedIntersections: FAIL [{0,b},{1,b} <= {0,1,b}]" in out


def test_validate_term(capsys):
    code, out, _ = run(capsys, "validate", "--term", "a|b")
    assert code == 0
    assert "FAIL" not in out


def test_validate_rootless(capsys, tmp_path):
    p = tmp_path / "empty-family.cs"
    p.write_text(json.dumps({"events": [{"id": "a", "label": "a"}], "configurations": [["a"]]}))
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "rooted: FAIL" in out


def test_validate_json(capsys):
    code, out, _ = run(capsys, "validate", "--json", "term:a.b")
    assert code == 0 and json.loads(out)["stable"] is True


@pytest.mark.parametrize("content", ["not json", '{"events": []}', "[1, 2]"])
def test_malformed_file(capsys, tmp_path, content):
    p = tmp_path / "bad.cs"
    p.write_text(content)
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2 and "input error" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/file.cs")
    assert code == 2


def test_info_chain(capsys):
    code, out, _ = run(capsys, "info", "--term", "a.a", "--config", "e1,e2")
    assert code == 0
    assert "order: e1 < e2" in out
    assert "depths: e1:1 e2:2" in out
    assert "REV kind=dsingle labels=a k=2 target=[e1]" in out


def test_info_nil(capsys):
    code, out, _ = run(capsys, "info", "--term", "0")
    assert code == 0 and "configurations (1): {}" in out


def test_info_all_reports_autoconcurrency(capsys):
    code, out, _ = run(capsys, "info", "--term", "a|b.a", "--config", "all")
    assert code == 0
    assert "autoConcurrency: yes" in out
    assert "equidepthAutoConcurrency: no" in out
    for line in out.splitlines():
        if line.strip().startswith(("FWD", "REV")):
            assert line.strip().split()[1].startswith("kind=")


def test_info_unknown_configuration(capsys):
    code, _, err = run(capsys, "info", "--term", "a.a", "--config", "e2")
    assert code == 2


def test_info_unstable(capsys, switch_file):
    code, _, _ = run(capsys, "info", switch_file)
    assert code == 2


def test_check_rb(capsys):
    code, out, _ = run(capsys, "check", "--eq", "rb", "--term", "a|a", "--term2", "a.a")
    assert code == 0 and out.startswith("rb: equivalent")


def test_check_rsb_witness(capsys):
    code, out, _ = run(capsys, "check", "--eq", "rsb", "--term", "a|a", "--term2", "(a|a)+a.a",
                       "--witness")
    assert code == 1
    assert "REV kind=step labels=a,a" in out
    assert "(no response)" in out


def test_check_hh_idempotence(capsys):
    code, out, _ = run(capsys, "check", "--eq", "hh", "--term", "a", "--term2", "a+a")
    assert code == 0 and "hh: equivalent" in out


def test_check_json_witness_replays(capsys):
    code, out, _ = run(capsys, "check", "--eq", "rb", "--json", "--witness",
                       "term:a|b", "term:a.b+b.a")
    assert code == 1
    doc = json.loads(out)
    assert doc["kind"] == "rb" and doc["equivalent"] is False
    tree = witness_from_dict(doc["witness"])
    assert replay_witness("rb", translate("a|b"), translate("a.b+b.a"), tree)[0]


def test_check_all_json(capsys):
    code, out, _ = run(capsys, "check", "--json", "--term", "a", "--term2", "a+a")
    docs = json.loads(out)
    assert code == 0 and len(docs) == 9
    assert all(set(d) == {"kind", "equivalent", "rounds", "pairsInitial", "pairsFinal"}
               for d in docs)


def test_check_mixed_file_and_term(capsys, tmp_path):
    p = tmp_path / "aa.cs"
    p.write_text(translate("a|a").dumps())
    code, _, _ = run(capsys, "check", "--eq", "sb", str(p), "--term2", "a|a")
    assert code == 0
    code, _, _ = run(capsys, "check", "--eq", "sb", "--term", "a.a", str(p))
    assert code == 1


def test_check_arity_and_kind_errors(capsys):
    assert run(capsys, "check", "--term", "a")[0] == 2
    assert run(capsys, "check", "--eq", "pomset", "--term", "a", "--term2", "a")[0] == 2


def test_check_capacity(capsys, monkeypatch):
    monkeypatch.setenv("CSR_MAX_EVENTS", "1")
    code, _, err = run(capsys, "check", "--term", "a|a", "--term2", "a.a")
    assert code == 3 and "capacity" in err


def test_corpus(capsys):
    code, out, _ = run(capsys, "corpus", "--ascii")
    assert code == 0
    rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:-1]}
    header = out.splitlines()[0].split()
    absorption = dict(zip(header, rows["absorption"]))
    assert absorption["sb"] == "Y/Y" and absorption["db"] == "Y/Y"
    assert absorption["rb"] == "N/N" and absorption["rsb"] == "N/N"
    assert absorption["hh"] == "N/N"
    interleaving = dict(zip(header, rows["interleaving-law"]))
    assert interleaving["ib"] == "Y/Y"
    assert all(interleaving[k].endswith("/N") for k in header if k != "ib")
    assert "0 mismatch" in out


def test_fuzz(capsys):
    code, out, _ = run(capsys, "fuzz", "--laws", "rsb=rhsb", "--count", "20", "--seed", "7")
    assert code == 0
    assert out.startswith("LAW rsb=rhsb: ") and " 0 violations" in out


def test_fuzz_unknown_law(capsys):
    assert run(capsys, "fuzz", "--laws", "nonsense", "--count", "1")[0] == 2


def test_translate(capsys, tmp_path):
    out_file = tmp_path / "out.cs"
    code, out, _ = run(capsys, "translate", "--term", "a|a", "-o", str(out_file))
    assert code == 0 and "2 events, 4 configurations" in out
    assert ConfigStructure.loads(out_file.read_text()) == translate("a|a")


def test_translate_stdout(capsys):
    code, out, _ = run(capsys, "translate", "--term", "(a|(b+c))+(a|b)+((a+c)|b)")
    assert code == 0
    assert ConfigStructure.loads(out) == translate("(a | (b + c)) + (a | b) + ((a + c) | b)")


def test_translate_syntax_error(capsys):
    code, _, err = run(capsys, "translate", "--term", "a..")
    assert code == 2 and "position" in err


def test_bad_usage(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "revbisim.cli", "validate", "--term", "a"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.isascii()
