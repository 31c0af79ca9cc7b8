import json
from pathlib import Path

import jsonschema
import pytest

from toposlang.cli import main, run

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())

EXPECTED_SIZES = {"coproduct": 5, "coequalizer": 3, "pushout": 3, "cycle": 1, "single_object": 2}


def report_of(argv):
    report = run([str(a) for a in argv])
    payload = json.loads(json.dumps(report.to_json(), default=str))
    jsonschema.validate(payload, SCHEMA)
    return report, payload


@pytest.mark.parametrize("name", ["basics", "omega_unit"])
def test_parse_round_trips(name):
    report, payload = report_of(["parse", CORPUS / "expressions" / f"{name}.sexp"])
    assert report.exit_code == 0
    assert payload["artifacts"] and all(a["round_trip"] for a in payload["artifacts"])


@pytest.mark.parametrize("name", ["unclosed", "unbound", "undeclared"])
def test_malformed_inputs_exit_2_with_position(name):
    report, payload = report_of(["parse", CORPUS / "malformed" / f"{name}.sexp"])
    assert report.exit_code == 2
    err = payload["counterexamples"][0]
    assert err["line"] >= 1 and err["column"] >= 1


def test_missing_file_is_an_error():
    report, _ = report_of(["parse", CORPUS / "nope.sexp"])
    assert report.exit_code == 2


def test_interpret_methods_agree():
    report, payload = report_of(["interpret", CORPUS / "expressions" / "basics.sexp"])
    assert report.exit_code == 0
    assert all(a["methods_agree"] for a in payload["artifacts"])
    image = payload["artifacts"][0]
    assert image["holds_at"] == [{"b": "x"}, {"b": "y"}]


def test_check_proof_library():
    report, payload = report_of(["check-proof", CORPUS / "proofs" / "library.sexp"])
    assert report.exit_code == 0
    assert len(payload["artifacts"]) >= 11


def test_check_proof_rejects_broken_tree(tmp_path):
    text = (CORPUS / "proofs" / "library.sexp").read_text()
    broken = text.replace("(AndER (seq ((y A)) (and (rel Q y) (rel P y)) (rel P y))",
                          "(AndEL (seq ((y A)) (and (rel Q y) (rel P y)) (rel P y))", 1)
    assert broken != text
    path = tmp_path / "broken.sexp"
    path.write_text(broken)
    report, payload = report_of(["check-proof", path])
    assert report.exit_code == 1
    assert payload["counterexamples"]


@pytest.mark.parametrize("name", sorted(EXPECTED_SIZES))
def test_colimit_corpus(name):
    report, payload = report_of(["colimit", CORPUS / "diagrams" / f"{name}.sexp"])
    assert report.exit_code == 0
    art = payload["artifacts"][0]
    assert art["agree"]
    assert art["oracle"]["size"] == EXPECTED_SIZES[name]


def test_verify_subset():
    report, payload = report_of(["verify", "--criteria", "1,7"])
    assert report.exit_code == 0
    assert len(payload["artifacts"]) == 2


def test_json_output_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["colimit", str(CORPUS / "diagrams" / "pushout.sexp"), "--seed", "3", "--json", str(out)]) == 0
        data = json.loads(out.read_text())
        data.pop("timings")
        outs.append(data)
    assert outs[0] == outs[1]


def test_stdout_json(capsys):
    assert main(["parse", str(CORPUS / "expressions" / "omega_unit.sexp"), "--json", "-"]) == 0
    text = capsys.readouterr().out
    payload = json.loads(text[: text.rindex("}") + 1])
    assert payload["command"] == "parse"
