import json
from pathlib import Path

import pytest

from enrint import cli

GOLDENS = Path(__file__).parent / "goldens"
CASES = json.loads((GOLDENS / "cases.json").read_text())
FIXTURES = cli.fixtures_dir()


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_report(name, capsys):
    case = CASES[name]
    code, out, _ = run(case["argv"], capsys)
    assert out == (GOLDENS / f"{name}.out").read_text()
    assert code == case["exit"]


def test_json_report_parses(capsys):
    code, out, _ = run(["check", "fixtures/P1", "--problem", "rep:F0at1", "--report", "json"],
                       capsys)
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "true"
    assert set(report["results"]["rep:F0at1"]["routes"].values()) == {"true"}


# error contract

def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def test_malformed_json_reports_its_position(tmp_path, capsys):
    code, out, err = run(["validate", write(tmp_path, '{"cosmos": "finset",\n "objects": {')],
                         capsys)
    assert code == 2 and "line 2" in err and out == ""


def test_broken_law_names_the_entity(tmp_path, capsys):
    doc = json.loads((FIXTURES / "P1.json").read_text())
    doc["presheaves"]["F1"]["ev"] = {"1,1": {"on": {'["id1","a"]': "b", '["id1","b"]': "a"}}}
    code, _, err = run(["validate", write(tmp_path, doc)], capsys)
    assert code == 2
    assert "presheaves.F1" in err and "identity law fails at 1" in err


def test_unknown_reference_names_its_path(tmp_path, capsys):
    doc = json.loads((FIXTURES / "P1.json").read_text())
    doc["presheaves"]["F1"]["on"]["1"] = "three"
    code, _, err = run(["validate", write(tmp_path, doc)], capsys)
    assert code == 2 and "presheaves.F1" in err and "three" in err


def test_unknown_problem_is_an_error(capsys):
    code, _, err = run(["check", "fixtures/P1", "--problem", "nope"], capsys)
    assert code == 2 and "nope" in err


def test_check_needs_a_problem(capsys):
    code, _, err = run(["check", "fixtures/P1"], capsys)
    assert code == 2 and "--problem" in err


def test_missing_document(capsys):
    code, _, _ = run(["validate", "no/such/document"], capsys)
    assert code == 2


ARROW_DOC = {
    "cosmos": "fincat",
    "objects": {
        "pt": {"objects": ["*"], "morphisms": [{"name": "id", "src": "*", "tgt": "*"}],
               "identities": {"*": "id"}},
        "Arrow": {"objects": ["0", "1"],
                  "morphisms": [{"name": "id0", "src": "0", "tgt": "0"},
                                {"name": "f", "src": "0", "tgt": "1"},
                                {"name": "id1", "src": "1", "tgt": "1"}],
                  "identities": {"0": "id0", "1": "id1"}},
    },
    "vcategories": {"U": {"objects": ["u"], "hom": {"u,u": "pt"}}},
    "presheaves": {"F": {"base": "U", "on": {"u": "Arrow"}}},
    "problems": {"rep": {"kind": "representability", "presheaf": "F", "object": "u",
                         "element": "0"}},
}


def test_only_inapplicable_routes_is_an_error(tmp_path, capsys):
    path = write(tmp_path, ARROW_DOC)
    code, out, _ = run(["check", path, "--problem", "rep", "--method", "und-tensors"], capsys)
    assert code == 2 and "not-applicable" in out
    code, out, _ = run(["check", path, "--problem", "rep"], capsys)
    assert code == 1 and "routes.und-tensors: not-applicable" in out
    assert "routes.direct: false" in out


# documents

@pytest.mark.parametrize("name", ["P1", "P2", "P3"])
def test_documents_round_trip(name, capsys):
    code, first, _ = run(["roundtrip-document", f"fixtures/{name}"], capsys)
    assert code == 0
    doc = cli.parse(first)
    assert cli.emit_document(doc) == first
    assert doc.same_entities(cli.load(f"fixtures/{name}"))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("cosmos", ["finset", "fincat"])
def test_generated_documents_validate(seed, cosmos, tmp_path, capsys):
    code, text, _ = run(["gen", "--seed", str(seed), "--cosmos", cosmos], capsys)
    assert code == 0
    path = write(tmp_path, text)
    code, _, _ = run(["validate", path], capsys)
    assert code == 0
    code, again, _ = run(["roundtrip-document", path], capsys)
    assert again == text


def test_cells_survive_encoding():
    for cell in ["a", ("a", ()), (("0", "1"), ("x", ("y",))), ()]:
        assert cli.decode_cell(cli.encode_cell(cell)) == cell
        assert cli.parse_key(cli.cell_key(cell)) == cell
