import json

import jsonschema
import pytest
from click.testing import CliRunner

from sl3tilt.cli import cmd_appendix, cmd_char, cmd_decompose, load_schema, main, validate
from sl3tilt.weights import Weight


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, ["--no-cache", *args])

    return invoke


def payload_of(result):
    doc = json.loads(result.output)
    jsonschema.validate(doc, load_schema("result"))
    return doc


class TestDecompose:
    def test_worked_example(self, run):
        r = run("decompose", "-p", "3", "2,2", "5,2", "--verify")
        assert r.exit_code == 0
        assert r.output.splitlines() == [
            "L(2,2) ⊗ L(5,2) ≅ T(7,4) ⊕ T(8,2) ⊕ T(5,5) ⊕ T(6,3) ⊕ 3T(5,2) ⊕ T(2,5)",
            "verified: true",
        ]

    def test_identity_factor(self, run):
        r = run("decompose", "-p", "2", "0,0", "4,7")
        assert r.exit_code == 0
        assert "T(0,1) ⊗ T(0,1)^[1] ⊗ T(1,1)^[2]" in r.output

    def test_json_with_erratum(self, run):
        r = run("decompose", "-p", "3", "5,4", "4,5", "--json", "--verify")
        assert r.exit_code == 0
        doc = payload_of(r)
        assert len(doc["payload"]["summands"]) == 9
        assert doc["payload"]["verified"] is True
        assert any("T(7,7)" in e for e in doc["errata"])

    def test_text_errata_lines(self, run):
        r = run("decompose", "-p", "2", "7,2", "6,3", "--verify")
        assert "verified: true" in r.output
        assert r.output.count("erratum:") == 1

    def test_no_canonicalize(self, run):
        r = run("decompose", "-p", "2", "3,0", "3,1", "--no-canonicalize")
        assert "T(2,1) ⊗ T(2,0)^[1]" in r.output

    def test_usage_errors(self, run):
        assert run("decompose", "-p", "5", "1,0", "1,0").exit_code == 2
        assert run("decompose", "-p", "3", "a,b", "1,0").exit_code == 2
        assert run("decompose", "3,0", "1,0").exit_code == 2

    def test_parenthesised_weights(self, run):
        assert run("decompose", "-p", "2", "(3,0)", "(3,1)").output.strip().endswith("T(6,1)")

    def test_command_function_validates(self):
        result = cmd_decompose(3, Weight(5, 5), Weight(5, 5), verify=True)
        validate(result)
        assert result.exit_code == 0 and result.errata


class TestChar:
    def test_tilting(self, run):
        r = run("char", "-p", "3", "tilting", "4,4", "--json")
        doc = payload_of(r)["payload"]
        assert doc["dim"] == 324 and len(doc["weyl_terms"]) == 8

    def test_simple_and_weyl(self, run):
        assert "dim: 7" in run("char", "-p", "3", "simple", "1,1").output
        assert "dim: 8" in run("char", "-p", "2", "weyl", "1,1").output

    def test_atom(self, run):
        doc = payload_of(run("char", "-p", "3", "atom", "M", "--json"))["payload"]
        assert doc["dim"] == 21

    def test_full(self, run):
        doc = payload_of(run("char", "-p", "3", "weyl", "1,1", "--json", "--full"))["payload"]
        assert doc["dominant_multiplicities"] == [[[1, 1], 1], [[0, 0], 2]]

    def test_convention_provenance(self, run):
        doc = payload_of(run("char", "-p", "3", "tilting", "6,0", "--json"))["payload"]
        assert doc["provenance"] == "derived-by-convention" and doc["dim"] == 63

    def test_unknown_character(self, run):
        r = run("char", "-p", "3", "tilting", "7,0", "--json")
        assert r.exit_code == 4
        doc = payload_of(r)
        assert doc["status"] == "error" and "T(6, 0)" in doc["payload"]["provenance"]
        jsonschema.validate(doc["payload"], load_schema("error"))

    def test_bad_atom(self):
        assert cmd_char(3, "atom", "Q(1,1)").exit_code == 2


class TestVerifyTables:
    def test_all_pass(self, run):
        r = run("verify-tables", "--json")
        doc = payload_of(r)["payload"]
        assert r.exit_code == 0 and doc["failed"] == 0
        kinds = [(x["p"], x["kind"]) for x in doc["results"]]
        assert kinds.count((2, "identity")) == 6 and kinds.count((3, "identity")) == 21
        assert kinds.count((3, "m-product")) == 2

    def test_per_prime(self, run):
        r = run("verify-tables", "-p", "2")
        assert r.exit_code == 0 and "p=3" not in r.output

    @pytest.mark.parametrize("label", ["table:(21)", "identity:(21)", "m-product:T(1,0)"])
    def test_corruption_fails_loudly(self, run, label):
        r = run("verify-tables", "-p", "3", "--inject-corruption", label)
        assert r.exit_code == 3
        assert r.output.count("FAIL") == 1


class TestLinkage:
    def test_two_classes(self, run):
        r = run("linkage", "-p", "3", "2,2", "4,1", "3,0", "0,3", "1,1", "0,0", "--json")
        classes = payload_of(r)["payload"]["classes"]
        assert len(classes) == 2
        assert [[2, 2]] in classes and sorted(map(len, classes)) == [1, 5]


class TestAppendix:
    def test_basis(self, run):
        doc = payload_of(run("appendix", "basis", "--json"))["payload"]["result"]
        assert doc["dim"] == 34 and sum(len(g) for g in doc["basis"]) == 34

    def test_rigidity(self, run):
        r = run("appendix", "rigidity")
        assert r.output.splitlines()[0] == "T(43): NOT rigid; Loewy length 7"

    def test_other_subcommands(self, run):
        for sub in ("projectives", "tilting", "dual", "subspaces", "aprime"):
            r = run("appendix", sub, "--json")
            assert r.exit_code == 0, sub
            payload_of(r)

    def test_gf3(self, run):
        doc = payload_of(run("appendix", "tilting", "--field", "GF(3)", "--json"))["payload"]
        assert doc["field"] == "GF(3)" and doc["result"]["dim"] == 10

    def test_dot_file(self, run, tmp_path):
        out = tmp_path / "t43.dot"
        r = run("appendix", "dot", "-o", str(out))
        assert r.exit_code == 0
        text = out.read_text()
        assert text.startswith("digraph") and text.count("->") == 12

    def test_dot_other_module(self, tmp_path):
        out = tmp_path / "p43.dot"
        cmd_appendix("dot", module="P43", output=str(out))
        assert out.read_text().count("->") == 5

    def test_presentation_file(self, run, tmp_path):
        from sl3tilt.pathalg import builtin_presentation

        path = tmp_path / "b.json"
        path.write_text(json.dumps(builtin_presentation("B-subalgebra").to_json()))
        doc = payload_of(run("appendix", "basis", "--presentation", str(path), "--json"))["payload"]
        assert doc["result"]["dim"] == 9

    def test_unknown_subcommand(self, run):
        assert run("appendix", "nonsense").exit_code == 2


def test_cache_option_writes_file(tmp_path):
    from sl3tilt import characters as ch

    path = tmp_path / "c.json"
    saved = dict(ch._convention_store)
    ch._convention_store.clear()
    try:
        r = CliRunner().invoke(main, ["--cache", str(path), "char", "-p", "3", "tilting", "5,1"])
        assert r.exit_code == 0
        assert path.exists()
    finally:
        ch.configure_cache(False)
        ch._convention_store.update(saved)
