import json
import subprocess
import sys

import pytest

from rospace.cli import main, run
from rospace.fixtures import build, fixture_path
from rospace.io import dumps, system_to_json, systemK_to_json
from rospace.systems import resolve_point
from rospace.words import FreeFactorSystem


def invoke(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def payload(*argv):
    res = run(list(argv))
    assert res.status == "ok", res.payload
    return res.payload


class TestExamples:
    def test_dims(self):
        assert payload("dims", "--n", "2", "--factors", "1") == {
            "V": 2, "E": 2, "dim_cv": 1, "dim_spine": 1, "s": 1}

    def test_dims_from_system_file(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(dumps(system_to_json(FreeFactorSystem.standard(3, [1, 1]))))
        assert payload("dims", "--system", str(path))["E"] == 4

    def test_index_t1(self):
        p = payload("index", "--tree", "fixtures/t1.json")
        assert p["total"] == 2 and p["equality"] is True
        assert p["orbits"][0]["stabilizer"] == {"special": 1}

    def test_index_orbit_graph(self):
        p = payload("index", "--tree", "fixtures/theta.json", "--orbit-graph")
        assert all(r["agrees"] for r in p["orbit_graph"])

    def test_converge(self):
        p = payload("converge", "--n-max", "4")
        assert [d["deviation"] for d in p["deviations"]] == ["4/3", "2/3", "2/3", "0"]

    def test_length(self):
        p = payload("length", "--tree", "fixtures/x2-middle-symbolic.json",
                    "--word", "a*b", "--word", "b", "--oracle")
        rows = {r["word"]: r for r in p["lengths"]}
        assert rows["a*b"]["length"] == {"λ1": "2", "λ2": "1"}
        assert all(r["oracle_agrees"] for r in p["lengths"])

    def test_enumerate(self):
        assert payload("enumerate", "--n", "3", "--factors", "1")["maximal_classes"] == 3

    def test_boundary(self):
        p = payload("boundary", "--n", "3", "--factors", "1", "--all")
        assert p["dimension"] == 3 and p["dim_cv"] == 4

    def test_qrank_and_prop41(self):
        q = payload("qrank", "--tree", "fixtures/theta.json")
        assert q["r_q"] == 3 and q["equality"]["theorem"]
        assert payload("prop41", "--tree", "fixtures/t1.json")["iii"] is True

    def test_resolve(self):
        p = payload("resolve", "--tree", "fixtures/t1.json", "--depth", "2")
        assert p["ball"]["vertices"] == 18 and p["ball"]["ok"]

    def test_validate_ok(self):
        assert payload("validate", "fixtures/cyclic-trivalent.json")["ok"] is True

    def test_validate_system_k(self, tmp_path):
        path = tmp_path / "k.json"
        path.write_text(dumps(systemK_to_json(resolve_point(build("t1")))))
        assert payload("validate", str(path))["ok"] is True


class TestExitCodes:
    def test_ok(self, capsys):
        code, doc = invoke(capsys, "dims", "--n", "2")
        assert code == 0 and doc["status"] == "ok"

    def test_fail(self, capsys):
        code, doc = invoke(capsys, "validate", str(fixture_path("tripod-violation")))
        assert code == 1 and doc["payload"]["clause"] == "no fixed tripods"

    def test_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        code, doc = invoke(capsys, "length", "--tree", str(bad), "--word", "a")
        assert code == 2 and doc["payload"]["error"] == "SchemaError"

    def test_bad_word(self, capsys):
        code, doc = invoke(capsys, "length", "--tree", "fixtures/t1.json", "--word", "z")
        assert code == 2 and doc["status"] == "error"

    def test_usage_error(self, capsys):
        assert main(["dims", "--nope"]) == 2


def test_human_output(capsys):
    assert main(["dims", "--n", "2", "--factors", "1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["V", "E", "dim_cv", "dim_spine"]


@pytest.mark.parametrize("argv", [
    ["index", "--tree", "fixtures/boundary-3-1.json"],
    ["qrank", "--tree", "fixtures/dumbbell.json"],
    ["enumerate", "--n", "3", "--factors", "1,1", "--all"],
])
def test_byte_deterministic(argv):
    cmd = [sys.executable, "-m", "rospace.cli", *argv, "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True,
                            env={"PYTHONHASHSEED": "123", "PATH": ""}).stdout
    assert first == second and first
