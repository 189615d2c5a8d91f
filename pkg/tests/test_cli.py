# -*- coding: utf-8 -*-
#
# Copyright (c) 2024 The riskbn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import json
import os

from click.testing import CliRunner
import pytest

import riskbn
from riskbn import dump_network
from riskbn._core.cli import cli, run


def invoke(capsys, *args):
    code = run(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def broken_model(tmpdir):
    path = tmpdir.join("broken.bn.json")
    document = {
        "name": "broken",
        "nodes": [{"id": "a", "cpt": [0.5, 0.6]}, {"id": "b", "parents": ["a", "c"], "cpt": [0.5, 0.5]}],
    }
    path.write(json.dumps(document))
    return str(path)


class TestCommandLine:
    def test_help(self):
        result = CliRunner().invoke(cli, ["--help"])
        assert result.exit_code == 0
        for command in ("query", "dbn", "sensitivity", "decide", "hazid", "validate"):
            assert command in result.output

    def test_version(self):
        result = CliRunner().invoke(cli, ["--version"])
        assert riskbn.__version__ in result.output

    def test_subcommand_help(self):
        result = CliRunner().invoke(cli, ["dbn", "--help"])
        assert "--steps" in result.output
        assert "--allow-long" in result.output

    def test_unknown_flag(self, capsys):
        code, _, _ = invoke(capsys, "query", "--scenario", "seabed", "--bogus")
        assert code == 1

    def test_needs_one_source(self, capsys, broken_model):
        assert invoke(capsys, "query")[0] == 1
        code, _, err = invoke(capsys, "query", "--scenario", "seabed", "--model", broken_model)
        assert code == 1
        assert "exactly one" in err

    def test_missing_model_file(self, capsys, tmpdir):
        code, _, _ = invoke(capsys, "query", "--model", str(tmpdir.join("missing.json")))
        assert code == 2


class TestQuery:
    def test_prior(self, capsys):
        code, out, _ = invoke(capsys, "query", "--scenario", "seabed", "-t", "loss_of_eely")
        assert code == 0
        document = json.loads(out)
        assert document["posterior"]["loss_of_eely"]["TRUE"] == pytest.approx(0.355287, abs=5e-6)
        assert document["p_evidence"] == pytest.approx(1.0)

    def test_certain_loss(self, capsys):
        evidence = "failure_of_autonomous_control=TRUE,failure_of_remote_control=TRUE"
        code, out, _ = invoke(capsys, "query", "--scenario", "confined", "-e", evidence, "-t", "loss_of_eely")
        assert code == 0
        assert json.loads(out)["posterior"]["loss_of_eely"]["TRUE"] == pytest.approx(1.0, abs=1e-12)

    def test_default_targets_skip_evidence(self, capsys):
        code, out, _ = invoke(capsys, "query", "--scenario", "seabed", "-e", "leakage=TRUE")
        posterior = json.loads(out)["posterior"]
        assert code == 0
        assert len(posterior) == 21
        assert "leakage" not in posterior

    def test_sampler_is_deterministic(self, capsys):
        args = ("query", "--scenario", "seabed", "-t", "loss_of_eely", "--method", "lw", "--samples", "2000")
        first, second = invoke(capsys, *args), invoke(capsys, *args)
        assert first[0] == 0
        assert first[1] == second[1]
        assert "stderr" in json.loads(first[1])

    def test_inconsistent_evidence(self, capsys):
        evidence = "failure_of_thruster_module=TRUE,failure_of_propulsion_system=FALSE"
        code, _, err = invoke(capsys, "query", "--scenario", "seabed", "-e", evidence, "-t", "loss_of_eely")
        assert code == 3
        assert err.startswith("Error:")

    def test_bad_evidence(self, capsys):
        code, _, _ = invoke(capsys, "query", "--scenario", "seabed", "-e", "leakage=maybe")
        assert code == 1

    def test_output_file(self, capsys, tmpdir):
        path = str(tmpdir.join("posterior.json"))
        code, out, _ = invoke(capsys, "query", "--scenario", "seabed", "-t", "leakage", "-o", path)
        assert code == 0
        assert out == ""
        with open(path, encoding="utf-8") as infile:
            assert json.load(infile)["posterior"]["leakage"]["TRUE"] == pytest.approx(0.05)

    def test_unwritable_output(self, capsys, tmpdir):
        path = os.path.join(str(tmpdir), "missing", "posterior.json")
        assert invoke(capsys, "query", "--scenario", "seabed", "-t", "leakage", "-o", path)[0] == 1


class TestDbn:
    def test_csv(self, capsys):
        code, out, _ = invoke(capsys, "dbn", "--scenario", "seabed", "--steps", "2")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "step,node,state,probability"
        assert len(lines) == 1 + 2 * 5 * 2

    def test_json(self, capsys):
        code, out, _ = invoke(
            capsys, "dbn", "--scenario", "confined", "--steps", "3", "--monitor", "loss_of_eely", "--format", "json"
        )
        document = json.loads(out)
        assert code == 0
        assert document["steps"] == 3
        assert len(document["trajectory"]["loss_of_eely"]["TRUE"]) == 3

    def test_step_cap(self, capsys):
        code, _, err = invoke(capsys, "dbn", "--scenario", "seabed", "--steps", "1001")
        assert code == 1
        assert "1000" in err

    def test_model_file(self, capsys, tmpdir):
        path = str(tmpdir.join("seabed.bn.json"))
        dump_network(riskbn.scenario("seabed").static, path)
        from_file = invoke(capsys, "dbn", "--model", path, "--steps", "4")
        bundled = invoke(capsys, "dbn", "--scenario", "seabed", "--steps", "4")
        assert from_file[0] == 0
        assert from_file[1] == bundled[1]


class TestSensitivity:
    def test_roots_only_top(self, capsys):
        code, out, _ = invoke(capsys, "sensitivity", "--scenario", "seabed", "--roots-only", "--top", "3")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "rank,node,state,parent_config,baseline,low,high,spread"
        assert len(lines) == 4

    def test_deterministic_with_svg(self, capsys, tmpdir):
        first_svg, second_svg = str(tmpdir.join("first.svg")), str(tmpdir.join("second.svg"))
        args = ("sensitivity", "--scenario", "confined", "--roots-only", "--top", "5")
        first = invoke(capsys, *args, "--svg", first_svg)
        second = invoke(capsys, *args, "--svg", second_svg)
        assert first[1] == second[1]
        with open(first_svg, "rb") as a, open(second_svg, "rb") as b:
            assert a.read() == b.read()

    def test_nodes(self, capsys):
        code, out, _ = invoke(capsys, "sensitivity", "--scenario", "seabed", "--roots-only", "--nodes", "--top", "2")
        assert code == 0
        assert out.splitlines()[0] == "rank,node,spread"

    def test_invalid_sweep(self, capsys):
        assert invoke(capsys, "sensitivity", "--scenario", "seabed", "--sweep", "2")[0] == 1


class TestDecide:
    def test_single_call(self, capsys):
        code, out, _ = invoke(capsys, "decide", "--scenario", "seabed")
        policy = json.loads(out)
        assert code == 0
        assert set(policy) == {"a_s", "v_s", "c_s", "s_c", "eu"}

    def test_abort_override(self, capsys):
        code, out, _ = invoke(
            capsys,
            "decide",
            "--scenario",
            "confined",
            "--abort-above",
            "0.5",
            "-e",
            "",
            "-e",
            "failure_of_autonomous_control=TRUE",
        )
        policies = json.loads(out)
        assert code == 0
        assert len(policies) == 2
        assert policies[1]["c_s"] == "abort"


class TestHazid:
    def test_csv(self, capsys):
        code, out, _ = invoke(capsys, "hazid", "--scenario", "confined")
        assert code == 0
        assert len(out.splitlines()) == 13

    def test_ranked_markdown(self, capsys):
        code, out, _ = invoke(capsys, "hazid", "--scenario", "seabed", "--rank", "--format", "markdown")
        assert code == 0
        assert out.splitlines()[2].endswith("| 18 |")

    def test_pha_file(self, capsys, tmpdir):
        path = tmpdir.join("pha.csv")
        path.write("scenario,hazard,event,causes,consequences,freq,conseq,detect\nseabed,h,e,c,q,2,3,3\n")
        code, out, _ = invoke(capsys, "hazid", "--pha", str(path))
        assert code == 0
        assert out.splitlines()[1] == "h,e,c,q,2,3,3,18,seabed"

    def test_unsupported_format(self, capsys):
        assert invoke(capsys, "hazid", "--scenario", "seabed", "--format", "xlsx")[0] == 1

    def test_needs_one_source(self, capsys):
        assert invoke(capsys, "hazid")[0] == 1


class TestValidate:
    def test_bundled(self, capsys):
        code, out, _ = invoke(capsys, "validate", "--scenario", "confined")
        assert code == 0
        assert json.loads(out) == {"valid": True, "violations": []}

    def test_broken_model(self, capsys, broken_model):
        code, out, _ = invoke(capsys, "validate", "--model", broken_model)
        report = json.loads(out)
        assert code == 2
        assert not report["valid"]
        assert {v["kind"] for v in report["violations"]} == {"ColumnNotNormalized", "UnknownParent"}

    def test_malformed_json(self, capsys, tmpdir):
        path = tmpdir.join("bad.json")
        path.write("{ nodes: ")
        assert invoke(capsys, "validate", "--model", str(path))[0] == 2

    def test_missing_model_file(self, capsys, tmpdir):
        code, _, err = invoke(capsys, "validate", "--model", str(tmpdir.join("missing.json")))
        assert code == 2
        assert "Cannot read model" in err


@pytest.mark.parametrize(
    "args",
    [
        ("dbn", "--scenario", "confined", "--steps", "25"),
        ("dbn", "--scenario", "seabed", "--steps", "5", "--format", "json"),
        ("decide", "--scenario", "seabed", "-e", "", "-e", "leakage=TRUE", "-e", "leakage=TRUE"),
        ("hazid", "--scenario", "seabed", "--rank"),
        ("hazid", "--scenario", "confined", "--format", "markdown"),
        ("validate", "--scenario", "seabed"),
    ],
)
def test_repeated_runs_are_byte_identical(capsys, monkeypatch, args):
    monkeypatch.setenv("RISKBN_SEED", "7")
    first, second = invoke(capsys, *args), invoke(capsys, *args)
    assert first[0] == 0
    assert first[1] != ""
    assert first[1].encode("utf-8") == second[1].encode("utf-8")
