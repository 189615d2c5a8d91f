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
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import riskbn
from riskbn import (
    Cpt,
    Evidence,
    NodeSpec,
    build_network,
    cpt_lookup,
    dump_network,
    load_network,
    noisy_or,
    validate,
)
from riskbn._core.network import Network, network_from_dict, parse_model


def chain():
    """a -> b -> c, all binary."""
    specs = [NodeSpec("a"), NodeSpec("b", parents=["a"]), NodeSpec("c", parents=["b"])]
    cpts = [Cpt([0.3, 0.7]), Cpt([[0.9, 0.2], [0.1, 0.8]]), Cpt([[0.6, 0.05], [0.4, 0.95]])]
    return build_network(specs, cpts, name="chain")


class TestBuildNetwork:
    def setup_method(self):
        self.network = chain()

    def test_names_in_topological_order(self):
        specs = [NodeSpec("c", parents=["b"]), NodeSpec("b", parents=["a"]), NodeSpec("a")]
        cpts = [Cpt([[0.6, 0.05], [0.4, 0.95]]), Cpt([[0.9, 0.2], [0.1, 0.8]]), Cpt([0.3, 0.7])]
        network = build_network(specs, cpts)
        assert network.names == ["a", "b", "c"]
        assert network.declaration_index("c") == 0

    def test_ties_follow_declaration_order(self):
        specs = [NodeSpec("z"), NodeSpec("y"), NodeSpec("x", parents=["y", "z"])]
        cpts = [Cpt([0.5, 0.5]), Cpt([0.5, 0.5]), Cpt([[1, 1, 1, 0], [0, 0, 0, 1]])]
        assert build_network(specs, cpts).names == ["z", "y", "x"]

    def test_structure_helpers(self):
        network = self.network
        assert network.parents("b") == ("a",)
        assert network.children("b") == ("c",)
        assert network.cardinality("a") == 2
        assert network.state_index("a", "FALSE") == 1
        assert network.markov_blanket("b") == {"a", "c"}
        assert network.joint_size == 8

    def test_d_separation(self):
        assert not self.network.d_separated("a", "c")
        assert self.network.d_separated("a", "c", ["b"])

    def test_parent_configuration_round_trip(self):
        network = riskbn.scenario("seabed").static
        for column in range(8):
            config = network.parent_configuration("environmental_complexity", column)
            assert network.column_index("environmental_complexity", dict(config)) == column

    def test_replace_cpt(self):
        replaced = self.network.replace_cpt("a", Cpt([0.5, 0.5]))
        assert cpt_lookup(replaced, "a", "TRUE", {}) == 0.5
        assert cpt_lookup(self.network, "a", "TRUE", {}) == 0.3

    def test_replace_cpt_checks_normalization(self):
        with pytest.raises(riskbn.ColumnNotNormalized):
            self.network.replace_cpt("a", Cpt([0.5, 0.6]))

    def test_replacement_shares_the_arc_graph(self):
        replaced = self.network.replace_cpt("a", Cpt([0.5, 0.5]))
        assert replaced.graph is self.network.graph
        assert sorted(self.network.graph.edges) == [("a", "b"), ("b", "c")]

    def test_joint_table_is_shared_and_read_only(self):
        network = chain()
        with ThreadPoolExecutor(max_workers=4) as pool:
            tables = list(pool.map(lambda _: network.joint_table(), range(8)))
        assert all(table is tables[0] for table in tables)
        assert not tables[0].flags.writeable
        assert tables[0].sum() == pytest.approx(1.0, abs=1e-12)
        assert tables[0][0, 0, 0] == pytest.approx(0.3 * 0.9 * 0.6, abs=1e-15)


class TestValidation:
    def test_cycle(self):
        specs = [NodeSpec("a", parents=["b"]), NodeSpec("b", parents=["a"])]
        cpts = [Cpt([[0.5, 0.5], [0.5, 0.5]])] * 2
        with pytest.raises(riskbn.CycleDetected) as error:
            build_network(specs, cpts)
        assert set(error.value.cycle) == {"a", "b"}

    def test_shape_mismatch(self):
        specs = [NodeSpec("a"), NodeSpec("b", parents=["a"])]
        with pytest.raises(riskbn.CptShapeMismatch) as error:
            build_network(specs, [Cpt([0.5, 0.5]), Cpt([0.5, 0.5])])
        assert (error.value.expected, error.value.got) == (4, 2)

    def test_column_not_normalized_reports_residual(self):
        network = Network([NodeSpec("a")], [Cpt([0.5, 0.6])])
        violations = validate(network)
        assert [v.kind for v in violations] == ["ColumnNotNormalized"]
        assert np.isclose(violations[0].residual, 0.1)

    def test_tolerance(self):
        build_network([NodeSpec("a")], [Cpt([0.5, 0.5 + 1e-10])])
        with pytest.raises(riskbn.ColumnNotNormalized):
            build_network([NodeSpec("a")], [Cpt([0.5, 0.5 + 1e-8])])

    def test_reports_every_violation(self):
        specs = [NodeSpec("a"), NodeSpec("a"), NodeSpec("b", parents=["missing"]), NodeSpec("c", states=["on"])]
        cpts = [Cpt([0.5, 0.5]), Cpt([0.5, 0.5]), Cpt([0.5, 0.5]), Cpt([1.0])]
        kinds = {v.kind for v in validate(Network(specs, cpts))}
        assert kinds == {"DuplicateNode", "UnknownParent", "InvalidNodeSpec"}

    def test_bundled_models_are_valid(self):
        for label in ("seabed", "confined"):
            assert validate(riskbn.scenario(label).static) == []


class TestCptLookup:
    def test_lookup(self):
        network = chain()
        assert cpt_lookup(network, "b", "TRUE", {"a": "FALSE"}) == 0.2
        assert cpt_lookup(network, "c", "FALSE", {"b": "TRUE"}) == 0.4

    def test_missing_parent(self):
        with pytest.raises(riskbn.MissingParentAssignment):
            cpt_lookup(chain(), "b", "TRUE", {})

    def test_unknown_state(self):
        with pytest.raises(riskbn.UnknownState):
            cpt_lookup(chain(), "b", "MAYBE", {"a": "TRUE"})


class TestNoisyOr:
    def test_single_parent(self):
        table = noisy_or([("a", ("TRUE", "FALSE"))], {"a": 0.8}, leak=0.1).table(2)
        assert np.allclose(table[0], [1 - 0.9 * 0.2, 0.1])

    def test_two_parents(self):
        binary = ("TRUE", "FALSE")
        table = noisy_or([("a", binary), ("b", binary)], {"a": 0.5, "b": 0.4}).table(2)
        assert np.allclose(table[0], [1 - 0.5 * 0.6, 0.5, 0.4, 0.0])
        assert np.allclose(table.sum(axis=0), 1.0)

    def test_state_weights(self):
        table = noisy_or([("mode", ("low", "mid", "high"))], {"mode": {"low": 0.2, "high": 0.05}}).table(2)
        assert np.allclose(table[0], [0.2, 0.0, 0.05])

    def test_missing_weight(self):
        with pytest.raises(riskbn.InvalidNodeSpec):
            noisy_or([("a", ("TRUE", "FALSE"))], {})


class TestEvidence:
    def test_parse(self):
        evidence = Evidence.parse("leakage=TRUE, dvl_failure=FALSE")
        assert dict(evidence) == {"leakage": "TRUE", "dvl_failure": "FALSE"}
        assert str(evidence) == "leakage=TRUE,dvl_failure=FALSE"

    @pytest.mark.parametrize("text", ["leakage", "leakage=", "=TRUE", "a=TRUE,a=FALSE"])
    def test_parse_errors(self, text):
        with pytest.raises(riskbn.InvalidQuery):
            Evidence.parse(text)

    def test_states_are_case_sensitive(self):
        with pytest.raises(riskbn.UnknownState):
            Evidence.parse("a=true").check(chain())


class TestModelFiles:
    def test_dump_and_load(self, tmpdir):
        path = str(tmpdir.join("chain.json"))
        network = chain()
        text = dump_network(network, path)
        loaded = load_network(path)
        assert loaded.names == network.names
        assert all(loaded.cpt(name) == network.cpt(name) for name in network.names)
        assert dump_network(loaded) == text

    def test_noisy_or_block(self):
        document = {
            "nodes": [
                {"id": "a", "cpt": [0.5, 0.5]},
                {"id": "b", "parents": ["a"], "noisy_or": {"leak": 0.1, "weights": {"a": 0.5}}},
            ]
        }
        network = network_from_dict(document)
        assert np.isclose(cpt_lookup(network, "b", "TRUE", {"a": "TRUE"}), 0.55)

    def test_parse_error_has_line(self):
        with pytest.raises(riskbn.ParseError) as error:
            parse_model('{\n  "nodes": [\n    oops\n  ]\n}')
        assert error.value.line == 3

    def test_node_without_table(self):
        with pytest.raises(riskbn.ParseError):
            network_from_dict({"nodes": [{"id": "a"}]})

    def test_unreadable_file(self, tmpdir):
        with pytest.raises(riskbn.ModelUnreadable) as error:
            load_network(str(tmpdir.join("missing.bn.json")))
        assert isinstance(error.value, riskbn.ModelError)
