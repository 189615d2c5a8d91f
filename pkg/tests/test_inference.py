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
import numpy as np
import pytest

import riskbn
from riskbn import (
    Cpt,
    Evidence,
    NodeSpec,
    Query,
    build_network,
    evidence_probability,
    joint_ve,
    posterior_enumeration,
    posterior_lw,
    posterior_ve,
    prior_marginals,
)
from riskbn._core.inference import _sample_chunk


def chain():
    specs = [NodeSpec("a"), NodeSpec("b", parents=["a"]), NodeSpec("c", parents=["b"])]
    cpts = [Cpt([0.3, 0.7]), Cpt([[0.9, 0.2], [0.1, 0.8]]), Cpt([[0.6, 0.05], [0.4, 0.95]])]
    return build_network(specs, cpts, name="chain")


def random_network(rng, size=8):
    """Random DAG with 2 or 3 states per node and at most 3 parents."""
    specs, cpts = [], []
    for i in range(size):
        n_states = int(rng.integers(2, 4))
        states = ["s{j}".format(j=j) for j in range(n_states)]
        earlier = [spec.id for spec in specs]
        n_parents = int(rng.integers(0, min(3, len(earlier)) + 1))
        parents = [str(p) for p in rng.choice(earlier, size=n_parents, replace=False)] if n_parents else []
        columns = int(np.prod([len(specs[earlier.index(p)].states) for p in parents]))
        table = rng.dirichlet(np.ones(n_states), size=columns).T
        specs.append(NodeSpec("n{i}".format(i=i), states, parents))
        cpts.append(Cpt(table))
    return build_network(specs, cpts, name="random")


def random_query(rng, network, max_evidence=5):
    names = network.names
    picked = rng.choice(len(names), size=int(rng.integers(1, max_evidence + 2)), replace=False)
    target, observed = names[picked[0]], [names[i] for i in picked[1:]]
    evidence = {name: network.states(name)[int(rng.integers(network.cardinality(name)))] for name in observed}
    return Query(target, Evidence(evidence))


def assert_matches_enumeration(network, query):
    try:
        exact = posterior_ve(network, query)
    except riskbn.InconsistentEvidence:
        with pytest.raises(riskbn.InconsistentEvidence):
            posterior_enumeration(network, query)
        return
    oracle = posterior_enumeration(network, query)
    for target in query.targets:
        assert np.max(np.abs(exact.distributions[target] - oracle.distributions[target])) <= 1e-12
    assert abs(exact.log_evidence - oracle.log_evidence) <= 1e-10


class TestVariableElimination:
    def setup_method(self):
        self.network = chain()

    def test_prior(self):
        posterior = posterior_ve(self.network, Query("c"))
        assert np.isclose(posterior.probability("c", "TRUE"), 0.41 * 0.6 + 0.59 * 0.05)
        assert posterior.evidence_probability == 1.0

    def test_diagnostic_query(self):
        posterior = posterior_ve(self.network, Query("a", {"c": "TRUE"}))
        p_c = 0.41 * 0.6 + 0.59 * 0.05
        assert np.isclose(posterior.probability("a", "TRUE"), 0.3 * (0.9 * 0.6 + 0.1 * 0.05) / p_c)
        assert np.isclose(posterior.evidence_probability, p_c)

    def test_joint_posterior(self):
        joint, log_evidence = joint_ve(self.network, ["a", "b"], Evidence({"c": "TRUE"}))
        unnormalized = np.array([[0.27 * 0.6, 0.03 * 0.05], [0.14 * 0.6, 0.56 * 0.05]])
        assert joint.scope == ("a", "b")
        np.testing.assert_allclose(joint.values, unnormalized / 0.2755)
        assert np.isclose(log_evidence, np.log(0.2755))

    def test_distributions_sum_to_one(self):
        marginals = prior_marginals(riskbn.scenario("seabed").static)
        for distribution in marginals.distributions.values():
            assert abs(distribution.sum() - 1.0) <= 1e-9

    def test_observed_target_is_rejected(self):
        with pytest.raises(riskbn.InvalidQuery):
            posterior_ve(self.network, Query("a", {"a": "TRUE"}))

    def test_unknown_node_is_rejected(self):
        with pytest.raises(riskbn.InvalidQuery):
            posterior_ve(self.network, Query("z"))

    def test_inconsistent_evidence(self):
        network = build_network(
            [NodeSpec("a"), NodeSpec("b", parents=["a"])],
            [Cpt([1.0, 0.0]), Cpt([[1.0, 0.5], [0.0, 0.5]])],
        )
        with pytest.raises(riskbn.InconsistentEvidence):
            posterior_ve(network, Query("a", {"b": "FALSE"}))

    def test_evidence_probability(self):
        assert evidence_probability(self.network, {}) == 1.0
        assert np.isclose(evidence_probability(self.network, {"b": "TRUE"}), 0.41)

    def test_bundled_loss_probability(self):
        seabed = posterior_ve(riskbn.scenario("seabed").static, Query("loss_of_eely"))
        confined = posterior_ve(riskbn.scenario("confined").static, Query("loss_of_eely"))
        assert abs(seabed.probability("loss_of_eely", "TRUE") - 0.355287) < 5e-6
        assert abs(confined.probability("loss_of_eely", "TRUE") - 0.433505) < 5e-6

    def test_certain_loss(self):
        network = riskbn.scenario("seabed").static
        query = Query("loss_of_eely", {"failure_of_autonomous_control": "TRUE", "failure_of_remote_control": "TRUE"})
        assert posterior_ve(network, query).probability("loss_of_eely", "TRUE") == pytest.approx(1.0, abs=1e-12)

    def test_to_frame(self):
        frame = posterior_ve(self.network, Query(["a", "c"])).to_frame()
        assert list(frame.columns) == ["node", "state", "probability"]
        assert len(frame) == 4


class TestEnumerationOracle:
    def test_random_networks(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            network = random_network(rng)
            for _ in range(10):
                assert_matches_enumeration(network, random_query(rng, network, max_evidence=3))

    @pytest.mark.parametrize("label", ["seabed", "confined"])
    def test_bundled_models(self, label):
        network = riskbn.scenario(label).static
        rng = np.random.default_rng(11)
        assert_matches_enumeration(network, Query("loss_of_eely"))
        for _ in range(100):
            assert_matches_enumeration(network, random_query(rng, network))

    def test_state_space_limit(self):
        specs = [NodeSpec("n{i}".format(i=i)) for i in range(27)]
        network = build_network(specs, [Cpt([0.5, 0.5])] * 27)
        with pytest.raises(riskbn.StateSpaceTooLarge):
            posterior_enumeration(network, Query("n0"))


class TestLikelihoodWeighting:
    def test_same_seed_same_estimate(self):
        network = riskbn.scenario("seabed").static
        query = Query("loss_of_eely", {"leakage": "TRUE"})
        first = posterior_lw(network, query, 5000, seed=3)
        second = posterior_lw(network, query, 5000, seed=3)
        assert np.array_equal(first.distributions["loss_of_eely"], second.distributions["loss_of_eely"])

    @pytest.mark.parametrize("label", ["seabed", "confined"])
    def test_converges_to_exact(self, label):
        network = riskbn.scenario(label).static
        rng = np.random.default_rng(5)
        queries = [Query("loss_of_eely")] + [random_query(rng, network, max_evidence=2) for _ in range(4)]
        for i, query in enumerate(queries):
            try:
                exact = posterior_ve(network, query)
            except riskbn.InconsistentEvidence:
                continue
            estimate = posterior_lw(network, query, 10**6, seed=i)
            target = query.targets[0]
            error = np.abs(estimate.distributions[target] - exact.distributions[target])
            assert np.all(error <= np.maximum(0.01, 4 * estimate.stderr[target]))

    def test_all_weights_zero(self):
        network = build_network(
            [NodeSpec("a"), NodeSpec("b", parents=["a"])],
            [Cpt([1.0, 0.0]), Cpt([[1.0, 0.5], [0.0, 0.5]])],
        )
        with pytest.raises(riskbn.AllWeightsZero):
            posterior_lw(network, Query("a", {"b": "FALSE"}), 100, seed=0)

    def test_needs_samples(self):
        with pytest.raises(riskbn.InvalidQuery):
            posterior_lw(chain(), Query("a"), 0, seed=0)


class TestProperties:
    @pytest.mark.parametrize("label", ["seabed", "confined"])
    def test_loss_grows_with_thruster_failure(self, label):
        network = riskbn.scenario(label).static
        losses = []
        for p in np.linspace(0.0, 1.0, 11):
            swept = network.replace_cpt("failure_of_thruster_module", Cpt([p, 1.0 - p]))
            losses.append(posterior_ve(swept, Query("loss_of_eely")).probability("loss_of_eely", "TRUE"))
        assert np.all(np.diff(losses) >= -1e-12)
        assert losses[-1] > losses[0]

    def test_sampler_is_unbiased(self):
        network = chain()
        query = Query("a", {"c": "TRUE"})
        exact = posterior_ve(network, query).probability("a", "TRUE")
        estimates = np.array(
            [posterior_lw(network, query, 2000, seed=seed).probability("a", "TRUE") for seed in range(50)]
        )
        standard_error = estimates.std(ddof=1) / np.sqrt(len(estimates))
        assert abs(estimates.mean() - exact) <= 3 * standard_error

    def test_root_evidence_gives_constant_weights(self):
        network = chain()
        _, weights = _sample_chunk(network, {"a": 0}, 1000, np.random.default_rng(0))
        assert np.all(weights == 0.3)
        estimate = posterior_lw(network, Query("c", {"a": "TRUE"}), 1000, seed=1)
        assert estimate.evidence_probability == pytest.approx(0.3, abs=1e-12)
