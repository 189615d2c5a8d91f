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
"""Posterior inference: variable elimination, enumeration and likelihood weighting."""

from dataclasses import dataclass, field
import logging
from math import log

import numpy as np
import pandas as pd

from riskbn._core.errors import (
    AllWeightsZero,
    InconsistentEvidence,
    InvalidQuery,
    RiskbnError,
    StateSpaceTooLarge,
)
from riskbn._core.factor import Factor, product_of
from riskbn._core.network import Evidence

logger = logging.getLogger(__name__)

# Largest joint state space the enumeration oracle will build.
ENUMERATION_LIMIT = 2**26

_SAMPLE_CHUNK = 2**17


@dataclass(frozen=True)
class Query:
    """Target nodes and the evidence to condition on."""

    targets: tuple
    evidence: Evidence = field(default_factory=Evidence)

    def __post_init__(self):
        targets = (self.targets,) if isinstance(self.targets, str) else tuple(self.targets)
        object.__setattr__(self, "targets", targets)
        if not isinstance(self.evidence, Evidence):
            object.__setattr__(self, "evidence", Evidence(self.evidence))

    def check(self, network):
        if not self.targets:
            raise InvalidQuery("A query needs at least one target")
        if len(set(self.targets)) != len(self.targets):
            raise InvalidQuery("Query targets repeat a node: {targets}".format(targets=list(self.targets)))
        try:
            for target in self.targets:
                network.node(target)
            self.evidence.check(network)
        except RiskbnError as e:
            raise InvalidQuery(str(e))
        observed = [target for target in self.targets if target in self.evidence]
        if observed:
            raise InvalidQuery("Targets {targets} are also observed".format(targets=observed))
        return self


@dataclass
class Posterior:
    """Per-target posterior distributions.

    Attributes:
        distributions (dict): {node: numpy array over the node's states}.
        states (dict): {node: tuple of state labels}.
        log_evidence (float): Natural log of P(evidence).
        stderr (dict, optional): Per-state standard errors for sampled
            estimates.
    """

    distributions: dict
    states: dict
    log_evidence: float
    stderr: dict = None

    def probability(self, node, state):
        return float(self.distributions[node][self.states[node].index(state)])

    @property
    def evidence_probability(self):
        return float(np.exp(self.log_evidence))

    def to_dict(self):
        result = {}
        for node, distribution in self.distributions.items():
            result[node] = {state: float(p) for state, p in zip(self.states[node], distribution)}
        return result

    def to_frame(self):
        rows = []
        for node, distribution in self.distributions.items():
            for i, (state, p) in enumerate(zip(self.states[node], distribution)):
                row = {"node": node, "state": state, "probability": float(p)}
                if self.stderr is not None:
                    row["stderr"] = float(self.stderr[node][i])
                rows.append(row)
        return pd.DataFrame(rows)


def _relevant_nodes(network, query_nodes):
    """Query nodes and their ancestors; everything else sums to one."""
    return network.ancestors(query_nodes)


def _elimination_order(factors, hidden, rank):
    """Min-degree order over ``hidden``; ties go to the earlier declared node."""
    neighbours = {v: set() for v in hidden}
    for factor in factors:
        for v in factor.scope:
            if v in neighbours:
                neighbours[v].update(u for u in factor.scope if u != v)
    remaining = set(hidden)
    order = []
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbours[v]), rank(v)))
        order.append(var)
        remaining.discard(var)
        for u in neighbours[var]:
            if u in neighbours:
                neighbours[u].discard(var)
                neighbours[u].update(w for w in neighbours[var] if w != u)
        del neighbours[var]
    return order


def eliminate(factors, keep, rank):
    """Sum every variable outside ``keep`` out of a factor product.

    Args:
        factors (list of Factor): Factors whose product is the joint.
        keep (list of str): Variables left in the result.
        rank (callable): Tie-break key for variables of equal degree.

    Returns:
        Factor: Unnormalized factor over ``keep``, in ``keep`` order.
    """
    factors = list(factors)
    hidden = {v for factor in factors for v in factor.scope} - set(keep)
    order = _elimination_order(factors, hidden, rank)
    logger.debug("Elimination order: %s", order)
    for var in order:
        involved = [f for f in factors if var in f]
        factors = [f for f in factors if var not in f]
        factors.append(product_of(involved).marginalize([var]))
    result = product_of(factors)
    missing = [v for v in keep if v not in result]
    if missing:
        raise InvalidQuery("Variables {missing} do not appear in any factor".format(missing=missing))
    return result.transpose(tuple(keep))


def joint_ve(network, targets, evidence=None):
    """Joint posterior of several targets by variable elimination.

    Returns:
        (Factor, float): The normalized joint over ``targets`` and the log
            probability of the evidence.
    """
    query = Query(targets, evidence or Evidence()).check(network)
    assignment = query.evidence.indices(network)
    relevant = _relevant_nodes(network, list(query.targets) + list(assignment))
    factors = [Factor.from_cpt(network, name).reduce(assignment) for name in network.names if name in relevant]
    joint = eliminate(factors, query.targets, network.declaration_index)
    total = joint.total()
    if not total > 0.0:
        raise InconsistentEvidence(query.evidence)
    return joint.normalize(), log(total)


def _marginals(joint, targets):
    distributions = {}
    for target in targets:
        others = [v for v in joint.scope if v != target]
        distributions[target] = joint.marginalize(others).values
    return distributions


def posterior_ve(network, query):
    """Exact posterior of the query targets by variable elimination.

    Nodes that are neither queried, observed nor ancestors of either are
    dropped before elimination. The remaining hidden nodes are eliminated
    in min-degree order with ties broken by declaration index.

    Args:
        network (Network): The network.
        query (Query): Targets and evidence.

    Returns:
        Posterior
    """
    query = query.check(network)
    # One elimination per target.
    distributions, log_evidence = {}, None
    for target in query.targets:
        joint, log_evidence = joint_ve(network, [target], query.evidence)
        distributions[target] = joint.values
    states = {target: network.states(target) for target in query.targets}
    return Posterior(distributions, states, log_evidence)


def prior_marginals(network):
    """Marginal distribution of every node with no evidence."""
    return posterior_ve(network, Query(tuple(network.names)))


def posterior_enumeration(network, query):
    """Exact posterior by summing the full joint distribution.

    Only meant as an independent check of ``posterior_ve``.

    Raises:
        StateSpaceTooLarge: When the joint has more than 2**26 entries.
    """
    query = query.check(network)
    size = network.joint_size
    if size > ENUMERATION_LIMIT:
        raise StateSpaceTooLarge(size, ENUMERATION_LIMIT)
    names = network.names
    joint = Factor(names, network.joint_table()).reduce(query.evidence.indices(network))
    total = joint.total()
    if not total > 0.0:
        raise InconsistentEvidence(query.evidence)
    joint = Factor(joint.scope, joint.values / total)
    distributions = _marginals(joint, query.targets)
    states = {target: network.states(target) for target in query.targets}
    return Posterior(distributions, states, log(total))


def _sample_chunk(network, evidence, n, rng):
    samples, weights = {}, np.ones(n)
    for name in network.names:
        table = network.table(name)
        parents = network.parents(name)
        if parents:
            columns = np.ravel_multi_index([samples[p] for p in parents], [network.cardinality(p) for p in parents])
        else:
            columns = np.zeros(n, dtype=np.intp)
        probabilities = table[:, columns]
        if name in evidence:
            state = evidence[name]
            weights *= probabilities[state]
            samples[name] = np.full(n, state, dtype=np.intp)
        else:
            draws = rng.random(n)
            cumulative = np.cumsum(probabilities, axis=0)
            states = (draws[np.newaxis, :] >= cumulative).sum(axis=0)
            samples[name] = np.minimum(states, table.shape[0] - 1)
    return samples, weights


def posterior_lw(network, query, samples, seed):
    """Likelihood weighting estimate with per-state standard errors.

    Evidence nodes are clamped and each sample is weighted by the
    likelihood of the evidence given its sampled parents. The same seed
    always gives the same estimate.

    Args:
        network (Network): The network.
        query (Query): Targets and evidence.
        samples (int): Number of weighted samples.
        seed (int): Seed for ``numpy.random.default_rng``.

    Returns:
        Posterior: With ``stderr`` filled in.
    """
    query = query.check(network)
    if samples < 1:
        raise InvalidQuery("samples must be at least 1, got {samples}".format(samples=samples))
    rng = np.random.default_rng(seed)
    evidence = query.evidence.indices(network)
    cards = {target: network.cardinality(target) for target in query.targets}
    weighted = {target: np.zeros(cards[target]) for target in query.targets}
    squared = {target: np.zeros(cards[target]) for target in query.targets}
    chunks = []
    remaining = samples
    while remaining > 0:
        n = min(remaining, _SAMPLE_CHUNK)
        drawn, weights = _sample_chunk(network, evidence, n, rng)
        chunks.append((weights, {target: drawn[target] for target in query.targets}))
        remaining -= n
    total = sum(float(weights.sum()) for weights, _ in chunks)
    if not total > 0.0:
        raise AllWeightsZero(samples)

    for weights, drawn in chunks:
        for target in query.targets:
            weighted[target] += np.bincount(drawn[target], weights=weights, minlength=cards[target])
    distributions = {target: weighted[target] / total for target in query.targets}
    for weights, drawn in chunks:
        for target in query.targets:
            indicator = drawn[target][np.newaxis, :] == np.arange(cards[target])[:, np.newaxis]
            squared[target] += ((weights * (indicator - distributions[target][:, np.newaxis])) ** 2).sum(axis=1)
    stderr = {target: np.sqrt(squared[target]) / total for target in query.targets}
    states = {target: network.states(target) for target in query.targets}
    logger.debug("Likelihood weighting: %d samples, weight total %.6g", samples, total)
    return Posterior(distributions, states, log(total / samples), stderr)


def evidence_probability(network, evidence):
    """P(evidence) by variable elimination; 1.0 for empty evidence."""
    evidence = Evidence(evidence)
    if not evidence:
        return 1.0
    assignment = evidence.check(network).indices(network)
    relevant = _relevant_nodes(network, list(assignment))
    factors = [Factor.from_cpt(network, name).reduce(assignment) for name in network.names if name in relevant]
    return eliminate(factors, (), network.declaration_index).total()
