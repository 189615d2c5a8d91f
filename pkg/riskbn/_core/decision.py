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
"""Decision networks: decision and utility nodes on top of a chance network.

Decision nodes live in the chance network as root nodes with a uniform
table, so choosing an alternative is the same as observing it.
"""

from dataclasses import dataclass
import itertools
import json
import logging
from math import isfinite, prod

import numpy as np

from riskbn._core.errors import (
    AlternativeSpaceTooLarge,
    ConflictingOverrides,
    IncompleteAssignment,
    InconsistentEvidence,
    InvalidNodeSpec,
    InvalidQuery,
    ParseError,
    UnknownNode,
    UnknownState,
)
from riskbn._core.factor import Factor
from riskbn._core.inference import Query, evidence_probability, joint_ve, posterior_ve
from riskbn._core.network import TRUE, Evidence, network_from_dict, read_model
from riskbn._core.options import options

logger = logging.getLogger(__name__)

# Largest joint alternative space optimal_policy will enumerate.
ALTERNATIVE_LIMIT = 10**6

# Relative margin a later assignment needs to replace the current best.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DecisionNode:
    """A controllable node and the nodes observed before it is set."""

    id: str
    alternatives: tuple
    parents: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "parents", tuple(self.parents))
        if len(self.alternatives) < 2 or len(set(self.alternatives)) != len(self.alternatives):
            raise InvalidNodeSpec(
                "Decision '{id}' needs at least two distinct alternatives, got {alternatives}".format(
                    id=self.id, alternatives=list(self.alternatives)
                )
            )


@dataclass(frozen=True)
class UtilityNode:
    """Utility per joint configuration of ``parents`` (first parent slowest)."""

    id: str
    parents: tuple
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "table", tuple(float(u) for u in self.table))
        if not all(isfinite(u) for u in self.table):
            raise InvalidNodeSpec("Utility '{id}' has non-finite values".format(id=self.id))

    def factor(self, network):
        shape = [network.cardinality(parent) for parent in self.parents]
        return Factor(self.parents, np.array(self.table).reshape(shape))

    def scaled(self, a, b=0.0):
        """The affine map a * u + b of this utility."""
        return UtilityNode(self.id, self.parents, [a * u + b for u in self.table])


@dataclass
class Policy:
    """One alternative per decision and its expected utility."""

    choices: dict
    expected_utility: float

    def __getitem__(self, decision):
        return self.choices[decision]

    def same_choices(self, other):
        return other is not None and self.choices == other.choices

    def to_dict(self):
        result = dict(self.choices)
        result["eu"] = self.expected_utility
        return result


@dataclass(frozen=True)
class DwellGuard:
    """Consecutive calls a new recommendation must persist before it is emitted."""

    steps: int = 3

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidQuery("Dwell guard must be at least 1, got {steps}".format(steps=self.steps))


@dataclass(frozen=True)
class SafetyOverride:
    """Forces ``forced`` alternatives whenever ``predicate(dn, evidence)`` holds."""

    name: str
    predicate: object
    forced: dict

    def applies(self, dn, evidence):
        return bool(self.predicate(dn, evidence))


@dataclass(frozen=True)
class Recommendation:
    """One entry of a recommendation log."""

    candidate: Policy
    emitted: Policy
    overridden: bool = False


class DecisionNetwork:
    """A chance network plus decision and utility nodes.

    Args:
        network (Network): Chance network that already contains every
            decision as a root node whose states are its alternatives.
        decisions (list of DecisionNode): In declaration order.
        utilities (list of UtilityNode): Summed into the expected utility.
        metadata (dict, optional): Free-form key/value pairs.
    """

    def __init__(self, network, decisions, utilities, metadata=None):
        self.network = network
        self.decisions = tuple(decisions)
        self.utilities = tuple(utilities)
        self.metadata = dict(metadata or {})
        self._check()

    def _check(self):
        if not self.decisions:
            raise InvalidNodeSpec("A decision network needs at least one decision")
        for decision in self.decisions:
            self.network.node(decision.id)
            if self.network.parents(decision.id):
                raise InvalidNodeSpec("Decision '{id}' must be a root of the chance network".format(id=decision.id))
            if self.network.states(decision.id) != decision.alternatives:
                raise InvalidNodeSpec(
                    "Decision '{id}' alternatives differ from its network states".format(id=decision.id)
                )
            for parent in decision.parents:
                self.network.node(parent)
        for utility in self.utilities:
            for parent in utility.parents:
                self.network.node(parent)
            expected = prod(self.network.cardinality(parent) for parent in utility.parents)
            if len(utility.table) != expected:
                raise InvalidNodeSpec(
                    "Utility '{id}' has {got} entries, expected {expected}".format(
                        id=utility.id, got=len(utility.table), expected=expected
                    )
                )

    def __repr__(self):
        return "DecisionNetwork(name='{name}', decisions={decisions})".format(
            name=self.network.name, decisions=[d.id for d in self.decisions]
        )

    @property
    def names(self):
        return [decision.id for decision in self.decisions]

    def decision(self, name):
        for decision in self.decisions:
            if decision.id == name:
                return decision
        raise UnknownNode(name)

    def alternative_count(self, fixed=()):
        return prod(len(d.alternatives) for d in self.decisions if d.id not in fixed)

    def with_utilities(self, utilities):
        return DecisionNetwork(self.network, self.decisions, utilities, self.metadata)

    def check_fragment(self, fragment):
        for name, alternative in fragment.items():
            decision = self.decision(name)
            if alternative not in decision.alternatives:
                raise UnknownState(name, alternative, decision.alternatives)


def _utility_of(dn, utility, clamped):
    assignment = clamped.indices(dn.network)
    free = [parent for parent in utility.parents if parent not in clamped]
    table = utility.factor(dn.network).reduce(assignment)
    if not free:
        return float(table.values)
    joint, _ = joint_ve(dn.network, free, clamped)
    return float((joint.values * table.transpose(tuple(free)).values).sum())


def expected_utility(dn, assignment, evidence=None):
    """Expected utility of one alternative per decision.

    Sum over utility nodes of the utility of each parent configuration
    weighted by its posterior given the evidence and the clamped decisions.

    Args:
        dn (DecisionNetwork): The decision network.
        assignment (dict): {decision: alternative} for every decision.
        evidence (Evidence, optional): Observations of chance nodes.

    Returns:
        float
    """
    evidence = Evidence(evidence)
    missing = [name for name in dn.names if name not in assignment]
    if missing:
        raise IncompleteAssignment(missing)
    dn.check_fragment(assignment)
    observed = [name for name in dn.names if name in evidence]
    if observed:
        raise InvalidQuery("Decisions {names} are set through the assignment, not evidence".format(names=observed))
    clamped = evidence.merge({name: assignment[name] for name in dn.names})
    if not evidence_probability(dn.network, clamped) > 0.0:
        raise InconsistentEvidence(clamped)
    return sum(_utility_of(dn, utility, clamped) for utility in dn.utilities)


def optimal_policy(dn, evidence=None, fixed=None):
    """Assignment with the largest expected utility.

    Every joint assignment is enumerated in lexicographic order of the
    decision declaration order and alternative index; a later assignment
    replaces the best only when it is larger by more than 1e-12 relative,
    so ties go to the first one.

    Args:
        dn (DecisionNetwork): The decision network.
        evidence (Evidence, optional): Observations of chance nodes.
        fixed (dict, optional): Decisions whose alternative is forced.

    Returns:
        Policy
    """
    fixed = dict(fixed or {})
    dn.check_fragment(fixed)
    size = dn.alternative_count(fixed)
    if size > ALTERNATIVE_LIMIT:
        raise AlternativeSpaceTooLarge(size, ALTERNATIVE_LIMIT)
    evidence = Evidence(evidence)
    if not evidence_probability(dn.network, evidence.merge(fixed)) > 0.0:
        raise InconsistentEvidence(evidence)
    free = [d for d in dn.decisions if d.id not in fixed]
    best = None
    for alternatives in itertools.product(*(d.alternatives for d in free)):
        assignment = dict(fixed)
        assignment.update(zip((d.id for d in free), alternatives))
        choices = {name: assignment[name] for name in dn.names}
        try:
            value = expected_utility(dn, choices, evidence)
        except InconsistentEvidence:
            # the observations rule this alternative out
            continue
        if best is None or value > best.expected_utility + TIE_TOLERANCE * max(1.0, abs(best.expected_utility)):
            best = Policy(choices, value)
    logger.debug("Best of %d assignments: %s", size, best)
    return best


def _forced(dn, evidence, overrides):
    forced = {}
    for override in overrides:
        if not override.applies(dn, evidence):
            continue
        dn.check_fragment(override.forced)
        logger.info("Safety override '%s' applies", override.name)
        for decision, alternative in override.forced.items():
            if forced.get(decision, alternative) != alternative:
                raise ConflictingOverrides(decision, [forced[decision], alternative])
            forced[decision] = alternative
    return forced


def _streak(history, candidate):
    """Calls in a row, this one included, that recommended ``candidate``."""
    count = 1
    for record in reversed(history):
        if not record.candidate.same_choices(candidate):
            break
        count += 1
    return count


def recommend_with_guards(dn, evidence, history, guard=None, overrides=()):
    """Recommend a policy, holding back switches until they persist.

    Overrides whose predicate holds are applied first and are emitted
    right away. Otherwise the optimal policy replaces the previously
    emitted one only after it has been the candidate for ``guard``
    consecutive calls; until then the previous choices are emitted with
    their expected utility under the current evidence.

    Args:
        dn (DecisionNetwork): The decision network.
        evidence (Evidence): Current observations.
        history (list of Recommendation): Caller-owned log, appended to.
        guard (DwellGuard, optional): Defaults to ``decision.dwell_guard``.
        overrides (list of SafetyOverride): Checked in order.

    Returns:
        Policy: The emitted policy.
    """
    if guard is None:
        guard = DwellGuard(options.get_option("decision.dwell_guard"))
    elif not isinstance(guard, DwellGuard):
        guard = DwellGuard(guard)
    evidence = Evidence(evidence)
    forced = _forced(dn, evidence, overrides)
    previous = history[-1].emitted if history else None

    if forced:
        candidate = optimal_policy(dn, evidence, fixed=forced)
        record = Recommendation(candidate, candidate, overridden=True)
    else:
        candidate = optimal_policy(dn, evidence)
        if previous is None or candidate.same_choices(previous) or _streak(history, candidate) >= guard.steps:
            emitted = candidate
        else:
            emitted = Policy(dict(previous.choices), expected_utility(dn, previous.choices, evidence))
            logger.debug("Switch to %s held back by the dwell guard", candidate.choices)
        record = Recommendation(candidate, emitted)
    history.append(record)
    return record.emitted


class GuardedRecommender:
    """Keeps the recommendation log of one decision stream.

    Not safe to share between threads; use one recommender per stream.
    """

    def __init__(self, dn, guard=None, overrides=()):
        self.dn = dn
        self.guard = guard
        self.overrides = list(overrides)
        self.history = []

    def recommend(self, evidence=None):
        return recommend_with_guards(self.dn, evidence, self.history, self.guard, self.overrides)

    @property
    def switches(self):
        emitted = [record.emitted for record in self.history]
        return sum(not a.same_choices(b) for a, b in zip(emitted, emitted[1:]))


def loss_probability_above(threshold, forced, node="loss_of_eely", state=TRUE):
    """Override forcing ``forced`` when P(node = state | evidence) > threshold.

    Decisions that are not observed are averaged over their alternatives.
    """

    def predicate(dn, evidence):
        evidence = Evidence(evidence)
        if node in evidence:
            return evidence[node] == state and threshold < 1.0
        posterior = posterior_ve(dn.network, Query((node,), evidence))
        return posterior.probability(node, state) > threshold

    name = "P({node}={state}) > {threshold}".format(node=node, state=state, threshold=threshold)
    return SafetyOverride(name, predicate, dict(forced))


def _merge_chance_nodes(nodes, extra):
    merged = [dict(node) for node in nodes]
    position = {node["id"]: i for i, node in enumerate(merged)}
    for node in extra:
        if node["id"] in position:
            merged[position[node["id"]]] = dict(node)
        else:
            position[node["id"]] = len(merged)
            merged.append(dict(node))
    return merged


def decision_network_from_dict(document):
    """Build a DecisionNetwork from a model document.

    Uses ``nodes`` for the chance graph, ``decision_nodes`` for chance
    nodes that are replaced or added once decisions exist, ``decisions``
    and ``utilities``.
    """
    try:
        raw_decisions = document["decisions"]
        raw_utilities = document["utilities"]
    except (KeyError, TypeError):
        raise ParseError(1, "decision model needs 'decisions' and 'utilities' arrays")
    try:
        decisions = [DecisionNode(d["id"], d["alternatives"], d.get("parents", ())) for d in raw_decisions]
        utilities = [UtilityNode(u["id"], u["parents"], u["table"]) for u in raw_utilities]
    except KeyError as e:
        raise ParseError(1, "decision or utility entry is missing {key}".format(key=e))

    chance = _merge_chance_nodes(document.get("nodes", []), document.get("decision_nodes", []))
    roots = [
        {
            "id": d.id,
            "states": list(d.alternatives),
            "parents": [],
            "cpt": [1.0 / len(d.alternatives)] * len(d.alternatives),
        }
        for d in decisions
    ]
    metadata = dict(document.get("metadata") or {})
    network = network_from_dict(
        {"name": document.get("name", "network") + "-decisions", "nodes": chance + roots, "metadata": metadata}
    )
    return DecisionNetwork(network, decisions, utilities, metadata)


def load_decision_network(path):
    return decision_network_from_dict(read_model(path))


def policy_to_json(policy):
    return json.dumps(policy.to_dict(), indent=2) + "\n"
