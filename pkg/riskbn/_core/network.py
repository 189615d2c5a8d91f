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
"""Discrete Bayesian networks: node specs, CPTs, validation and model files."""

from collections.abc import Mapping
from dataclasses import dataclass, field
import json
import logging
from math import prod
import threading

import networkx as nx
import numpy as np

from riskbn._core.errors import (
    ColumnNotNormalized,
    CptShapeMismatch,
    CycleDetected,
    DuplicateNode,
    InvalidNodeSpec,
    InvalidQuery,
    MissingParentAssignment,
    ModelUnreadable,
    ParseError,
    UnknownNode,
    UnknownParent,
    UnknownState,
)
from riskbn._core.factor import Factor

logger = logging.getLogger(__name__)

TRUE, FALSE = "TRUE", "FALSE"
BINARY_STATES = (TRUE, FALSE)

# Absolute tolerance on CPT column sums.
NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NodeSpec:
    """A categorical node: its name, ordered states and ordered parents.

    The parent order fixes the CPT column order: the first parent varies
    slowest, the last one fastest.
    """

    id: str
    states: tuple = BINARY_STATES
    parents: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "parents", tuple(self.parents))


class Cpt:
    """Conditional probability table stored as flat row-major values.

    Rows are child states (in the node's state order) and columns are joint
    parent configurations, so the flat layout is the TRUE row first for
    binary nodes.

    Args:
        values (list): Either a flat list of probabilities or a list of
            rows, one per child state.
    """

    def __init__(self, values):
        array = np.array(values, dtype=float)
        self._rows = array.shape[0] if array.ndim == 2 else None
        self._flat = array.ravel()
        self._flat.setflags(write=False)

    @property
    def flat(self):
        return self._flat

    def __len__(self):
        return len(self._flat)

    def table(self, n_states):
        """Return the (states x configurations) view of the values."""
        return self._flat.reshape(n_states, -1)

    def __eq__(self, other):
        return isinstance(other, Cpt) and np.array_equal(self._flat, other._flat)

    def __hash__(self):
        return hash(self._flat.tobytes())

    def __repr__(self):
        return "Cpt({values})".format(values=self._flat.tolist())


@dataclass(frozen=True)
class Violation:
    """One broken network invariant, as reported by ``validate``."""

    kind: str
    node: str
    message: str
    residual: float = None
    error: Exception = field(default=None, compare=False, repr=False)

    @classmethod
    def from_error(cls, error, node, residual=None):
        return cls(type(error).__name__, node, str(error), residual, error)


class Network:
    """An immutable discrete Bayesian network.

    Use ``build_network`` to get a validated instance. Networks created
    directly are not checked, which is what ``validate`` is for.

    Args:
        nodes (list of NodeSpec): Node specifications.
        cpts (list of Cpt): One table per node, aligned with ``nodes``.
        metadata (dict, optional): Free-form key/value pairs.
        name (str, optional): Network name.
    """

    def __init__(self, nodes, cpts, metadata=None, name="network", declaration=None, graph=None):
        self._nodes = tuple(nodes)
        self._cpts = tuple(cpts)
        self._by_name = {spec.id: i for i, spec in enumerate(self._nodes)}
        if declaration is None:
            declaration = {spec.id: i for i, spec in enumerate(self._nodes)}
        self._declaration = dict(declaration)
        self.metadata = dict(metadata or {})
        self.name = name
        self._graph = graph if graph is not None else _arc_graph(self._nodes)
        # Memoized views of the tables; the network itself never changes.
        self._cache_lock = threading.Lock()
        self._tensors = {}
        self._joint = None

    def __repr__(self):
        return "Network(name='{name}', nodes={count})".format(name=self.name, count=len(self._nodes))

    @property
    def nodes(self):
        return self._nodes

    @property
    def names(self):
        return [spec.id for spec in self._nodes]

    def __contains__(self, name):
        return name in self._by_name

    def __len__(self):
        return len(self._nodes)

    def node(self, name):
        try:
            return self._nodes[self._by_name[name]]
        except KeyError:
            raise UnknownNode(name)

    def cpt(self, name):
        self.node(name)
        return self._cpts[self._by_name[name]]

    def states(self, name):
        return self.node(name).states

    def parents(self, name):
        return self.node(name).parents

    def children(self, name):
        self.node(name)
        return tuple(spec.id for spec in self._nodes if name in spec.parents)

    def cardinality(self, name):
        return len(self.node(name).states)

    def state_index(self, name, state):
        states = self.states(name)
        try:
            return states.index(state)
        except ValueError:
            raise UnknownState(name, state, states)

    def declaration_index(self, name):
        self.node(name)
        return self._declaration[name]

    def topological_index(self, name):
        self.node(name)
        return self._by_name[name]

    @property
    def joint_size(self):
        return prod(len(spec.states) for spec in self._nodes)

    def table(self, name):
        """Return the CPT of ``name`` as a (states x configurations) array."""
        return self.cpt(name).table(self.cardinality(name))

    def tensor(self, name):
        """Return the CPT of ``name`` shaped (child, parent_1, ..., parent_n)."""
        with self._cache_lock:
            if name not in self._tensors:
                spec = self.node(name)
                shape = (len(spec.states),) + tuple(self.cardinality(p) for p in spec.parents)
                self._tensors[name] = self.cpt(name).flat.reshape(shape)
            return self._tensors[name]

    def joint_table(self):
        """The full joint distribution as one axis per node, in declaration order."""
        names = self.names
        tensors = {name: self.tensor(name) for name in names}
        with self._cache_lock:
            if self._joint is None:
                joint = np.ones([self.cardinality(name) for name in names])
                for name in names:
                    factor = Factor((name,) + self.parents(name), tensors[name])
                    joint = joint * factor._expanded(tuple(names))
                joint.setflags(write=False)
                self._joint = joint
            return self._joint

    def column_index(self, name, parent_assignment):
        """Index of the CPT column matching a {parent: state} assignment."""
        parents = self.parents(name)
        if not parents:
            return 0
        indices = [self.state_index(parent, parent_assignment[parent]) for parent in parents]
        return int(np.ravel_multi_index(indices, [self.cardinality(parent) for parent in parents]))

    def parent_configuration(self, name, column):
        """Inverse of ``column_index``: the parent states of a column."""
        parents = self.parents(name)
        if not parents:
            return ()
        indices = np.unravel_index(column, [self.cardinality(parent) for parent in parents])
        return tuple((parent, self.states(parent)[int(i)]) for parent, i in zip(parents, indices))

    @property
    def graph(self):
        """The arc set as a ``networkx.DiGraph``; treat it as read-only."""
        return self._graph

    def ancestors(self, names):
        found = set(names)
        for name in names:
            found |= nx.ancestors(self.graph, name)
        return found

    def markov_blanket(self, name):
        blanket = set(self.parents(name)) | set(self.children(name))
        for child in self.children(name):
            blanket |= set(self.parents(child))
        blanket.discard(name)
        return blanket

    def d_separated(self, x, y, given=()):
        """True when the node sets ``x`` and ``y`` are d-separated by ``given``."""
        x, y, given = set(_as_list(x)), set(_as_list(y)), set(_as_list(given))
        for name in x | y | given:
            self.node(name)
        return is_d_separator(self.graph, x, y, given)

    def replace_cpt(self, name, cpt):
        """Return a copy of the network with the CPT of ``name`` swapped.

        The new table must have the same shape and be normalized.
        """
        spec = self.node(name)
        _check_cpt(self, spec, cpt)
        cpts = list(self._cpts)
        cpts[self._by_name[name]] = cpt
        return Network(self._nodes, cpts, self.metadata, self.name, self._declaration, graph=self._graph)

    def to_dict(self):
        return network_to_dict(self)


def _arc_graph(nodes):
    graph = nx.DiGraph()
    graph.add_nodes_from(spec.id for spec in nodes)
    graph.add_edges_from((parent, spec.id) for spec in nodes for parent in spec.parents)
    return graph


def _as_list(names):
    if isinstance(names, str):
        return [names]
    return list(names)


def is_d_separator(graph, x, y, given):
    # networkx renamed d_separated in 3.3.
    check = getattr(nx, "is_d_separator", None) or nx.d_separated
    return check(graph, x, y, given)


class Evidence(Mapping):
    """Observed states, keyed by node name.

    A node appears at most once. ``check`` resolves names and labels
    against a network.
    """

    def __init__(self, observations=None):
        self._observations = dict(observations or {})

    @classmethod
    def parse(cls, text):
        """Parse ``node=STATE`` pairs separated by commas. States are case-sensitive."""
        observations = {}
        if not text:
            return cls()
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, state = item.partition("=")
            name, state = name.strip(), state.strip()
            if not sep or not name or not state:
                raise InvalidQuery("Evidence must look like node=STATE, got '{item}'".format(item=item))
            if name in observations:
                raise InvalidQuery("Node '{name}' is observed more than once".format(name=name))
            observations[name] = state
        return cls(observations)

    def check(self, network):
        for name, state in self._observations.items():
            network.state_index(name, state)
        return self

    def indices(self, network):
        return {name: network.state_index(name, state) for name, state in self._observations.items()}

    def merge(self, other):
        merged = dict(self._observations)
        for name, state in dict(other).items():
            if name in merged and merged[name] != state:
                raise InvalidQuery("Node '{name}' is observed more than once".format(name=name))
            merged[name] = state
        return Evidence(merged)

    def __getitem__(self, name):
        return self._observations[name]

    def __iter__(self):
        return iter(self._observations)

    def __len__(self):
        return len(self._observations)

    def __hash__(self):
        return hash(frozenset(self._observations.items()))

    def __repr__(self):
        return "Evidence({observations})".format(observations=self._observations)

    def __str__(self):
        return ",".join("{name}={state}".format(name=n, state=s) for n, s in self._observations.items())


def _check_cpt(network, spec, cpt):
    """Raise the first problem with ``cpt`` as the table of ``spec``."""
    for violation in _cpt_violations(network, spec, cpt):
        raise violation.error


def _cpt_violations(network, spec, cpt):
    n_states = len(spec.states)
    expected = n_states * prod(network.cardinality(parent) for parent in spec.parents)
    if len(cpt) != expected:
        yield Violation.from_error(CptShapeMismatch(spec.id, expected, len(cpt)), spec.id)
        return
    table = cpt.table(n_states)
    for column in range(table.shape[1]):
        values = table[:, column]
        total = float(values.sum())
        if np.any(values < 0) or np.any(values > 1) or abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            error = ColumnNotNormalized(spec.id, column, total)
            yield Violation.from_error(error, spec.id, error.residual)


def validate(network):
    """Check every network invariant and report all violations.

    Args:
        network (Network): Network to check, validated or not.

    Returns:
        list of Violation: Empty when every invariant holds.
    """
    violations = []
    seen = set()
    known = {spec.id for spec in network.nodes}
    for spec in network.nodes:
        if not spec.id:
            violations.append(Violation.from_error(InvalidNodeSpec("Node names must be non-empty"), spec.id))
        if spec.id in seen:
            violations.append(Violation.from_error(DuplicateNode(spec.id), spec.id))
        seen.add(spec.id)
        if len(spec.states) < 2 or len(set(spec.states)) != len(spec.states):
            error = InvalidNodeSpec(
                "Node '{node}' needs at least two distinct states, got {states}".format(
                    node=spec.id, states=list(spec.states)
                )
            )
            violations.append(Violation.from_error(error, spec.id))
        if len(set(spec.parents)) != len(spec.parents):
            error = InvalidNodeSpec("Node '{node}' lists a parent twice".format(node=spec.id))
            violations.append(Violation.from_error(error, spec.id))
        for parent in spec.parents:
            if parent not in known:
                violations.append(Violation.from_error(UnknownParent(spec.id, parent), spec.id))

    graph = nx.DiGraph()
    graph.add_nodes_from(known)
    graph.add_edges_from((p, spec.id) for spec in network.nodes for p in spec.parents if p in known)
    try:
        cycle = [edge[0] for edge in nx.find_cycle(graph)]
        violations.append(Violation.from_error(CycleDetected(cycle), cycle[0]))
    except nx.NetworkXNoCycle:
        pass

    for spec, cpt in zip(network.nodes, network._cpts):
        if all(parent in known for parent in spec.parents) and spec.id in known:
            violations.extend(_cpt_violations(network, spec, cpt))
    return violations


def build_network(specs, cpts, metadata=None, name="network"):
    """Validate nodes and tables and return them as a Network.

    Nodes are stored in topological order; ties are broken by declaration
    index so the same input always gives the same ordering.

    Args:
        specs (list of NodeSpec): Node specifications.
        cpts (list of Cpt): Tables aligned by index with ``specs``.
        metadata (dict, optional): Scenario name, sources and notes.
        name (str, optional): Network name.

    Returns:
        Network
    """
    specs, cpts = list(specs), [cpt if isinstance(cpt, Cpt) else Cpt(cpt) for cpt in cpts]
    if not specs or len(specs) != len(cpts):
        raise InvalidNodeSpec(
            "Expected matching non-empty node and CPT lists, got {nodes} and {cpts}".format(
                nodes=len(specs), cpts=len(cpts)
            )
        )
    raw = Network(specs, cpts, metadata, name)
    violations = validate(raw)
    if violations:
        logger.debug("Network '%s' has %d violations", name, len(violations))
        raise violations[0].error

    declaration = {spec.id: i for i, spec in enumerate(specs)}
    order = list(nx.lexicographical_topological_sort(raw.graph, key=declaration.__getitem__))
    position = {node: i for i, node in enumerate(order)}
    ordered = sorted(zip(specs, cpts), key=lambda pair: position[pair[0].id])
    network = Network([s for s, _ in ordered], [c for _, c in ordered], metadata, name, declaration)
    logger.debug("Built network '%s' with %d nodes", name, len(network))
    return network


def cpt_lookup(network, child, child_state, parent_assignment):
    """Return the stored probability of ``child_state`` given its parents.

    Args:
        network (Network): The network.
        child (str): Node name.
        child_state (str): State of ``child``.
        parent_assignment (dict): State of every parent of ``child``.

    Returns:
        float: The table entry, exactly as stored.
    """
    parents = network.parents(child)
    missing = [parent for parent in parents if parent not in parent_assignment]
    if missing:
        raise MissingParentAssignment(child, missing)
    for extra in parent_assignment:
        if extra not in parents:
            raise UnknownParent(child, extra)
    row = network.state_index(child, child_state)
    column = network.column_index(child, parent_assignment)
    return float(network.table(child)[row, column])


def noisy_or(parents, weights, leak=0.0, child="noisy-OR"):
    """Build a leaky noisy-OR table for a binary child.

    P(TRUE | parents) = 1 - (1 - leak) * prod(1 - w) over the active
    parents. A binary parent is active in its first state. A weight can
    also be a {state: weight} mapping for parents with more states.

    Args:
        parents (list of (str, list of str)): Parent names with their states.
        weights (dict): Link strength per parent.
        leak (float): Probability the child is TRUE with no active parent.
        child (str, optional): Child name used in error messages.

    Returns:
        Cpt
    """
    link_tables = []
    for parent, states in parents:
        if parent not in weights:
            raise InvalidNodeSpec("No noisy-OR weight for parent '{parent}'".format(parent=parent))
        weight = weights[parent]
        if isinstance(weight, Mapping):
            unknown = set(weight) - set(states)
            if unknown:
                raise UnknownState(parent, sorted(unknown)[0], states)
            link_tables.append([float(weight.get(state, 0.0)) for state in states])
        else:
            link_tables.append([float(weight)] + [0.0] * (len(states) - 1))
    extra = set(weights) - {parent for parent, _ in parents}
    if extra:
        raise UnknownParent(child, sorted(extra)[0])

    inhibit = np.full([len(states) for _, states in parents], 1.0 - leak)
    for axis, links in enumerate(link_tables):
        shape = [1] * len(link_tables)
        shape[axis] = len(links)
        inhibit = inhibit * (1.0 - np.array(links)).reshape(shape)
    p_true = 1.0 - inhibit.ravel()
    return Cpt([p_true, 1.0 - p_true])


def _document_parts(document):
    try:
        raw_nodes = document["nodes"]
    except (KeyError, TypeError):
        raise ParseError(1, "model document needs a 'nodes' array")
    specs = []
    for raw in raw_nodes:
        try:
            specs.append(NodeSpec(raw["id"], raw.get("states", BINARY_STATES), raw.get("parents", ())))
        except KeyError as e:
            raise ParseError(1, "node entry is missing {key}".format(key=e))
    states = {spec.id: spec.states for spec in specs}
    cpts = []
    for spec, raw in zip(specs, raw_nodes):
        if "noisy_or" in raw:
            block = raw["noisy_or"]
            for parent in spec.parents:
                if parent not in states:
                    raise UnknownParent(spec.id, parent)
            cpts.append(
                noisy_or(
                    [(p, states[p]) for p in spec.parents],
                    block.get("weights", {}),
                    block.get("leak", 0.0),
                    child=spec.id,
                )
            )
        elif "cpt" in raw:
            cpts.append(Cpt(raw["cpt"]))
        else:
            raise ParseError(1, "node '{node}' needs a 'cpt' or 'noisy_or' entry".format(node=spec.id))
    return specs, cpts, document.get("metadata"), document.get("name", "network")


def network_from_dict(document):
    """Build a validated Network from a parsed model document."""
    return build_network(*_document_parts(document))


def unchecked_network_from_dict(document):
    """Network from a model document without validation, for ``validate``."""
    specs, cpts, metadata, name = _document_parts(document)
    return Network(specs, cpts, metadata, name)


def parse_model(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg)


def read_model(path):
    """Parsed JSON document of a model file."""
    try:
        with open(path, encoding="utf-8") as infile:
            text = infile.read()
    except OSError as e:
        raise ModelUnreadable(path, e.strerror or str(e))
    return parse_model(text)


def load_network(path):
    """Load a Network from a JSON model file."""
    return network_from_dict(read_model(path))


def network_to_dict(network):
    nodes = []
    for name in sorted(network.names, key=network.declaration_index):
        spec = network.node(name)
        nodes.append(
            {
                "id": spec.id,
                "states": list(spec.states),
                "parents": list(spec.parents),
                "cpt": network.cpt(name).flat.tolist(),
            }
        )
    return {"name": network.name, "nodes": nodes, "metadata": network.metadata}


def dump_network(network, path=None):
    """Serialize a Network to JSON text, optionally writing it to ``path``."""
    text = json.dumps(network_to_dict(network), indent=2, sort_keys=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as outfile:
            outfile.write(text)
    return text
