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
"""One-way sensitivity analysis of a target posterior (tornado data)."""

from dataclasses import dataclass, field
import logging

import numpy as np
import pandas as pd

from riskbn._core.errors import InvalidQuery, InvalidSweep, RiskbnError
from riskbn._core.inference import Query, posterior_ve
from riskbn._core.network import TRUE, Cpt, Evidence, is_d_separator
from riskbn._core.options import options

logger = logging.getLogger(__name__)

TORNADO_COLUMNS = ["rank", "node", "state", "parent_config", "baseline", "low", "high", "spread"]

# Parameters stuck at 0 or 1 move additively by sweep * FROZEN_STEP.
FROZEN_STEP = 0.01

_PARAMETER_NODE = "__parameter__"


@dataclass(frozen=True)
class SensitivityTarget:
    """The posterior being explained: P(node = state | evidence)."""

    node: str
    state: str = TRUE
    evidence: Evidence = field(default_factory=Evidence)

    def __post_init__(self):
        if not isinstance(self.evidence, Evidence):
            object.__setattr__(self, "evidence", Evidence(self.evidence))

    @classmethod
    def parse(cls, text, evidence=None):
        """Parse ``NODE=STATE``."""
        node, sep, state = text.partition("=")
        if not sep or not node.strip() or not state.strip():
            raise InvalidQuery("Target must look like NODE=STATE, got '{text}'".format(text=text))
        return cls(node.strip(), state.strip(), Evidence.parse(evidence) if isinstance(evidence, str) else evidence)

    def check(self, network):
        try:
            network.state_index(self.node, self.state)
        except RiskbnError as e:
            raise InvalidQuery(str(e))
        if self.node in self.evidence:
            raise InvalidQuery("Sensitivity target '{node}' is also observed".format(node=self.node))
        return self


@dataclass(frozen=True)
class TornadoEntry:
    """Swing of the target posterior when one CPT entry is swept.

    ``value`` is the entry's baseline, ``baseline`` the target posterior at
    that value, and ``low``/``high`` the smallest and largest posterior seen
    over the sweep.
    """

    node: str
    state: str
    parent_config: tuple
    column: int
    value: float
    baseline: float
    low: float
    high: float
    spread: float
    target: str
    frozen: bool = False

    @property
    def parameter(self):
        return (self.node, self.state, self.parent_config)

    @property
    def parent_label(self):
        return ";".join("{p}={s}".format(p=p, s=s) for p, s in self.parent_config)

    @property
    def label(self):
        label = "{node}={state}".format(node=self.node, state=self.state)
        if self.parent_config:
            label += " | " + ", ".join("{p}={s}".format(p=p, s=s) for p, s in self.parent_config)
        return label


@dataclass(frozen=True)
class RiskReduction:
    node: str
    factor: float
    baseline: float
    improved: float

    @property
    def reduction(self):
        return self.baseline - self.improved


def sweep_range(value, sweep):
    """Interval swept for a parameter with baseline ``value``."""
    if 0.0 < value < 1.0:
        return max(0.0, value * (1.0 - sweep)), min(1.0, value * (1.0 + sweep))
    step = sweep * FROZEN_STEP
    return max(0.0, value - step), min(1.0, value + step)


def sweep_values(value, sweep, points):
    """Sweep grid containing ``value`` itself as its middle point."""
    low, high = sweep_range(value, sweep)
    half = points // 2 + 1
    return np.concatenate([np.linspace(low, value, half), np.linspace(value, high, half)[1:]])


def covary(column, state, value):
    """Set one entry of a CPT column, rescaling the others proportionally.

    Entries that are zero stay zero. When every other entry is zero the
    remainder is shared equally.
    """
    column = np.array(column, dtype=float)
    rest = 1.0 - column[state]
    others = np.arange(len(column)) != state
    if rest > 0.0:
        column[others] *= (1.0 - value) / rest
    else:
        column[others] = (1.0 - value) / (len(column) - 1)
    column[state] = value
    return column


def _check_sweep(sweep, points):
    if not 0.0 < sweep <= 1.0:
        raise InvalidSweep("sweep must be in (0, 1], got {sweep}".format(sweep=sweep))
    if points < 3 or points % 2 == 0:
        raise InvalidSweep("points must be an odd number of at least 3, got {points}".format(points=points))


def _can_influence(network, node, target):
    """False when no CPT entry of ``node`` can move the target posterior."""
    graph = network.graph.copy()
    graph.add_edge(_PARAMETER_NODE, node)
    return not is_d_separator(graph, {_PARAMETER_NODE}, {target.node}, set(target.evidence))


def _target_posterior(network, target):
    posterior = posterior_ve(network, Query((target.node,), target.evidence))
    return posterior.probability(target.node, target.state)


def tornado(network, target, sweep=None, points=None, roots_only=False):
    """Rank CPT entries by how far they swing the target posterior.

    Each entry p is swept over [max(0, p(1 - sweep)), min(1, p(1 + sweep))]
    (entries at 0 or 1 move by sweep * 0.01 instead and are flagged
    ``frozen``) while the rest of its column is rescaled proportionally. The
    target posterior is recomputed at every point.

    Args:
        network (Network): The network.
        target (SensitivityTarget): Posterior to explain.
        sweep (float, optional): Relative half-width of the sweep.
        points (int, optional): Odd number of sweep points.
        roots_only (bool): Only sweep the priors of root nodes.

    Returns:
        list of TornadoEntry: Descending spread; ties by node declaration
            order, then parent configuration.
    """
    sweep = sweep if sweep is not None else options.get_option("sensitivity.sweep")
    points = points if points is not None else options.get_option("sensitivity.points")
    _check_sweep(sweep, points)
    target = target.check(network)
    baseline = _target_posterior(network, target)

    entries, frozen = [], 0
    for name in network.names:
        if roots_only and network.parents(name):
            continue
        influential = _can_influence(network, name, target)
        table = network.table(name)
        states = network.states(name)
        for column in range(table.shape[1]):
            config = network.parent_configuration(name, column)
            # The last state of each column is the complement of the others.
            for state in range(len(states) - 1):
                value = float(table[state, column])
                is_frozen = value in (0.0, 1.0)
                frozen += is_frozen
                posteriors = [baseline]
                if influential:
                    for swept in sweep_values(value, sweep, points):
                        if swept == value:
                            continue
                        swept_table = table.copy()
                        swept_table[:, column] = covary(table[:, column], state, swept)
                        posteriors.append(_target_posterior(network.replace_cpt(name, Cpt(swept_table)), target))
                low, high = min(posteriors), max(posteriors)
                entries.append(
                    TornadoEntry(
                        node=name,
                        state=states[state],
                        parent_config=config,
                        column=column,
                        value=value,
                        baseline=baseline,
                        low=low,
                        high=high,
                        spread=high - low,
                        target=target.node,
                        frozen=is_frozen,
                    )
                )
    if frozen:
        logger.info("%d parameters at 0 or 1 were swept additively", frozen)
    logger.debug("Swept %d parameters of '%s'", len(entries), network.name)
    return rank_entries(network, entries)


def rank_entries(network, entries):
    def key(entry):
        return (
            -entry.spread,
            network.declaration_index(entry.node),
            entry.column,
            network.state_index(entry.node, entry.state),
        )

    return sorted(entries, key=key)


def node_importance(entries, include_target=False):
    """Group tornado entries by node, keeping each node's largest spread.

    Args:
        entries (list of TornadoEntry): Ranked entries.
        include_target (bool): Keep the entries on the target's own CPT.
            They are left out by default so the ranking lists causes, unless
            no other node moves the target at all.

    Returns:
        list of (str, float): Nodes by descending spread.
    """
    if not entries:
        raise InvalidQuery("node_importance needs at least one entry")
    if not include_target:
        include_target = not any(entry.spread > 0.0 for entry in entries if entry.node != entry.target)
    best = {}
    for position, entry in enumerate(entries):
        if entry.node == entry.target and not include_target:
            continue
        if entry.node not in best:
            best[entry.node] = (entry.spread, position)
        elif entry.spread > best[entry.node][0]:
            best[entry.node] = (entry.spread, best[entry.node][1])
    ranked = sorted(best.items(), key=lambda item: (-item[1][0], item[1][1]))
    return [(node, spread) for node, (spread, _) in ranked]


def risk_reduction(network, target, node, factor):
    """Target posterior after scaling P(node = first state) in every column.

    Args:
        network (Network): The network.
        target (SensitivityTarget): Posterior to track.
        node (str): Node made more (factor < 1) or less reliable.
        factor (float): Multiplier, results clamped to [0, 1].

    Returns:
        RiskReduction
    """
    if factor < 0:
        raise InvalidSweep("factor must be nonnegative, got {factor}".format(factor=factor))
    target = target.check(network)
    table = network.table(node).copy()
    for column in range(table.shape[1]):
        value = min(1.0, table[0, column] * factor)
        table[:, column] = covary(table[:, column], 0, value)
    improved = _target_posterior(network.replace_cpt(node, Cpt(table)), target)
    return RiskReduction(node, factor, _target_posterior(network, target), improved)


def to_frame(entries):
    """Ranked entries as a table with the tornado CSV columns."""
    rows = [
        (rank, e.node, e.state, e.parent_label, e.baseline, e.low, e.high, e.spread)
        for rank, e in enumerate(entries, start=1)
    ]
    return pd.DataFrame(rows, columns=TORNADO_COLUMNS)
