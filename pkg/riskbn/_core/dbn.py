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
"""Dynamic Bayesian networks: two-slice templates, unrolling and forward filtering."""

from dataclasses import dataclass
import logging
from math import prod
import warnings

import numpy as np
import pandas as pd

from riskbn._core.errors import (
    ColumnNotNormalized,
    CptShapeMismatch,
    DomainError,
    InvalidNodeSpec,
    InvalidQuery,
    StepCapExceeded,
    UnknownNode,
)
from riskbn._core.factor import Factor
from riskbn._core.inference import eliminate
from riskbn._core.network import NORMALIZATION_TOLERANCE, TRUE, Cpt, NodeSpec, build_network
from riskbn._core.options import options

logger = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760.0
SLICE_SEPARATOR = "@"
_PREVIOUS = SLICE_SEPARATOR + "prev"


def slice_name(node, step):
    return "{node}{sep}{step}".format(node=node, sep=SLICE_SEPARATOR, step=step)


def annual_to_step(p_annual, step_hours):
    """Convert a per-year failure probability to a per-step one.

    Assumes a constant hazard over the year:
    1 - (1 - p_annual) ** (step_hours / 8760). A certain annual failure
    stays certain at every step length.
    """
    if step_hours <= 0:
        raise DomainError("step_hours must be positive, got {hours}".format(hours=step_hours))
    if not 0.0 <= p_annual <= 1.0:
        raise DomainError("p_annual must be in [0, 1], got {p}".format(p=p_annual))
    if p_annual == 1.0:
        return 1.0
    return 1.0 - (1.0 - p_annual) ** (step_hours / HOURS_PER_YEAR)


@dataclass(frozen=True)
class TemporalArc:
    """Arc from ``source`` at t-1 to ``target`` at t.

    ``cpt`` is the transition table of ``target``. Its parents are
    ``source`` at t-1 followed by the target's parents within the slice.
    """

    source: str
    target: str
    cpt: Cpt


class TwoSliceNetwork:
    """A slice template plus the arcs linking consecutive slices.

    Args:
        base (Network): Slice template used from the second slice on.
        temporal_arcs (list of TemporalArc): Inter-slice arcs, at most one
            per target.
        initial (Network, optional): First-slice priors. Defaults to
            ``base``.
        step_hours (float, optional): Duration of one slice.
    """

    def __init__(self, base, temporal_arcs, initial=None, step_hours=None):
        self.base = base
        self.initial = initial if initial is not None else base
        self.step_hours = step_hours if step_hours is not None else options.get_option("dbn.step_hours")
        self.temporal_arcs = tuple(temporal_arcs)
        self._arcs = {}
        for arc in self.temporal_arcs:
            for name in (arc.source, arc.target):
                if name not in base:
                    raise UnknownNode(name)
            if arc.target in self._arcs:
                raise InvalidNodeSpec("Node '{node}' has more than one temporal arc".format(node=arc.target))
            self._arcs[arc.target] = arc
            self._check_transition(arc)
        for spec in base.nodes:
            if spec.id not in self.initial or self.initial.node(spec.id) != spec:
                raise InvalidNodeSpec(
                    "Initial slice does not match the template at node '{node}'".format(node=spec.id)
                )

    def __repr__(self):
        return "TwoSliceNetwork(base='{name}', temporal_arcs={count}, step_hours={hours})".format(
            name=self.base.name, count=len(self.temporal_arcs), hours=self.step_hours
        )

    def _check_transition(self, arc):
        parents = self.transition_parents(arc.target)
        n_states = self.base.cardinality(arc.target)
        expected = n_states * prod(self._parent_cardinality(p) for p in parents)
        if len(arc.cpt) != expected:
            raise CptShapeMismatch(arc.target, expected, len(arc.cpt))
        table = arc.cpt.table(n_states)
        for column, total in enumerate(table.sum(axis=0)):
            if abs(total - 1.0) > NORMALIZATION_TOLERANCE or np.any(table[:, column] < 0):
                raise ColumnNotNormalized(arc.target, column, float(total))

    def _parent_cardinality(self, parent):
        return self.base.cardinality(parent[: -len(_PREVIOUS)] if parent.endswith(_PREVIOUS) else parent)

    @property
    def sources(self):
        """Nodes whose previous state feeds the next slice, in declaration order."""
        found = {arc.source for arc in self.temporal_arcs}
        return tuple(name for name in self.base.names if name in found)

    def transition_parents(self, target):
        arc = self._arcs[target]
        return (arc.source + _PREVIOUS,) + self.base.parents(target)

    def transition_tensor(self, target):
        shape = [self.base.cardinality(target)] + [self._parent_cardinality(p) for p in self.transition_parents(target)]
        return self._arcs[target].cpt.flat.reshape(shape)

    def has_transition(self, name):
        return name in self._arcs

    @classmethod
    def from_failure_rates(cls, base, rates, step_hours=None):
        """Template where rated root components fail and stay failed.

        For every failure rate whose node is a root of ``base``:
        P(fail_t | fail_t-1) = 1 and
        P(fail_t | ok_t-1) = annual_to_step(p_annual, step_hours).
        Every other node is drawn afresh in each slice.

        Args:
            base (Network): Static network; also the first slice.
            rates (list of FailureRate): Annual failure probabilities.
            step_hours (float, optional): Slice duration in hours.
        """
        step_hours = step_hours if step_hours is not None else options.get_option("dbn.step_hours")
        arcs = []
        for rate in rates:
            if rate.node not in base or base.parents(rate.node):
                continue
            if base.cardinality(rate.node) != 2:
                raise InvalidNodeSpec("Component node '{node}' must be binary".format(node=rate.node))
            p_step = annual_to_step(rate.p_annual, step_hours)
            # Columns: failed before, working before.
            arcs.append(TemporalArc(rate.node, rate.node, Cpt([[1.0, p_step], [0.0, 1.0 - p_step]])))
        logger.debug("Absorbing components for '%s': %s", base.name, [arc.target for arc in arcs])
        return cls(base, arcs, step_hours=step_hours)


def _check_steps(steps, allow_long):
    if steps < 1:
        raise InvalidQuery("steps must be at least 1, got {steps}".format(steps=steps))
    cap = options.get_option("dbn.step_cap")
    if steps > cap:
        if not allow_long:
            raise StepCapExceeded(steps, cap)
        message = "Running {steps} steps, above the default cap of {cap}".format(steps=steps, cap=cap)
        warnings.warn(message, UserWarning)
        logger.warning(message)


def unroll(tsn, steps, allow_long=False):
    """Flatten ``steps`` slices into one static network.

    Nodes are named ``name@t`` for t = 1..steps; the first slice uses the
    initial priors.

    Args:
        tsn (TwoSliceNetwork): The template.
        steps (int): Number of slices.
        allow_long (bool): Accept more steps than the configured cap.

    Returns:
        Network
    """
    _check_steps(steps, allow_long)
    specs, cpts = [], []
    for step in range(1, steps + 1):
        for spec in tsn.base.nodes:
            if step == 1:
                parents = [slice_name(p, 1) for p in tsn.initial.parents(spec.id)]
                cpt = tsn.initial.cpt(spec.id)
            elif tsn.has_transition(spec.id):
                parents = [
                    slice_name(p[: -len(_PREVIOUS)], step - 1) if p.endswith(_PREVIOUS) else slice_name(p, step)
                    for p in tsn.transition_parents(spec.id)
                ]
                cpt = tsn._arcs[spec.id].cpt
            else:
                parents = [slice_name(p, step) for p in spec.parents]
                cpt = tsn.base.cpt(spec.id)
            specs.append(NodeSpec(slice_name(spec.id, step), spec.states, parents))
            cpts.append(cpt)
    metadata = dict(tsn.base.metadata, unrolled_steps=steps)
    logger.debug("Unrolled '%s' into %d nodes", tsn.base.name, len(specs))
    return build_network(specs, cpts, metadata, "{name}-{steps}-steps".format(name=tsn.base.name, steps=steps))


@dataclass
class TrajectoryResult:
    """Per-step marginals of the monitored nodes.

    Attributes:
        monitored (tuple of str): Node names.
        states (dict): {node: tuple of states}.
        marginals (dict): {node: array of shape (steps, states)}.
        step_hours (float): Slice duration.
    """

    monitored: tuple
    states: dict
    marginals: dict
    step_hours: float

    @property
    def steps(self):
        return len(next(iter(self.marginals.values())))

    def probability(self, node, state=TRUE, step=None):
        """Probability of ``state``; a whole curve when ``step`` is None (steps are 1-based)."""
        column = self.marginals[node][:, self.states[node].index(state)]
        if step is None:
            return column
        return float(column[step - 1])

    def to_frame(self):
        rows = []
        for step in range(1, self.steps + 1):
            for node in self.monitored:
                for state, p in zip(self.states[node], self.marginals[node][step - 1]):
                    rows.append((step, node, state, float(p)))
        return pd.DataFrame(rows, columns=["step", "node", "state", "probability"])


def _slice_rank(tsn):
    offset = len(tsn.base)

    def rank(var):
        if var.endswith(_PREVIOUS):
            return offset + tsn.base.declaration_index(var[: -len(_PREVIOUS)])
        return tsn.base.declaration_index(var)

    return rank


def _slice_factors(tsn, belief, first):
    if first:
        return [Factor.from_cpt(tsn.initial, name) for name in tsn.initial.names]
    factors = [belief] if belief is not None else []
    for name in tsn.base.names:
        if tsn.has_transition(name):
            factors.append(Factor((name,) + tsn.transition_parents(name), tsn.transition_tensor(name)))
        else:
            factors.append(Factor.from_cpt(tsn.base, name))
    return factors


def forward_filter(tsn, steps, monitored=None, allow_long=False):
    """Per-step marginals of ``monitored`` by forward filtering.

    Only the joint belief over the temporal source nodes is carried from
    one slice to the next, so memory does not grow with ``steps``.

    Args:
        tsn (TwoSliceNetwork): The template.
        steps (int): Number of slices.
        monitored (list of str, optional): Nodes to report. Defaults to the
            configured ``dbn.monitor`` nodes present in the template.
        allow_long (bool): Accept more steps than the configured cap.

    Returns:
        TrajectoryResult
    """
    _check_steps(steps, allow_long)
    if monitored is None:
        monitored = [name for name in options.get_option("dbn.monitor") if name in tsn.base]
    monitored = tuple(monitored)
    if not monitored:
        raise InvalidQuery("Nothing to monitor")
    for name in monitored:
        tsn.base.node(name)

    rank = _slice_rank(tsn)
    sources = tsn.sources
    marginals = {name: np.zeros((steps, tsn.base.cardinality(name))) for name in monitored}
    belief = None
    for step in range(1, steps + 1):
        factors = _slice_factors(tsn, belief, step == 1)
        for name in monitored:
            marginals[name][step - 1] = eliminate(factors, (name,), rank).normalize().values
        if sources:
            frontier = eliminate(factors, sources, rank).normalize()
            belief = Factor(tuple(s + _PREVIOUS for s in sources), frontier.values)
    states = {name: tsn.base.states(name) for name in monitored}
    logger.debug("Filtered %d steps of '%s'", steps, tsn.base.name)
    return TrajectoryResult(monitored, states, marginals, tsn.step_hours)


filter = forward_filter


def compare(tsns, steps, node, state=TRUE, allow_long=False):
    """One node's probability curve for several templates side by side.

    Args:
        tsns (dict): {label: TwoSliceNetwork}.
        steps (int): Number of slices.
        node (str): Node to track.
        state (str): State whose probability is reported.

    Returns:
        pandas.DataFrame: One column per label, indexed by step.
    """
    columns = {}
    for label, tsn in tsns.items():
        columns[label] = forward_filter(tsn, steps, [node], allow_long).probability(node, state)
    frame = pd.DataFrame(columns, index=pd.RangeIndex(1, steps + 1, name="step"))
    return frame
