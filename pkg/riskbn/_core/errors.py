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
"""Exceptions raised by riskbn.

Every error is a ``ValueError`` so callers that only care about bad input
can keep catching that. The three families map onto the command line exit
codes: ``UsageError`` -> 1, ``ModelError`` -> 2, ``InferenceError`` -> 3.
"""


class RiskbnError(ValueError):
    """Base class for all riskbn errors."""

    exit_code = 1


class UsageError(RiskbnError):
    exit_code = 1


class ModelError(RiskbnError):
    exit_code = 2


class InferenceError(RiskbnError):
    exit_code = 3


# Model structure and parameters.


class CycleDetected(ModelError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("Cycle detected: {path}".format(path=" -> ".join(self.cycle + self.cycle[:1])))


class CptShapeMismatch(ModelError):
    def __init__(self, node, expected, got):
        self.node, self.expected, self.got = node, expected, got
        super().__init__(
            "CPT of '{node}' has {got} entries, expected {expected}".format(node=node, got=got, expected=expected)
        )


class ColumnNotNormalized(ModelError):
    def __init__(self, node, column, total):
        self.node, self.column, self.total = node, column, total
        self.residual = abs(1.0 - total)
        super().__init__(
            "CPT column {column} of '{node}' sums to {total!r}".format(column=column, node=node, total=total)
        )


class UnknownParent(ModelError):
    def __init__(self, node, parent):
        self.node, self.parent = node, parent
        super().__init__("Node '{node}' references unknown parent '{parent}'".format(node=node, parent=parent))


class UnknownNode(ModelError):
    def __init__(self, node):
        self.node = node
        super().__init__("Unknown node '{node}'".format(node=node))


class DuplicateNode(ModelError):
    def __init__(self, node):
        self.node = node
        super().__init__("Node '{node}' is declared more than once".format(node=node))


class InvalidNodeSpec(ModelError):
    pass


class MissingParentAssignment(ModelError):
    def __init__(self, node, missing):
        self.node, self.missing = node, list(missing)
        super().__init__(
            "Parent assignment for '{node}' is missing {missing}".format(node=node, missing=self.missing)
        )


class UnknownState(ModelError):
    def __init__(self, node, state, states=None):
        self.node, self.state, self.states = node, state, states
        message = "Unknown state '{state}' for node '{node}'".format(state=state, node=node)
        if states is not None:
            message += ", expected one of {states}".format(states=list(states))
        super().__init__(message)


class ParseError(ModelError):
    def __init__(self, line, reason):
        self.line, self.reason = line, reason
        super().__init__("Line {line}: {reason}".format(line=line, reason=reason))


class ModelUnreadable(ModelError):
    def __init__(self, path, reason):
        self.path, self.reason = path, reason
        super().__init__("Cannot read model '{path}': {reason}".format(path=path, reason=reason))


class RateOutOfRange(ModelError):
    def __init__(self, component, rate):
        self.component, self.rate = component, rate
        super().__init__(
            "Failure rate {rate!r} of '{component}' is outside [0, 1]".format(rate=rate, component=component)
        )


class UnknownScenario(ModelError):
    def __init__(self, label, known):
        self.label = label
        super().__init__("Unknown scenario '{label}', expected one of {known}".format(label=label, known=list(known)))


# Queries and inference.


class InvalidQuery(UsageError):
    pass


class InconsistentEvidence(InferenceError):
    def __init__(self, evidence):
        self.evidence = dict(evidence)
        super().__init__("Evidence has probability zero: {evidence}".format(evidence=self.evidence))


class StateSpaceTooLarge(InferenceError):
    def __init__(self, size, limit):
        self.size, self.limit = size, limit
        super().__init__("Joint state space {size} exceeds the limit {limit}".format(size=size, limit=limit))


class AllWeightsZero(InferenceError):
    def __init__(self, samples):
        self.samples = samples
        super().__init__("All {samples} likelihood weights are zero".format(samples=samples))


# Dynamic networks.


class StepCapExceeded(UsageError):
    def __init__(self, steps, cap):
        self.steps, self.cap = steps, cap
        super().__init__(
            "{steps} steps exceeds the cap of {cap}; allow longer runs explicitly".format(steps=steps, cap=cap)
        )


class DomainError(UsageError):
    pass


# Sensitivity, decisions and reports.


class InvalidSweep(UsageError):
    pass


class IncompleteAssignment(UsageError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("No alternative chosen for decisions {missing}".format(missing=self.missing))


class AlternativeSpaceTooLarge(UsageError):
    def __init__(self, size, limit):
        self.size, self.limit = size, limit
        super().__init__("{size} joint alternatives exceeds the limit {limit}".format(size=size, limit=limit))


class ConflictingOverrides(UsageError):
    def __init__(self, decision, alternatives):
        self.decision, self.alternatives = decision, list(alternatives)
        super().__init__(
            "Safety overrides force '{decision}' to different alternatives: {alternatives}".format(
                decision=decision, alternatives=self.alternatives
            )
        )


class UnsupportedFormat(UsageError):
    def __init__(self, format, supported):
        self.format = format
        super().__init__(
            "format must be one of {supported}, got '{format}'".format(supported=list(supported), format=format)
        )


class InvalidRecord(ModelError):
    pass


class IoError(UsageError):
    def __init__(self, path, reason):
        self.path, self.reason = path, reason
        super().__init__("Cannot write '{path}': {reason}".format(path=path, reason=reason))
