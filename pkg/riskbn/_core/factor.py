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
"""Factors: dense tables over the joint states of a set of nodes."""

from math import prod

import numpy as np


class Factor:
    """A nonnegative table over the joint states of ``scope``.

    ``values`` has one axis per scope variable, in scope order. All
    operations return new factors.

    Args:
        scope (list of str): Variable names.
        values (numpy.ndarray): Table with ``values.shape[i]`` states for
            ``scope[i]``.
    """

    def __init__(self, scope, values):
        values = np.asarray(values, dtype=float)
        scope = tuple(scope)
        if values.ndim != len(scope):
            raise ValueError(
                "Factor over {scope} needs {n} axes, got {ndim}".format(scope=scope, n=len(scope), ndim=values.ndim)
            )
        if len(set(scope)) != len(scope):
            raise ValueError("Factor scope has repeated variables: {scope}".format(scope=scope))
        self.scope = scope
        self.values = values

    @classmethod
    def from_cpt(cls, network, name):
        """The CPT of ``name`` as a factor over (name, *parents)."""
        return cls((name,) + network.parents(name), network.tensor(name))

    @classmethod
    def unit(cls):
        return cls((), np.array(1.0))

    @property
    def cardinality(self):
        return dict(zip(self.scope, self.values.shape))

    @property
    def size(self):
        return prod(self.values.shape)

    def __contains__(self, variable):
        return variable in self.scope

    def __repr__(self):
        return "Factor(scope={scope}, size={size})".format(scope=list(self.scope), size=self.size)

    def _expanded(self, scope):
        """View of the values broadcastable against a factor over ``scope``."""
        order = [self.scope.index(v) for v in scope if v in self.scope]
        values = np.transpose(self.values, order)
        shape = [self.values.shape[self.scope.index(v)] if v in self.scope else 1 for v in scope]
        return values.reshape(shape)

    def product(self, other):
        scope = self.scope + tuple(v for v in other.scope if v not in self.scope)
        return Factor(scope, self._expanded(scope) * other._expanded(scope))

    def __mul__(self, other):
        return self.product(other)

    def marginalize(self, variables):
        """Sum out ``variables``."""
        axes = tuple(self.scope.index(v) for v in variables)
        scope = tuple(v for v in self.scope if v not in variables)
        return Factor(scope, self.values.sum(axis=axes))

    def reduce(self, assignment):
        """Fix variables to state indices and drop them from the scope.

        Args:
            assignment (dict): {variable: state index}; variables outside
                the scope are ignored.
        """
        index = tuple(assignment[v] if v in assignment else slice(None) for v in self.scope)
        scope = tuple(v for v in self.scope if v not in assignment)
        return Factor(scope, self.values[index])

    def transpose(self, scope):
        return Factor(scope, np.transpose(self.values, [self.scope.index(v) for v in scope]))

    def total(self):
        return float(self.values.sum())

    def normalize(self):
        total = self.total()
        return Factor(self.scope, self.values / total)


def product_of(factors):
    result = Factor.unit()
    for factor in factors:
        result = result.product(factor)
    return result
