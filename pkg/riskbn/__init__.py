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
# flake8: noqa
"""Top-level package for riskbn."""
import logging

from riskbn._core.errors import *
from riskbn._core.network import (
    BINARY_STATES,
    FALSE,
    TRUE,
    Cpt,
    Evidence,
    Network,
    NodeSpec,
    Violation,
    build_network,
    cpt_lookup,
    dump_network,
    load_network,
    network_from_dict,
    network_to_dict,
    noisy_or,
    validate,
)
from riskbn._core.inference import (
    Posterior,
    Query,
    evidence_probability,
    joint_ve,
    posterior_enumeration,
    posterior_lw,
    posterior_ve,
    prior_marginals,
)
from riskbn._core.dbn import (
    TemporalArc,
    TrajectoryResult,
    TwoSliceNetwork,
    annual_to_step,
    compare,
    forward_filter,
    unroll,
)
from riskbn._core.sensitivity import SensitivityTarget, TornadoEntry, node_importance, risk_reduction, tornado
from riskbn._core.decision import (
    DecisionNetwork,
    DecisionNode,
    DwellGuard,
    GuardedRecommender,
    Policy,
    SafetyOverride,
    UtilityNode,
    decision_network_from_dict,
    expected_utility,
    load_decision_network,
    loss_probability_above,
    optimal_policy,
    recommend_with_guards,
)
from riskbn._core.hazid import (
    HazardRecord,
    Rating,
    RpnScore,
    compute_rpn,
    load_pha,
    parse_pha,
    rank_hazards,
    rating,
    rating_from_label,
    render_pha,
    summarize,
)
from riskbn._core.models import FailureRate, ScenarioBundle, load_failure_rates, scenario
from riskbn._core.chart import RiskChart, TornadoChart, TrajectoryChart
from riskbn._core.report import emit_tornado_svg, emit_trajectory_csv, tornado_csv, trajectory_csv
from riskbn._core.options import options
from riskbn import examples

__author__ = "The riskbn Authors"
__email__ = "riskbn@users.noreply.github.com"
__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
