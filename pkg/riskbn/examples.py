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
"""Examples"""

from functools import wraps as _wraps
from inspect import getsource as _getsource


def _clean_source(source):
    return source.split('"""')[2].replace("\t", "")


def _print_source(f):
    """Print code after the function docstring up until the first
    set of triple quotes"""

    @_wraps(f)
    def wrapper(*args, **kwargs):
        source = _getsource(f)
        print(_clean_source(source))
        return f(*args, **kwargs)

    return wrapper


@_print_source
def query_loss():
    """
    Probability of losing the vehicle, with and without evidence
    """
    import riskbn

    network = riskbn.scenario("confined").static

    prior = riskbn.posterior_ve(network, riskbn.Query("loss_of_eely"))
    print("P(loss) =", prior.probability("loss_of_eely", riskbn.TRUE))

    # Condition on a failed DVL
    evidence = riskbn.Evidence.parse("dvl_failure=TRUE")
    posterior = riskbn.posterior_ve(network, riskbn.Query("loss_of_eely", evidence))
    print("P(loss | DVL failed) =", posterior.probability("loss_of_eely", riskbn.TRUE))
    return posterior


@_print_source
def sample_loss():
    """
    Likelihood weighting estimate next to the exact answer
    """
    import riskbn

    network = riskbn.scenario("seabed").static
    query = riskbn.Query(["loss_of_eely", "failure_of_propulsion_system"], {"leakage": "TRUE"})

    exact = riskbn.posterior_ve(network, query)
    estimate = riskbn.posterior_lw(network, query, samples=20000, seed=7)
    print(exact.to_frame())
    print(estimate.to_frame())
    return estimate


@_print_source
def dynamic_loss():
    """
    Loss probability over a 48 hour mission in both scenarios
    """
    import riskbn

    curves = riskbn.compare(
        {label: riskbn.scenario(label).dynamic for label in ("seabed", "confined")},
        steps=48,
        node="loss_of_eely",
    )
    print(curves.tail())
    return curves


@_print_source
def tornado_loss():
    """
    Causes ranked by how far they swing P(loss)
    """
    import riskbn

    network = riskbn.scenario("seabed").static
    entries = riskbn.tornado(network, riskbn.SensitivityTarget("loss_of_eely"))

    for node, spread in riskbn.node_importance(entries)[:5]:
        print("{node:40s} {spread:.5f}".format(node=node, spread=spread))

    # What if the thrusters were twice as reliable?
    print(riskbn.risk_reduction(network, riskbn.SensitivityTarget("loss_of_eely"), "failure_of_thruster_module", 0.5))
    return entries


@_print_source
def decide_mission():
    """
    Recommended set points, with a safety override
    """
    import riskbn

    dn = riskbn.scenario("confined").decision
    print(riskbn.optimal_policy(dn).to_dict())

    recommender = riskbn.GuardedRecommender(
        dn, overrides=[riskbn.loss_probability_above(0.5, {"c_s": "abort"})]
    )
    for observed in ("", "leakage=TRUE", "failure_of_autonomous_control=TRUE"):
        print(observed or "no evidence", recommender.recommend(riskbn.Evidence.parse(observed)).to_dict())
    return recommender


@_print_source
def hazard_sheet():
    """
    PHA sheet ranked by rpn
    """
    import riskbn

    records = riskbn.rank_hazards(riskbn.scenario("confined").hazards)
    print(riskbn.render_pha(records[:5], format="markdown"))
    print(riskbn.summarize(records))
    return records
