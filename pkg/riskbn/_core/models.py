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
"""Bundled Eely scenarios and failure-rate ingestion."""

from dataclasses import dataclass
from functools import lru_cache
import io
import logging
import os

import pandas as pd

from riskbn._core.decision import decision_network_from_dict
from riskbn._core.dbn import TwoSliceNetwork
from riskbn._core.errors import ParseError, RateOutOfRange, UnknownScenario
from riskbn._core.hazid import load_pha
from riskbn._core.network import network_from_dict, parse_model

logger = logging.getLogger(__name__)

MODEL_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "models")

SCENARIOS = ("seabed", "confined")

RATE_COLUMNS = ["component", "node", "p_annual", "source"]


def model_path(filename):
    return os.path.join(MODEL_DIR, filename)


@dataclass(frozen=True)
class FailureRate:
    """Annual failure probability of one component.

    ``node`` is the network node the component maps to.
    """

    component: str
    node: str
    p_annual: float
    source: str = ""


def parse_failure_rates(text):
    """Read failure rates from CSV text with a component,node,p_annual,source header."""
    if not text.strip():
        return []
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        raise ParseError(1, str(e))
    missing = [c for c in ("component", "p_annual") if c not in frame.columns]
    if missing:
        raise ParseError(1, "missing columns {missing}".format(missing=missing))

    rates = []
    for position, row in enumerate(frame.to_dict("records")):
        line = position + 2
        component = row["component"].strip()
        if not component:
            raise ParseError(line, "empty component name")
        try:
            p_annual = float(row["p_annual"])
        except ValueError:
            raise ParseError(line, "'{value}' is not a probability".format(value=row["p_annual"]))
        if not 0.0 <= p_annual <= 1.0:
            raise RateOutOfRange(component, p_annual)
        rates.append(FailureRate(component, row.get("node", "").strip(), p_annual, row.get("source", "").strip()))
    return rates


def load_failure_rates(path=None):
    """Load failure rates; the bundled table when no path is given."""
    path = path or model_path("failure_rates.csv")
    with open(path, encoding="utf-8") as infile:
        return parse_failure_rates(infile.read())


@dataclass(frozen=True)
class ScenarioBundle:
    """Everything bundled for one operating scenario."""

    label: str
    static: object
    dynamic: TwoSliceNetwork
    decision: object
    hazards: tuple
    rates: tuple


@lru_cache(maxsize=None)
def scenario(label, step_hours=None):
    """Load a bundled scenario.

    Args:
        label (str): 'seabed' or 'confined'.
        step_hours (float, optional): Slice duration of the dynamic
            template. Defaults to the ``dbn.step_hours`` option.

    Returns:
        ScenarioBundle
    """
    if label not in SCENARIOS:
        raise UnknownScenario(label, SCENARIOS)
    with open(model_path("{label}.bn.json".format(label=label)), encoding="utf-8") as infile:
        document = parse_model(infile.read())
    static = network_from_dict(document)
    rates = tuple(load_failure_rates())
    bundle = ScenarioBundle(
        label=label,
        static=static,
        dynamic=TwoSliceNetwork.from_failure_rates(static, rates, step_hours),
        decision=decision_network_from_dict(document),
        hazards=tuple(load_pha(model_path("pha_{label}.csv".format(label=label)), label)),
        rates=rates,
    )
    if static.metadata.get("reconstructed"):
        logger.info("Scenario '%s' uses a reconstructed network", label)
    return bundle
