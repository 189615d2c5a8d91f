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
"""Preliminary hazard analysis: rating rubric, rpn scores and PHA sheets."""

from dataclasses import dataclass, field
import io
import logging

import pandas as pd

from riskbn._core.errors import DomainError, InvalidRecord, ParseError, RiskbnError, UnsupportedFormat
from riskbn._core.templating import render

logger = logging.getLogger(__name__)

FREQUENCY, CONSEQUENCE, DETECTABILITY = "frequency", "consequence", "detectability"
RATING_KINDS = (FREQUENCY, CONSEQUENCE, DETECTABILITY)

# (score, label, description) per rating kind.
RUBRIC = {
    FREQUENCY: (
        (1, "Low", "The event may occur less than once per mission"),
        (2, "Medium", "The event will be encountered, on average, once per mission"),
        (3, "High", "The event will be encountered several times per mission"),
    ),
    CONSEQUENCE: (
        (
            1,
            "Low/None",
            "The event will have no negligible influence on the mission with respect to damage to Eely or loss of "
            "mission data",
        ),
        (
            2,
            "Medium",
            "The event may lead to damages or delays that will minorly reduce the time available for the mission or "
            "affect the data collection",
        ),
        (
            3,
            "High",
            "The event may lead to loss of Eely, early abortion of the mission, or significant loss of scientific data",
        ),
    ),
    # Detectability runs the other way: a hazard that is easy to detect scores 1.
    DETECTABILITY: (
        (3, "Low/None", "Eely is not able to detect or assess the hazardous event during the operation"),
        (
            2,
            "Medium",
            "Eely may infer information about the hazardous event. However, the inference will be associated with "
            "high uncertainty",
        ),
        (1, "High", "Eely may collect and infer information about the hazardous event with high certainty"),
    ),
}

_SHORT_LABELS = {"Low": "Low", "Low/None": "Low", "Medium": "Med", "High": "High"}
_MEDIUM_LABELS = ("med", "mid", "medium")
_LOW_LABELS = ("low", "none", "low/none")

PHA_COLUMNS = ["scenario", "hazard", "event", "causes", "consequences", "freq", "conseq", "detect"]
SHEET_COLUMNS = ["Hazard", "Event", "Cause", "Consequence", "Freq", "Conseq", "Detect", "rpn"]

_HEADER_ALIASES = {
    "hazard": "hazard",
    "event": "event",
    "hazardous event": "event",
    "cause": "causes",
    "causes": "causes",
    "consequence": "consequences",
    "consequences": "consequences",
    "freq": "freq",
    "frequency": "freq",
    "conseq": "conseq",
    "detect": "detect",
    "detectability": "detect",
    "rpn": "rpn",
    "scenario": "scenario",
}

MULTI_VALUE_SEPARATOR = ";"


@dataclass(frozen=True)
class Rating:
    kind: str
    score: int
    label: str

    @property
    def description(self):
        return {label: text for _, label, text in RUBRIC[self.kind]}[self.label]

    @property
    def short_label(self):
        return _SHORT_LABELS[self.label]

    def __str__(self):
        return "{score} {label}".format(score=self.score, label=self.short_label)


def _check_kind(kind):
    if kind not in RUBRIC:
        raise DomainError(
            "Rating kind must be one of {kinds}, got '{kind}'".format(kinds=list(RATING_KINDS), kind=kind)
        )


def rating(kind, score):
    """The rubric rating of ``kind`` with the given score (1 to 3)."""
    _check_kind(kind)
    for value, label, _ in RUBRIC[kind]:
        if value == score:
            return Rating(kind, value, label)
    raise DomainError("{kind} score must be 1, 2 or 3, got {score!r}".format(kind=kind, score=score))


def _canonical_label(kind, text):
    key = text.strip().lower()
    if key in _MEDIUM_LABELS:
        return "Medium"
    if key in _LOW_LABELS:
        return "Low" if kind == FREQUENCY else "Low/None"
    return text.strip().title()


def rating_from_label(kind, label):
    """Look a rating up by label ("High", "Med", "Low/None", "2 Med", ...)."""
    _check_kind(kind)
    text = str(label).strip()
    head, _, tail = text.partition(" ")
    if head.isdigit():
        found = rating(kind, int(head))
        if tail and _canonical_label(kind, tail) != found.label:
            raise DomainError("'{text}' is not a valid {kind} rating".format(text=text, kind=kind))
        return found
    canonical = _canonical_label(kind, text)
    for value, rubric_label, _ in RUBRIC[kind]:
        if rubric_label == canonical:
            return Rating(kind, value, rubric_label)
    raise DomainError("'{text}' is not a valid {kind} rating".format(text=text, kind=kind))


@dataclass(frozen=True)
class RpnScore:
    value: int

    def __post_init__(self):
        if not 1 <= self.value <= 27:
            raise DomainError("rpn must be between 1 and 27, got {value}".format(value=self.value))

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class HazardRecord:
    """One row of a PHA sheet.

    ``detectability`` doubles as a proxy for background knowledge: a hazard
    the vehicle can detect well is one it knows a lot about.
    """

    hazard: str
    event: str
    causes: tuple
    consequences: tuple
    frequency: Rating
    consequence: Rating
    detectability: Rating
    scenario: str = ""
    stated_rpn: int = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "causes", tuple(self.causes))
        object.__setattr__(self, "consequences", tuple(self.consequences))
        if not self.hazard.strip() or not self.event.strip():
            raise InvalidRecord("Hazard records need a hazard and an event")
        for kind, value in zip(RATING_KINDS, (self.frequency, self.consequence, self.detectability)):
            if not isinstance(value, Rating) or value.kind != kind:
                raise InvalidRecord(
                    "Record '{event}' needs a {kind} rating, got {value!r}".format(
                        event=self.event, kind=kind, value=value
                    )
                )


def compute_rpn(record):
    """Product of the frequency, consequence and detectability scores."""
    return RpnScore(record.frequency.score * record.consequence.score * record.detectability.score)


def rank_hazards(records):
    """Records by descending rpn; equal scores keep their input order."""
    return sorted(records, key=lambda record: -compute_rpn(record).value)


def _split(cell):
    return tuple(part.strip() for part in cell.split(MULTI_VALUE_SEPARATOR) if part.strip())


def _join(values):
    return (MULTI_VALUE_SEPARATOR + " ").join(values)


def _record_frame(records):
    rows = []
    for record in records:
        rows.append(
            (
                record.hazard,
                record.event,
                _join(record.causes),
                _join(record.consequences),
                record.frequency.score,
                record.consequence.score,
                record.detectability.score,
                compute_rpn(record).value,
                record.scenario,
            )
        )
    return pd.DataFrame(rows, columns=SHEET_COLUMNS + ["Scenario"])


def render_pha(records, format="csv"):
    """Render records as a PHA sheet.

    Args:
        records (list of HazardRecord): Rows, in output order.
        format (str): 'csv' or 'markdown'.

    Returns:
        str: The document. Columns are Hazard, Event, Cause, Consequence,
            Freq, Conseq, Detect and rpn; the CSV also carries the
            scenario so it can be read back with ``parse_pha``.
    """
    if format == "csv":
        return _record_frame(records).to_csv(index=False, lineterminator="\n")
    if format in ("markdown", "md"):
        rows = [
            {
                "hazard": record.hazard,
                "event": record.event,
                "causes": _join(record.causes),
                "consequences": _join(record.consequences),
                "freq": record.frequency,
                "conseq": record.consequence,
                "detect": record.detectability,
                "rpn": compute_rpn(record).value,
            }
            for record in records
        ]
        return render("pha.md.j2", rows=rows)
    raise UnsupportedFormat(format, ("csv", "markdown"))


def _score(kind, cell, line):
    try:
        return rating(kind, int(cell))
    except ValueError:
        pass
    try:
        return rating_from_label(kind, cell)
    except RiskbnError as e:
        raise ParseError(line, str(e))


def parse_pha(text, scenario=None):
    """Read hazard records from PHA CSV text.

    Accepts the ingestion layout (scenario, hazard, event, causes,
    consequences, freq, conseq, detect, optional rpn) and the sheet layout
    written by ``render_pha``. Multi-valued cells are ';'-separated.

    Args:
        text (str): CSV text.
        scenario (str, optional): Scenario for files without that column. A
            blank cell in a scenario column reads back as an unlabeled record.

    Returns:
        list of HazardRecord
    """
    if not text.strip():
        return []
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(1, str(e))
    columns = {}
    for column in frame.columns:
        key = _HEADER_ALIASES.get(column.strip().lower())
        if key is None:
            raise ParseError(1, "unknown column '{column}'".format(column=column))
        columns[key] = column
    required = [c for c in PHA_COLUMNS if c != "scenario"]
    missing = [c for c in required if c not in columns]
    if missing:
        raise ParseError(1, "missing columns {missing}".format(missing=missing))

    records = []
    for position, row in enumerate(frame.itertuples(index=False)):
        line = position + 2
        cells = dict(zip(frame.columns, row))
        if "scenario" in columns:
            label = cells[columns["scenario"]].strip() or scenario or ""
        elif scenario:
            label = scenario
        else:
            raise ParseError(line, "no scenario given")
        stated = cells[columns["rpn"]].strip() if "rpn" in columns else ""
        try:
            record = HazardRecord(
                hazard=cells[columns["hazard"]].strip(),
                event=cells[columns["event"]].strip(),
                causes=_split(cells[columns["causes"]]),
                consequences=_split(cells[columns["consequences"]]),
                frequency=_score(FREQUENCY, cells[columns["freq"]], line),
                consequence=_score(CONSEQUENCE, cells[columns["conseq"]], line),
                detectability=_score(DETECTABILITY, cells[columns["detect"]], line),
                scenario=label,
                stated_rpn=int(stated) if stated else None,
            )
        except ParseError:
            raise
        except (InvalidRecord, ValueError) as e:
            raise ParseError(line, str(e))
        records.append(record)
    logger.debug("Read %d hazard records", len(records))
    return records


def load_pha(path, scenario=None):
    with open(path, encoding="utf-8") as infile:
        return parse_pha(infile.read(), scenario)


def summarize(records):
    """Count of records per rpn value (rows) and scenario (columns)."""
    frame = pd.DataFrame(
        {"rpn": [compute_rpn(r).value for r in records], "scenario": [r.scenario for r in records]}
    )
    if frame.empty:
        return pd.DataFrame()
    return pd.crosstab(frame["rpn"], frame["scenario"]).sort_index(ascending=False)
