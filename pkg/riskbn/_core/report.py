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
"""Deterministic CSV and SVG reports."""

import logging

from riskbn._core.errors import InvalidQuery, IoError
from riskbn._core.sensitivity import to_frame
from riskbn._core.templating import render

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"

_WIDTH = 900
_LABEL_WIDTH = 360
_MARGIN = 30
_ROW_HEIGHT = 26
_BAR_HEIGHT = 18
_HEADER = 40
_FOOTER = 40
_BAR_COLOR = "#1f77b4"


def write_text(text, path):
    """Write ``text`` to ``path`` with Unix newlines."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as outfile:
            outfile.write(text)
    except OSError as e:
        raise IoError(path, e.strerror or str(e))
    logger.info("Wrote %s", path)
    return path


def tornado_csv(entries):
    """Ranked tornado entries as CSV text."""
    return to_frame(entries).to_csv(index=False, lineterminator="\n", float_format=FLOAT_FORMAT)


def _fmt(value):
    return "{value:.2f}".format(value=value)


def tornado_svg(entries, title=None):
    """Horizontal tornado bars, widest swing on top, with a baseline rule.

    Args:
        entries (list of TornadoEntry): Ranked entries, drawn in order.
        title (str, optional): Chart title.

    Returns:
        str: SVG document.
    """
    if not entries:
        raise InvalidQuery("A tornado diagram needs at least one entry")
    baseline = entries[0].baseline
    lowest = min(min(e.low for e in entries), baseline)
    highest = max(max(e.high for e in entries), baseline)
    if highest - lowest <= 0.0:
        lowest, highest = lowest - 0.005, highest + 0.005
    left = _LABEL_WIDTH + _MARGIN
    right = _WIDTH - _MARGIN

    def x(value):
        return left + (value - lowest) / (highest - lowest) * (right - left)

    bars = []
    for row, entry in enumerate(entries):
        y = _HEADER + row * _ROW_HEIGHT
        bars.append(
            {
                "label": entry.label,
                "x": _fmt(x(entry.low)),
                "y": _fmt(y),
                "width": _fmt(x(entry.high) - x(entry.low)),
                "text_y": _fmt(y + _BAR_HEIGHT - 4),
                "tooltip": "{low:.6g} to {high:.6g}".format(low=entry.low, high=entry.high),
            }
        )
    bottom = _HEADER + len(entries) * _ROW_HEIGHT
    ticks = [
        {"x": _fmt(x(value)), "label": "{value:.4f}".format(value=value)} for value in (lowest, baseline, highest)
    ]
    if title is None:
        title = "P({target}) sensitivity".format(target=entries[0].target)
    return render(
        "tornado.svg.j2",
        width=_WIDTH,
        height=bottom + _FOOTER,
        title=title,
        title_x=_WIDTH // 2,
        label_x=_LABEL_WIDTH,
        bars=bars,
        bar_height=_BAR_HEIGHT,
        color=_BAR_COLOR,
        baseline_x=_fmt(x(baseline)),
        top=_HEADER - 4,
        bottom=bottom,
        axis_left=left,
        axis_right=right,
        ticks=ticks,
        tick_y=bottom + 16,
    )


def emit_tornado_svg(entries, path, title=None):
    return write_text(tornado_svg(entries, title), path)


def trajectory_csv(trajectory):
    """``step,node,state,probability`` rows, one per step, monitored node and state."""
    return trajectory.to_frame().to_csv(index=False, lineterminator="\n", float_format=FLOAT_FORMAT)


def emit_trajectory_csv(trajectory, path):
    return write_text(trajectory_csv(trajectory), path)
