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
"""Interactive bokeh charts of tornado and trajectory results."""

import logging

import bokeh.io
import bokeh.models
import bokeh.palettes
import bokeh.plotting
from bokeh.resources import INLINE

from riskbn._core.errors import InvalidQuery, IoError
from riskbn._core.options import options

logger = logging.getLogger(__name__)


class RiskChart:
    """Base class: a bokeh figure with a title and an HTML ``save``.

    Args:
        title (str): Chart title.
        width (int, optional): Defaults to the ``chart.width`` option.
        height (int, optional): Defaults to the ``chart.height`` option.
    """

    def __init__(self, title="", width=None, height=None, **figure_args):
        self.width = width or options.get_option("chart.width")
        self.height = height or options.get_option("chart.height")
        self.figure = bokeh.plotting.figure(
            width=self.width,
            height=self.height,
            tools="save,hover",
            active_drag=None,
            **figure_args,
        )
        self.figure.toolbar.logo = None
        self.set_title(title)

    def __repr__(self):
        return "{cls}(title='{title}')".format(cls=type(self).__name__, title=self.title)

    @property
    def title(self):
        return self.figure.title.text

    def set_title(self, title):
        self.figure.title.text = title
        return self

    def save(self, filename):
        """Save the chart as a standalone HTML file."""
        try:
            bokeh.io.saving.save(self.figure, filename=filename, resources=INLINE, title=self.title or "riskbn chart")
        except OSError as e:
            raise IoError(filename, e.strerror or str(e))
        logger.info("Saved chart to %s", filename)
        return self


class TornadoChart(RiskChart):
    """Horizontal bars from low to high posterior, widest on top."""

    def __init__(self, entries, title=None, width=None, height=None):
        if not entries:
            raise InvalidQuery("A tornado chart needs at least one entry")
        labels = [entry.label for entry in entries]
        if title is None:
            title = "P({target}) sensitivity".format(target=entries[0].target)
        super().__init__(title, width, height, y_range=list(reversed(labels)))
        source = bokeh.models.ColumnDataSource(
            {
                "label": labels,
                "low": [entry.low for entry in entries],
                "high": [entry.high for entry in entries],
                "spread": [entry.spread for entry in entries],
            }
        )
        self.figure.hbar(y="label", left="low", right="high", height=0.7, source=source)
        self.figure.add_layout(
            bokeh.models.Span(location=entries[0].baseline, dimension="height", line_dash="dashed", line_color="black")
        )
        self.figure.xaxis.axis_label = "P({target})".format(target=entries[0].target)
        self.figure.select_one(bokeh.models.HoverTool).tooltips = [("low", "@low"), ("high", "@high")]


class TrajectoryChart(RiskChart):
    """One line per curve over the time steps.

    Args:
        curves (pandas.DataFrame): One column per curve, indexed by step,
            e.g. the output of ``riskbn.compare``.
    """

    def __init__(self, curves, title="", width=None, height=None, step_hours=None):
        if curves.empty:
            raise InvalidQuery("Nothing to plot")
        super().__init__(title, width, height)
        colors = bokeh.palettes.Category10[10]
        hours = step_hours or options.get_option("dbn.step_hours")
        x = [step * hours for step in curves.index]
        for position, column in enumerate(curves.columns):
            self.figure.line(
                x,
                curves[column].tolist(),
                legend_label=str(column),
                line_color=colors[position % len(colors)],
                line_width=2,
            )
        self.figure.xaxis.axis_label = "Hours"
        self.figure.yaxis.axis_label = "Probability"
        self.figure.legend.location = "top_left"

    @classmethod
    def from_trajectory(cls, trajectory, title="", width=None, height=None):
        """Chart the first-state curve of every monitored node."""
        frame = trajectory.to_frame()
        first = {node: trajectory.states[node][0] for node in trajectory.monitored}
        frame = frame[frame["state"] == frame["node"].map(first)]
        curves = frame.pivot(index="step", columns="node", values="probability")[list(trajectory.monitored)]
        return cls(curves, title, width, height, trajectory.step_hours)
