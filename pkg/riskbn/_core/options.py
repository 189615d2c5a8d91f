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
from collections import OrderedDict
import os
from pathlib import Path

import yaml


class RiskbnOptions:
    def __init__(self):
        try:
            options_path = os.environ["RISKBN_CONFIG_DIR"]
        except KeyError:
            home_path = str(Path.home())
            options_path = home_path + "/.riskbn/"
        self._options = OrderedDict(
            {
                "sensitivity.sweep": OptionValue(0.1),
                "sensitivity.points": OptionValue(11),
                "dbn.step_hours": OptionValue(1.0),
                "dbn.step_cap": OptionValue(1000),
                "dbn.monitor": OptionValue(
                    [
                        "environmental_complexity",
                        "mission_complexity",
                        "failure_of_propulsion_system",
                        "failure_of_remote_control",
                        "loss_of_eely",
                    ]
                ),
                "decision.dwell_guard": OptionValue(3),
                "sampling.samples": OptionValue(10000),
                "sampling.seed": OptionValue(0),
                "chart.width": OptionValue(960),
                "chart.height": OptionValue(540),
                "config.options": OptionValue(os.path.join(options_path, "options_config.yaml")),
            }
        )

        config_filename = self.get_option("config.options")
        try:
            self._from_yaml(config_filename)
        except FileNotFoundError:
            pass

        seed = os.environ.get("RISKBN_SEED")
        if seed:
            self.set_option("sampling.seed", int(seed))

    def get_option(self, option_name):
        """Return the value of the given option"""
        return self._options[self._check_name(option_name)].value

    def set_option(self, option_name, option_value):
        """Set the default value of the specified option.

        Available options:
            'sensitivity.sweep': (float)
                Relative half-width of the one-way parameter sweep.
                Default: 0.1

            'sensitivity.points': (int)
                Number of sweep points, odd so the baseline is one of them.
                Default: 11

            'dbn.step_hours': (float)
                Duration of one time slice.
                Default: 1.0

            'dbn.step_cap': (int)
                Largest number of slices accepted without an explicit
                    override.
                Default: 1000

            'dbn.monitor': (list of str)
                Nodes tracked by dynamic simulations when none are given.

            'decision.dwell_guard': (int)
                Consecutive recommendations needed before a switch.
                Default: 3

            'sampling.samples': (int)
                Likelihood weighting sample count.
                Default: 10000

            'sampling.seed': (int)
                Sampler seed. Overridden by the RISKBN_SEED environment
                    variable.
                Default: 0

            'chart.width', 'chart.height': (int)
                Size of HTML charts in pixels.
        """
        self._options[self._check_name(option_name)].value = option_value

    def _check_name(self, option_name):
        if option_name not in self._options:
            raise KeyError(
                "Unknown option '{name}'. Available options: {names}".format(
                    name=option_name, names=list(self._options)
                )
            )
        return option_name

    def _to_yaml(self, filename):
        """Write the options to a yaml file"""
        with open(filename, "w") as outfile:
            yaml.safe_dump(
                {name: option.value for name, option in self._options.items()}, outfile, default_flow_style=False
            )

    def _from_yaml(self, filename):
        """Load options from a yaml file.

        Overwrites any options that are specified in the yaml file.
        """
        with open(filename) as infile:
            yaml_options = yaml.safe_load(infile) or {}
        for name, value in yaml_options.items():
            self.set_option(name, value)


class OptionValue:
    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return "%s" % self.value


options = RiskbnOptions()
