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
"""Tests for `riskbn` package."""

import riskbn


def test_examples():
    public_examples = [
        attr
        for attr in dir(riskbn.examples)
        if callable(getattr(riskbn.examples, attr)) and not attr.startswith("_")
    ]
    assert public_examples
    for example in public_examples:
        assert getattr(riskbn.examples, example)() is not None
