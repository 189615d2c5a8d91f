#!/usr/bin/env python
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
"""Packaging for riskbn."""
import os
import re

from setuptools import find_packages, setup

PACKAGE_NAME = 'riskbn'
HERE = os.path.abspath(os.path.dirname(__file__))


def read(*parts):
    """Contents of a file below the project root, decoded as UTF-8."""
    with open(os.path.join(HERE, *parts), encoding='utf-8') as infile:
        return infile.read()


def pinned_requirements(filename):
    """Requirement lines of ``filename``; every one must carry a version bound."""
    requirements = [line.split('#')[0].strip() for line in read(filename).splitlines()]
    requirements = [line for line in requirements if line]
    unpinned = [line for line in requirements if not any(pin in line for pin in ('>', '<', '=='))]
    if unpinned:
        raise RuntimeError("Unpinned packages in {filename}: {unpinned}".format(filename=filename, unpinned=unpinned))
    return requirements


META_FILE = read(PACKAGE_NAME, '__init__.py')


def find_meta(meta):
    """Extract __*meta*__ from the package __init__."""
    match = re.search(r"^__{meta}__ = ['\"]([^'\"]*)['\"]".format(meta=meta), META_FILE, re.M)
    if match:
        return match.group(1)
    raise RuntimeError('Unable to find __{meta}__ string.'.format(meta=meta))


setup(
    name=PACKAGE_NAME,
    version=find_meta('version'),
    description="Bayesian-network risk assessment for autonomous underwater robots",
    long_description=read('README.md') + '\n\n' + read('HISTORY.md'),
    long_description_content_type='text/markdown',
    author=find_meta('author'),
    author_email=find_meta('email'),
    packages=find_packages(include=['riskbn', 'riskbn.*']),
    package_data={
        'riskbn': ['models/*.json', 'models/*.csv', '_core/templates/*.j2'],
    },
    install_requires=pinned_requirements('requirements.txt'),
    entry_points={
        'console_scripts': ['riskbn = riskbn._core.cli:main'],
    },
    zip_safe=False,
    keywords='bayesian network, risk assessment, hazard analysis, underwater robotics',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: Apache Software License"
    ],
    test_suite='tests',
    python_requires='>=3.9,<4',
    license="Apache 2")
