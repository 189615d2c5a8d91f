#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# riskbn documentation build configuration file.
#
# Only the settings that differ from the Sphinx defaults are listed here.

import os
import sys

# Make the package importable without installing it.
cwd = os.getcwd()
project_root = os.path.dirname(cwd)
sys.path.insert(0, project_root)

import riskbn  # noqa: E402

# -- General configuration ---------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.napoleon', 'sphinx.ext.viewcode']
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'riskbn'
copyright = "2024, The riskbn Authors"
version = riskbn.__version__
release = riskbn.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'
autodoc_member_order = 'bysource'

# -- Options for HTML output -------------------------------------------

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'riskbndoc'

# -- Options for other builders ----------------------------------------

latex_documents = [
    ('index', 'riskbn.tex', 'riskbn Documentation', 'The riskbn Authors', 'manual'),
]
man_pages = [
    ('index', 'riskbn', 'riskbn Documentation', ['The riskbn Authors'], 1),
]
texinfo_documents = [
    ('index', 'riskbn', 'riskbn Documentation', 'The riskbn Authors', 'riskbn',
     'Bayesian-network risk assessment for underwater robots.', 'Miscellaneous'),
]
