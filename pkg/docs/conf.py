# Configuration file for the Sphinx documentation builder.
#
# Only the HTML build is set up; the API pages under api/ are generated by
# sphinxcontrib-apidoc from the package sources.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

import rmhtools

project = 'rmhtools'
copyright = '2026, the rmhtools developers'
author = 'the rmhtools developers'
release = rmhtools.__version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'numpydoc',
    'sphinxcontrib.apidoc',
]

master_doc = 'index'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'

apidoc_module_dir = '../rmhtools'
apidoc_output_dir = 'api'
