# Sphinx configuration for turbine-inspect.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

project = 'turbine-inspect'
copyright = '2026, mrfadzay'
author = 'mrfadzay'
release = version = '1.0.0'
language = 'ru'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'myst_parser',
]

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}
master_doc = 'index'
exclude_patterns = ['_build']
templates_path = ['_templates']

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_theme_options = {'navigation_depth': 3}

# Docstrings в стиле Google (Args/Returns/Raises)
autodoc_default_options = {
    'members': True,
    'member-order': 'bysource',
    'undoc-members': False,
}
autodoc_typehints = 'description'
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_attr_annotations = True

myst_enable_extensions = ['colon_fence', 'dollarmath']

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'pillow': ('https://pillow.readthedocs.io/en/stable/', None),
}
