# -*- coding: utf-8 -*-
#
# Sphinx configuration of the tpcpy documentation.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath('..') + os.sep)

from tpcpy import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = u'tpcpy'
copyright = u'2026, tpcpy developers'
author = u'tpcpy developers'

release = __version__
version = '.'.join(release.split('.')[:2])

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon'
]

# Docstrings are numpydoc throughout.
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_special_with_doc = True
napoleon_use_param = True
napoleon_use_rtype = True

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'tpcpydoc'

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'tpcpy', u'tpcpy Documentation', [author], 1)
]
