# -*- coding: utf-8 -*-
#
# pinnlab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath(os.path.join("..", "..")))

import pinnlab

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.autosummary',
    'numpydoc',
]

autosummary_generate = True
numpydoc_show_class_members = False

# Add any paths that contain templates here, relative to this directory.
templates_path = ['_templates']

source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = u'pinnlab'
copyright = u'2026, Contributing Entities'
author = u'pinnlab contributors'

# The short X.Y version.
version = pinnlab.__version__
# The full version, including alpha/beta/rc tags.
release = pinnlab.__version__

language = 'en'

exclude_patterns = []

pygments_style = 'sphinx'

todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'

htmlhelp_basename = 'pinnlabdoc'

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy':  ('https://numpy.org/doc/stable/', None),
                       'pandas': ('https://pandas.pydata.org/docs/', None),
                       'scipy':  ('https://docs.scipy.org/doc/scipy/', None)}
