#
# superint-lab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

from django.conf import settings

settings.configure(INSTALLED_APPS=["superint_lab"])

import superint_lab  # noqa: E402

numpydoc_show_class_members = False

# -- General configuration -----------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx.ext.mathjax", "numpydoc"]

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "superint-lab"
copyright = "2024, The superint-lab developers"

# The short X.Y version.
version = ".".join(superint_lab.__version__.split(".")[:2])
# The full version, including alpha/beta/rc tags.
release = superint_lab.__version__

exclude_trees = ["_build"]

pygments_style = "sphinx"

# -- Options for HTML output ---------------------------------------------------

html_theme = "sphinx_rtd_theme"

html_static_path = ["_static"]

htmlhelp_basename = "superint-labdoc"

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
    ("index", "superint-lab.tex", "superint-lab Documentation", "The superint-lab developers", "manual"),
]
