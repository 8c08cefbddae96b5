"""Narrative-function analysis toolkit for web fiction corpora.

Subpackages cover the 34-symbol function registry, inline annotation
parsing, storyline paradigm matching and mining, recognition metrics,
homogenization analysis, and an experiment harness with mock/replay/http
model backends.
"""

__version__ = "0.1.0"

from . import annotation, harness, homogenization, metrics, paradigm, taxonomy  # noqa: F401,E402
