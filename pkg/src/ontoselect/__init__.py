"""ontoselect: rank domain ontologies by relevance to scientific text.

Pipeline stages: extract annotation texts from OWL/XML ontology files,
filter corpus paragraphs, embed texts into fixed-dimension vectors, train
five classical classifiers over hyperparameter grids, compare them with
nonparametric tests, and report per-ontology prediction statistics for
unlabeled corpora.
"""

from ._core import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
