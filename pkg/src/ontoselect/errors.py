"""Exception and warning types shared across the pipeline."""


class OntoselectError(Exception):
    """Base class for all pipeline errors."""


class OwlParseError(OntoselectError):
    """Malformed OWL/XML input; carries the byte offset where parsing failed."""

    def __init__(self, message, byte_offset=None, line=None, column=None):
        super().__init__(message)
        self.byte_offset = byte_offset
        self.line = line
        self.column = column


class EmptyExtractionWarning(UserWarning):
    """Raised (as a warning) when an extraction yields zero records."""


class EmbeddingError(OntoselectError):
    """Base class for embedding-backend failures."""


class NoFeaturesError(EmbeddingError):
    """Text produced no hashable tokens."""


class TransportError(EmbeddingError):
    """Remote embedding backend unreachable after the configured retries."""

    def __init__(self, message, retries=0):
        super().__init__(message)
        self.retries = retries


class DimensionMismatchError(OntoselectError):
    """A vector's dimension disagrees with the declared/expected dimension."""


class StoreLookupError(OntoselectError, KeyError):
    """A requested sample id is absent from a vector store."""

    def __init__(self, sample_id):
        super().__init__(f"sample id not in store: {sample_id!r}")
        self.sample_id = sample_id


class DatasetError(OntoselectError):
    """Invalid labeled dataset or data operation precondition."""


class FitError(OntoselectError):
    """Classifier training failed."""


class UnsupportedOptimizerError(FitError):
    """Configured optimizer is accepted in grids but not trainable here."""


class KernelDegenerateError(FitError):
    """Kernel matrix stayed non-positive-definite after jitter retries."""


class GridSearchError(OntoselectError):
    """Grid search could not evaluate any feasible point."""


class FormatError(OntoselectError):
    """Artifact file has an unknown layout or format version."""
