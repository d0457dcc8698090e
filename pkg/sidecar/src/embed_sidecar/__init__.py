"""Embedding sidecar: a transformer checkpoint behind a batch HTTP API."""

from .app import MAX_BATCH, create_app
from .encoder import TransformerEncoder

__all__ = ["create_app", "TransformerEncoder", "MAX_BATCH"]
