"""Offline text-to-embedding exporter producing FSDE files."""

from .encoder import (
    DEFAULT_MODELS,
    EmbedJob,
    EncodeSummary,
    ModelLoadError,
    encode_corpus,
    load_model,
    read_texts,
    write_fsde,
)

__all__ = [
    "DEFAULT_MODELS",
    "EmbedJob",
    "EncodeSummary",
    "ModelLoadError",
    "encode_corpus",
    "load_model",
    "read_texts",
    "write_fsde",
]

__version__ = "0.1.0"
