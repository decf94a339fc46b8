"""Offline similarity extraction for the pairwise ranking engine.

Produces the engine's similarities.json from an image folder and a binary
prompt tree, so annotation sessions never run model inference.
"""

from .embedder import ClipEmbedder, Embedder, HashEmbedder
from .extract import (
    ExtractConfig,
    ExtractReport,
    PromptNode,
    build_embedder,
    extract,
    load_tree,
    walk_image,
)

__version__ = "0.1.0"

__all__ = [
    "ClipEmbedder",
    "Embedder",
    "ExtractConfig",
    "ExtractReport",
    "HashEmbedder",
    "PromptNode",
    "build_embedder",
    "extract",
    "load_tree",
    "walk_image",
    "__version__",
]
