"""Embedding backends.

The ranking engine consumes only numeric score pairs, so any mapping from
images and prompt texts into one shared unit-vector space will do. Two
backends ship:

* ``ClipEmbedder`` wraps a contrastive vision-language model through
  sentence-transformers. The documented default checkpoint is
  ``clip-ViT-B-32``; weights are fetched on first use, so this backend
  needs either network access or a local model cache.
* ``HashEmbedder`` derives a unit vector from a content digest. It has no
  visual semantics, but byte-identical inputs map to identical vectors and
  it needs nothing beyond numpy, which makes it the backend for pipeline
  tests, offline smoke runs, and fixtures.
"""

from __future__ import annotations

import hashlib
import unicodedata
from typing import TYPE_CHECKING, Protocol, Sequence

import numpy as np

if TYPE_CHECKING:
    from PIL.Image import Image

DEFAULT_MODEL = "clip-ViT-B-32"
DEFAULT_HASH_DIM = 64


class Embedder(Protocol):
    """Maps images and texts into one vector space, one unit row each."""

    def embed_images(self, images: Sequence["Image"]) -> np.ndarray: ...

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray: ...


class HashEmbedder:
    """Deterministic pseudo-embeddings seeded by a content digest."""

    def __init__(self, dim: int = DEFAULT_HASH_DIM):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim

    def embed_images(self, images: Sequence["Image"]) -> np.ndarray:
        rows = []
        for image in images:
            rgb = image.convert("RGB")
            payload = b"img\x00" + rgb.size[0].to_bytes(4, "big") + rgb.size[1].to_bytes(4, "big")
            rows.append(self._vector(payload + rgb.tobytes()))
        return np.stack(rows) if rows else np.empty((0, self.dim))

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        rows = [
            self._vector(b"txt\x00" + unicodedata.normalize("NFC", text).encode("utf-8"))
            for text in texts
        ]
        return np.stack(rows) if rows else np.empty((0, self.dim))

    def _vector(self, payload: bytes) -> np.ndarray:
        digest = hashlib.blake2b(payload, digest_size=16).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vec = rng.standard_normal(self.dim)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:  # cannot happen in practice; keep the contract anyway
            vec[0] = 1.0
            return vec
        return vec / norm


class ClipEmbedder:
    """Contrastive vision-language embeddings via sentence-transformers."""

    def __init__(
        self,
        model_name: str = DEFAULT_MODEL,
        device: str | None = None,
        batch_size: int = 32,
    ):
        # heavy import deferred so offline tools never pay for it
        from sentence_transformers import SentenceTransformer

        self.batch_size = batch_size
        self._model = SentenceTransformer(model_name, device=device)

    def embed_images(self, images: Sequence["Image"]) -> np.ndarray:
        return self._encode(list(images))

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        return self._encode(list(texts))

    def _encode(self, batch: list) -> np.ndarray:
        out = self._model.encode(
            batch,
            batch_size=self.batch_size,
            convert_to_numpy=True,
            normalize_embeddings=True,
            show_progress_bar=False,
        )
        return np.asarray(out, dtype=np.float64)
