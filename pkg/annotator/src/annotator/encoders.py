"""Document embedding backends, selected by model-identifier scheme.

  hash:<dim>   deterministic token hashing, fully offline (testing/CI)
  st:<name>    sentence-transformers model (name or local path)
  hf:<name>    transformers AutoModel with mean pooling (name or local path)

Backends resolve eagerly so an unresolvable model fails a job before any
input is read or output touched.
"""

from __future__ import annotations

import numpy as np

from .job import JobError


class HashingEncoder:
    def __init__(self, dim: int):
        from sklearn.feature_extraction.text import HashingVectorizer

        self.vectorizer = HashingVectorizer(
            n_features=dim, lowercase=True, token_pattern=r"(?u)\b\w+\b", norm="l2"
        )

    def encode(self, texts: list[str], batch_size: int = 32) -> np.ndarray:
        return np.asarray(self.vectorizer.transform(texts).todense())


class SentenceTransformerEncoder:
    def __init__(self, name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise JobError("sentence-transformers is not installed") from exc
        try:
            self.model = SentenceTransformer(name)
        except Exception as exc:
            raise JobError(f"cannot resolve sentence-transformers model {name!r}: {exc}") from exc

    def encode(self, texts: list[str], batch_size: int = 32) -> np.ndarray:
        return np.asarray(
            self.model.encode(texts, batch_size=batch_size, normalize_embeddings=True)
        )


class MeanPoolEncoder:
    def __init__(self, name: str):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self.torch = torch
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(name)
            self.model = AutoModel.from_pretrained(name)
        except Exception as exc:
            raise JobError(f"cannot resolve transformers model {name!r}: {exc}") from exc
        self.model.eval()

    def encode(self, texts: list[str], batch_size: int = 32) -> np.ndarray:
        chunks = []
        for start in range(0, len(texts), batch_size):
            batch = texts[start:start + batch_size]
            encoded = self.tokenizer(
                batch, return_tensors="pt", padding=True, truncation=True, max_length=256
            )
            with self.torch.no_grad():
                hidden = self.model(**encoded).last_hidden_state
            mask = encoded["attention_mask"].unsqueeze(-1)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
            chunks.append(pooled.numpy())
        matrix = np.vstack(chunks)
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return matrix / norms


def resolve_encoder(model: str):
    scheme, _, rest = model.partition(":")
    if scheme == "hash":
        try:
            dim = int(rest)
        except ValueError:
            raise JobError(f"hash backend needs a dimension, got {rest!r}") from None
        if dim < 8:
            raise JobError("hash dimension must be >= 8")
        return HashingEncoder(dim)
    if scheme == "st":
        return SentenceTransformerEncoder(rest)
    if scheme == "hf":
        return MeanPoolEncoder(rest)
    raise JobError(f"unknown embedding backend {model!r} (use hash:, st: or hf:)")
