"""Transformer checkpoint wrapped as a deterministic batch text encoder."""

import torch
from transformers import AutoModel, AutoTokenizer


class TransformerEncoder:
    """Embeds texts as the final-layer vector of the leading classification
    token (or mean pooling over non-padding tokens when pooling="mean").

    Inference runs single-threaded in no-grad mode with fixed weights, so
    identical requests produce identical vectors.  Texts longer than the
    model's sequence limit are truncated by the tokenizer and flagged.
    """

    def __init__(self, checkpoint, pooling="cls"):
        if pooling not in ("cls", "mean"):
            raise ValueError(f"unknown pooling {pooling!r}")
        torch.set_num_threads(1)
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self.model = AutoModel.from_pretrained(checkpoint)
        self.model.eval()
        self.pooling = pooling
        self.model_id = str(checkpoint)
        self.dim = int(self.model.config.hidden_size)
        limit = getattr(self.model.config, "max_position_embeddings", 512)
        tokenizer_limit = self.tokenizer.model_max_length
        if tokenizer_limit and tokenizer_limit < 1_000_000:
            limit = min(limit, tokenizer_limit)
        self.max_length = int(limit)

    def embed(self, texts, normalize=False):
        """Returns (vectors, truncated): one dim-length list per text."""
        encoded = self.tokenizer(
            list(texts),
            return_tensors="pt",
            padding=True,
            truncation=True,
            max_length=self.max_length,
        )
        truncated = [
            len(self.tokenizer(text, truncation=False)["input_ids"]) > self.max_length
            for text in texts
        ]
        with torch.no_grad():
            output = self.model(**encoded)
        hidden = output.last_hidden_state
        if self.pooling == "mean":
            mask = encoded["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            vectors = (hidden * mask).sum(dim=1) / mask.sum(dim=1)
        else:
            vectors = hidden[:, 0, :]
        vectors = vectors.double()
        if normalize:
            vectors = vectors / vectors.norm(dim=1, keepdim=True)
        return [row.tolist() for row in vectors], truncated
