#!/usr/bin/env python3
"""Build a tiny deterministic 768-dim transformer checkpoint for tests.

Usage: python3 make_stub_checkpoint.py OUT_DIR [--max-positions 64]

The sandbox cannot download the real chemistry checkpoint, so tests run
the service against this seeded randomly-initialized stand-in: same
architecture contract (768-dim hidden state, CLS token, truncation at the
position limit), no pretrained knowledge.
"""

import argparse
import os

import torch
from transformers import BertConfig, BertModel, BertTokenizer

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def build(out_dir, max_positions=64, seed=0):
    os.makedirs(out_dir, exist_ok=True)
    pieces = list("abcdefghijklmnopqrstuvwxyz0123456789")
    vocab = SPECIALS + pieces + [f"##{p}" for p in pieces]
    vocab_path = os.path.join(out_dir, "vocab.txt")
    with open(vocab_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(vocab) + "\n")
    tokenizer = BertTokenizer(vocab_file=vocab_path, model_max_length=max_positions)
    tokenizer.save_pretrained(out_dir)

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=768,
        num_hidden_layers=2,
        num_attention_heads=12,
        intermediate_size=512,
        max_position_embeddings=max_positions,
    )
    model = BertModel(config)
    model.save_pretrained(out_dir)
    return out_dir


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir")
    parser.add_argument("--max-positions", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    print(build(args.out_dir, args.max_positions, args.seed))
