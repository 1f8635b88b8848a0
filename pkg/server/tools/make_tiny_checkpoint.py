"""Build the tiny fixture checkpoint committed under fixtures/tiny-bert.

The sandbox has no model-hub access, so the conformance and golden tests
run against this deterministic, seeded miniature instead of a downloaded
checkpoint. Re-running this script reproduces the same weights bit for bit
(fixed seed, CPU init).
"""

import os
import sys

import torch
from transformers import BertConfig, BertForMaskedLM, BertTokenizer

WORDS = """
the a an of in on to is was are and or for with we they he she it i you
capital city country france germany italy spain england paris berlin rome
madrid london king queen president river mountain sea ocean apple orange
banana fruit color red blue green yellow dog cat bird fish pet vet took
our my your his her went visited lives live eat ate drink water wine
coffee tea good bad big small new old york team game player music genre
rock jazz state states united america american first last day night year
month word words name names said says see saw look today tomorrow
yesterday house home school work play read book books written wrote
author famous
""".split()

SUFFIXES = ["##s", "##ing", "##ed", "##er", "##ly"]
CHARS = [chr(c) for c in range(ord("a"), ord("z") + 1)] + [str(d) for d in range(10)]
PUNCT = [".", ",", "?", "!", "-", "'"]
SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def build(out_dir: str) -> None:
    # dedupe while keeping order: single letters also occur as words
    vocab = list(dict.fromkeys(SPECIALS + sorted(set(WORDS)) + SUFFIXES + CHARS + PUNCT))
    os.makedirs(out_dir, exist_ok=True)
    tokenizer = BertTokenizer(
        vocab={token: idx for idx, token in enumerate(vocab)}, do_lower_case=True
    )
    tokenizer.save_pretrained(out_dir)

    torch.manual_seed(20240501)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    model = BertForMaskedLM(config)
    model.eval()
    model.save_pretrained(out_dir)
    print(f"wrote {out_dir}: vocab {len(vocab)}, params "
          f"{sum(p.numel() for p in model.parameters())}")


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "fixtures", "tiny-bert"
    )
    build(os.path.abspath(target))
