"""Masked-LM wrapper: deterministic fill-mask inference over a local
checkpoint.

Log-probabilities are natural-log softmax over the full vocabulary at the
mask position. Ranks are 1-based over the whole vocabulary, ties broken
lexicographically by token string. A term is in-vocabulary iff the
tokenizer maps it to exactly one non-UNK vocabulary unit.
"""

from __future__ import annotations

import logging

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer

logger = logging.getLogger(__name__)

MASK = "[MASK]"


class ProtocolError(Exception):
    """Maps to an HTTP 400 with {"error": code, "detail": detail}."""

    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


class MaskedLmModel:
    def __init__(self, model_path: str, device: str = "cpu", max_context: int | None = None):
        self.model_id = str(model_path)
        self.tokenizer = AutoTokenizer.from_pretrained(model_path)
        self.model = AutoModelForMaskedLM.from_pretrained(model_path)
        self.model.eval()
        self.device = torch.device(device)
        self.model.to(self.device)
        torch.set_grad_enabled(False)
        limit = int(getattr(self.model.config, "max_position_embeddings", 512))
        self.max_context = min(max_context, limit) if max_context else limit
        self.vocab_size = int(self.model.config.vocab_size)
        self.id_to_token = self.tokenizer.convert_ids_to_tokens(list(range(self.vocab_size)))
        logger.info(
            "loaded %s (vocab %d, context %d, device %s)",
            self.model_id, self.vocab_size, self.max_context, device,
        )

    # -- vocabulary --------------------------------------------------------

    def _single_unit_id(self, term: str) -> int | None:
        if not term or len(term.split()) != 1:
            return None
        pieces = self.tokenizer.tokenize(term)
        if len(pieces) != 1 or pieces[0] == self.tokenizer.unk_token:
            return None
        return int(self.tokenizer.convert_tokens_to_ids(pieces[0]))

    def in_vocab(self, term: str) -> bool:
        return self._single_unit_id(term) is not None

    # -- inference -----------------------------------------------------------

    def fill(self, tokens: list[str], mask_index: int, top_q: int,
             terms_of_interest: list[str]) -> dict:
        if not 0 <= mask_index < len(tokens):
            raise ProtocolError("bad_request", f"mask_index {mask_index} out of range")
        if tokens[mask_index] != MASK:
            raise ProtocolError("invalid_pattern", f"token at mask_index must be {MASK!r}")
        if tokens.count(MASK) != 1:
            raise ProtocolError("invalid_pattern", "pattern must contain exactly one mask")
        if top_q < 1:
            raise ProtocolError("bad_request", "top_q must be >= 1")

        words = list(tokens)
        words[mask_index] = self.tokenizer.mask_token
        encoded = self.tokenizer(" ".join(words), return_tensors="pt")
        input_ids = encoded["input_ids"][0]
        if input_ids.shape[0] > self.max_context:
            raise ProtocolError(
                "context_length_exceeded",
                f"pattern encodes to {input_ids.shape[0]} units, limit is {self.max_context}",
            )
        mask_positions = (input_ids == self.tokenizer.mask_token_id).nonzero().flatten()
        if mask_positions.shape[0] != 1:
            raise ProtocolError("invalid_pattern", "pattern must encode exactly one mask unit")

        encoded = {k: v.to(self.device) for k, v in encoded.items()}
        logits = self.model(**encoded).logits[0, int(mask_positions[0])]
        logprobs = torch.log_softmax(logits.double(), dim=-1).tolist()

        order = sorted(range(self.vocab_size), key=lambda i: (-logprobs[i], self.id_to_token[i]))
        top = [
            {"term": self.id_to_token[i], "logprob": logprobs[i]}
            for i in order[: min(top_q, self.vocab_size)]
        ]
        rank_of = {token_id: rank for rank, token_id in enumerate(order, start=1)}
        lookup: dict = {}
        for term in terms_of_interest:
            token_id = self._single_unit_id(term)
            if token_id is None:
                lookup[term] = None
            else:
                lookup[term] = {"rank": rank_of[token_id], "logprob": logprobs[token_id]}
        return {"vocab_size": self.vocab_size, "top": top, "lookup": lookup}
