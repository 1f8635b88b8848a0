"""Masked-LM completion contract: single-mask patterns, ranked completion
distributions, rank lookups, and the backend capability protocol.

Ranks are 1-based (rank 1 = highest-probability completion). Ties in
log-probability are broken lexicographically by term string so that every
ranking is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence, runtime_checkable

from termset.errors import ValidationError

MASK = "[MASK]"


@dataclass(frozen=True)
class MaskedPattern:
    """A token sequence with exactly one mask symbol at ``mask_index``."""

    tokens: tuple[str, ...]
    mask_index: int

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if not 0 <= self.mask_index < len(self.tokens):
            raise ValidationError(
                f"mask_index {self.mask_index} out of range for {len(self.tokens)} tokens"
            )
        if self.tokens[self.mask_index] != MASK:
            raise ValidationError(f"token at mask_index must be {MASK!r}")
        if self.tokens.count(MASK) != 1:
            raise ValidationError("pattern must contain exactly one mask symbol")

    @property
    def degenerate(self) -> bool:
        """True when the pattern is nothing but the mask."""
        return len(self.tokens) == 1

    def text(self) -> str:
        return " ".join(self.tokens)

    def unmask(self, replacement: Sequence[str]) -> tuple[str, ...]:
        """Substitute the mask with the given token run."""
        return self.tokens[: self.mask_index] + tuple(replacement) + self.tokens[self.mask_index + 1 :]


@dataclass(frozen=True)
class BackendInfo:
    model: str
    vocab_size: int
    max_context: int


@dataclass(frozen=True)
class CompletionEntry:
    term: str
    logprob: float


@dataclass(frozen=True)
class CompletionResult:
    """Top slice of the completion distribution, best first.

    Log-probabilities are natural logs and non-increasing down the list;
    equal values are ordered lexicographically by term.
    """

    entries: tuple[CompletionEntry, ...]
    vocab_size: int

    def terms(self) -> tuple[str, ...]:
        return tuple(e.term for e in self.entries)


@dataclass(frozen=True)
class RankInfo:
    rank: int
    logprob: float


# term -> RankInfo, or None when the term is not a vocabulary item.
RankLookup = Mapping[str, "RankInfo | None"]


def rank_of(lookup: RankLookup, term: str) -> int | None:
    """1-based rank of a requested term; None marks out-of-vocabulary.

    The term must have been listed in ``terms_of_interest`` of the query
    that produced the lookup.
    """
    if term not in lookup:
        raise KeyError(f"term {term!r} was not requested in terms_of_interest")
    info = lookup[term]
    return None if info is None else info.rank


@runtime_checkable
class MlmBackend(Protocol):
    """Capability contract for masked-LM completion backends.

    Implementations must be deterministic: identical queries yield
    identical responses.
    """

    def complete(
        self,
        pattern: MaskedPattern,
        top_q: int,
        terms_of_interest: Sequence[str] = (),
    ) -> tuple[CompletionResult, dict[str, RankInfo | None]]:
        ...

    def contains(self, term: str) -> bool:
        ...

    def info(self) -> BackendInfo:
        ...
