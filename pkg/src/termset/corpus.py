"""Sentence corpus: ingestion, tokenization, inverted index, occurrence
lookup for (possibly multi-word) terms, and occurrence masking.

One input line is one sentence. Tokenization is whitespace plus punctuation
splitting with lowercasing and no stemming; the LM backend does its own
subword handling, so this layer stays simple and deterministic.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from termset.errors import (
    EmptyCorpusError,
    IngestionError,
    InvalidOccurrenceError,
    ValidationError,
)
from termset.mlm import MASK, MaskedPattern

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

INDEX_FORMAT = "termset-corpus-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[tuple[str, int, int]]:
    """Split text into (token, start, end) triples with character offsets."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(0)
        if config.lowercase:
            tok = tok.lower()
        out.append((tok, m.start(), m.end()))
    return out


def normalize_term(term: str, config: TokenizerConfig = TokenizerConfig()) -> tuple[str, ...]:
    """Token sequence a term must match in the corpus."""
    return tuple(tok for tok, _, _ in tokenize(term, config))


@dataclass(frozen=True)
class Sentence:
    id: int
    raw: str
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Occurrence:
    """One occurrence of a term: token span [start, end) in a sentence."""

    sentence_id: int
    start: int
    end: int

    def __post_init__(self):
        if self.end - self.start < 1:
            raise InvalidOccurrenceError(f"empty span [{self.start}, {self.end})")


class CorpusIndex:
    """Immutable inverted index over a tokenized sentence corpus.

    Postings map each single token to its (sentence id, position) list,
    strictly sorted; multi-word terms are resolved by extending matches of
    their first token. All lookups are read-only and thread-safe.
    """

    def __init__(self, sentences: Iterable[Sentence], config: TokenizerConfig):
        self._sentences = tuple(sentences)
        self._config = config
        postings: dict[str, list[tuple[int, int]]] = {}
        doc_freq: dict[str, int] = {}
        n_tokens = 0
        for sent in self._sentences:
            seen: set[str] = set()
            for pos, tok in enumerate(sent.tokens):
                postings.setdefault(tok, []).append((sent.id, pos))
                if tok not in seen:
                    seen.add(tok)
                    doc_freq[tok] = doc_freq.get(tok, 0) + 1
            n_tokens += len(sent.tokens)
        self._postings = {tok: tuple(pl) for tok, pl in postings.items()}
        self._doc_freq = doc_freq
        self._token_count = n_tokens

    @property
    def config(self) -> TokenizerConfig:
        return self._config

    @property
    def sentence_count(self) -> int:
        return len(self._sentences)

    @property
    def token_count(self) -> int:
        return self._token_count

    @property
    def distinct_tokens(self) -> int:
        return len(self._postings)

    def sentences(self) -> tuple[Sentence, ...]:
        return self._sentences

    def sentence(self, sentence_id: int) -> Sentence:
        if not 0 <= sentence_id < len(self._sentences):
            raise InvalidOccurrenceError(f"sentence id {sentence_id} out of range")
        return self._sentences[sentence_id]

    def postings(self, token: str) -> tuple[tuple[int, int], ...]:
        return self._postings.get(token, ())

    def doc_freq(self, token: str) -> int:
        return self._doc_freq.get(token, 0)

    def find_occurrences(self, term: str, max_n: int | None = None) -> list[Occurrence]:
        """All corpus occurrences of a term, in (sentence id, position) order.

        Multi-word terms match exact contiguous token runs after
        normalization. An absent term yields an empty list.
        """
        term_tokens = normalize_term(term, self._config)
        if not term_tokens:
            raise ValidationError(f"term {term!r} is empty after normalization")
        if max_n is not None and max_n < 1:
            raise ValidationError("max_n must be positive")
        width = len(term_tokens)
        found: list[Occurrence] = []
        for sid, pos in self._postings.get(term_tokens[0], ()):
            tokens = self._sentences[sid].tokens
            if tokens[pos : pos + width] == term_tokens:
                found.append(Occurrence(sid, pos, pos + width))
                if max_n is not None and len(found) >= max_n:
                    break
        return found

    def mask_occurrence(self, occ: Occurrence) -> MaskedPattern:
        """Replace the occurrence span with a single mask symbol."""
        sent = self.sentence(occ.sentence_id)
        if not 0 <= occ.start < occ.end <= len(sent.tokens):
            raise InvalidOccurrenceError(
                f"span [{occ.start}, {occ.end}) out of bounds for sentence {occ.sentence_id}"
            )
        tokens = sent.tokens[: occ.start] + (MASK,) + sent.tokens[occ.end :]
        pattern = MaskedPattern(tokens, occ.start)
        if pattern.degenerate:
            logger.warning("occurrence spans the whole sentence %d; degenerate pattern", occ.sentence_id)
        return pattern


def build_index(
    sentence_source: Iterable[str], config: TokenizerConfig = TokenizerConfig()
) -> CorpusIndex:
    """Tokenize a stream of one-sentence lines into an immutable index.

    Blank lines (no tokens) are skipped; sentence ids stay dense over the
    kept sentences. An exhausted source raises EmptyCorpusError.
    """
    sentences: list[Sentence] = []
    line_no = 0
    skipped = 0
    try:
        for line in sentence_source:
            line_no += 1
            raw = line.rstrip("\n")
            toks = tokenize(raw, config)
            if not toks:
                skipped += 1
                continue
            sentences.append(
                Sentence(
                    id=len(sentences),
                    raw=raw,
                    tokens=tuple(t for t, _, _ in toks),
                    offsets=tuple((s, e) for _, s, e in toks),
                )
            )
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(line_no + 1, str(exc)) from exc
    if not sentences:
        raise EmptyCorpusError("corpus contains no sentences")
    if skipped:
        logger.info("skipped %d blank line(s)", skipped)
    index = CorpusIndex(sentences, config)
    logger.info(
        "indexed %d sentences, %d tokens (%d distinct)",
        index.sentence_count,
        index.token_count,
        index.distinct_tokens,
    )
    return index


def read_corpus(path: str) -> Iterator[str]:
    """Yield corpus lines from a UTF-8 text file."""
    with open(path, encoding="utf-8") as fh:
        yield from fh


def save_index(index: CorpusIndex, path: str, config: dict | None = None) -> None:
    """Persist the index: a JSON version header followed by the raw
    sentences, one per line. Tokenization is deterministic, so queries
    round-trip bit-exactly through save/load."""
    header = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "lowercase": index.config.lowercase,
        "sentences": index.sentence_count,
    }
    if config is not None:
        header["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for sent in index.sentences():
            fh.write(sent.raw + "\n")


def load_index(path: str) -> CorpusIndex:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise IngestionError(1, f"not an index file: {exc}") from exc
        if header.get("format") != INDEX_FORMAT:
            raise IngestionError(1, "unrecognized index format header")
        if header.get("version") != INDEX_VERSION:
            raise IngestionError(1, f"unsupported index version {header.get('version')}")
        config = TokenizerConfig(lowercase=bool(header.get("lowercase", True)))
        index = build_index((line for line in fh), config)
    if index.sentence_count != header.get("sentences"):
        raise IngestionError(1, "sentence count does not match header")
    return index
