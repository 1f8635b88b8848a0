"""High-recall candidate generation from a pretrained embedding table:
mean seed vector, exhaustive cosine scan, top-N neighbors. Doubles as the
plain distributional baseline (``s2v`` method).

Table file format: UTF-8 text, one term per line as
``term<TAB>v1 v2 ... vd``, optionally preceded by a ``count dim`` header.
The file is assumed frequency-sorted, so a frequency cap is applied by
line order. Terms carrying a part-of-speech tag ("duck|noun") are stripped
at a configurable boundary character.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from termset.errors import CorruptTableError, MissingSeedError, ValidationError
from termset.expansion import Expansion
from termset.mining import SeedSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    """Ordered (term, cosine) pairs, scores non-increasing, terms distinct."""

    entries: tuple[tuple[str, float], ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def terms(self) -> list[str]:
        return [t for t, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


class EmbeddingTable:
    """Immutable term -> dense-vector map; row order is frequency order."""

    def __init__(self, terms: list[str], vectors: np.ndarray):
        if vectors.ndim != 2 or len(terms) != vectors.shape[0]:
            raise CorruptTableError("terms and vector rows do not line up")
        if len(set(terms)) != len(terms):
            raise CorruptTableError("duplicate terms in table")
        self.terms = list(terms)
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self._row = {t: i for i, t in enumerate(terms)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._row

    def vector(self, term: str) -> np.ndarray:
        if term not in self._row:
            raise MissingSeedError(term, where="embedding table")
        return self.vectors[self._row[term]]


def load_table(path: str, tag_boundary: str | None = "|") -> EmbeddingTable:
    """Parse a text embedding file; duplicates after tag stripping keep the
    first (most frequent) row."""
    terms: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dropped = 0
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line_no == 1 and "\t" not in line:
                parts = line.split()
                if len(parts) == 2 and all(p.isdigit() for p in parts):
                    continue  # "count dim" header
                raise CorruptTableError(f"line 1: expected header or term<TAB>vector")
            try:
                term, vec_text = line.split("\t", 1)
            except ValueError as exc:
                raise CorruptTableError(f"line {line_no}: missing tab separator") from exc
            if tag_boundary and tag_boundary in term:
                term = term.split(tag_boundary, 1)[0]
            term = " ".join(term.lower().split())
            values = np.array(vec_text.split(), dtype=np.float64)
            if dim is None:
                dim = values.size
                if dim == 0:
                    raise CorruptTableError(f"line {line_no}: empty vector")
            elif values.size != dim:
                raise CorruptTableError(
                    f"line {line_no}: dimension {values.size} != {dim}"
                )
            if term in seen:
                dropped += 1
                continue
            seen.add(term)
            terms.append(term)
            rows.append(values)
    if not terms:
        raise CorruptTableError("embedding table is empty")
    if dropped:
        logger.info("dropped %d duplicate term(s) after tag stripping", dropped)
    return EmbeddingTable(terms, np.vstack(rows))


def save_table(table: EmbeddingTable, path: str, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"{len(table)} {table.dim}\n")
        for term, row in zip(table.terms, table.vectors):
            fh.write(term + "\t" + " ".join(repr(float(v)) for v in row) + "\n")


def mean_seed_vector(table: EmbeddingTable, seeds: SeedSet) -> np.ndarray:
    """Arithmetic mean of the seed vectors; a missing seed is fatal."""
    return np.mean([table.vector(t) for t in seeds.terms], axis=0)


def top_neighbors(
    table: EmbeddingTable,
    query: np.ndarray,
    n: int,
    freq_cap: int | None = None,
) -> CandidateSet:
    """N highest-cosine terms, restricted to the ``freq_cap`` most frequent
    rows when set. Zero-norm stored vectors are excluded (counted in the
    metadata); ties break lexicographically."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (table.dim,):
        raise ValidationError(f"query dimension {query.shape} != table dimension {table.dim}")
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise ValidationError("query vector has zero norm")
    limit = len(table) if freq_cap is None else min(freq_cap, len(table))
    matrix = table.vectors[:limit]
    norms = np.linalg.norm(matrix, axis=1)
    nonzero = norms > 0.0
    skipped = int(limit - np.count_nonzero(nonzero))
    if skipped:
        logger.warning("excluded %d zero-norm vector(s) from the neighbor scan", skipped)
    safe_norms = np.where(nonzero, norms, 1.0)
    cosines = (matrix @ query) / (safe_norms * qnorm)
    scored = [
        (table.terms[i], float(cosines[i])) for i in range(limit) if nonzero[i]
    ]
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    return CandidateSet(
        entries=tuple(scored[:n]),
        metadata={"scanned": limit, "skipped_zero_norm": skipped},
    )


def expand_s2v(
    table: EmbeddingTable,
    seeds: SeedSet,
    n: int,
    freq_cap: int | None = None,
) -> Expansion:
    """Distributional baseline: the neighbor list itself as a ranking."""
    neighbors = top_neighbors(table, mean_seed_vector(table, seeds), n, freq_cap)
    return Expansion(method="s2v", entries=neighbors.entries, metadata=dict(neighbors.metadata))
