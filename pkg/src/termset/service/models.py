"""Pydantic request/response models for the wire protocol."""

from __future__ import annotations

from pydantic import BaseModel, Field


class FillMaskRequest(BaseModel):
    tokens: list[str]
    mask_index: int
    top_q: int = Field(ge=1)
    terms_of_interest: list[str] = []


class TopEntry(BaseModel):
    term: str
    logprob: float


class RankEntry(BaseModel):
    rank: int
    logprob: float


class FillMaskResponse(BaseModel):
    vocab_size: int
    top: list[TopEntry]
    lookup: dict[str, RankEntry | None]


class VocabContainsResponse(BaseModel):
    in_vocab: bool


class InfoResponse(BaseModel):
    model: str
    vocab_size: int
    max_context: int


class ErrorResponse(BaseModel):
    error: str
    detail: str


class ExpandRequest(BaseModel):
    seeds: list[str]
    method: str = "mpb1"
    top_n: int = Field(default=200, ge=1)
    n_patterns: int | None = Field(default=None, ge=1)
    q: int | None = Field(default=None, ge=1)


class ExpansionEntry(BaseModel):
    rank: int
    term: str
    score: float


class ExpandResponse(BaseModel):
    method: str
    entries: list[ExpansionEntry]
