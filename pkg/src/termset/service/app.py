"""FastAPI app: serves the fill-mask protocol from any in-process backend
and, when an engine is configured, term-set expansion as a service.

Error contract: HTTP 400 with {"error": code, "detail": text}. Request
bodies that fail schema validation come back as 400/"bad_request" (not
FastAPI's default 422), keeping mock and real servers indistinguishable.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from termset.errors import (
    BackendRequestError,
    MissingSeedError,
    SeedOovError,
    TermsetError,
    ValidationError,
)
from termset.mlm import MaskedPattern, MlmBackend
from termset.pipeline import Engine
from termset.service.models import (
    ExpandRequest,
    ExpandResponse,
    ExpansionEntry,
    FillMaskRequest,
    FillMaskResponse,
    InfoResponse,
    RankEntry,
    TopEntry,
    VocabContainsResponse,
)

logger = logging.getLogger(__name__)


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def create_app(backend: MlmBackend, engine: Engine | None = None) -> FastAPI:
    app = FastAPI(title="termset fill-mask service", version="1")

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", str(exc.errors()))

    @app.exception_handler(TermsetError)
    async def on_termset_error(request: Request, exc: TermsetError):
        if isinstance(exc, BackendRequestError):
            return _error(400, exc.code, exc.detail)
        if isinstance(exc, (ValidationError, SeedOovError, MissingSeedError)):
            return _error(400, "bad_request", str(exc))
        logger.exception("internal error")
        return _error(500, "internal", str(exc))

    @app.get("/v1/info", response_model=InfoResponse)
    def info():
        meta = backend.info()
        return InfoResponse(
            model=meta.model, vocab_size=meta.vocab_size, max_context=meta.max_context
        )

    @app.get("/v1/vocab/contains", response_model=VocabContainsResponse)
    def vocab_contains(term: str):
        return VocabContainsResponse(in_vocab=backend.contains(term))

    @app.post("/v1/fill-mask", response_model=FillMaskResponse)
    def fill_mask(request: FillMaskRequest):
        from termset.mlm import MASK

        tokens = tuple(request.tokens)
        if not 0 <= request.mask_index < len(tokens):
            raise BackendRequestError(
                "bad_request", f"mask_index {request.mask_index} out of range"
            )
        if tokens[request.mask_index] != MASK or tokens.count(MASK) != 1:
            raise BackendRequestError(
                "invalid_pattern", f"pattern must contain exactly one {MASK} at mask_index"
            )
        pattern = MaskedPattern(tokens, request.mask_index)
        result, lookup = backend.complete(
            pattern, top_q=request.top_q, terms_of_interest=request.terms_of_interest
        )
        return FillMaskResponse(
            vocab_size=result.vocab_size,
            top=[TopEntry(term=e.term, logprob=e.logprob) for e in result.entries],
            lookup={
                term: (None if v is None else RankEntry(rank=v.rank, logprob=v.logprob))
                for term, v in lookup.items()
            },
        )

    @app.post("/v1/expand", response_model=ExpandResponse)
    def expand(request: ExpandRequest):
        if engine is None:
            return _error(400, "method_unavailable", "no expansion engine configured")
        expansion = engine.expand(
            request.method,
            request.seeds,
            request.top_n,
            n_patterns=request.n_patterns,
            q=request.q,
        )
        return ExpandResponse(
            method=expansion.method,
            entries=[
                ExpansionEntry(rank=i, term=t, score=s)
                for i, (t, s) in enumerate(expansion.entries, start=1)
            ],
        )

    return app
