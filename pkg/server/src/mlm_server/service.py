"""FastAPI app exposing the fill-mask wire protocol over a loaded model.

Error contract matches the client's expectations: HTTP 400 bodies are
{"error": code, "detail": text}, including schema validation failures.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from mlm_server.model import MaskedLmModel, ProtocolError


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


def create_app(model: MaskedLmModel) -> FastAPI:
    app = FastAPI(title="mlm-server", version="1")

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "bad_request", "detail": str(exc.errors())}
        )

    @app.exception_handler(ProtocolError)
    async def on_protocol_error(request: Request, exc: ProtocolError):
        return JSONResponse(status_code=400, content={"error": exc.code, "detail": exc.detail})

    @app.get("/v1/info", response_model=InfoResponse)
    def info():
        return InfoResponse(
            model=model.model_id,
            vocab_size=model.vocab_size,
            max_context=model.max_context,
        )

    @app.get("/v1/vocab/contains", response_model=VocabContainsResponse)
    def vocab_contains(term: str):
        return VocabContainsResponse(in_vocab=model.in_vocab(term))

    @app.post("/v1/fill-mask", response_model=FillMaskResponse)
    def fill_mask(request: FillMaskRequest):
        return model.fill(
            request.tokens, request.mask_index, request.top_q, request.terms_of_interest
        )

    return app
