"""FastAPI service: the fill-mask wire protocol over any backend (the mock
world by default) plus an expansion endpoint wrapping the engine."""

from termset.service.app import create_app

__all__ = ["create_app"]
