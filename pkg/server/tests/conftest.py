import os

import pytest
from fastapi.testclient import TestClient

from mlm_server.model import MaskedLmModel
from mlm_server.service import create_app

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures", "tiny-bert")


@pytest.fixture(scope="session")
def model() -> MaskedLmModel:
    return MaskedLmModel(os.path.abspath(FIXTURE_DIR))


@pytest.fixture(scope="session")
def app(model):
    return create_app(model)


@pytest.fixture(scope="session")
def client(app):
    with TestClient(app) as c:
        yield c
