"""Record the golden fill-mask fixture: one request/response pair against
the committed tiny checkpoint, log-probabilities rounded to 6 decimals.
Run once; the output lives in tests/golden/fill_mask.json."""

import json
import os
import sys

from fastapi.testclient import TestClient

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mlm_server.model import MaskedLmModel  # noqa: E402
from mlm_server.service import create_app  # noqa: E402

REQUEST = {
    "tokens": ["the", "capital", "of", "[MASK]", "is", "paris"],
    "mask_index": 3,
    "top_q": 10,
    "terms_of_interest": ["france", "paris", "new york", "unheardofword"],
}


def round_floats(value, places=6):
    if isinstance(value, float):
        return round(value, places)
    if isinstance(value, list):
        return [round_floats(v, places) for v in value]
    if isinstance(value, dict):
        return {k: round_floats(v, places) for k, v in value.items()}
    return value


def main() -> None:
    here = os.path.dirname(os.path.abspath(__file__))
    model = MaskedLmModel(os.path.join(here, "..", "fixtures", "tiny-bert"))
    client = TestClient(create_app(model))
    response = client.post("/v1/fill-mask", json=REQUEST)
    response.raise_for_status()
    fixture = {"request": REQUEST, "response": round_floats(response.json())}
    out = os.path.join(here, "..", "tests", "golden", "fill_mask.json")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {os.path.abspath(out)}")


if __name__ == "__main__":
    main()
