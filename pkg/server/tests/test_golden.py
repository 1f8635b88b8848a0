"""Golden fixture: the committed request/response pair must replay exactly
after 6-decimal float rounding."""

import json
import os

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "fill_mask.json")


def round_floats(value, places=6):
    if isinstance(value, float):
        return round(value, places)
    if isinstance(value, list):
        return [round_floats(v, places) for v in value]
    if isinstance(value, dict):
        return {k: round_floats(v, places) for k, v in value.items()}
    return value


def test_golden_fill_mask_replays_byte_identically(client):
    with open(GOLDEN, encoding="utf-8") as fh:
        fixture = json.load(fh)
    response = client.post("/v1/fill-mask", json=fixture["request"])
    assert response.status_code == 200
    got = json.dumps(round_floats(response.json()), sort_keys=True)
    want = json.dumps(fixture["response"], sort_keys=True)
    assert got == want
