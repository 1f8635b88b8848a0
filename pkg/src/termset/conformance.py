"""Protocol conformance suite for fill-mask servers.

Runs the same checks against any server speaking the wire protocol — the
bundled mock service and real model sidecars alike: response field shapes,
error codes, rank/log-probability consistency, OOV handling for multi-word
terms, determinism, and the top-q prefix property.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import httpx

from termset.mlm import MASK

PROBES = 20
_TOLERANCE = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [
            f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        ]


def _fill(client: httpx.Client, tokens, mask_index, top_q, terms=()):
    return client.post(
        "/v1/fill-mask",
        json={
            "tokens": list(tokens),
            "mask_index": mask_index,
            "top_q": top_q,
            "terms_of_interest": list(terms),
        },
    )


def run_conformance(client: httpx.Client, probes: int = PROBES) -> ConformanceReport:
    report = ConformanceReport()

    def check(name: str, passed: bool, detail: str = "") -> bool:
        report.checks.append(CheckResult(name, bool(passed), detail))
        return bool(passed)

    # -- info shape ---------------------------------------------------------
    resp = client.get("/v1/info")
    ok = resp.status_code == 200
    info = resp.json() if ok else {}
    ok = ok and isinstance(info.get("model"), str)
    ok = ok and isinstance(info.get("vocab_size"), int) and info["vocab_size"] > 0
    ok = ok and isinstance(info.get("max_context"), int) and info["max_context"] > 0
    if not check("info shape", ok, f"got {info}"):
        return report
    vocab_size = info["vocab_size"]

    # -- fill-mask happy path: field shapes ----------------------------------
    top_q = min(50, vocab_size)
    resp = _fill(client, [MASK], 0, top_q)
    ok = resp.status_code == 200
    body = resp.json() if ok else {}
    top = body.get("top", [])
    ok = ok and isinstance(body.get("vocab_size"), int)
    ok = ok and isinstance(body.get("lookup"), dict)
    ok = ok and 0 < len(top) <= top_q
    ok = ok and all(
        isinstance(e.get("term"), str) and isinstance(e.get("logprob"), (int, float))
        for e in top
    )
    if not check("fill-mask field shapes", ok, f"status {resp.status_code}"):
        return report
    check(
        "top list ordered by (logprob desc, term asc)",
        all(a["logprob"] > b["logprob"] or (a["logprob"] == b["logprob"] and a["term"] < b["term"])
            for a, b in zip(top, top[1:])),
    )

    # probe plain word terms where possible: real models also emit special
    # tokens and subword pieces, which are not queryable terms
    terms_seen = [e["term"] for e in top]
    words = [t for t in terms_seen if t.isalpha()]
    probe_terms = (words if len(words) >= 2 else terms_seen)[: max(2, probes)]

    # -- rank/logprob consistency on probes ----------------------------------
    resp = _fill(client, ["the", MASK], 1, top_q, probe_terms)
    body = resp.json()
    lookup = body.get("lookup", {})
    ok = set(lookup) == set(probe_terms)
    infos = [(t, lookup[t]) for t in probe_terms if lookup.get(t) is not None]
    for term, entry in infos:
        ok = ok and isinstance(entry.get("rank"), int) and 1 <= entry["rank"] <= vocab_size
    by_rank = sorted(infos, key=lambda kv: kv[1]["rank"])
    for (t1, e1), (t2, e2) in zip(by_rank, by_rank[1:]):
        ok = ok and e1["rank"] != e2["rank"]
        better = e1["logprob"] > e2["logprob"] or (e1["logprob"] == e2["logprob"] and t1 < t2)
        ok = ok and better
    top_map = {e["term"]: i + 1 for i, e in enumerate(body.get("top", []))}
    for term, entry in infos:
        if term in top_map:
            ok = ok and entry["rank"] == top_map[term]
    check(f"rank/logprob consistency on {len(infos)} probes", ok)

    # -- OOV behavior ---------------------------------------------------------
    multi = "new york city"
    resp = _fill(client, ["the", MASK], 1, 5, [multi])
    ok = resp.status_code == 200 and resp.json()["lookup"].get(multi, "missing") is None
    contains = client.get("/v1/vocab/contains", params={"term": multi})
    ok = ok and contains.status_code == 200 and contains.json() == {"in_vocab": False}
    check("multi-word terms are OOV (lookup null, contains false)", ok)

    known = client.get("/v1/vocab/contains", params={"term": probe_terms[0]})
    check(
        "known vocabulary item reported in_vocab",
        known.status_code == 200 and known.json() == {"in_vocab": True},
    )

    # -- determinism ----------------------------------------------------------
    first = _fill(client, ["the", MASK], 1, top_q, probe_terms).json()
    second = _fill(client, ["the", MASK], 1, top_q, probe_terms).json()
    ok = [e["term"] for e in first["top"]] == [e["term"] for e in second["top"]]
    ok = ok and all(
        abs(a["logprob"] - b["logprob"]) <= _TOLERANCE
        for a, b in zip(first["top"], second["top"])
    )
    for term in probe_terms:
        a, b = first["lookup"][term], second["lookup"][term]
        if a is None or b is None:
            ok = ok and a == b
        else:
            ok = ok and a["rank"] == b["rank"] and abs(a["logprob"] - b["logprob"]) <= _TOLERANCE
    check(f"determinism within {_TOLERANCE:g}", ok)

    # -- top-q prefix property --------------------------------------------------
    small = _fill(client, ["the", MASK], 1, min(5, vocab_size)).json()
    large = _fill(client, ["the", MASK], 1, min(10, vocab_size)).json()
    prefix = [e["term"] for e in large["top"]][: len(small["top"])]
    check("top-q prefix property", [e["term"] for e in small["top"]] == prefix)

    # -- error codes ------------------------------------------------------------
    def expect_400(name: str, response: httpx.Response, code: str | None = None):
        ok = response.status_code == 400
        body = {}
        if ok:
            body = response.json()
            ok = isinstance(body.get("error"), str) and isinstance(body.get("detail"), str)
            if code is not None:
                ok = ok and body["error"] == code
        check(name, ok, f"status {response.status_code}, body {body}")

    expect_400(
        "mask_index out of range is a 400",
        _fill(client, ["a", "b"], 5, 3),
        code="bad_request",
    )
    expect_400(
        "missing mask symbol is a 400",
        _fill(client, ["a", "b"], 0, 3),
        code="invalid_pattern",
    )
    expect_400(
        "duplicate mask symbol is a 400",
        _fill(client, [MASK, "x", MASK], 0, 3),
        code="invalid_pattern",
    )
    expect_400("top_q=0 is a 400", _fill(client, [MASK], 0, 0), code="bad_request")
    long_tokens = ["w"] * (info["max_context"] + 1)
    long_tokens[0] = MASK
    expect_400(
        "over-long pattern is a 400 with context_length_exceeded",
        _fill(client, long_tokens, 0, 3),
        code="context_length_exceeded",
    )
    return report
