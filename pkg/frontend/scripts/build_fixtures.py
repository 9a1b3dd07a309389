#!/usr/bin/env python3
"""Record canned explorer-API responses for the frontend test suite.

Builds a small deterministic snapshot with the backend package, runs every
request the UI tests replay, and writes a url -> body-JSON map. Regenerate
with: python3 frontend/scripts/build_fixtures.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from archive_lens.catalogue import build_snapshot  # noqa: E402
from archive_lens.corpus import CorpusSpec, generate_corpus  # noqa: E402
from archive_lens.oai import RawRecord  # noqa: E402
from archive_lens.service import ApiError, ExplorerService  # noqa: E402

OUT = ROOT / "frontend" / "tests" / "fixtures" / "api.json"


def corpus_snapshot():
    result = generate_corpus(CorpusSpec(
        n_unique=40, seed=2024,
        multi_assignment_histogram={1: 30, 2: 8, 3: 2},
        rights_mix={"Open": 0.6, "RestrictedGroup": 0.1,
                    "Restricted": 0.2, "Other": 0.1},
        branch_shares={"D37000": 0.4}, single_only=["D37000"],
        restricted_group_only_in="D37000",
        depositor_powerlaw={"n_depositors": 6, "exponent": 1.2},
        driver_error_count=3))
    # one extra record with two creators, to exercise multi-creator hover
    shared = RawRecord(
        identifier="oai:mock.archive:easy-dataset:20001",
        datestamp="2011-06-01T12:00:00Z",
        set_specs=["D30000:D34000:D34200", "driver"],
        dc_elements=[
            ("title", "Joint venture annals of two depositors"),
            ("creator", "Depositor 0000"),
            ("creator", "Depositor 0001"),
            ("subject", "history"),
            ("identifier", "easy-dataset:20001"),
            ("rights", "OPEN_ACCESS"),
        ])
    # and one singleton depositor with a single dataset
    solo = RawRecord(
        identifier="oai:mock.archive:easy-dataset:20002",
        datestamp="2011-07-01T12:00:00Z",
        set_specs=["D60000:D61000:D61200", "driver"],
        dc_elements=[
            ("title", "Lone survey of urban allotments"),
            ("creator", "Solo Researcher"),
            ("subject", "urban studies"),
            ("identifier", "easy-dataset:20002"),
            ("rights", "OPEN_ACCESS"),
        ])
    raws = result.raws + [shared, solo]
    return build_snapshot(raws, result.tree, source="synthetic")


def main() -> int:
    snapshot = corpus_snapshot()
    service = ExplorerService(snapshot)

    requests = [
        "/api/stats",
        "/api/treemap?group=category&mode=assignment",
        "/api/treemap?exclude=D37000&group=category&mode=assignment",
        "/api/treemap?group=depositor&mode=assignment",
        "/api/treemap?exclude=D37000&group=depositor&mode=assignment",
        "/api/tree?mode=assignment",
        "/api/tree?mode=unique",
        "/api/circlepack?mode=assignment",
        "/api/depositors?limit=400",
        "/api/search?q=joint",
        "/api/search?q=10013",
        "/api/search?q=zzzznothing",
        "/api/consistency",
    ]
    for rec in snapshot.records:
        requests.append(f"/api/dataset/{rec.easy_id}")

    fixtures = {}
    for request in requests:
        if "?" in request:
            path, query = request.split("?", 1)
            params = dict(p.split("=", 1) for p in query.split("&"))
        else:
            path, params = request, {}
        try:
            body = service.handle_api(path, params)
        except ApiError as exc:
            body = json.dumps(exc.to_doc()).encode()
        fixtures[request] = json.loads(body)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures, ensure_ascii=False, indent=1) + "\n",
                   encoding="utf-8")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
