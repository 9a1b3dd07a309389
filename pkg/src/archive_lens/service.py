"""HTTP API over one immutable snapshot: analytics, layouts, search, records.

Every endpoint is a pure function of (snapshot, query string); bodies are
cached per query so identical requests return identical bytes. Quarantined
records never appear in stats counts, layouts, or search hits.
"""

import logging
import mimetypes
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .analytics import (
    AccessBreakdown, UnknownCategory, access_breakdown_by_category,
    canonical_json, collection_stats, depositor_profiles,
    driver_consistency_check, multi_assignment_histogram, histogram_doc,
    rollup_counts,
)
from .catalogue import Snapshot
from .layout import (
    EmptyTree, GroupSpec, MODES, Rect, circle_pack, grouped_treemap,
    tidy_tree_layout,
)

log = logging.getLogger("archive_lens.service")

SEARCH_FIELDS = ("title", "creator", "subject")
DEFAULT_SEARCH_LIMIT = 200
TREEMAP_VIEWPORT = Rect(0.0, 0.0, 4.0, 3.0)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    def to_doc(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


def build_treemap(snapshot: Snapshot, group_key: str = "category",
                  mode: str = "assignment", exclude: Optional[str] = None):
    """Treemap layout over the snapshot: cells per assignment (or per record).

    group=category tiles one cell per (record, path) pair, or per record in
    unique mode; group=depositor tiles one cell per (record, creator) pair.
    Excluding a category removes its entire subtree's assignments; a record
    vanishes only when no path survives.
    """
    if mode not in MODES:
        raise ApiError(400, "BadMode", f"mode must be one of {', '.join(MODES)}")
    excluded: set = set()
    if exclude:
        if exclude not in snapshot.tree:
            raise ApiError(400, "UnknownCategory", f"unknown category {exclude}")
        excluded = snapshot.tree.subtree(exclude)

    groups: dict[str, list] = {}
    if group_key == "category":
        for rec in sorted(snapshot.records, key=lambda r: r.easy_id):
            paths = [p for p in rec.categories if p.terminal not in excluded]
            if mode == "unique":
                paths = paths[:1]
            for path in paths:
                groups.setdefault(path.terminal, []).append(
                    (1.0, (rec.easy_id, str(path)), rec.access.value))
    elif group_key == "depositor":
        for rec in sorted(snapshot.records, key=lambda r: r.easy_id):
            if all(p.terminal in excluded for p in rec.categories):
                continue
            for creator in (rec.creators or ["(unknown)"]):
                groups.setdefault(creator, []).append(
                    (1.0, rec.easy_id, rec.access.value))
    else:
        raise ApiError(400, "BadGroupKey", "group must be category or depositor")

    if not groups:
        raise ApiError(404, "EmptyLayout", "nothing to lay out after filtering")
    specs = [GroupSpec(key=k, members=v) for k, v in groups.items()]
    return grouped_treemap(specs, TREEMAP_VIEWPORT)


class ExplorerService:
    """Request-independent core: snapshot, precomputed analytics, body cache."""

    def __init__(self, snapshot: Snapshot, embargo_ids: Optional[set] = None):
        self.snapshot = snapshot
        self.embargo_ids = set(embargo_ids or ())
        self.rollups = rollup_counts(snapshot)
        self._quarantined = snapshot.quarantined_ids()
        self._cache: dict[str, bytes] = {}
        self._lock = threading.Lock()

    # -- routing ---------------------------------------------------------

    def handle_api(self, path: str, query: dict) -> bytes:
        """Dispatch one /api request to a JSON body; ApiError on bad input."""
        key = path + "?" + urllib.parse.urlencode(sorted(query.items()))
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        body = self._compute(path, query).encode("utf-8")
        with self._lock:
            self._cache[key] = body
        return body

    def _compute(self, path: str, query: dict) -> str:
        if path == "/api/stats":
            return canonical_json(collection_stats(self.snapshot).to_doc())
        if path == "/api/histogram":
            return canonical_json(histogram_doc(multi_assignment_histogram(self.snapshot)))
        if path == "/api/treemap":
            return canonical_json(self._treemap(query).to_doc())
        if path == "/api/circlepack":
            return canonical_json(self._circlepack(query).to_doc())
        if path == "/api/tree":
            return canonical_json(self._tree_layout(query).to_doc())
        if path == "/api/depositors":
            limit = self._int_param(query, "limit", 100)
            return canonical_json(
                [p.to_doc() for p in depositor_profiles(self.snapshot)[:limit]])
        if path == "/api/breakdown":
            exclude = query.get("exclude")
            try:
                breakdown: AccessBreakdown = access_breakdown_by_category(
                    self.snapshot, exclude)
            except UnknownCategory as exc:
                raise ApiError(400, "UnknownCategory", f"unknown category {exc}") from exc
            return canonical_json(breakdown.to_doc())
        if path == "/api/search":
            return canonical_json(self._search(query))
        if path == "/api/consistency":
            report = driver_consistency_check(self.snapshot, self.embargo_ids)
            return canonical_json(report.to_doc())
        if path.startswith("/api/dataset/"):
            return canonical_json(self._dataset(path[len("/api/dataset/"):]))
        raise ApiError(404, "unknown_endpoint", f"no such endpoint: {path}")

    # -- endpoint bodies ---------------------------------------------------

    @staticmethod
    def _int_param(query: dict, name: str, default: int) -> int:
        raw = query.get(name)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ApiError(400, "BadParameter", f"{name} must be an integer") from None
        if value < 1:
            raise ApiError(400, "BadParameter", f"{name} must be >= 1")
        return value

    def _mode(self, query: dict) -> str:
        mode = query.get("mode", "assignment")
        if mode not in MODES:
            raise ApiError(400, "BadMode", f"mode must be one of {', '.join(MODES)}")
        return mode

    def _treemap(self, query: dict):
        return build_treemap(self.snapshot, query.get("group", "category"),
                             query.get("mode", "assignment"), query.get("exclude"))

    def _circlepack(self, query: dict):
        mode = self._mode(query)
        try:
            return circle_pack(self.snapshot.tree, self.rollups, mode=mode)
        except EmptyTree as exc:
            raise ApiError(404, "EmptyLayout", str(exc)) from exc

    def _tree_layout(self, query: dict):
        mode = self._mode(query)
        return tidy_tree_layout(self.snapshot.tree, self.rollups, mode=mode)

    def _search(self, query: dict) -> dict:
        q = query.get("q", "")
        fields_raw = query.get("fields")
        if fields_raw:
            fields = tuple(f.strip() for f in fields_raw.split(",") if f.strip())
            for f in fields:
                if f not in SEARCH_FIELDS:
                    raise ApiError(400, "BadFieldName",
                                   f"fields must be among {', '.join(SEARCH_FIELDS)}")
        else:
            fields = SEARCH_FIELDS
        limit = self._int_param(query, "limit", DEFAULT_SEARCH_LIMIT)

        tokens = [t.lower() for t in q.split()]
        if not tokens:
            return {"hits": [], "total": 0}

        field_getters = {
            "title": lambda r: r.titles,
            "creator": lambda r: r.creators,
            "subject": lambda r: r.subjects,
        }
        scored: list[tuple[int, str]] = []
        for rec in self.snapshot.records:
            values = [v.lower() for f in fields for v in field_getters[f](rec)]
            matches = 0
            ok = True
            for token in tokens:
                hits = sum(1 for v in values if token in v)
                if hits == 0:
                    ok = False
                    break
                matches += hits
            if ok:
                scored.append((matches, rec.easy_id))
        scored.sort(key=lambda s: (-s[0], s[1]))
        return {"hits": [easy_id for _, easy_id in scored[:limit]], "total": len(scored)}

    def _dataset(self, easy_id: str) -> dict:
        easy_id = urllib.parse.unquote(easy_id)
        record = self.snapshot.record_by_id(easy_id)
        if record is None:
            if easy_id in self._quarantined:
                raise ApiError(404, "quarantined",
                               f"record {easy_id} was quarantined during build")
            raise ApiError(404, "UnknownDataset", f"no dataset {easy_id}")
        return record.to_doc()


class _Handler(BaseHTTPRequestHandler):
    service: ExplorerService = None  # bound by make_server()
    static_dir: Optional[Path] = None
    cors: bool = False

    def log_message(self, fmt, *args):
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: bytes, content_type: str):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        if self.cors:
            self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        parsed = urllib.parse.urlparse(self.path)
        path = parsed.path
        query = dict(urllib.parse.parse_qsl(parsed.query))
        if path.startswith("/api/"):
            if self.service is None:
                err = ApiError(503, "SnapshotNotLoaded", "no snapshot is loaded")
                self._send(503, canonical_json(err.to_doc()).encode("utf-8"),
                           "application/json; charset=utf-8")
                return
            try:
                body = self.service.handle_api(path, query)
                self._send(200, body, "application/json; charset=utf-8")
            except ApiError as exc:
                self._send(exc.status, canonical_json(exc.to_doc()).encode("utf-8"),
                           "application/json; charset=utf-8")
            return
        self._serve_static(path)

    def _serve_static(self, path: str):
        if self.static_dir is None:
            err = ApiError(404, "unknown_endpoint", "no static bundle configured")
            self._send(404, canonical_json(err.to_doc()).encode("utf-8"),
                       "application/json; charset=utf-8")
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        root = self.static_dir.resolve()
        if root not in target.parents and target != root:
            err = ApiError(403, "forbidden", "path escapes the static root")
            self._send(403, canonical_json(err.to_doc()).encode("utf-8"),
                       "application/json; charset=utf-8")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            err = ApiError(404, "unknown_endpoint", f"no such path: {path}")
            self._send(404, canonical_json(err.to_doc()).encode("utf-8"),
                       "application/json; charset=utf-8")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._send(200, target.read_bytes(), ctype)


class ExplorerHTTPServer:
    """Socket lifecycle around ExplorerService; context manager for tests."""

    def __init__(self, service: Optional[ExplorerService], host="127.0.0.1", port=8080,
                 static_dir=None, cors=False):
        handler = type("BoundHandler", (_Handler,), {
            "service": service,
            "static_dir": Path(static_dir) if static_dir else None,
            "cors": cors,
        })
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self):
        self._thread.start()
        return self

    def serve_until_interrupted(self):
        try:
            self._server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
        return False

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread.is_alive():
            self._thread.join(timeout=5)


def load_embargo_ids(path) -> set:
    with open(path, "r", encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}
