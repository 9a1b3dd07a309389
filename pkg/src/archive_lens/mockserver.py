"""In-process OAI-PMH endpoint serving canned records, for tests and demos.

The server paginates a fixed record list into ListRecords pages, hands out
resumption tokens, enforces the token-exclusivity protocol rule, and can be
told to fail upcoming requests with chosen HTTP statuses.
"""

import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from xml.sax.saxutils import escape, quoteattr

from .oai import RawRecord

OAI_NS = "http://www.openarchives.org/OAI/2.0/"
OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
DC_NS = "http://purl.org/dc/elements/1.1/"


def record_xml(rec: RawRecord) -> str:
    """Render one RawRecord as an OAI-PMH <record> element."""
    status = ' status="deleted"' if rec.deleted else ""
    parts = [f"<record><header{status}>"]
    parts.append(f"<identifier>{escape(rec.identifier)}</identifier>")
    parts.append(f"<datestamp>{escape(rec.datestamp)}</datestamp>")
    for spec in rec.set_specs:
        parts.append(f"<setSpec>{escape(spec)}</setSpec>")
    parts.append("</header>")
    if not rec.deleted and rec.dc_elements:
        parts.append(
            '<metadata><oai_dc:dc xmlns:oai_dc=%s xmlns:dc=%s>'
            % (quoteattr(OAI_DC_NS), quoteattr(DC_NS)))
        for name, value in rec.dc_elements:
            parts.append(f"<dc:{name}>{escape(value)}</dc:{name}>")
        parts.append("</oai_dc:dc></metadata>")
    parts.append("</record>")
    return "".join(parts)


def records_dump_xml(records) -> str:
    """Concatenated namespaced <record> elements, like a raw archive dump."""
    body = "".join(record_xml(r) for r in records)
    return f'<records xmlns="{OAI_NS}">{body}</records>'


class MockArchive:
    """State behind the endpoint: records, page size, fault schedule, request log."""

    def __init__(self, records, page_size=5):
        self.records = list(records)
        self.page_size = page_size
        self.fault_queue: list[int] = []
        self.requests: list[dict] = []
        self._lock = threading.Lock()

    def fail_next(self, status: int, times: int = 1):
        with self._lock:
            self.fault_queue.extend([status] * times)

    def pop_fault(self):
        with self._lock:
            return self.fault_queue.pop(0) if self.fault_queue else None

    def log_request(self, params: dict):
        with self._lock:
            self.requests.append(params)

    @property
    def n_pages(self) -> int:
        n = len(self.records)
        return max(1, -(-n // self.page_size))

    def page(self, index: int):
        lo = index * self.page_size
        return self.records[lo:lo + self.page_size]

    def render_page(self, index: int) -> str:
        body = "".join(record_xml(r) for r in self.page(index))
        token = ""
        if index + 1 < self.n_pages:
            token = (
                f'<resumptionToken completeListSize="{len(self.records)}" '
                f'cursor="{index * self.page_size}">t{index + 1}</resumptionToken>')
        return self._envelope(f"<ListRecords>{body}{token}</ListRecords>")

    def render_error(self, code: str, message: str) -> str:
        return self._envelope(f'<error code="{code}">{escape(message)}</error>')

    @staticmethod
    def _envelope(inner: str) -> str:
        return (
            '<?xml version="1.0" encoding="UTF-8"?>'
            f'<OAI-PMH xmlns="{OAI_NS}">'
            "<responseDate>2012-01-20T00:00:00Z</responseDate>"
            '<request verb="ListRecords">http://mock.archive/oai</request>'
            f"{inner}</OAI-PMH>")


class _Handler(BaseHTTPRequestHandler):
    archive: MockArchive = None  # set by serve()

    def log_message(self, *args):  # silence default stderr chatter
        pass

    def _send(self, status: int, body: str):
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/xml; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        archive = self.archive
        query = urllib.parse.urlparse(self.path).query
        params = dict(urllib.parse.parse_qsl(query))
        archive.log_request(params)

        fault = archive.pop_fault()
        if fault is not None:
            self._send(fault, "injected fault")
            return

        if params.get("verb") != "ListRecords":
            self._send(200, archive.render_error("badVerb", "only ListRecords is mocked"))
            return
        token = params.get("resumptionToken")
        if token is not None:
            if "metadataPrefix" in params or "set" in params:
                self._send(200, archive.render_error(
                    "badArgument", "resumptionToken is an exclusive argument"))
                return
            if not token.startswith("t") or not token[1:].isdigit():
                self._send(200, archive.render_error("badResumptionToken", token))
                return
            index = int(token[1:])
            if index >= archive.n_pages:
                self._send(200, archive.render_error("badResumptionToken", token))
                return
            self._send(200, archive.render_page(index))
            return
        if "metadataPrefix" not in params:
            self._send(200, archive.render_error("badArgument", "metadataPrefix is required"))
            return
        if not archive.records:
            self._send(200, archive.render_error("noRecordsMatch", "empty archive"))
            return
        self._send(200, archive.render_page(0))


class MockOaiServer:
    """ThreadingHTTPServer wrapper; use as a context manager in tests."""

    def __init__(self, archive: MockArchive, host="127.0.0.1", port=0):
        handler = type("BoundHandler", (_Handler,), {"archive": archive})
        self.archive = archive
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/oai"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
        return False
