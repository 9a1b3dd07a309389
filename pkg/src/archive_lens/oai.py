"""OAI-PMH harvesting: ListRecords paging, dump ingestion, raw record export.

Everything upstream of normalization works on RawRecord: the verbatim
header/setSpec/Dublin-Core content of one harvested item. Deleted records
are kept and flagged here; dropping them is the catalogue's decision.
"""

import json
import logging
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Optional

log = logging.getLogger("archive_lens.oai")

# The 15 Dublin Core element names carried by oai_dc payloads.
DC_ELEMENT_NAMES = frozenset([
    "title", "creator", "subject", "description", "publisher",
    "contributor", "date", "type", "format", "identifier",
    "source", "language", "relation", "coverage", "rights",
])

EXPORT_KEYS = ("identifier", "datestamp", "deleted", "setSpecs", "dc")


class MalformedXml(Exception):
    """Response body is not a parseable XML document."""


class ProtocolError(Exception):
    """The endpoint answered with an OAI-PMH <error> element."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message


class TransportError(Exception):
    """HTTP transport failed and the retry budget is exhausted."""


class ConfigError(Exception):
    """Harvest configuration is invalid."""


class MalformedInput(Exception):
    """Dump file content is not a recognized record format."""


@dataclass
class RetryPolicy:
    max_attempts: int = 4
    backoff_initial: float = 1.0
    backoff_factor: float = 2.0

    def validate(self):
        if self.max_attempts < 1:
            raise ConfigError("retry.max_attempts must be >= 1")
        if self.backoff_factor <= 1.0:
            raise ConfigError("retry.backoff_factor must be > 1")
        if self.backoff_initial < 0:
            raise ConfigError("retry.backoff_initial must be >= 0")


@dataclass
class HarvestConfig:
    base_url: str
    metadata_prefix: str = "oai_dc"
    set_filter: Optional[str] = None
    from_: Optional[str] = None
    until: Optional[str] = None
    max_pages: Optional[int] = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    timeout: float = 30.0

    def __post_init__(self):
        parts = urllib.parse.urlparse(self.base_url)
        if not (parts.scheme and parts.netloc):
            raise ConfigError(f"base_url must be absolute: {self.base_url!r}")
        if not self.metadata_prefix:
            raise ConfigError("metadata_prefix must be non-empty")
        if self.max_pages is not None and self.max_pages < 1:
            raise ConfigError("max_pages must be positive")
        self.retry.validate()
        lo = _parse_utc(self.from_) if self.from_ else None
        hi = _parse_utc(self.until) if self.until else None
        if self.from_ and lo is None:
            raise ConfigError(f"unparseable 'from' timestamp: {self.from_!r}")
        if self.until and hi is None:
            raise ConfigError(f"unparseable 'until' timestamp: {self.until!r}")
        if lo and hi and lo > hi:
            raise ConfigError("'from' must not be after 'until'")


@dataclass
class RawRecord:
    identifier: str
    datestamp: str
    set_specs: list[str] = field(default_factory=list)
    deleted: bool = False
    dc_elements: list[tuple[str, str]] = field(default_factory=list)

    @property
    def datestamp_utc(self) -> Optional[datetime]:
        """Parsed UTC datestamp, or None when the verbatim string is unparseable."""
        return _parse_utc(self.datestamp)

    @property
    def unknown_dc_names(self) -> list[str]:
        """Element names outside the Dublin Core vocabulary, first-seen order."""
        seen = []
        for name, _ in self.dc_elements:
            if name not in DC_ELEMENT_NAMES and name not in seen:
                seen.append(name)
        return seen

    def dc_values(self, name: str) -> list[str]:
        return [v for n, v in self.dc_elements if n == name]

    def to_export_map(self) -> dict:
        return {
            "identifier": self.identifier,
            "datestamp": self.datestamp,
            "deleted": self.deleted,
            "setSpecs": list(self.set_specs),
            "dc": [[n, v] for n, v in self.dc_elements],
        }

    @classmethod
    def from_export_map(cls, doc: dict) -> "RawRecord":
        if not isinstance(doc, dict) or set(doc) != set(EXPORT_KEYS):
            raise MalformedInput(f"export map must have keys {EXPORT_KEYS}")
        try:
            return cls(
                identifier=str(doc["identifier"]),
                datestamp=str(doc["datestamp"]),
                deleted=bool(doc["deleted"]),
                set_specs=[str(s) for s in doc["setSpecs"]],
                dc_elements=[(str(n), str(v)) for n, v in doc["dc"]],
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"bad export map: {exc}") from exc


@dataclass
class ResumptionState:
    token: Optional[str] = None
    complete_list_size: Optional[int] = None
    cursor: Optional[int] = None
    pages_fetched: int = 0

    @property
    def complete(self) -> bool:
        return self.token is None


@dataclass
class HarvestSummary:
    pages: int = 0
    records: int = 0
    deleted: int = 0
    retries: int = 0

    def to_doc(self) -> dict:
        return {"pages": self.pages, "records": self.records,
                "deleted": self.deleted, "retries": self.retries}


def _parse_utc(value: Optional[str]) -> Optional[datetime]:
    if not value:
        return None
    for fmt in ("%Y-%m-%dT%H:%M:%SZ", "%Y-%m-%d"):
        try:
            return datetime.strptime(value, fmt).replace(tzinfo=timezone.utc)
        except ValueError:
            continue
    return None


def _local(tag) -> str:
    """Local part of a possibly namespace-qualified element tag."""
    if not isinstance(tag, str):
        return ""
    return tag.rsplit("}", 1)[-1]


def _child(el, name):
    for c in el:
        if _local(c.tag) == name:
            return c
    return None


def _children(el, name):
    return [c for c in el if _local(c.tag) == name]


def _text(el) -> str:
    return (el.text or "").strip() if el is not None else ""


def _record_from_element(rec_el) -> RawRecord:
    header = _child(rec_el, "header")
    if header is None:
        raise MalformedXml("<record> without <header>")
    identifier = _text(_child(header, "identifier"))
    if not identifier:
        raise MalformedXml("<record> header lacks an identifier")
    # Some exports carry <timestamp> where the protocol says <datestamp>.
    datestamp = _text(_child(header, "datestamp")) or _text(_child(header, "timestamp"))
    set_specs = [_text(s) for s in _children(header, "setSpec") if _text(s)]
    deleted = (header.get("status") or "").strip() == "deleted"

    dc_elements: list[tuple[str, str]] = []
    metadata = _child(rec_el, "metadata")
    if metadata is not None:
        containers = list(metadata)
        if containers:
            for el in containers[0]:
                dc_elements.append((_local(el.tag), (el.text or "").strip()))

    rec = RawRecord(identifier=identifier, datestamp=datestamp,
                    set_specs=set_specs, deleted=deleted, dc_elements=dc_elements)
    if rec.unknown_dc_names:
        log.warning("record %s carries non-DC elements: %s",
                    identifier, ", ".join(rec.unknown_dc_names))
    return rec


def parse_list_records_page(xml_bytes: bytes) -> tuple[list[RawRecord], ResumptionState]:
    """Parse one ListRecords response into records plus resumption state.

    Raises ProtocolError when the response is an OAI-PMH <error>, MalformedXml
    when it is not parseable at all.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    for el in root:
        if _local(el.tag) == "error":
            raise ProtocolError(el.get("code") or "unknown", _text(el))

    records = []
    seen_ids = set()
    for el in root.iter():
        if _local(el.tag) != "record":
            continue
        rec = _record_from_element(el)
        if rec.identifier in seen_ids:
            log.warning("duplicate identifier within one page: %s", rec.identifier)
        seen_ids.add(rec.identifier)
        records.append(rec)

    resumption = ResumptionState()
    for el in root.iter():
        if _local(el.tag) == "resumptionToken":
            token = _text(el)
            resumption.token = token or None
            size = el.get("completeListSize")
            cursor = el.get("cursor")
            resumption.complete_list_size = int(size) if size else None
            resumption.cursor = int(cursor) if cursor else None
            break
    return records, resumption


def _fetch(url: str, retry: RetryPolicy, timeout: float) -> tuple[bytes, int]:
    """GET with exponential backoff on transient failures; returns (body, retries)."""
    delay = retry.backoff_initial
    retries = 0
    last_err: Exception = TransportError("no attempt made")
    for attempt in range(retry.max_attempts):
        if attempt:
            time.sleep(delay)
            delay *= retry.backoff_factor
            retries += 1
        try:
            req = urllib.request.Request(url, headers={"User-Agent": "archive-lens/0.1"})
            with urllib.request.urlopen(req, timeout=timeout) as resp:
                return resp.read(), retries
        except urllib.error.HTTPError as exc:
            if exc.code not in (429, 500, 502, 503, 504):
                raise TransportError(f"HTTP {exc.code} fetching {url}") from exc
            last_err = exc
            log.warning("transient HTTP %s from %s (attempt %d/%d)",
                        exc.code, url, attempt + 1, retry.max_attempts)
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last_err = exc
            log.warning("transport failure for %s: %s (attempt %d/%d)",
                        url, exc, attempt + 1, retry.max_attempts)
    raise TransportError(f"retries exhausted for {url}: {last_err}")


def harvest(config: HarvestConfig, sink: Callable[[RawRecord], None]) -> HarvestSummary:
    """Run ListRecords against config.base_url, delivering every record to sink.

    Pages are fetched strictly sequentially: a follow-up request carries only
    the resumption token, never the original filter parameters.
    """
    params: dict[str, str] = {"verb": "ListRecords", "metadataPrefix": config.metadata_prefix}
    if config.set_filter:
        params["set"] = config.set_filter
    if config.from_:
        params["from"] = config.from_
    if config.until:
        params["until"] = config.until

    summary = HarvestSummary()
    while True:
        url = config.base_url + "?" + urllib.parse.urlencode(params)
        body, retries = _fetch(url, config.retry, config.timeout)
        summary.retries += retries
        records, resumption = parse_list_records_page(body)
        summary.pages += 1
        for rec in records:
            summary.records += 1
            if rec.deleted:
                summary.deleted += 1
            sink(rec)
        if resumption.token is None:
            break
        if config.max_pages is not None and summary.pages >= config.max_pages:
            log.info("stopping after max_pages=%d with token still pending", config.max_pages)
            break
        params = {"verb": "ListRecords", "resumptionToken": resumption.token}
    return summary


def raw_export_line(record: RawRecord) -> str:
    """One record as a self-contained JSON line (stable keys, bit-exact round-trip)."""
    return json.dumps(record.to_export_map(), ensure_ascii=False, separators=(",", ":"))


def parse_export_line(line: str) -> RawRecord:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"bad export line: {exc}") from exc
    return RawRecord.from_export_map(doc)


def write_raw_export(records: Iterable[RawRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(raw_export_line(rec))
            fh.write("\n")
            n += 1
    return n


def ingest_dump(path) -> list[RawRecord]:
    """Read a dump of records: either concatenated <record> XML or the JSON-line export.

    The format is sniffed from the first non-whitespace byte. Duplicates are
    preserved verbatim; deduplication happens downstream.
    """
    with open(path, "rb") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if not stripped:
        return []
    if stripped.startswith(b"<"):
        return _ingest_xml_dump(content)
    records = []
    for i, line in enumerate(content.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_export_line(line))
        except MalformedInput as exc:
            raise MalformedInput(f"line {i}: {exc}") from exc
    return records


def _ingest_xml_dump(content: bytes) -> list[RawRecord]:
    text = content.decode("utf-8", errors="replace").strip()
    if text.startswith("<?xml"):
        text = text.split("?>", 1)[1]
    try:
        root = ET.fromstring(text)
        roots = [root]
    except ET.ParseError:
        # concatenated fragments: retry under a synthetic root
        try:
            roots = [ET.fromstring("<dump>" + text + "</dump>")]
        except ET.ParseError as exc:
            raise MalformedInput(f"not parseable as XML record dump: {exc}") from exc
    records = []
    for root in roots:
        elements = [root] if _local(root.tag) == "record" else [
            el for el in root.iter() if _local(el.tag) == "record"]
        for el in elements:
            try:
                records.append(_record_from_element(el))
            except MalformedXml as exc:
                raise MalformedInput(str(exc)) from exc
    return records
