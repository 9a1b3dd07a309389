import json
import urllib.request

import pytest

from archive_lens import oai
from archive_lens.mockserver import MockArchive, MockOaiServer, record_xml, records_dump_xml
from archive_lens.oai import (
    ConfigError, HarvestConfig, MalformedInput, MalformedXml, ProtocolError,
    RawRecord, RetryPolicy, TransportError, harvest, ingest_dump,
    parse_export_line, parse_list_records_page, raw_export_line, write_raw_export,
)

FAST_RETRY = RetryPolicy(max_attempts=4, backoff_initial=0.01, backoff_factor=2.0)


def make_records(n, deleted_at=None, page_prefix="rec"):
    records = []
    for i in range(n):
        records.append(RawRecord(
            identifier=f"oai:mock.archive:easy-dataset:{1000 + i}",
            datestamp=f"2012-01-{(i % 28) + 1:02d}T00:00:00Z",
            set_specs=["D30000"],
            deleted=(i == deleted_at),
            dc_elements=[] if i == deleted_at else [
                ("title", f"{page_prefix} {i}"),
                ("identifier", f"easy-dataset:{1000 + i}"),
                ("rights", "OPEN_ACCESS"),
            ]))
    return records


class TestParsePage:
    def test_golden_page(self, golden_page_bytes):
        records, resumption = parse_list_records_page(golden_page_bytes)
        assert len(records) == 1
        rec = records[0]
        assert rec.identifier == "oai:easy.dans.knaw.nl:easy-dataset:29142"
        assert rec.datestamp == "2012-01-12T10:27:57Z"
        assert rec.set_specs == ["D30000:D34000:D34200"]
        assert rec.deleted is False
        assert len(rec.dc_elements) == 14
        assert rec.dc_values("title") == [
            "Integration from above: the Burgundisation of the Netherlands",
            "Integratie van bovenaf: de Bourgondisering van de Nederlanden.",
        ]
        assert rec.dc_values("rights") == ["NO_ACCESS", "accept"]
        assert rec.dc_values("coverage")[0] == "Brabant, Flanders, Holland"
        assert resumption.complete
        assert rec.datestamp_utc.year == 2012

    def test_empty_page(self):
        archive = MockArchive([], page_size=5)
        # render a well-formed page with no records: bypass the error shortcut
        body = archive._envelope("<ListRecords></ListRecords>").encode()
        records, resumption = parse_list_records_page(body)
        assert records == []
        assert resumption.complete

    def test_three_page_sequence(self):
        archive = MockArchive(make_records(15, deleted_at=7), page_size=5)
        tokens = []
        collected = []
        for page in range(3):
            records, resumption = parse_list_records_page(
                archive.render_page(page).encode())
            tokens.append(resumption.token)
            collected.extend(records)
            if resumption.token:
                assert resumption.complete_list_size == 15
        assert tokens == ["t1", "t2", None]
        assert len(collected) == archive.n_pages * 5 == 15

    def test_protocol_error(self):
        archive = MockArchive([], page_size=5)
        body = archive.render_error("noRecordsMatch", "nothing here").encode()
        with pytest.raises(ProtocolError) as err:
            parse_list_records_page(body)
        assert err.value.code == "noRecordsMatch"

    def test_malformed_xml(self):
        with pytest.raises(MalformedXml):
            parse_list_records_page(b"this is not xml <at all")

    def test_deleted_record_flagged(self):
        records = make_records(3, deleted_at=1)
        body = MockArchive(records, page_size=5).render_page(0).encode()
        parsed, _ = parse_list_records_page(body)
        assert [r.deleted for r in parsed] == [False, True, False]
        assert parsed[1].dc_elements == []

    def test_unknown_dc_names_flagged(self):
        rec = RawRecord(identifier="x", datestamp="", dc_elements=[
            ("title", "t"), ("fancyField", "v"), ("fancyField", "w")])
        assert rec.unknown_dc_names == ["fancyField"]


class TestHarvest:
    def test_single_page(self):
        archive = MockArchive(make_records(2), page_size=5)
        got = []
        with MockOaiServer(archive) as server:
            summary = harvest(HarvestConfig(server.base_url, retry=FAST_RETRY), got.append)
        assert summary.to_doc() == {"pages": 1, "records": 2, "deleted": 0, "retries": 0}
        assert [r.identifier for r in got] == [r.identifier for r in archive.records]

    def test_three_pages_with_deletion(self):
        archive = MockArchive(make_records(15, deleted_at=7), page_size=5)
        got = []
        with MockOaiServer(archive) as server:
            summary = harvest(HarvestConfig(server.base_url, retry=FAST_RETRY), got.append)
        assert (summary.pages, summary.records, summary.deleted) == (3, 15, 1)
        # exactly-once, in page order
        assert [r.identifier for r in got] == [r.identifier for r in archive.records]
        assert got == archive.records

    def test_resumption_requests_are_exclusive(self):
        archive = MockArchive(make_records(12), page_size=5)
        with MockOaiServer(archive) as server:
            harvest(HarvestConfig(server.base_url, retry=FAST_RETRY), lambda r: None)
        first, *rest = archive.requests
        assert "metadataPrefix" in first and "resumptionToken" not in first
        for req in rest:
            assert "resumptionToken" in req
            assert "metadataPrefix" not in req
        assert [r.get("resumptionToken") for r in rest] == ["t1", "t2"]

    def test_one_transient_503_is_retried(self):
        archive = MockArchive(make_records(15, deleted_at=7), page_size=5)
        archive.fail_next(503)
        got = []
        with MockOaiServer(archive) as server:
            summary = harvest(HarvestConfig(server.base_url, retry=FAST_RETRY), got.append)
        assert (summary.pages, summary.records, summary.deleted) == (3, 15, 1)
        assert summary.retries == 1
        assert len(got) == 15
        # the failed request plus its retry, then the two token pages
        assert len(archive.requests) == 4

    def test_retries_exhausted(self):
        archive = MockArchive(make_records(2), page_size=5)
        archive.fail_next(503, times=5)
        config = HarvestConfig("http://x/", retry=RetryPolicy(2, 0.01, 2.0))
        with MockOaiServer(archive) as server:
            config.base_url = server.base_url
            with pytest.raises(TransportError):
                harvest(config, lambda r: None)

    def test_protocol_error_propagates(self):
        archive = MockArchive([], page_size=5)
        with MockOaiServer(archive) as server:
            with pytest.raises(ProtocolError) as err:
                harvest(HarvestConfig(server.base_url, retry=FAST_RETRY), lambda r: None)
        assert err.value.code == "noRecordsMatch"

    def test_max_pages_stops_early(self):
        archive = MockArchive(make_records(15), page_size=5)
        got = []
        with MockOaiServer(archive) as server:
            summary = harvest(HarvestConfig(server.base_url, max_pages=2,
                                            retry=FAST_RETRY), got.append)
        assert summary.pages == 2
        assert len(got) == 10

    def test_set_and_window_parameters_forwarded(self):
        archive = MockArchive(make_records(3), page_size=5)
        with MockOaiServer(archive) as server:
            harvest(HarvestConfig(server.base_url, set_filter="D30000",
                                  from_="2011-01-01", until="2012-01-20",
                                  retry=FAST_RETRY), lambda r: None)
        first = archive.requests[0]
        assert first["set"] == "D30000"
        assert first["from"] == "2011-01-01"
        assert first["until"] == "2012-01-20"


class TestConfig:
    def test_relative_url_rejected(self):
        with pytest.raises(ConfigError):
            HarvestConfig("not-a-url")

    def test_empty_prefix_rejected(self):
        with pytest.raises(ConfigError):
            HarvestConfig("http://x/", metadata_prefix="")

    def test_window_order_enforced(self):
        with pytest.raises(ConfigError):
            HarvestConfig("http://x/", from_="2012-01-20", until="2011-01-01")
        HarvestConfig("http://x/", from_="2011-01-01", until="2012-01-20")

    def test_retry_policy_validated(self):
        with pytest.raises(ConfigError):
            HarvestConfig("http://x/", retry=RetryPolicy(max_attempts=0))
        with pytest.raises(ConfigError):
            HarvestConfig("http://x/", retry=RetryPolicy(backoff_factor=1.0))


class TestDumpAndExport:
    def test_export_line_roundtrip_bitexact(self):
        rec = RawRecord(identifier="oai:x:easy-dataset:1", datestamp="2011-11-25T00:00:00Z",
                        set_specs=["D30000:D34000", "driver"], deleted=False,
                        dc_elements=[("title", "Ünïcode check"), ("rights", "accept")])
        line = raw_export_line(rec)
        again = parse_export_line(line)
        assert again == rec
        assert raw_export_line(again) == line
        doc = json.loads(line)
        assert list(doc) == ["identifier", "datestamp", "deleted", "setSpecs", "dc"]

    def test_ingest_jsonl(self, tmp_path):
        records = make_records(4, deleted_at=2)
        path = tmp_path / "dump.jsonl"
        assert write_raw_export(records, path) == 4
        assert ingest_dump(path) == records

    def test_ingest_xml_dump_preserves_duplicates(self, tmp_path, golden_page_bytes):
        records, _ = parse_list_records_page(golden_page_bytes)
        golden = records[0]
        path = tmp_path / "dump.xml"
        path.write_text(records_dump_xml([golden, golden]), encoding="utf-8")
        out = ingest_dump(path)
        assert len(out) == 2
        assert out[0] == out[1] == golden

    def test_ingest_bare_record_fragments(self, tmp_path):
        records = make_records(2)
        text = "\n".join(record_xml(r) for r in records)
        path = tmp_path / "dump.xml"
        path.write_text(text, encoding="utf-8")
        assert ingest_dump(path) == records

    def test_ingest_empty_file(self, tmp_path):
        path = tmp_path / "empty"
        path.write_text("", encoding="utf-8")
        assert ingest_dump(path) == []

    def test_ingest_garbage(self, tmp_path):
        path = tmp_path / "junk"
        path.write_text("{not json\n", encoding="utf-8")
        with pytest.raises(MalformedInput):
            ingest_dump(path)
        path.write_text("<record><oops></record>", encoding="utf-8")
        with pytest.raises(MalformedInput):
            ingest_dump(path)

    def test_ingest_synthetic_dump_matches_generator(self, tmp_path):
        from archive_lens.corpus import CorpusSpec, generate_corpus
        result = generate_corpus(CorpusSpec(n_unique=100, seed=7))
        path = tmp_path / "synthetic.jsonl"
        write_raw_export(result.raws, path)
        assert ingest_dump(path) == result.raws

    def test_unparseable_datestamp_kept_verbatim(self):
        rec = RawRecord(identifier="x", datestamp="sometime in 2011")
        assert rec.datestamp == "sometime in 2011"
        assert rec.datestamp_utc is None


def test_mock_server_rejects_mixed_token_request():
    archive = MockArchive(make_records(6), page_size=5)
    with MockOaiServer(archive) as server:
        url = server.base_url + "?verb=ListRecords&metadataPrefix=oai_dc&resumptionToken=t1"
        with urllib.request.urlopen(url) as resp:
            body = resp.read()
    with pytest.raises(ProtocolError) as err:
        parse_list_records_page(body)
    assert err.value.code == "badArgument"
