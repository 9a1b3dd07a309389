import json

import pytest

from archive_lens.catalogue import (
    AccessClass, CategoryPath, CycleError, DatasetRecord, DepthError,
    DuplicateCodeError, DuplicateLabelError, MalformedLine, OrphanParentError,
    Quarantined, Skipped, SpecialSet, Unrecognized, build_snapshot,
    classify_rights, dedupe, level_mixing_violations, load_category_tree,
    load_snapshot, normalize, parse_set_spec, save_snapshot,
)
from archive_lens.config import ENV_VAR, LensConfig
from archive_lens.oai import RawRecord, parse_list_records_page


def write_tree(tmp_path, rows, name="tree.csv"):
    path = tmp_path / name
    lines = ["code,parent,label"] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestParseSetSpec:
    def test_depth3_path(self):
        parsed = parse_set_spec("D30000:D34000:D34200")
        assert isinstance(parsed, CategoryPath)
        assert parsed.codes == ("D30000", "D34000", "D34200")
        assert str(parsed) == "D30000:D34000:D34200"

    def test_depth1_path(self):
        assert parse_set_spec("D30000") == CategoryPath(("D30000",))

    def test_driver_marker_case_insensitive(self):
        assert parse_set_spec("driver") == SpecialSet()
        assert parse_set_spec("Driver") == SpecialSet()
        assert parse_set_spec("DRIVER") == SpecialSet()

    def test_depth4_unrecognized(self):
        parsed = parse_set_spec("D1:D2:D3:D4")
        assert isinstance(parsed, Unrecognized)
        assert parsed.value == "D1:D2:D3:D4"

    def test_bad_alphabet_unrecognized(self):
        assert isinstance(parse_set_spec("d30000"), Unrecognized)
        assert isinstance(parse_set_spec("30000"), Unrecognized)
        assert isinstance(parse_set_spec("D30000::D34200"), Unrecognized)
        assert isinstance(parse_set_spec(""), Unrecognized)


class TestLoadTree:
    def test_three_node_chain(self, tmp_path):
        path = write_tree(tmp_path, [
            ("D30000", "", "Humanities"),
            ("D34000", "D30000", "History"),
            ("D34200", "D34000", "Medieval history"),
        ])
        tree = load_category_tree(path)
        assert len(tree) == 3
        assert [tree.nodes[c].depth for c in ("D30000", "D34000", "D34200")] == [1, 2, 3]
        assert tree.roots == ["D30000"]
        assert tree.path_to("D34200").codes == ("D30000", "D34000", "D34200")

    def test_single_node(self, tmp_path):
        tree = load_category_tree(write_tree(tmp_path, [("D10000", "", "Only")]))
        assert len(tree) == 1
        assert tree.nodes["D10000"].depth == 1

    def test_orphan_parent_named(self, tmp_path):
        path = write_tree(tmp_path, [("D34000", "D99999", "History")])
        with pytest.raises(OrphanParentError, match="D99999"):
            load_category_tree(path)

    def test_cycle(self, tmp_path):
        path = write_tree(tmp_path, [("A1", "B1", "a"), ("B1", "A1", "b")])
        with pytest.raises(CycleError):
            load_category_tree(path)

    def test_depth_overflow(self, tmp_path):
        path = write_tree(tmp_path, [
            ("A1", "", "a"), ("B1", "A1", "b"), ("C1", "B1", "c"), ("D1", "C1", "d")])
        with pytest.raises(DepthError):
            load_category_tree(path)

    def test_duplicate_code(self, tmp_path):
        path = write_tree(tmp_path, [("A1", "", "a"), ("A1", "", "again")])
        with pytest.raises(DuplicateCodeError):
            load_category_tree(path)

    def test_duplicate_sibling_label(self, tmp_path):
        path = write_tree(tmp_path, [
            ("A1", "", "root"), ("B1", "A1", "same"), ("C1", "A1", "same")])
        with pytest.raises(DuplicateLabelError):
            load_category_tree(path)

    def test_same_label_different_parents_ok(self, tmp_path):
        path = write_tree(tmp_path, [
            ("A1", "", "left"), ("A2", "", "right"),
            ("B1", "A1", "same"), ("B2", "A2", "same")])
        assert len(load_category_tree(path)) == 4

    def test_malformed_rows(self, tmp_path):
        bad_header = tmp_path / "bad.csv"
        bad_header.write_text("kode;parent;label\n", encoding="utf-8")
        with pytest.raises(MalformedLine):
            load_category_tree(bad_header)
        with pytest.raises(MalformedLine):
            load_category_tree(write_tree(tmp_path, [("A1", "", "a", "extra")]))
        with pytest.raises(MalformedLine):
            load_category_tree(write_tree(tmp_path, [("", "", "no code")], "b.csv"))


class TestNormalize:
    def test_golden_record(self, golden_page_bytes, golden_tree):
        records, _ = parse_list_records_page(golden_page_bytes)
        result = normalize(records[0], golden_tree)
        assert isinstance(result, DatasetRecord)
        assert result.easy_id == "easy-dataset:29142"
        assert result.persistent_id == "urn:nbn:nl:ui:13-86i-k0w"
        assert result.titles[0] == "Integration from above: the Burgundisation of the Netherlands"
        assert len(result.titles) == 2
        assert result.access == AccessClass.OTHER
        assert result.raw_rights == ["NO_ACCESS", "accept"]
        assert result.categories == [CategoryPath(("D30000", "D34000", "D34200"))]
        assert result.in_driver_set is False
        assert result.creators == ["Dr R. Stein, Universiteit Leiden, Vakgroep Geschiedenis"]
        assert result.subjects == ["prosopography"]
        assert result.coverages == ["Brabant, Flanders, Holland", "1404 - 1482"]
        assert result.dates_verbatim == ["1996-02-05", "2007-01-31"]
        assert result.other_identifiers == [
            "NHDA: R0104", "twips.dans.knaw.nl-3570458965826643767-1170150585757"]
        assert result.landing_url.endswith("urn:nbn:nl:ui:13-86i-k0w")

    def test_deleted_skipped(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:5", datestamp="", deleted=True)
        assert isinstance(normalize(raw, golden_tree), Skipped)

    def test_driver_only_quarantined_with_observation(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:5", datestamp="",
                        set_specs=["driver"],
                        dc_elements=[("title", "t"), ("identifier", "easy-dataset:5")])
        result = normalize(raw, golden_tree)
        assert isinstance(result, Quarantined)
        assert result.reason == "no category path"
        assert result.detail["in_driver"] is True

    def test_unresolvable_path_quarantined(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:5", datestamp="",
                        set_specs=["D34200"],  # depth-1 claim for a depth-3 node
                        dc_elements=[("title", "t")])
        result = normalize(raw, golden_tree)
        assert isinstance(result, Quarantined)
        assert "D34200" in result.reason

    def test_missing_title_quarantined(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:5", datestamp="",
                        set_specs=["D30000"], dc_elements=[("rights", "OPEN_ACCESS")])
        result = normalize(raw, golden_tree)
        assert isinstance(result, Quarantined)
        assert result.reason == "no title"

    def test_easy_id_from_header_fallback(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:77", datestamp="",
                        set_specs=["D30000"], dc_elements=[("title", "t")])
        result = normalize(raw, golden_tree)
        assert result.easy_id == "easy-dataset:77"
        assert result.landing_url.endswith("easy-dataset:77")

    def test_duplicate_paths_collapsed(self, golden_tree):
        raw = RawRecord(identifier="oai:x:easy-dataset:8", datestamp="",
                        set_specs=["D30000", "D30000"], dc_elements=[("title", "t")])
        result = normalize(raw, golden_tree)
        assert result.categories == [CategoryPath(("D30000",))]

    def test_doc_roundtrip_is_fixed_point(self, golden_page_bytes, golden_tree):
        records, _ = parse_list_records_page(golden_page_bytes)
        rec = normalize(records[0], golden_tree)
        doc = rec.to_doc()
        assert DatasetRecord.from_doc(doc).to_doc() == doc

    def test_idempotent_over_reserialization(self, golden_page_bytes, golden_tree):
        # rebuilding a raw record from normalized fields and normalizing
        # again must land on the same record
        records, _ = parse_list_records_page(golden_page_bytes)
        rec = normalize(records[0], golden_tree)
        identifiers = [rec.easy_id]
        if rec.persistent_id:
            identifiers.append(rec.persistent_id)
        identifiers.extend(rec.other_identifiers)
        rebuilt = RawRecord(
            identifier=f"oai:x:{rec.easy_id}",
            datestamp="2012-01-12T10:27:57Z",
            set_specs=[str(p) for p in rec.categories] +
                      (["driver"] if rec.in_driver_set else []),
            dc_elements=(
                [("title", t) for t in rec.titles]
                + [("creator", c) for c in rec.creators]
                + [("identifier", i) for i in identifiers]
                + [("rights", r) for r in rec.raw_rights]
                + [("subject", s) for s in rec.subjects]
                + [("coverage", c) for c in rec.coverages]
                + [("date", d) for d in rec.dates_verbatim]))
        again = normalize(rebuilt, golden_tree)
        assert isinstance(again, DatasetRecord)
        assert again.to_doc() == rec.to_doc()


class TestRights:
    @pytest.mark.parametrize("raw,expected", [
        (["OPEN_ACCESS"], AccessClass.OPEN),
        (["GROUP_ACCESS"], AccessClass.RESTRICTED_GROUP),
        (["RESTRICTED_GROUP"], AccessClass.RESTRICTED_GROUP),
        (["RESTRICTED"], AccessClass.RESTRICTED),
        (["RESTRICTED_REQUEST"], AccessClass.RESTRICTED),
        (["NO_ACCESS"], AccessClass.OTHER),
        (["SOMETHING_NEW"], AccessClass.OTHER),
        ([], AccessClass.OTHER),
        (["accept", "OPEN_ACCESS"], AccessClass.OPEN),
        (["NO_ACCESS", "accept"], AccessClass.OTHER),
    ])
    def test_default_vocabulary(self, raw, expected):
        assert classify_rights(raw, LensConfig()) == expected

    def test_override_file(self, tmp_path, monkeypatch):
        cfg_path = tmp_path / "lens.json"
        cfg_path.write_text(json.dumps({
            "rights_map": {"FULLY_OPEN": "Open"},
            "ui_prefix": "https://archive.example/view/",
        }), encoding="utf-8")
        monkeypatch.setenv(ENV_VAR, str(cfg_path))
        cfg = LensConfig.from_env()
        assert classify_rights(["FULLY_OPEN"], cfg) == AccessClass.OPEN
        assert classify_rights(["OPEN_ACCESS"], cfg) == AccessClass.OTHER
        assert cfg.ui_prefix == "https://archive.example/view/"


def make_dataset(easy_id, paths, access=AccessClass.OPEN, creators=None):
    return DatasetRecord(
        easy_id=easy_id, titles=[f"T {easy_id}"], creators=creators or ["c"],
        categories=[CategoryPath(tuple(p.split(":"))) for p in paths],
        access=access, raw_rights=[], in_driver_set=(access == AccessClass.OPEN),
        landing_url=f"https://x/{easy_id}")


class TestDedupe:
    def test_empty(self):
        assert dedupe([]).records == []

    def test_union_semantics(self):
        a = make_dataset("easy-dataset:1", ["A1"])
        b = make_dataset("easy-dataset:1", ["B1"])
        result = dedupe([a, b])
        assert len(result.records) == 1
        assert [str(p) for p in result.records[0].categories] == ["A1", "B1"]
        assert result.removed == 1
        assert result.conflicts == []

    def test_conflicting_access_logged_first_wins(self):
        a = make_dataset("easy-dataset:1", ["A1"], AccessClass.OPEN)
        b = make_dataset("easy-dataset:1", ["A1"], AccessClass.RESTRICTED)
        result = dedupe([a, b])
        assert result.records[0].access == AccessClass.OPEN
        assert result.conflicts == ["easy-dataset:1"]

    def test_idempotent_and_unique(self):
        records = [make_dataset(f"easy-dataset:{i % 4}", ["A1"]) for i in range(10)]
        once = dedupe(records)
        twice = dedupe(once.records)
        assert twice.records == once.records
        assert twice.removed == 0
        assert len(once.records) <= len(records)
        ids = [r.easy_id for r in once.records]
        assert len(ids) == len(set(ids))


class TestLevelMixing:
    def test_detects_prefix_pair(self):
        rec = make_dataset("easy-dataset:1", ["A1:B1", "A1:B1:C1"])
        assert level_mixing_violations([rec]) == ["easy-dataset:1"]

    def test_cross_branch_levels_allowed(self):
        rec = make_dataset("easy-dataset:1", ["A1:B1:C1", "D2"])
        assert level_mixing_violations([rec]) == []

    def test_generated_corpus_is_clean(self):
        from archive_lens.corpus import CorpusSpec, generate_corpus
        result = generate_corpus(CorpusSpec(
            n_unique=300, seed=3,
            multi_assignment_histogram={1: 150, 2: 100, 3: 40, 9: 10}))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        assert level_mixing_violations(list(snapshot.records)) == []


class TestBuildSnapshot:
    def test_empty(self, golden_tree):
        snapshot = build_snapshot([], golden_tree)
        assert snapshot.records == ()
        assert snapshot.quarantine == ()
        assert snapshot.provenance.counts["unique"] == 0

    def test_deleted_plus_live(self, golden_tree, golden_page_bytes):
        live, _ = parse_list_records_page(golden_page_bytes)
        dead = RawRecord(identifier="oai:x:easy-dataset:9", datestamp="", deleted=True)
        snapshot = build_snapshot([dead, live[0]], golden_tree)
        assert len(snapshot.records) == 1
        assert snapshot.quarantine == ()
        assert snapshot.provenance.counts["deleted_skipped"] == 1

    def test_paths_resolve_in_tree(self):
        from archive_lens.corpus import CorpusSpec, generate_corpus
        result = generate_corpus(CorpusSpec(
            n_unique=200, seed=11, multi_assignment_histogram={1: 150, 2: 50}))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        for rec in snapshot.records:
            for path in rec.categories:
                assert snapshot.tree.resolves(path)

    def test_taken_at_is_data_derived(self, golden_tree, golden_page_bytes):
        live, _ = parse_list_records_page(golden_page_bytes)
        snapshot = build_snapshot(live, golden_tree)
        assert snapshot.provenance.taken_at == "2012-01-12T10:27:57Z"


class TestSnapshotStore:
    def test_roundtrip_bit_exact(self, tmp_path, golden_tree, golden_page_bytes):
        live, _ = parse_list_records_page(golden_page_bytes)
        quarantined = RawRecord(identifier="oai:x:easy-dataset:55", datestamp="2012-01-01",
                                set_specs=["driver"], dc_elements=[("title", "q")])
        snapshot = build_snapshot(live + [quarantined], golden_tree, source="dump")
        assert len(snapshot.quarantine) == 1

        store1 = tmp_path / "snap1"
        save_snapshot(snapshot, store1)
        loaded = load_snapshot(store1)
        assert [r.to_doc() for r in loaded.records] == [r.to_doc() for r in snapshot.records]
        assert loaded.provenance.to_doc() == snapshot.provenance.to_doc()
        assert [q.raw for q in loaded.quarantine] == [q.raw for q in snapshot.quarantine]

        store2 = tmp_path / "snap2"
        save_snapshot(loaded, store2)
        for name in ("records", "tree.csv", "provenance", "quarantine"):
            assert (store1 / name).read_bytes() == (store2 / name).read_bytes()

    def test_generated_corpus_roundtrip(self, tmp_path):
        from archive_lens.corpus import CorpusSpec, generate_corpus
        result = generate_corpus(CorpusSpec(n_unique=50, seed=5, n_deleted=3,
                                            duplicate_factor=1.2))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        save_snapshot(snapshot, tmp_path / "snap")
        loaded = load_snapshot(tmp_path / "snap")
        assert [r.to_doc() for r in loaded.records] == [r.to_doc() for r in snapshot.records]
