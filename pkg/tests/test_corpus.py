import json

import pytest

from archive_lens.catalogue import build_snapshot, dedupe, normalize, DatasetRecord
from archive_lens.corpus import (
    CorpusSpec, SpecError, generate_corpus, largest_remainder, load_spec,
    reference_profile,
)
from archive_lens.analytics import (
    collection_stats, driver_consistency_check, multi_assignment_histogram,
    rollup_counts,
)
from archive_lens.oai import write_raw_export


class TestLargestRemainder:
    def test_sums_exactly(self):
        for total in (0, 1, 7, 100, 21303):
            quotas = largest_remainder([0.62, 0.12, 0.16, 0.10], total)
            assert sum(quotas) == total

    def test_proportions(self):
        quotas = largest_remainder([0.7, 0.3], 21303)
        assert quotas == [14912, 6391]

    def test_deterministic_ties(self):
        assert largest_remainder([1, 1, 1], 4) == largest_remainder([1, 1, 1], 4)


class TestTrivialCorpora:
    def test_all_single_all_open(self):
        result = generate_corpus(CorpusSpec(n_unique=10, seed=1))
        assert result.truth["histogram"] == {"1": 10}
        assert result.truth["consistency"]["n_differences"] == 0
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        assert len(snapshot.records) == 10
        assert driver_consistency_check(snapshot).n_differences == 0

    def test_empty_corpus(self):
        result = generate_corpus(CorpusSpec(n_unique=0, seed=1))
        assert result.raws == []
        assert result.truth["stats"]["n_records"] == 0


class TestDeterminism:
    def test_same_seed_byte_identical(self, tmp_path):
        spec = CorpusSpec(n_unique=120, seed=42, duplicate_factor=1.1, n_deleted=2,
                          multi_assignment_histogram={1: 90, 2: 20, 3: 10})
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        write_raw_export(generate_corpus(spec).raws, a)
        write_raw_export(generate_corpus(spec).raws, b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        base = dict(n_unique=120, multi_assignment_histogram={1: 90, 2: 30})
        a = generate_corpus(CorpusSpec(seed=1, **base)).raws
        b = generate_corpus(CorpusSpec(seed=2, **base)).raws
        assert a != b


class TestInjection:
    def test_duplicate_factor(self):
        result = generate_corpus(CorpusSpec(n_unique=1000, seed=9, duplicate_factor=1.27))
        assert len(result.raws) == 1270
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        assert len(snapshot.records) == 1000
        assert snapshot.provenance.counts["duplicates_removed"] == 270

    def test_deleted_records(self):
        result = generate_corpus(CorpusSpec(n_unique=20, seed=9, n_deleted=5))
        assert sum(1 for r in result.raws if r.deleted) == 5
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        assert len(snapshot.records) == 20
        assert snapshot.provenance.counts["deleted_skipped"] == 5

    def test_planted_driver_differences(self):
        result = generate_corpus(CorpusSpec(n_unique=500, seed=4, driver_error_count=155))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        report = driver_consistency_check(snapshot)
        assert report.n_differences == 155
        assert {d["classification"] for d in report.differences} == {"error"}
        assert sorted(d["easy_id"] for d in report.differences) == \
            sorted(result.truth["consistency"]["ids"])

    def test_embargo_split(self):
        result = generate_corpus(CorpusSpec(n_unique=200, seed=4, driver_error_count=10))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        open_missing = [d["easy_id"]
                        for d in driver_consistency_check(snapshot).differences
                        if d["access"] == "Open" and not d["in_driver"]]
        embargo = set(open_missing[:4])
        report = driver_consistency_check(snapshot, embargo)
        assert report.n_differences == 10
        kinds = [d["classification"] for d in report.differences]
        assert kinds.count("explained_embargo") == len(embargo)
        assert kinds.count("error") == 10 - len(embargo)


class TestBranchPlanting:
    def test_branch_share(self):
        spec = CorpusSpec(
            n_unique=1000, seed=6,
            branch_shares={"D37000": 0.70},
            single_only=["D37000"],
            multi_assignment_histogram={1: 900, 2: 100},
            targets={"branch_unique": {"D37000": 700}})
        result = generate_corpus(spec)
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        table = rollup_counts(snapshot)
        assert table["D37000"].unique_rollup == 700

    def test_restricted_group_confined(self):
        spec = CorpusSpec(
            n_unique=400, seed=6,
            branch_shares={"D37000": 0.5},
            single_only=["D37000"],
            rights_mix={"Open": 0.7, "RestrictedGroup": 0.3},
            restricted_group_only_in="D37000")
        result = generate_corpus(spec)
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        branch = snapshot.tree.subtree("D37000")
        for rec in snapshot.records:
            if rec.access.value == "RestrictedGroup":
                assert all(p.terminal in branch for p in rec.categories)


class TestTruthAgreement:
    def test_analytics_reproduce_truth(self):
        spec = CorpusSpec(
            n_unique=600, seed=13,
            multi_assignment_histogram={1: 480, 2: 80, 3: 30, 4: 9, 9: 1},
            rights_mix={"Open": 0.5, "Restricted": 0.3, "Other": 0.2},
            depositor_powerlaw={"n_depositors": 40, "exponent": 1.2},
            driver_error_count=12)
        result = generate_corpus(spec)
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        truth = result.truth
        assert collection_stats(snapshot).to_doc() == truth["stats"]
        hist = multi_assignment_histogram(snapshot)
        assert {str(k): v for k, v in hist.items()} == truth["histogram"]
        assert rollup_counts(snapshot).to_doc() == truth["rollup"]
        assert driver_consistency_check(snapshot).n_differences == \
            truth["consistency"]["n_differences"]

    def test_top_depositor_ranks_first(self):
        from archive_lens.analytics import depositor_profiles
        result = generate_corpus(CorpusSpec(
            n_unique=300, seed=2,
            depositor_powerlaw={"n_depositors": 25, "exponent": 1.5}))
        snapshot = build_snapshot(result.raws, result.tree, source="synthetic")
        profiles = depositor_profiles(snapshot)
        assert profiles[0].creator == result.truth["top_depositor"]["creator"]
        assert profiles[0].n_datasets == result.truth["top_depositor"]["n_datasets"]


class TestSpecErrors:
    def test_profile_masses_must_sum_to_one(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1,
                                       category_profile={"D30000": 0.5}))

    def test_histogram_must_sum_to_n(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1,
                                       multi_assignment_histogram={1: 5}))

    def test_arity_cap(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1,
                                       multi_assignment_histogram={10: 10}))

    def test_driver_count_bounded(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1, driver_error_count=11))

    def test_restricted_group_quota_feasibility(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(
                n_unique=100, seed=1,
                branch_shares={"D37000": 0.05},
                rights_mix={"RestrictedGroup": 1.0},
                restricted_group_only_in="D37000",
                single_only=["D37000"]))

    def test_unknown_profile_category(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1,
                                       category_profile={"Z9": 1.0}))

    def test_target_mismatch_raises(self):
        with pytest.raises(SpecError):
            generate_corpus(CorpusSpec(n_unique=10, seed=1,
                                       targets={"n_records": 11}))

    def test_unknown_spec_field(self):
        with pytest.raises(SpecError):
            CorpusSpec.from_doc({"n_unique": 5, "mystery": 1})


class TestReferenceProfile:
    def test_planted_targets(self):
        spec = reference_profile()
        result = generate_corpus(spec)
        truth = result.truth
        assert truth["stats"]["n_records"] == 21303
        assert truth["stats"]["n_categories_used"] == 47
        assert truth["stats"]["n_assignments"] == 24993
        assert truth["stats"]["max_categories_per_record"] == 9
        assert truth["stats"]["n_depositors"] == 1700
        assert truth["consistency"]["n_differences"] == 155
        branch = next(n for n in truth["rollup"]["nodes"] if n["code"] == "D37000")
        assert branch["unique_rollup"] == 14912
        # closest feasible single-category share to the reported "about 80%"
        assert truth["histogram"]["1"] == 17620
        assert abs(truth["stats"]["pct_single_category"] - 0.827) < 0.001

    def test_spec_file_roundtrip(self, tmp_path):
        doc = {
            "n_unique": 40, "seed": 3,
            "multi_assignment_histogram": {"1": 30, "2": 10},
            "rights_mix": {"Open": 0.75, "Other": 0.25},
        }
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        spec = load_spec(path)
        result = generate_corpus(spec)
        assert result.truth["stats"]["n_records"] == 40
        assert result.truth["histogram"] == {"1": 30, "2": 10}
