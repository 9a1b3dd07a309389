"""Collection statistics, category rollups, depositor profiles, consistency.

All functions are pure over an immutable Snapshot and use exact integer
arithmetic; ranked views break ties by count descending, then key ascending,
so serialized reports are byte-stable.
"""

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .catalogue import AccessClass, ACCESS_CLASSES, Snapshot

MAX_ARITY = 9


class ArityViolation(Exception):
    """A record carries more category paths than the vocabulary allows."""


class UnknownCategory(Exception):
    """A category code does not name a tree node."""


def canonical_json(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def _class_counter() -> dict:
    return {name: 0 for name in ACCESS_CLASSES}


@dataclass
class CollectionStats:
    n_records: int = 0
    n_categories_used: int = 0
    n_tree_nodes: int = 0
    n_depositors: int = 0
    n_assignments: int = 0
    pct_single_category: float = 0.0
    max_categories_per_record: int = 0
    per_access_class: dict = field(default_factory=_class_counter)
    n_quarantined: int = 0

    def to_doc(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_categories_used": self.n_categories_used,
            "n_tree_nodes": self.n_tree_nodes,
            "n_depositors": self.n_depositors,
            "n_assignments": self.n_assignments,
            "pct_single_category": self.pct_single_category,
            "max_categories_per_record": self.max_categories_per_record,
            "per_access_class": {name: self.per_access_class[name] for name in ACCESS_CLASSES},
            "n_quarantined": self.n_quarantined,
        }


def collection_stats(snapshot: Snapshot) -> CollectionStats:
    records = snapshot.records
    stats = CollectionStats(n_records=len(records), n_tree_nodes=len(snapshot.tree),
                            n_quarantined=len(snapshot.quarantine))
    used = set()
    creators = set()
    n_single = 0
    for rec in records:
        arity = len(rec.categories)
        stats.n_assignments += arity
        stats.max_categories_per_record = max(stats.max_categories_per_record, arity)
        if arity == 1:
            n_single += 1
        for path in rec.categories:
            used.add(path.terminal)
        creators.update(rec.creators)
        stats.per_access_class[rec.access.value] += 1
    stats.n_categories_used = len(used)
    stats.n_depositors = len(creators)
    stats.pct_single_category = n_single / len(records) if records else 0.0
    return stats


@dataclass
class RollupEntry:
    code: str
    direct: int = 0
    assignment_rollup: int = 0
    unique_rollup: int = 0


class RollupTable:
    """Per-node direct and cumulative counts in both counting modes."""

    def __init__(self, entries: dict[str, RollupEntry]):
        self.entries = entries

    def __getitem__(self, code: str) -> RollupEntry:
        return self.entries[code]

    def __contains__(self, code: str):
        return code in self.entries

    def size(self, code: str, mode: str) -> int:
        entry = self.entries[code]
        return entry.assignment_rollup if mode == "assignment" else entry.unique_rollup

    def to_doc(self) -> dict:
        return {"nodes": [
            {"code": e.code, "direct": e.direct,
             "assignment_rollup": e.assignment_rollup, "unique_rollup": e.unique_rollup}
            for e in sorted(self.entries.values(), key=lambda e: e.code)]}


def rollup_counts(snapshot: Snapshot) -> RollupTable:
    tree = snapshot.tree
    entries = {code: RollupEntry(code) for code in tree.nodes}

    touched_records: dict[str, set] = defaultdict(set)
    for rec in snapshot.records:
        for path in rec.categories:
            entries[path.terminal].direct += 1
            for code in path.codes:
                touched_records[code].add(rec.easy_id)
    for code, ids in touched_records.items():
        entries[code].unique_rollup = len(ids)

    # children roll into parents; deepest first so each node is finished
    # before its parent reads it
    for code in sorted(tree.nodes, key=lambda c: -tree.nodes[c].depth):
        entry = entries[code]
        entry.assignment_rollup = entry.direct + sum(
            entries[child].assignment_rollup for child in tree.children(code))
    return RollupTable(entries)


def multi_assignment_histogram(snapshot: Snapshot) -> dict[int, int]:
    histogram: Counter = Counter()
    for rec in snapshot.records:
        arity = len(rec.categories)
        if arity > MAX_ARITY:
            raise ArityViolation(
                f"record {rec.easy_id} carries {arity} categories (max {MAX_ARITY})")
        histogram[arity] += 1
    return dict(sorted(histogram.items()))


def histogram_doc(histogram: dict[int, int]) -> dict:
    return {str(k): v for k, v in sorted(histogram.items())}


@dataclass
class DepositorProfile:
    creator: str
    n_datasets: int = 0
    per_access_class: dict = field(default_factory=_class_counter)
    categories: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "creator": self.creator,
            "n_datasets": self.n_datasets,
            "per_access_class": {name: self.per_access_class[name] for name in ACCESS_CLASSES},
            "categories": list(self.categories),
        }


def depositor_profiles(snapshot: Snapshot) -> list[DepositorProfile]:
    """Profiles per verbatim creator string, ranked by dataset count."""
    profiles: dict[str, DepositorProfile] = {}
    touched: dict[str, set] = defaultdict(set)
    for rec in snapshot.records:
        for creator in rec.creators:
            profile = profiles.get(creator)
            if profile is None:
                profile = profiles[creator] = DepositorProfile(creator=creator)
            profile.n_datasets += 1
            profile.per_access_class[rec.access.value] += 1
            for path in rec.categories:
                touched[creator].update(path.codes)
    for creator, codes in touched.items():
        profiles[creator].categories = sorted(codes)
    return sorted(profiles.values(), key=lambda p: (-p.n_datasets, p.creator))


@dataclass
class AccessBreakdown:
    per_node: dict
    total_expansion: int
    excluded: Optional[str] = None

    def to_doc(self) -> dict:
        return {
            "per_node": {code: {name: counts[name] for name in ACCESS_CLASSES}
                         for code, counts in sorted(self.per_node.items())},
            "total_expansion": self.total_expansion,
            "excluded": self.excluded,
        }


def access_breakdown_by_category(snapshot: Snapshot,
                                 exclude: Optional[str] = None) -> AccessBreakdown:
    """Per-node access-class counts over the assignment expansion.

    A record counts once per category path (terminal node); excluding a node
    removes its whole subtree's assignments.
    """
    tree = snapshot.tree
    excluded_codes: set = set()
    if exclude is not None:
        if exclude not in tree:
            raise UnknownCategory(exclude)
        excluded_codes = tree.subtree(exclude)
    per_node: dict[str, dict] = {}
    total = 0
    for rec in snapshot.records:
        for path in rec.categories:
            if path.terminal in excluded_codes:
                continue
            counts = per_node.get(path.terminal)
            if counts is None:
                counts = per_node[path.terminal] = _class_counter()
            counts[rec.access.value] += 1
            total += 1
    return AccessBreakdown(per_node=per_node, total_expansion=total, excluded=exclude)


@dataclass
class ConsistencyReport:
    differences: list[dict] = field(default_factory=list)

    @property
    def n_differences(self) -> int:
        return len(self.differences)

    def to_doc(self) -> dict:
        return {"n_differences": self.n_differences, "differences": list(self.differences)}


def driver_consistency_check(snapshot: Snapshot,
                             embargo_ids: Optional[set] = None) -> ConsistencyReport:
    """Records whose Driver-set membership contradicts their access class.

    Open records missing from the Driver set that appear in embargo_ids are
    classified explained_embargo; every other difference is an error.
    """
    embargo = embargo_ids or set()
    differences = []
    for rec in snapshot.records:
        is_open = rec.access == AccessClass.OPEN
        if is_open == rec.in_driver_set:
            continue
        if is_open and not rec.in_driver_set and rec.easy_id in embargo:
            classification = "explained_embargo"
        else:
            classification = "error"
        differences.append({
            "easy_id": rec.easy_id,
            "in_driver": rec.in_driver_set,
            "access": rec.access.value,
            "classification": classification,
        })
    differences.sort(key=lambda d: d["easy_id"])
    return ConsistencyReport(differences=differences)
