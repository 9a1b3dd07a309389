"""Normalization of raw records into a typed, deduplicated Snapshot.

The pipeline is normalize -> drop deleted -> dedupe -> freeze. Records that
cannot be normalized (no resolvable category path, no title, no usable id)
are quarantined with a reason rather than silently dropped or patched.
"""

import csv
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from .config import LensConfig
from .oai import RawRecord, MalformedInput

CODE_PATTERN = re.compile(r"^[A-Z][0-9]+$")
EASY_ID_RE = re.compile(r"easy-dataset:\d+")
MAX_DEPTH = 3
DRIVER_MARKER = "driver"

ACCESS_CLASSES = ("Open", "RestrictedGroup", "Restricted", "Other")


class AccessClass(str, Enum):
    OPEN = "Open"
    RESTRICTED_GROUP = "RestrictedGroup"
    RESTRICTED = "Restricted"
    OTHER = "Other"


class TreeError(Exception):
    """Base for category tree validation failures."""


class CycleError(TreeError):
    pass


class OrphanParentError(TreeError):
    pass


class DepthError(TreeError):
    pass


class DuplicateCodeError(TreeError):
    pass


class DuplicateLabelError(TreeError):
    pass


class MalformedLine(TreeError):
    pass


@dataclass(frozen=True)
class CategoryPath:
    """Root-to-node sequence of category codes, depth 1..3."""

    codes: tuple[str, ...]

    def __post_init__(self):
        if not self.codes or len(self.codes) > MAX_DEPTH:
            raise ValueError(f"path depth must be 1..{MAX_DEPTH}: {self.codes!r}")

    def __str__(self):
        return ":".join(self.codes)

    @property
    def terminal(self) -> str:
        return self.codes[-1]

    @property
    def depth(self) -> int:
        return len(self.codes)

    def is_prefix_of(self, other: "CategoryPath") -> bool:
        return len(self.codes) < len(other.codes) and other.codes[:len(self.codes)] == self.codes

    @classmethod
    def parse(cls, value: str) -> "CategoryPath":
        return cls(tuple(value.split(":")))


@dataclass(frozen=True)
class SpecialSet:
    kind: str = DRIVER_MARKER


@dataclass(frozen=True)
class Unrecognized:
    value: str
    reason: str


def parse_set_spec(value: str, code_pattern=CODE_PATTERN) -> Union[CategoryPath, SpecialSet, Unrecognized]:
    """Total parser for a setSpec value: path, Driver marker, or Unrecognized."""
    stripped = value.strip()
    if stripped.lower() == DRIVER_MARKER:
        return SpecialSet()
    codes = tuple(s.strip() for s in stripped.split(":"))
    if any(not c for c in codes):
        return Unrecognized(value, "empty path segment")
    if len(codes) > MAX_DEPTH:
        return Unrecognized(value, f"depth {len(codes)} exceeds {MAX_DEPTH}")
    bad = [c for c in codes if not code_pattern.match(c)]
    if bad:
        return Unrecognized(value, f"codes not in alphabet: {', '.join(bad)}")
    return CategoryPath(codes)


@dataclass
class CategoryNode:
    code: str
    label: str
    parent: Optional[str]
    depth: int = 0


class CategoryTree:
    """Hierarchical classification, max depth 3; nodes may hold records and children."""

    def __init__(self, nodes: list[CategoryNode]):
        self.nodes: dict[str, CategoryNode] = {}
        for node in nodes:
            if node.code in self.nodes:
                raise DuplicateCodeError(f"duplicate category code {node.code}")
            self.nodes[node.code] = node
        self._children: dict[str, list[str]] = {code: [] for code in self.nodes}
        for node in self.nodes.values():
            if node.parent is None:
                continue
            if node.parent not in self.nodes:
                raise OrphanParentError(
                    f"node {node.code} names undefined parent {node.parent}")
            self._children[node.parent].append(node.code)
        self._assign_depths()
        self._check_sibling_labels()
        # Trees may declare codes outside the default alphabet; relax the
        # setSpec pattern accordingly so their paths still parse.
        if all(CODE_PATTERN.match(c) for c in self.nodes):
            self.code_pattern = CODE_PATTERN
        else:
            self.code_pattern = re.compile(r"^[A-Za-z][A-Za-z0-9_.-]*$")

    def _assign_depths(self):
        for code in self.nodes:
            depth = 0
            cursor: Optional[str] = code
            seen = set()
            while cursor is not None:
                if cursor in seen:
                    raise CycleError(f"cycle through category {cursor}")
                seen.add(cursor)
                depth += 1
                cursor = self.nodes[cursor].parent
            if depth > MAX_DEPTH:
                raise DepthError(f"category {code} sits at depth {depth} > {MAX_DEPTH}")
            self.nodes[code].depth = depth

    def _check_sibling_labels(self):
        groups: dict[Optional[str], set[str]] = {}
        for node in self.nodes.values():
            labels = groups.setdefault(node.parent, set())
            if node.label in labels:
                raise DuplicateLabelError(
                    f"label {node.label!r} repeats among children of {node.parent or 'root'}")
            labels.add(node.label)

    @property
    def roots(self) -> list[str]:
        return [c for c, n in self.nodes.items() if n.parent is None]

    def children(self, code: str) -> list[str]:
        return self._children[code]

    def path_to(self, code: str) -> CategoryPath:
        chain = []
        cursor: Optional[str] = code
        while cursor is not None:
            chain.append(cursor)
            cursor = self.nodes[cursor].parent
        return CategoryPath(tuple(reversed(chain)))

    def resolves(self, path: CategoryPath) -> bool:
        """True when the path equals the tree's root chain to its terminal node."""
        if path.terminal not in self.nodes:
            return False
        return self.path_to(path.terminal).codes == path.codes

    def subtree(self, code: str) -> set[str]:
        out = {code}
        stack = [code]
        while stack:
            for child in self._children[stack.pop()]:
                out.add(child)
                stack.append(child)
        return out

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, code: str):
        return code in self.nodes

    def rows(self) -> list[tuple[str, str, str]]:
        return [(n.code, n.parent or "", n.label) for n in self.nodes.values()]


def load_category_tree(path) -> CategoryTree:
    """Read the code,parent,label CSV; any invariant violation is a hard error."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedLine("tree file is empty") from None
        if [h.strip() for h in header] != ["code", "parent", "label"]:
            raise MalformedLine(f"expected header code,parent,label, got {header!r}")
        nodes = []
        for i, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise MalformedLine(f"line {i}: expected 3 columns, got {len(row)}")
            code, parent, label = (c.strip() for c in row)
            if not code:
                raise MalformedLine(f"line {i}: empty code")
            nodes.append(CategoryNode(code=code, label=label, parent=parent or None))
    return CategoryTree(nodes)


def save_category_tree(tree: CategoryTree, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["code", "parent", "label"])
        writer.writerows(tree.rows())


@dataclass
class DatasetRecord:
    easy_id: str
    titles: list[str]
    creators: list[str]
    categories: list[CategoryPath]
    access: AccessClass
    raw_rights: list[str]
    in_driver_set: bool
    landing_url: str
    persistent_id: Optional[str] = None
    subjects: list[str] = field(default_factory=list)
    coverages: list[str] = field(default_factory=list)
    dates_verbatim: list[str] = field(default_factory=list)
    other_identifiers: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "easy_id": self.easy_id,
            "persistent_id": self.persistent_id,
            "titles": list(self.titles),
            "creators": list(self.creators),
            "categories": [str(p) for p in self.categories],
            "access": self.access.value,
            "raw_rights": list(self.raw_rights),
            "in_driver_set": self.in_driver_set,
            "subjects": list(self.subjects),
            "coverages": list(self.coverages),
            "dates_verbatim": list(self.dates_verbatim),
            "landing_url": self.landing_url,
            "other_identifiers": list(self.other_identifiers),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DatasetRecord":
        return cls(
            easy_id=doc["easy_id"],
            persistent_id=doc.get("persistent_id"),
            titles=list(doc["titles"]),
            creators=list(doc["creators"]),
            categories=[CategoryPath.parse(p) for p in doc["categories"]],
            access=AccessClass(doc["access"]),
            raw_rights=list(doc["raw_rights"]),
            in_driver_set=bool(doc["in_driver_set"]),
            subjects=list(doc.get("subjects", [])),
            coverages=list(doc.get("coverages", [])),
            dates_verbatim=list(doc.get("dates_verbatim", [])),
            landing_url=doc["landing_url"],
            other_identifiers=list(doc.get("other_identifiers", [])),
        )


@dataclass
class Skipped:
    reason: str = "deleted"


@dataclass
class Quarantined:
    raw: RawRecord
    reason: str
    detail: dict = field(default_factory=dict)


def classify_rights(raw_rights: list[str], config: LensConfig) -> AccessClass:
    """First mapped, non-ignored rights token decides the class; default Other."""
    ignore = {t.lower() for t in config.ignore_tokens}
    for value in raw_rights:
        if value.lower() in ignore:
            continue
        mapped = config.rights_map.get(value)
        if mapped is not None:
            return AccessClass(mapped)
        return AccessClass.OTHER
    return AccessClass.OTHER


def normalize(raw: RawRecord, tree: CategoryTree,
              config: Optional[LensConfig] = None) -> Union[DatasetRecord, Skipped, Quarantined]:
    """Total normalization: a typed record, a deleted skip, or a quarantine."""
    if config is None:
        config = LensConfig()
    if raw.deleted:
        return Skipped()

    in_driver = False
    paths: list[CategoryPath] = []
    unrecognized: list[str] = []
    for spec in raw.set_specs:
        parsed = parse_set_spec(spec, tree.code_pattern)
        if isinstance(parsed, SpecialSet):
            in_driver = True
        elif isinstance(parsed, CategoryPath):
            if parsed not in paths:
                paths.append(parsed)
        else:
            unrecognized.append(parsed.value)

    for path in paths:
        if not tree.resolves(path):
            return Quarantined(raw, f"unresolvable category path {path}",
                               {"in_driver": in_driver})
    if not paths:
        return Quarantined(raw, "no category path",
                           {"in_driver": in_driver, "unrecognized": unrecognized})

    easy_id = None
    persistent_id = None
    other_ids = []
    for value in raw.dc_values("identifier"):
        if easy_id is None and EASY_ID_RE.fullmatch(value):
            easy_id = value
        elif persistent_id is None and value.startswith("urn:nbn:"):
            persistent_id = value
        else:
            other_ids.append(value)
    if easy_id is None:
        m = EASY_ID_RE.search(raw.identifier)
        easy_id = m.group(0) if m else raw.identifier

    titles = [t for t in raw.dc_values("title") if t]
    if not titles:
        return Quarantined(raw, "no title", {"in_driver": in_driver})

    raw_rights = raw.dc_values("rights")
    if persistent_id:
        landing_url = config.resolver_prefix + persistent_id
    else:
        landing_url = config.ui_prefix + easy_id

    return DatasetRecord(
        easy_id=easy_id,
        persistent_id=persistent_id,
        titles=titles,
        creators=raw.dc_values("creator"),
        categories=paths,
        access=classify_rights(raw_rights, config),
        raw_rights=raw_rights,
        in_driver_set=in_driver,
        subjects=raw.dc_values("subject"),
        coverages=raw.dc_values("coverage"),
        dates_verbatim=raw.dc_values("date"),
        landing_url=landing_url,
        other_identifiers=other_ids,
    )


@dataclass
class DedupeResult:
    records: list[DatasetRecord]
    removed: int = 0
    conflicts: list[str] = field(default_factory=list)


def dedupe(records: list[DatasetRecord]) -> DedupeResult:
    """Keep first occurrence per easy_id, merging category paths of later copies."""
    by_id: dict[str, DatasetRecord] = {}
    out: list[DatasetRecord] = []
    removed = 0
    conflicts = []
    for rec in records:
        kept = by_id.get(rec.easy_id)
        if kept is None:
            by_id[rec.easy_id] = rec
            out.append(rec)
            continue
        removed += 1
        for path in rec.categories:
            if path not in kept.categories:
                kept.categories.append(path)
        if rec.access != kept.access:
            conflicts.append(rec.easy_id)
    return DedupeResult(records=out, removed=removed, conflicts=conflicts)


def level_mixing_violations(records: list[DatasetRecord]) -> list[str]:
    """Ids of records carrying two paths of one branch at different levels."""
    violating = []
    for rec in records:
        found = False
        for i, a in enumerate(rec.categories):
            for b in rec.categories[i + 1:]:
                if a.is_prefix_of(b) or b.is_prefix_of(a):
                    found = True
                    break
            if found:
                break
        if found:
            violating.append(rec.easy_id)
    return violating


@dataclass
class Provenance:
    source: str
    taken_at: str
    counts: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {"source": self.source, "taken_at": self.taken_at, "counts": dict(self.counts)}


@dataclass(frozen=True)
class Snapshot:
    """Immutable unit all analytics and layouts consume."""

    records: tuple[DatasetRecord, ...]
    tree: CategoryTree
    provenance: Provenance
    quarantine: tuple[Quarantined, ...] = ()

    def record_by_id(self, easy_id: str) -> Optional[DatasetRecord]:
        return self._index().get(easy_id)

    def _index(self) -> dict[str, DatasetRecord]:
        if not hasattr(self, "_id_index"):
            object.__setattr__(self, "_id_index", {r.easy_id: r for r in self.records})
        return self._id_index

    def quarantined_ids(self) -> set[str]:
        ids = set()
        for q in self.quarantine:
            m = EASY_ID_RE.search(q.raw.identifier)
            if m:
                ids.add(m.group(0))
            for value in q.raw.dc_values("identifier"):
                if EASY_ID_RE.fullmatch(value):
                    ids.add(value)
        return ids


def build_snapshot(raws: list[RawRecord], tree: CategoryTree,
                   config: Optional[LensConfig] = None,
                   source: str = "dump") -> Snapshot:
    """normalize -> drop deleted -> dedupe -> freeze, with quarantine attached."""
    normalized: list[DatasetRecord] = []
    quarantine: list[Quarantined] = []
    deleted = 0
    for raw in raws:
        result = normalize(raw, tree, config)
        if isinstance(result, Skipped):
            deleted += 1
        elif isinstance(result, Quarantined):
            quarantine.append(result)
        else:
            normalized.append(result)
    deduped = dedupe(normalized)
    taken_at = max((r.datestamp for r in raws if r.datestamp), default="")
    counts = {
        "unique": len(deduped.records),
        "duplicates_removed": deduped.removed,
        "deleted_skipped": deleted,
        "quarantined": len(quarantine),
        "access_conflicts": len(deduped.conflicts),
        "level_mixing": len(level_mixing_violations(deduped.records)),
    }
    return Snapshot(
        records=tuple(deduped.records),
        tree=tree,
        provenance=Provenance(source=source, taken_at=taken_at, counts=counts),
        quarantine=tuple(quarantine),
    )


def _dumps(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def save_snapshot(snapshot: Snapshot, directory):
    """Write the snapshot store: records, tree.csv, provenance, quarantine."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "records", "w", encoding="utf-8") as fh:
        for rec in snapshot.records:
            fh.write(_dumps(rec.to_doc()))
            fh.write("\n")
    save_category_tree(snapshot.tree, directory / "tree.csv")
    with open(directory / "provenance", "w", encoding="utf-8") as fh:
        fh.write(_dumps(snapshot.provenance.to_doc()))
        fh.write("\n")
    with open(directory / "quarantine", "w", encoding="utf-8") as fh:
        for q in snapshot.quarantine:
            fh.write(_dumps({"record": q.raw.to_export_map(),
                             "reason": q.reason, "detail": q.detail}))
            fh.write("\n")


def load_snapshot(directory) -> Snapshot:
    directory = Path(directory)
    tree = load_category_tree(directory / "tree.csv")
    records = []
    with open(directory / "records", "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(DatasetRecord.from_doc(json.loads(line)))
    with open(directory / "provenance", "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    provenance = Provenance(source=doc["source"], taken_at=doc["taken_at"],
                            counts=doc.get("counts", {}))
    quarantine = []
    qpath = directory / "quarantine"
    if qpath.exists():
        with open(qpath, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                qdoc = json.loads(line)
                quarantine.append(Quarantined(
                    raw=RawRecord.from_export_map(qdoc["record"]),
                    reason=qdoc["reason"], detail=qdoc.get("detail", {})))
    return Snapshot(records=tuple(records), tree=tree,
                    provenance=provenance, quarantine=tuple(quarantine))
