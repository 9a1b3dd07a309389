"""Deterministic synthetic corpus generation with exact ground truth.

A CorpusSpec plants the collection-level numbers (uniques, per-branch shares,
multi-assignment histogram, rights mix, Driver inconsistencies) and the
generator emits raw records plus a ground-truth document computed directly
from the planted structure, independent of the analytics implementation.
"""

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .catalogue import CategoryNode, CategoryTree, ACCESS_CLASSES
from .oai import RawRecord

MAX_ARITY = 9

# EASY-flavoured default classification: six top categories, depth <= 3.
DEFAULT_TREE_ROWS = [
    ("D10000", "", "Geospatial sciences"),
    ("D11000", "D10000", "Geography"),
    ("D12000", "D10000", "Cartography"),
    ("D13000", "D10000", "Geodesy"),
    ("D20000", "", "Life sciences and medicine"),
    ("D21000", "D20000", "Medicine"),
    ("D22000", "D20000", "Biology"),
    ("D23000", "D20000", "Epidemiology"),
    ("D24000", "D20000", "Health sciences"),
    ("D30000", "", "Humanities"),
    ("D31000", "D30000", "Linguistics"),
    ("D32000", "D30000", "Philosophy"),
    ("D33000", "D30000", "Religious studies"),
    ("D34000", "D30000", "History"),
    ("D34100", "D34000", "Ancient history"),
    ("D34200", "D34000", "Medieval history"),
    ("D34300", "D34000", "Modern history"),
    ("D34400", "D34000", "Economic history"),
    ("D35000", "D30000", "Arts and culture"),
    ("D36000", "D30000", "Literary studies"),
    ("D37000", "D30000", "Archaeology"),
    ("D37100", "D37000", "Prehistory"),
    ("D37200", "D37000", "Roman archaeology"),
    ("D37300", "D37000", "Medieval archaeology"),
    ("D37400", "D37000", "Maritime archaeology"),
    ("D40000", "", "Social sciences"),
    ("D41000", "D40000", "Political science"),
    ("D42000", "D40000", "Law"),
    ("D43000", "D40000", "Economics"),
    ("D44000", "D40000", "Public administration"),
    ("D45000", "D40000", "International relations"),
    ("D50000", "", "Behavioural sciences"),
    ("D51000", "D50000", "Psychology"),
    ("D51100", "D51000", "Clinical psychology"),
    ("D51200", "D51000", "Developmental psychology"),
    ("D52000", "D50000", "Educational sciences"),
    ("D53000", "D50000", "Pedagogics"),
    ("D60000", "", "Social-cultural sciences"),
    ("D61000", "D60000", "Sociology"),
    ("D61100", "D61000", "Social stratification"),
    ("D61200", "D61000", "Urban studies"),
    ("D61300", "D61000", "Family studies"),
    ("D62000", "D60000", "Anthropology"),
    ("D63000", "D60000", "Demography"),
    ("D64000", "D60000", "Communication science"),
    ("D65000", "D60000", "Leisure studies"),
    ("D66000", "D60000", "Migration studies"),
    ("D67000", "D60000", "Gender studies"),
    ("D68000", "D60000", "Social security studies"),
    ("D69000", "D60000", "Social geography"),
]


class SpecError(Exception):
    """Corpus spec parameters are inconsistent or infeasible."""


@dataclass
class CorpusSpec:
    n_unique: int
    category_profile: dict = field(default_factory=dict)  # terminal code -> mass
    multi_assignment_histogram: Optional[dict] = None     # arity -> record count
    rights_mix: Optional[dict] = None                     # class name -> mass
    depositor_powerlaw: Optional[dict] = None             # {n_depositors, exponent}
    driver_error_count: int = 0
    seed: int = 0
    branch_shares: dict = field(default_factory=dict)     # code -> share of records
    single_only: list = field(default_factory=list)       # codes never multi-tagged
    restricted_group_only_in: Optional[str] = None
    duplicate_factor: float = 1.0
    n_deleted: int = 0
    tree_rows: Optional[list] = None
    targets: dict = field(default_factory=dict)           # planted numbers to verify

    @classmethod
    def from_doc(cls, doc: dict) -> "CorpusSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise SpecError(f"unknown spec fields: {sorted(unknown)}")
        if "n_unique" not in doc:
            raise SpecError("spec requires n_unique")
        return cls(**doc)


@dataclass
class CorpusResult:
    raws: list[RawRecord]
    tree: CategoryTree
    truth: dict


def largest_remainder(weights: list[float], total: int) -> list[int]:
    """Integer quotas proportional to weights, summing exactly to total."""
    if total == 0 or not weights:
        return [0] * len(weights)
    wsum = sum(weights)
    if wsum <= 0:
        raise SpecError("weights must have positive sum")
    ideal = [w / wsum * total for w in weights]
    quotas = [int(x) for x in ideal]
    fractions = sorted(range(len(weights)), key=lambda i: (-(ideal[i] - quotas[i]), i))
    for i in fractions[: total - sum(quotas)]:
        quotas[i] += 1
    return quotas


def _build_tree(spec: CorpusSpec) -> CategoryTree:
    rows = spec.tree_rows if spec.tree_rows is not None else DEFAULT_TREE_ROWS
    return CategoryTree([CategoryNode(code=c, parent=p or None, label=l)
                         for c, p, l in rows])


def _validate(spec: CorpusSpec, tree: CategoryTree):
    if spec.n_unique < 0:
        raise SpecError("n_unique must be >= 0")
    if spec.duplicate_factor < 1.0:
        raise SpecError("duplicate_factor must be >= 1")
    if spec.n_deleted < 0:
        raise SpecError("n_deleted must be >= 0")
    if not (0 <= spec.driver_error_count <= spec.n_unique):
        raise SpecError("driver_error_count must be within 0..n_unique")
    if spec.category_profile:
        mass = sum(spec.category_profile.values())
        if abs(mass - 1.0) > 1e-9:
            raise SpecError(f"category_profile masses sum to {mass}, not 1")
        for code in spec.category_profile:
            if code not in tree:
                raise SpecError(f"profile category {code} not in tree")
    if spec.rights_mix:
        mass = sum(spec.rights_mix.values())
        if abs(mass - 1.0) > 1e-9:
            raise SpecError(f"rights_mix masses sum to {mass}, not 1")
        for name in spec.rights_mix:
            if name not in ACCESS_CLASSES:
                raise SpecError(f"unknown access class {name}")
    hist = spec.multi_assignment_histogram
    if hist is not None:
        hist = {int(k): int(v) for k, v in hist.items()}
        if any(k < 1 or k > MAX_ARITY for k in hist):
            raise SpecError(f"histogram arity must be 1..{MAX_ARITY}")
        if any(v < 0 for v in hist.values()):
            raise SpecError("histogram counts must be >= 0")
        if sum(hist.values()) != spec.n_unique:
            raise SpecError("histogram counts must sum to n_unique")
    for code in spec.branch_shares:
        if code not in tree:
            raise SpecError(f"branch {code} not in tree")
    if sum(spec.branch_shares.values()) > 1 + 1e-9:
        raise SpecError("branch shares exceed 1")
    if spec.restricted_group_only_in and spec.restricted_group_only_in not in tree:
        raise SpecError(f"restricted-group branch {spec.restricted_group_only_in} not in tree")


def _histogram(spec: CorpusSpec) -> dict[int, int]:
    if spec.multi_assignment_histogram is None:
        return {1: spec.n_unique} if spec.n_unique else {}
    return {int(k): int(v) for k, v in spec.multi_assignment_histogram.items() if int(v) > 0}


def _first_path_quotas(spec: CorpusSpec, tree: CategoryTree,
                       categories: list[str]) -> dict[str, int]:
    """Stage one fixes per-branch record counts, stage two splits inside them."""
    masses = spec.category_profile or {c: 1.0 for c in categories}
    groups: list[list[str]] = []
    shares: list[float] = []
    assigned: set = set()
    for code, share in spec.branch_shares.items():
        members = [c for c in categories if c in tree.subtree(code)]
        if not members:
            raise SpecError(f"branch {code} has no profile categories")
        groups.append(members)
        shares.append(share)
        assigned.update(members)
    rest = [c for c in categories if c not in assigned]
    if rest:
        groups.append(rest)
        shares.append(1.0 - sum(shares))
    group_counts = largest_remainder(shares, spec.n_unique)

    quotas: dict[str, int] = {}
    for members, count in zip(groups, group_counts):
        member_quotas = largest_remainder([masses[c] for c in members], count)
        for c, q in zip(members, member_quotas):
            quotas[c] = q
        # every profiled category must actually be used at least once
        for c in members:
            if quotas[c] == 0 and count >= len(members):
                donor = max(members, key=lambda m: (quotas[m], m))
                quotas[donor] -= 1
                quotas[c] += 1
    return quotas


def _compatible(path_codes: tuple, chosen: list[tuple]) -> bool:
    for other in chosen:
        shorter, longer = sorted((path_codes, other), key=len)
        if longer[:len(shorter)] == shorter:
            return False
    return True


def generate_corpus(spec: CorpusSpec) -> CorpusResult:
    """Build raw records, the category tree, and exact expected analytics."""
    tree = _build_tree(spec)
    _validate(spec, tree)
    rng = random.Random(spec.seed)
    n = spec.n_unique

    categories = sorted(spec.category_profile) if spec.category_profile \
        else sorted(tree.nodes)
    histogram = _histogram(spec)
    quotas = _first_path_quotas(spec, tree, categories)

    single_only: set = set()
    for code in spec.single_only:
        if code not in tree:
            raise SpecError(f"single_only category {code} not in tree")
        single_only.update(tree.subtree(code))

    # one slot per record, carrying its first category
    slots: list[str] = []
    for code in categories:
        slots.extend([code] * quotas[code])
    rng.shuffle(slots)

    multi_arities: list[int] = []
    for arity in sorted(histogram):
        if arity > 1:
            multi_arities.extend([arity] * histogram[arity])
    eligible_slots = [i for i, code in enumerate(slots) if code not in single_only]
    if len(multi_arities) > len(eligible_slots):
        raise SpecError("not enough multi-eligible records for the histogram")
    multi_slots = rng.sample(eligible_slots, len(multi_arities))
    rng.shuffle(multi_arities)

    multi_pool = [c for c in categories if c not in single_only]
    pool_paths = {c: tree.path_to(c).codes for c in categories}
    record_paths: list[list[tuple]] = [[pool_paths[code]] for code in slots]
    for slot, arity in zip(multi_slots, multi_arities):
        chosen = record_paths[slot]
        candidates = multi_pool[:]
        rng.shuffle(candidates)
        for cand in candidates:
            if len(chosen) == arity:
                break
            codes = pool_paths[cand]
            if codes != chosen[0] and _compatible(codes, chosen):
                chosen.append(codes)
        if len(chosen) != arity:
            raise SpecError(
                f"cannot pick {arity} prefix-free categories from the multi pool")

    # access classes, honouring the restricted-group confinement when set
    mix = spec.rights_mix or {"Open": 1.0}
    class_names = [c for c in ACCESS_CLASSES if mix.get(c, 0) > 0]
    class_counts = dict(zip(class_names, largest_remainder(
        [mix[c] for c in class_names], n)))
    access: list[Optional[str]] = [None] * n
    if spec.restricted_group_only_in and class_counts.get("RestrictedGroup"):
        branch = tree.subtree(spec.restricted_group_only_in)
        candidates = [i for i in range(n)
                      if all(p[-1] in branch for p in record_paths[i])]
        want = class_counts["RestrictedGroup"]
        if len(candidates) < want:
            raise SpecError("not enough in-branch records for the RestrictedGroup quota")
        for i in rng.sample(candidates, want):
            access[i] = "RestrictedGroup"
        class_counts = {c: q for c, q in class_counts.items() if c != "RestrictedGroup"}
    remaining = [i for i in range(n) if access[i] is None]
    bag: list[str] = []
    for name in class_names:
        bag.extend([name] * class_counts.get(name, 0))
    rng.shuffle(bag)
    for i, name in zip(remaining, bag):
        access[i] = name

    in_driver = [a == "Open" for a in access]
    flipped = sorted(rng.sample(range(n), spec.driver_error_count))
    for i in flipped:
        in_driver[i] = not in_driver[i]

    dep_spec = spec.depositor_powerlaw or {}
    n_dep = int(dep_spec.get("n_depositors", max(1, min(n, n // 10 or 1)))) if n else 0
    if n_dep > n:
        raise SpecError("more depositors than records")
    exponent = float(dep_spec.get("exponent", 1.0))
    creators: list[str] = []
    if n_dep:
        weights = [(i + 1) ** -exponent for i in range(n_dep)]
        extra = largest_remainder(weights, n - n_dep)
        dep_names = [f"Depositor {i:04d}" for i in range(n_dep)]
        bag = []
        for name, q in zip(dep_names, extra):
            bag.extend([name] * (1 + q))
        rng.shuffle(bag)
        creators = bag

    rights_string = {"Open": "OPEN_ACCESS", "RestrictedGroup": "GROUP_ACCESS",
                     "Restricted": "RESTRICTED", "Other": "NO_ACCESS"}
    raws: list[RawRecord] = []
    for i in range(n):
        number = 10000 + i
        easy_id = f"easy-dataset:{number}"
        label = tree.nodes[record_paths[i][0][-1]].label
        specs = [":".join(p) for p in record_paths[i]]
        if in_driver[i]:
            specs.append("driver")
        stamp = (f"2011-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}"
                 f"T{rng.randrange(24):02d}:{rng.randrange(60):02d}:{rng.randrange(60):02d}Z")
        raws.append(RawRecord(
            identifier=f"oai:mock.archive:{easy_id}",
            datestamp=stamp,
            set_specs=specs,
            deleted=False,
            dc_elements=[
                ("title", f"Synthetic dataset {number} on {label.lower()}"),
                ("creator", creators[i]),
                ("subject", label.lower()),
                ("date", f"20{rng.randrange(0, 12):02d}-01-01"),
                ("identifier", f"urn:nbn:nl:ui:13-{number:x}"),
                ("identifier", easy_id),
                ("rights", rights_string[access[i]]),
                ("rights", "accept"),
            ]))

    truth = _ground_truth(spec, tree, record_paths, access, in_driver, creators, flipped)

    n_copies = round((spec.duplicate_factor - 1.0) * n)
    output = list(raws)
    if n_copies:
        for i in (rng.randrange(n) for _ in range(n_copies)):
            output.append(raws[i])
    for j in range(spec.n_deleted):
        number = 90000 + j
        output.append(RawRecord(
            identifier=f"oai:mock.archive:easy-dataset:{number}",
            datestamp=f"2011-12-{rng.randrange(1, 29):02d}T00:00:00Z",
            set_specs=[], deleted=True, dc_elements=[]))
    rng.shuffle(output)
    truth["n_raws"] = len(output)
    truth["n_duplicate_copies"] = n_copies
    truth["n_deleted_raws"] = spec.n_deleted

    _check_targets(spec, truth)
    return CorpusResult(raws=output, tree=tree, truth=truth)


def _ground_truth(spec, tree, record_paths, access, in_driver, creators, flipped) -> dict:
    """Expected analytics, recomputed from the planted structure by plain scans."""
    n = spec.n_unique
    arities = [len(p) for p in record_paths]
    histogram: dict[int, int] = {}
    for a in arities:
        histogram[a] = histogram.get(a, 0) + 1
    per_class = {name: 0 for name in ACCESS_CLASSES}
    for a in access:
        per_class[a] += 1

    direct: dict[str, int] = {c: 0 for c in tree.nodes}
    unique: dict[str, set] = {c: set() for c in tree.nodes}
    for i, paths in enumerate(record_paths):
        for codes in paths:
            direct[codes[-1]] += 1
            for code in codes:
                unique[code].add(i)
    assignment: dict[str, int] = {}
    for code in sorted(tree.nodes, key=lambda c: -tree.nodes[c].depth):
        assignment[code] = direct[code] + sum(assignment[k] for k in tree.children(code))

    used = {codes[-1] for paths in record_paths for codes in paths}
    stats_doc = {
        "n_records": n,
        "n_categories_used": len(used),
        "n_tree_nodes": len(tree),
        "n_depositors": len(set(creators)),
        "n_assignments": sum(arities),
        "pct_single_category": (histogram.get(1, 0) / n) if n else 0.0,
        "max_categories_per_record": max(arities) if arities else 0,
        "per_access_class": {name: per_class[name] for name in ACCESS_CLASSES},
        "n_quarantined": 0,
    }
    top = None
    if creators:
        tally: dict[str, int] = {}
        for name in creators:
            tally[name] = tally.get(name, 0) + 1
        best = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        top = {"creator": best[0], "n_datasets": best[1]}
    return {
        "stats": stats_doc,
        "histogram": {str(k): v for k, v in sorted(histogram.items())},
        "rollup": {"nodes": [
            {"code": c, "direct": direct[c], "assignment_rollup": assignment[c],
             "unique_rollup": len(unique[c])} for c in sorted(tree.nodes)]},
        "expansion_total": sum(arities),
        "consistency": {
            "n_differences": len(flipped),
            "ids": [f"easy-dataset:{10000 + i}" for i in flipped],
        },
        "top_depositor": top,
    }


def _check_targets(spec: CorpusSpec, truth: dict):
    """Planted targets are promises: refuse to emit a corpus that breaks them."""
    targets = spec.targets or {}
    checks = {
        "n_records": truth["stats"]["n_records"],
        "n_categories_used": truth["stats"]["n_categories_used"],
        "n_assignments": truth["stats"]["n_assignments"],
        "max_categories_per_record": truth["stats"]["max_categories_per_record"],
        "n_differences": truth["consistency"]["n_differences"],
        "n_depositors": truth["stats"]["n_depositors"],
    }
    for key, expected in targets.items():
        if key == "branch_unique":
            for code, count in expected.items():
                actual = next(nd["unique_rollup"] for nd in truth["rollup"]["nodes"]
                              if nd["code"] == code)
                if actual != count:
                    raise SpecError(
                        f"target branch_unique[{code}]={count} but corpus has {actual}")
            continue
        if key not in checks:
            raise SpecError(f"unknown target {key}")
        if checks[key] != expected:
            raise SpecError(f"target {key}={expected} but corpus has {checks[key]}")
    truth["targets"] = dict(targets)


def reference_profile(seed: int = 20120120) -> CorpusSpec:
    """Collection-scale reference corpus: 21k records, archaeology-heavy,
    1700 depositors, 155 planted Driver inconsistencies."""
    archaeology = {"D37000": 0.42, "D37100": 0.22, "D37200": 0.16,
                   "D37300": 0.12, "D37400": 0.08}
    others = [c for c, p, _ in DEFAULT_TREE_ROWS if c not in archaeology]
    # 47 used categories total: the 5 archaeology nodes plus 42 others
    others = others[:42]
    other_weights = [1.0 / (i + 2) for i in range(len(others))]
    wsum = sum(other_weights)
    profile = {c: 0.70 * share for c, share in archaeology.items()}
    profile.update({c: 0.30 * w / wsum for c, w in zip(others, other_weights)})

    return CorpusSpec(
        n_unique=21303,
        category_profile=profile,
        multi_assignment_histogram={1: 17620, 2: 3682, 9: 1},
        rights_mix={"Open": 0.62, "RestrictedGroup": 0.12,
                    "Restricted": 0.16, "Other": 0.10},
        depositor_powerlaw={"n_depositors": 1700, "exponent": 1.05},
        driver_error_count=155,
        seed=seed,
        branch_shares={"D37000": 0.70},
        single_only=["D37000"],
        restricted_group_only_in="D37000",
        targets={
            "n_records": 21303,
            "n_categories_used": 47,
            "n_assignments": 24993,
            "max_categories_per_record": 9,
            "n_differences": 155,
            "n_depositors": 1700,
            "branch_unique": {"D37000": 14912},
        },
    )


def load_spec(path) -> CorpusSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file is not valid JSON: {exc}") from exc
    return CorpusSpec.from_doc(doc)
