"""Operator entry point: harvest, build, stats, check, layout, gen, serve.

Exit status: 0 on success, 1 on operational errors, 2 on usage errors
(argparse handles the latter).
"""

import argparse
import json
import sys
from pathlib import Path

from . import analytics, catalogue, corpus, layout, oai
from .config import LensConfig
from .service import (ApiError, ExplorerHTTPServer, ExplorerService,
                      build_treemap, load_embargo_ids)


def _print_doc(doc):
    print(analytics.canonical_json(doc))


def cmd_harvest(args) -> int:
    config = oai.HarvestConfig(
        base_url=args.endpoint,
        set_filter=args.set,
        from_=getattr(args, "from"),
        until=args.until,
        max_pages=args.max_pages,
        retry=oai.RetryPolicy(max_attempts=args.retries,
                              backoff_initial=args.backoff),
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        def sink(rec):
            fh.write(oai.raw_export_line(rec))
            fh.write("\n")
        summary = oai.harvest(config, sink)
    _print_doc(summary.to_doc())
    return 0


def cmd_build(args) -> int:
    raws = oai.ingest_dump(args.raw)
    tree = catalogue.load_category_tree(args.tree)
    config = LensConfig.from_env()
    snapshot = catalogue.build_snapshot(raws, tree, config, source=args.source)
    catalogue.save_snapshot(snapshot, args.out)
    counts = snapshot.provenance.counts
    _print_doc({k: counts[k] for k in
                ("unique", "duplicates_removed", "deleted_skipped", "quarantined")})
    return 0


def cmd_stats(args) -> int:
    snapshot = catalogue.load_snapshot(args.snapshot)
    _print_doc(analytics.collection_stats(snapshot).to_doc())
    return 0


def cmd_check(args) -> int:
    snapshot = catalogue.load_snapshot(args.snapshot)
    embargo = load_embargo_ids(args.embargo_list) if args.embargo_list else set()
    report = analytics.driver_consistency_check(snapshot, embargo)
    _print_doc(report.to_doc())
    return 0


def cmd_layout(args) -> int:
    snapshot = catalogue.load_snapshot(args.snapshot)
    rollups = analytics.rollup_counts(snapshot)
    if args.kind == "treemap":
        built = build_treemap(snapshot, args.group, args.mode, args.exclude)
        doc = built.to_doc()
        svg = layout.treemap_svg(built) if args.svg else None
    elif args.kind == "circlepack":
        built = layout.circle_pack(snapshot.tree, rollups, mode=args.mode)
        doc = built.to_doc()
        svg = layout.circlepack_svg(built) if args.svg else None
    else:
        built = layout.tidy_tree_layout(snapshot.tree, rollups, mode=args.mode)
        doc = built.to_doc()
        svg = layout.tree_svg(built) if args.svg else None
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(analytics.canonical_json(doc))
        fh.write("\n")
    if svg is not None:
        Path(str(args.out) + ".svg").write_text(svg, encoding="utf-8")
    return 0


def cmd_gen(args) -> int:
    if args.spec == "reference-profile":
        spec = corpus.reference_profile()
    else:
        spec = corpus.load_spec(args.spec)
    if args.seed is not None:
        spec.seed = args.seed
    result = corpus.generate_corpus(spec)
    oai.write_raw_export(result.raws, args.out_raw)
    catalogue.save_category_tree(result.tree, args.out_tree)
    with open(args.out_truth, "w", encoding="utf-8") as fh:
        fh.write(analytics.canonical_json(result.truth))
        fh.write("\n")
    _print_doc({"raws": len(result.raws), "tree_nodes": len(result.tree),
                "n_unique": result.truth["stats"]["n_records"]})
    return 0


def cmd_serve(args) -> int:
    snapshot = catalogue.load_snapshot(args.snapshot)
    embargo = load_embargo_ids(args.embargo_list) if args.embargo_list else set()
    service = ExplorerService(snapshot, embargo_ids=embargo)
    server = ExplorerHTTPServer(service, port=args.port, static_dir=args.static,
                                cors=args.cors)
    print(f"serving snapshot ({len(snapshot.records)} records) on {server.base_url}",
          file=sys.stderr)
    server.serve_until_interrupted()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archive-lens",
        description="Harvest, normalize and visually explore archive metadata.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harvest", help="run ListRecords against an endpoint")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--set", default=None)
    p.add_argument("--from", dest="from", default=None)
    p.add_argument("--until", default=None)
    p.add_argument("--max-pages", type=int, default=None)
    p.add_argument("--retries", type=int, default=4)
    p.add_argument("--backoff", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("build", help="normalize a raw export into a snapshot store")
    p.add_argument("--raw", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--source", default="dump", choices=["harvest", "dump", "synthetic"])
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", help="print collection statistics")
    p.add_argument("--snapshot", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("check", help="print the Driver/access consistency report")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--embargo-list", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("layout", help="write a layout document (optionally SVG)")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--kind", required=True, choices=["treemap", "circlepack", "tree"])
    p.add_argument("--group", default="category", choices=["category", "depositor"])
    p.add_argument("--exclude", default=None)
    p.add_argument("--mode", default="assignment", choices=["assignment", "unique"])
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("gen", help="generate a synthetic corpus with ground truth")
    p.add_argument("--spec", required=True,
                   help="spec JSON path, or the builtin name reference-profile")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-raw", required=True)
    p.add_argument("--out-tree", required=True)
    p.add_argument("--out-truth", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="serve the explorer API and UI")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static", default=None)
    p.add_argument("--embargo-list", default=None)
    p.add_argument("--cors", action="store_true")
    p.set_defaults(func=cmd_serve)
    return parser


OPERATIONAL_ERRORS = (
    oai.TransportError, oai.ProtocolError, oai.ConfigError, oai.MalformedXml,
    oai.MalformedInput, catalogue.TreeError, corpus.SpecError,
    analytics.ArityViolation, analytics.UnknownCategory, ApiError,
    layout.EmptyInput, layout.NonPositiveWeight, layout.EmptyTree,
    OSError, json.JSONDecodeError,
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OPERATIONAL_ERRORS as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything unplanned is still an operational failure
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
