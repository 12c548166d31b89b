"""Command line front door: isolate | gridgen | run | screen | claseval | report.

Each subcommand is a thin adapter over one library operation. Exit codes:
0 success, 1 job/analysis failures (outputs still written), 2 usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import claseval as ce
from . import report as report_mod
from .errors import BeescreenError
from .geometry import suggest_grid_box
from .manifest import parse_manifest
from .pipeline import EXIT_USAGE, build_screen_report, run_pipeline, write_report_files
from .screen import ScreeningConfig, load_mode_table_csv
from .structio import (
    PDB,
    PDBQT,
    ChainSelection,
    isolate_receptor,
    parse_structure,
    serialize_structure,
)


def _kind_for(path: str, override: str | None) -> str:
    if override:
        return PDBQT if override.lower() == "pdbqt" else PDB
    return PDBQT if path.lower().endswith(".pdbqt") else PDB


def _cmd_isolate(args) -> int:
    structure = parse_structure(
        Path(args.input).read_text(), _kind_for(args.input, args.kind)
    )
    selection = ChainSelection(
        keep_chains=frozenset(c.strip() for c in args.keep.split(",") if c.strip()),
        drop_hetero=args.drop_hetero,
    )
    isolated = isolate_receptor(structure, selection)
    Path(args.output).write_text(serialize_structure(isolated))
    return 0


def _cmd_gridgen(args) -> int:
    structure = parse_structure(
        Path(args.input).read_text(), _kind_for(args.input, args.kind)
    )
    box = suggest_grid_box(structure, args.margin)
    for key in ("center_x", "center_y", "center_z", "size_x", "size_y", "size_z"):
        print(f"{key} = {getattr(box, key):.3f}")
    return 0


def _cmd_run(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = parse_manifest(manifest_path.read_text(), manifest_path.parent)
    if args.engine is not None:
        manifest = dataclasses.replace(manifest, engine_command=args.engine)
    if args.max_parallel is not None:
        manifest = dataclasses.replace(manifest, max_parallel=args.max_parallel)
    outcome = run_pipeline(manifest, args.out_dir)
    for failure in outcome.failures:
        print(
            f"FAIL {failure.receptor_id}/{failure.ligand_id}: {failure.cause}",
            file=sys.stderr,
        )
    if outcome.report is not None:
        print(f"selected: {', '.join(outcome.report.selected) or '(none)'}")
    return outcome.status


def _screening_config(args) -> ScreeningConfig:
    kwargs = {}
    if args.rmsd_max is not None:
        kwargs["rmsd_ub_max"] = args.rmsd_max
    if args.tolerance is not None:
        kwargs["apisimin_tolerance"] = args.tolerance
    if args.margin is not None:
        kwargs["mrjp1_margin"] = args.margin
    if args.control is not None:
        kwargs["control_ligand"] = args.control
    if args.aggregate is not None:
        kwargs["aggregate"] = args.aggregate
    return ScreeningConfig(**kwargs)


def _cmd_screen(args) -> int:
    with open(args.fixture, newline="") as handle:
        results = load_mode_table_csv(handle)
    screen_report = build_screen_report(results, _screening_config(args))
    if args.out_dir:
        write_report_files(screen_report, args.out_dir)
    print(report_mod.emit_report(screen_report, args.format), end="")
    return 0


def _cmd_claseval(args) -> int:
    with open(args.pairs, newline="") as handle:
        pairs = ce.read_pairs_csv(handle)
    if args.labels:
        labels = tuple(l.strip() for l in args.labels.split(","))
    else:
        labels = ce.SIX_CLASS_LABELS
    matrix = ce.build_confusion(pairs, labels)
    if args.mapping != "none":
        matrix = ce.coarsen_confusion(matrix, ce.ClassMapping(ce.NAMED_MAPPINGS[args.mapping]))
    metrics = ce.compute_metrics(matrix)
    if args.format == "json":
        print(ce.metrics_to_json(metrics), end="")
    else:
        print(ce.metrics_to_csv(metrics), end="")
    return 0


def _cmd_report(args) -> int:
    screen_report = report_mod.report_from_json(Path(args.report).read_text())
    if args.chart:
        if args.chart.endswith(".png"):
            report_mod.render_chart_png(screen_report, args.chart)
        else:
            Path(args.chart).write_text(report_mod.emit_chart_svg(screen_report))
        return 0
    print(report_mod.emit_report(screen_report, args.format), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beescreen",
        description="Virtual-screening post-processing and classifier evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("isolate", help="keep selected chains of a structure file")
    p.add_argument("--keep", required=True, help="comma-separated chain ids")
    p.add_argument("--drop-hetero", action="store_true", help="drop HETATM records")
    p.add_argument("--kind", choices=["pdb", "pdbqt"], help="override format detection")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_isolate)

    p = sub.add_parser("gridgen", help="suggest a docking grid box for a receptor")
    p.add_argument("--margin", type=float, default=5.0, help="padding per face (A)")
    p.add_argument("--kind", choices=["pdb", "pdbqt"])
    p.add_argument("input")
    p.set_defaults(func=_cmd_gridgen)

    p = sub.add_parser("run", help="run the full docking + screening pipeline")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--engine", help='engine command template with {config}, or "mock"')
    p.add_argument("--max-parallel", type=int)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("screen", help="screen a condensed mode-table CSV")
    p.add_argument("--fixture", required=True, help="mode table CSV")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--rmsd-max", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--margin", type=float)
    p.add_argument("--control")
    p.add_argument("--aggregate", choices=["mean", "best"])
    p.add_argument("--out-dir", help="also write report files + charts here")
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("claseval", help="confusion-matrix metrics from prediction pairs")
    p.add_argument("--pairs", required=True, help="CSV of true_label,predicted_label")
    p.add_argument(
        "--mapping",
        choices=["none", "three_class", "two_class"],
        default="none",
        help="coarsen classes before computing metrics",
    )
    p.add_argument("--labels", help="comma-separated label set (default: six bee groups)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_claseval)

    p = sub.add_parser("report", help="re-emit a saved report JSON")
    p.add_argument("--report", required=True, help="path to report.json")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--chart", help="write the chart to this .svg or .png path instead")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BeescreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
