"""End-to-end pipeline: isolate receptors, place grids, run the docking
batch, screen the results, and write every report artifact to a directory.

Reports are written even when some jobs fail; partial screening data is
still actionable. Exit status: 0 all jobs succeeded, 1 some jobs failed
(reports still written), 2 the manifest itself was unusable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import report as report_mod
from .dockrun import (
    DockingJob,
    DockingResult,
    ExternalEngine,
    JobFailure,
    generate_config,
    mock_engine,
    run_batch,
)
from .errors import BeescreenError, ManifestError
from .geometry import suggest_grid_box
from .manifest import PipelineManifest
from .screen import (
    APISIMIN,
    MRJP1,
    ScreeningConfig,
    aggregate_profiles,
    best_affinity_profiles,
    filter_modes,
    rank_candidates,
    select_candidates,
    split_complete,
)
from .structio import PDB, PDBQT, isolate_receptor, parse_structure, serialize_structure

EXIT_OK = 0
EXIT_JOB_FAILURES = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class PipelineOutcome:
    status: int
    results: tuple[DockingResult, ...]
    failures: tuple[JobFailure, ...]
    report: report_mod.ScreenReport | None
    out_dir: Path


def build_screen_report(
    results: Iterable[DockingResult],
    cfg: ScreeningConfig,
    target: str = MRJP1,
    counter: str = APISIMIN,
) -> report_mod.ScreenReport:
    """Filter, aggregate, rank and select; bundle everything for emission."""
    filtered = [filter_modes(r, cfg) for r in results]
    if cfg.aggregate == "best":
        profiles = best_affinity_profiles(filtered)
    else:
        profiles = aggregate_profiles(filtered)
    complete, incomplete = split_complete(profiles, target, counter)
    ranked = rank_candidates(complete, target, counter)
    selected, rationale = select_candidates(ranked, cfg, target, counter)
    ranking = tuple(p.ligand_id for p in ranked)
    return report_mod.ScreenReport(
        profiles=tuple(ranked),
        ranking=ranking,
        selected=tuple(l for l in ranking if l in set(selected)),
        config=cfg,
        rationale=tuple(rationale),
        unranked=tuple(sorted(p.ligand_id for p in incomplete)),
        target=target,
        counter=counter,
    )


def write_report_files(r: report_mod.ScreenReport, out_dir: str | Path) -> list[Path]:
    """Write report.csv/report.json/chart.svg/chart.png into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (
        ("report.csv", report_mod.emit_report(r, "csv")),
        ("report.json", report_mod.emit_report(r, "json")),
        ("chart.svg", report_mod.emit_chart_svg(r)),
    ):
        path = out / name
        path.write_text(text)
        written.append(path)
    png = out / "chart.png"
    report_mod.render_chart_png(r, str(png))
    written.append(png)
    return written


def _structure_kind(path: str) -> str:
    return PDBQT if path.lower().endswith(".pdbqt") else PDB


def _prepare_receptor(spec, manifest: PipelineManifest, out_dir: Path) -> tuple[str, object]:
    """Returns (receptor file path for jobs, grid box)."""
    structure = parse_structure(Path(spec.path).read_text(), _structure_kind(spec.path))
    path = spec.path
    if spec.selection is not None:
        structure = isolate_receptor(structure, spec.selection)
        isolated = out_dir / "receptors" / f"{spec.receptor_id}{Path(spec.path).suffix}"
        isolated.parent.mkdir(parents=True, exist_ok=True)
        isolated.write_text(serialize_structure(structure))
        path = str(isolated)
    grid = manifest.grid_overrides.get(spec.receptor_id)
    if grid is None:
        grid = suggest_grid_box(structure, manifest.grid_margin)
    return path, grid


def run_pipeline(manifest: PipelineManifest, out_dir: str | Path) -> PipelineOutcome:
    """Run the whole batch and write all artifacts under out_dir.

    Raises ManifestError before writing anything if a referenced input
    file is missing (fail fast, no partial outputs).
    """
    out = Path(out_dir)

    missing = [
        p
        for p in [r.path for r in manifest.receptors] + [l.path for l in manifest.ligands]
        if not Path(p).exists()
    ]
    if missing:
        raise ManifestError(f"missing input files: {missing}")

    out.mkdir(parents=True, exist_ok=True)
    (out / "configs").mkdir(exist_ok=True)
    (out / "logs").mkdir(exist_ok=True)
    (out / "poses").mkdir(exist_ok=True)

    prepared = {}
    for spec in manifest.receptors:
        prepared[spec.receptor_id] = _prepare_receptor(spec, manifest, out)

    jobs = []
    for spec in manifest.receptors:
        receptor_path, grid = prepared[spec.receptor_id]
        for ligand in manifest.ligands:
            job = DockingJob(
                receptor_id=spec.receptor_id,
                ligand_id=ligand.ligand_id,
                receptor_path=receptor_path,
                ligand_path=ligand.path,
                grid=grid,
                num_modes=manifest.num_modes,
                exhaustiveness=manifest.exhaustiveness,
                out_path=str(out / "poses" / f"{spec.receptor_id}_{ligand.ligand_id}_out.pdbqt"),
            )
            jobs.append(job)
            config_path = out / "configs" / f"{spec.receptor_id}_{ligand.ligand_id}.cfg"
            config_path.write_text(generate_config(job))

    if manifest.engine_command == "mock":
        base_engine = mock_engine
    else:
        base_engine = ExternalEngine(manifest.engine_command, timeout=manifest.timeout)

    def engine(job: DockingJob) -> str:
        log = base_engine(job)
        log_path = out / "logs" / f"{job.receptor_id}_{job.ligand_id}.log"
        log_path.write_text(log)
        return log

    results, failures = run_batch(jobs, engine, manifest.max_parallel)

    screen_report = None
    report_error = None
    try:
        screen_report = build_screen_report(results, manifest.screening)
        write_report_files(screen_report, out)
    except BeescreenError as exc:
        report_error = str(exc)

    summary_lines = [
        f"jobs: {len(jobs)}",
        f"succeeded: {len(results)}",
        f"failed: {len(failures)}",
    ]
    for failure in failures:
        summary_lines.append(
            f"FAIL {failure.receptor_id}/{failure.ligand_id}: {failure.cause}"
        )
    if screen_report is not None:
        summary_lines.append(f"selected: {', '.join(screen_report.selected) or '(none)'}")
    if report_error is not None:
        summary_lines.append(f"report error: {report_error}")
    (out / "summary.txt").write_text("\n".join(summary_lines) + "\n")

    status = EXIT_OK if not failures and report_error is None else EXIT_JOB_FAILURES
    return PipelineOutcome(
        status=status,
        results=tuple(results),
        failures=tuple(failures),
        report=screen_report,
        out_dir=out,
    )
