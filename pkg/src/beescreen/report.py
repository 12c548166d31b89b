"""Deterministic emission of screening outputs: CSV/JSON tables, an SVG
bar chart of mean affinities, and a matplotlib PNG of the same chart.

All text emitters are byte-deterministic: identical reports produce
identical bytes, so goldens stay stable across platforms. Bars plot the
magnitude of the (negative) affinities with an axis note that more
negative means stronger binding; the CSV keeps signed values.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import IncompleteProfileError
from .screen import (
    APISIMIN,
    MRJP1,
    LigandProfile,
    ScreeningConfig,
    SelectionRationale,
)

CSV_COLUMNS = (
    "ligand",
    "mean_affinity_mrjp1",
    "mean_affinity_apisimin",
    "delta",
    "modes_mrjp1",
    "modes_apisimin",
    "selected",
)


@dataclass(frozen=True)
class ScreenReport:
    profiles: tuple[LigandProfile, ...]  # complete profiles, in ranking order
    ranking: tuple[str, ...]
    selected: tuple[str, ...]
    config: ScreeningConfig
    rationale: tuple[SelectionRationale, ...] = ()
    unranked: tuple[str, ...] = ()  # ligands incomplete for a receptor
    target: str = MRJP1
    counter: str = APISIMIN

    def __post_init__(self):
        if not set(self.selected) <= set(self.ranking):
            raise ValueError("selected ligands must appear in the ranking")


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def emit_report(r: ScreenReport, format: str = "csv") -> str:
    """Render the report as CSV (fixed columns, 4 decimals) or JSON."""
    if format == "csv":
        return _emit_csv(r)
    if format == "json":
        return _emit_json(r)
    raise ValueError(f"unknown report format {format!r}")


def _emit_csv(r: ScreenReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    by_id = {p.ligand_id: p for p in r.profiles}
    selected = set(r.selected)
    for ligand_id in r.ranking:
        p = by_id[ligand_id]
        writer.writerow(
            [
                ligand_id,
                _fmt(p.mean_affinity[r.target]),
                _fmt(p.mean_affinity[r.counter]),
                _fmt(p.selectivity_delta),
                p.mode_count.get(r.target, 0),
                p.mode_count.get(r.counter, 0),
                "yes" if ligand_id in selected else "no",
            ]
        )
    return out.getvalue()


def _emit_json(r: ScreenReport) -> str:
    by_id = {p.ligand_id: p for p in r.profiles}
    payload = {
        "config": {
            "rmsd_ub_max": r.config.rmsd_ub_max,
            "control_ligand": r.config.control_ligand,
            "apisimin_tolerance": r.config.apisimin_tolerance,
            "mrjp1_margin": r.config.mrjp1_margin,
            "aggregate": r.config.aggregate,
        },
        "target_receptor": r.target,
        "counter_receptor": r.counter,
        "ranking": [
            {
                "ligand": ligand_id,
                "mean_affinity": {
                    r.target: round(by_id[ligand_id].mean_affinity[r.target], 4),
                    r.counter: round(by_id[ligand_id].mean_affinity[r.counter], 4),
                },
                "mode_count": dict(by_id[ligand_id].mode_count),
                "delta": round(by_id[ligand_id].selectivity_delta, 4),
                "selected": ligand_id in set(r.selected),
            }
            for ligand_id in r.ranking
        ],
        "selected": list(r.selected),
        "unranked": list(r.unranked),
        "rationale": [
            {
                "ligand": rat.ligand_id,
                "selected": rat.selected,
                "is_control": rat.is_control,
                "counter_mean": round(rat.counter_mean, 4),
                "counter_deviation": round(rat.counter_deviation, 4),
                "tolerance_ok": rat.tolerance_ok,
                "target_mean": round(rat.target_mean, 4),
                "target_advantage": round(rat.target_advantage, 4),
                "margin_ok": rat.margin_ok,
            }
            for rat in r.rationale
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# SVG chart geometry (pixels).
_BAR_W = 22
_BAR_GAP = 4
_GROUP_GAP = 30
_PLOT_H = 300
_MARGIN_L = 60
_MARGIN_T = 40
_MARGIN_B = 60
_COLORS = {"target": "#2c7fb8", "counter": "#f4a261"}


def emit_chart_svg(r: ScreenReport) -> str:
    """Grouped bar chart of mean affinities per ligand, two bars per group.

    Bar heights are proportional to |mean affinity|; every profile must be
    complete for both receptors.
    """
    by_id = {p.ligand_id: p for p in r.profiles}
    for ligand_id in r.ranking:
        p = by_id[ligand_id]
        for receptor in (r.target, r.counter):
            if receptor not in p.mean_affinity:
                raise IncompleteProfileError(
                    f"ligand {ligand_id} has no mean for {receptor}"
                )

    n = len(r.ranking)
    group_w = 2 * _BAR_W + _BAR_GAP
    width = _MARGIN_L + n * (group_w + _GROUP_GAP) + 20
    height = _MARGIN_T + _PLOT_H + _MARGIN_B
    max_mag = max(
        (abs(by_id[lig].mean_affinity[rec]) for lig in r.ranking for rec in (r.target, r.counter)),
        default=1.0,
    )
    scale = _PLOT_H / max_mag if max_mag else 1.0
    baseline = _MARGIN_T + _PLOT_H

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        'font-family="sans-serif" font-size="14">'
        "Mean binding affinity per ligand (bar height = |kcal/mol|; "
        "more negative binds stronger)</text>",
        f'<text x="15" y="{_MARGIN_T + _PLOT_H / 2:.1f}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 15 {_MARGIN_T + _PLOT_H / 2:.1f})">'
        "|mean affinity| (kcal/mol)</text>",
        f'<line x1="{_MARGIN_L}" y1="{baseline}" x2="{width - 10}" y2="{baseline}" '
        'stroke="#333" stroke-width="1"/>',
    ]
    for i, ligand_id in enumerate(r.ranking):
        p = by_id[ligand_id]
        x0 = _MARGIN_L + i * (group_w + _GROUP_GAP)
        for k, receptor in enumerate((r.target, r.counter)):
            mag = abs(p.mean_affinity[receptor])
            bar_h = mag * scale
            x = x0 + k * (_BAR_W + _BAR_GAP)
            color = _COLORS["target" if k == 0 else "counter"]
            parts.append(
                f'<rect x="{x:.1f}" y="{baseline - bar_h:.1f}" '
                f'width="{_BAR_W}" height="{bar_h:.1f}" fill="{color}">'
                f"<title>{ligand_id} {receptor}: "
                f"{p.mean_affinity[receptor]:.4f} kcal/mol</title></rect>"
            )
        parts.append(
            f'<text x="{x0 + group_w / 2:.1f}" y="{baseline + 16}" '
            'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f"{ligand_id}</text>"
        )
    legend_y = height - 18
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{legend_y - 10}" width="12" height="12" '
        f'fill="{_COLORS["target"]}"/>'
        f'<text x="{_MARGIN_L + 18}" y="{legend_y}" font-family="sans-serif" '
        f'font-size="11">{r.target}</text>'
        f'<rect x="{_MARGIN_L + 90}" y="{legend_y - 10}" width="12" height="12" '
        f'fill="{_COLORS["counter"]}"/>'
        f'<text x="{_MARGIN_L + 108}" y="{legend_y}" font-family="sans-serif" '
        f'font-size="11">{r.counter}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart_png(r: ScreenReport, path: str) -> None:
    """Matplotlib rendering of the same grouped bar chart, written to path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_id = {p.ligand_id: p for p in r.profiles}
    ligands = list(r.ranking)
    target_means = [abs(by_id[lig].mean_affinity[r.target]) for lig in ligands]
    counter_means = [abs(by_id[lig].mean_affinity[r.counter]) for lig in ligands]

    x = range(len(ligands))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, len(ligands) * 0.9), 4.5))
    ax.bar([i - width / 2 for i in x], target_means, width,
           label=r.target, color=_COLORS["target"])
    ax.bar([i + width / 2 for i in x], counter_means, width,
           label=r.counter, color=_COLORS["counter"])
    ax.set_xticks(list(x))
    ax.set_xticklabels(ligands, rotation=45, ha="right")
    ax.set_ylabel("|mean affinity| (kcal/mol)")
    ax.set_title("Mean binding affinity per ligand (more negative binds stronger)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def report_from_json(text: str) -> ScreenReport:
    """Rebuild a ScreenReport from its JSON emission."""
    payload = json.loads(text)
    cfg = ScreeningConfig(**payload["config"])
    target = payload["target_receptor"]
    counter = payload["counter_receptor"]
    profiles = tuple(
        LigandProfile(
            ligand_id=entry["ligand"],
            mean_affinity=dict(entry["mean_affinity"]),
            mode_count=dict(entry["mode_count"]),
            selectivity_delta=entry["delta"],
        )
        for entry in payload["ranking"]
    )
    rationale = tuple(
        SelectionRationale(
            ligand_id=entry["ligand"],
            selected=entry["selected"],
            is_control=entry["is_control"],
            counter_mean=entry["counter_mean"],
            counter_deviation=entry["counter_deviation"],
            tolerance_ok=entry["tolerance_ok"],
            target_mean=entry["target_mean"],
            target_advantage=entry["target_advantage"],
            margin_ok=entry["margin_ok"],
        )
        for entry in payload.get("rationale", ())
    )
    return ScreenReport(
        profiles=profiles,
        ranking=tuple(entry["ligand"] for entry in payload["ranking"]),
        selected=tuple(payload["selected"]),
        config=cfg,
        rationale=rationale,
        unranked=tuple(payload.get("unranked", ())),
        target=target,
        counter=counter,
    )


def parse_report_csv(text: str) -> list[dict[str, str]]:
    """Read back an emitted report CSV (round-trip helper)."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected report columns: {reader.fieldnames}")
    return list(reader)
