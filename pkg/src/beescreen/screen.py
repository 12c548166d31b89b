"""RMSD filtering, per-ligand affinity aggregation, selectivity ranking,
and candidate selection against the control ligand.

Modes with an RMSD upper bound of 3.5 A or more are discarded (strictly
under 3.5 passes). Retained affinities are averaged per ligand per
receptor; candidates are ranked by selectivity delta (target mean minus
counter mean, more negative first) and selected when their counter-receptor
mean sits within a tolerance of the control's while their target mean beats
the control's by at least a margin.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .dockrun import BindingMode, DockingResult
from .errors import ConfigurationError, IncompleteProfileError

MRJP1 = "MRJP1"
APISIMIN = "Apisimin"

FIXTURE_COLUMNS = ("receptor", "ligand", "mode", "affinity_kcal_mol", "rmsd_ub_angstrom")


@dataclass(frozen=True)
class ScreeningConfig:
    rmsd_ub_max: float = 3.5
    control_ligand: str = "94R"
    apisimin_tolerance: float = 0.6
    mrjp1_margin: float = 0.9
    aggregate: str = "mean"  # "mean" or "best"

    def __post_init__(self):
        if self.rmsd_ub_max <= 0:
            raise ValueError("rmsd_ub_max must be positive")
        if self.apisimin_tolerance < 0:
            raise ValueError("apisimin_tolerance must be non-negative")
        if self.mrjp1_margin < 0:
            raise ValueError("mrjp1_margin must be non-negative")
        if self.aggregate not in ("mean", "best"):
            raise ValueError(f"unknown aggregation mode {self.aggregate!r}")


@dataclass(frozen=True)
class LigandProfile:
    ligand_id: str
    mean_affinity: Mapping[str, float]
    mode_count: Mapping[str, int]
    selectivity_delta: float | None = None


@dataclass(frozen=True)
class SelectionRationale:
    ligand_id: str
    selected: bool
    is_control: bool
    counter_mean: float
    counter_deviation: float  # |counter mean - control counter mean|
    tolerance_ok: bool
    target_mean: float
    target_advantage: float  # control target mean - target mean (positive = stronger)
    margin_ok: bool


def filter_modes(result: DockingResult, cfg: ScreeningConfig) -> DockingResult:
    """Keep modes with rmsd_ub strictly under the threshold.

    Order is preserved and mode indices are not renumbered, so the output
    matches the condensed-table convention (gaps show which poses fell out).
    """
    kept = tuple(m for m in result.modes if m.rmsd_ub < cfg.rmsd_ub_max)
    return replace(result, modes=kept)


def aggregate_profiles(results: Iterable[DockingResult]) -> list[LigandProfile]:
    """Arithmetic mean of retained affinities per (ligand, receptor).

    Receptors with zero retained modes for a ligand get a mode count of 0
    and no mean entry.
    """
    affinities: dict[str, dict[str, list[float]]] = {}
    receptors: set[str] = set()
    for result in results:
        receptors.add(result.receptor_id)
        per_ligand = affinities.setdefault(result.ligand_id, {})
        per_ligand.setdefault(result.receptor_id, []).extend(
            m.affinity for m in result.modes
        )

    profiles = []
    for ligand_id in sorted(affinities):
        by_receptor = affinities[ligand_id]
        means = {
            rid: sum(values) / len(values)
            for rid, values in by_receptor.items()
            if values
        }
        counts = {rid: len(by_receptor.get(rid, ())) for rid in sorted(receptors)}
        profiles.append(LigandProfile(ligand_id, means, counts))
    return profiles


def best_affinity_profiles(results: Iterable[DockingResult]) -> list[LigandProfile]:
    """Best-mode-only variant of aggregate_profiles (most negative affinity)."""
    results = list(results)
    best: dict[str, dict[str, float]] = {}
    for result in results:
        if not result.modes:
            continue
        per_ligand = best.setdefault(result.ligand_id, {})
        value = min(m.affinity for m in result.modes)
        per_ligand[result.receptor_id] = min(
            per_ligand.get(result.receptor_id, value), value
        )
    return [
        replace(p, mean_affinity=best.get(p.ligand_id, {}))
        for p in aggregate_profiles(results)
    ]


def selectivity_delta(profile: LigandProfile, target: str, counter: str) -> float:
    """Target-receptor mean minus counter-receptor mean; more negative is
    more selective for the target."""
    for receptor in (target, counter):
        if receptor not in profile.mean_affinity:
            raise IncompleteProfileError(
                f"ligand {profile.ligand_id} has no retained modes for {receptor}"
            )
    return profile.mean_affinity[target] - profile.mean_affinity[counter]


def split_complete(
    profiles: Iterable[LigandProfile], target: str, counter: str
) -> tuple[list[LigandProfile], list[LigandProfile]]:
    """Partition profiles into (complete for both receptors, incomplete)."""
    complete, incomplete = [], []
    for profile in profiles:
        if target in profile.mean_affinity and counter in profile.mean_affinity:
            complete.append(profile)
        else:
            incomplete.append(profile)
    return complete, incomplete


def rank_candidates(
    profiles: Sequence[LigandProfile], target: str = MRJP1, counter: str = APISIMIN
) -> list[LigandProfile]:
    """Sort by selectivity delta ascending, ties broken by ligand id.

    Every input profile must be complete for both receptors; filter with
    split_complete first if needed.
    """
    with_delta = [
        replace(p, selectivity_delta=selectivity_delta(p, target, counter))
        for p in profiles
    ]
    return sorted(with_delta, key=lambda p: (p.selectivity_delta, p.ligand_id))


def select_candidates(
    profiles: Sequence[LigandProfile],
    cfg: ScreeningConfig,
    target: str = MRJP1,
    counter: str = APISIMIN,
) -> tuple[list[str], list[SelectionRationale]]:
    """Pick non-control ligands that match the control on the counter
    receptor (within tolerance) and beat it on the target (by the margin).

    Both comparisons are reported numerically for every ligand so the
    thresholds are never hidden.
    """
    by_id = {p.ligand_id: p for p in profiles}
    control = by_id.get(cfg.control_ligand)
    if control is None:
        raise ConfigurationError(
            f"control ligand {cfg.control_ligand!r} not among profiles"
        )
    try:
        control_target = control.mean_affinity[target]
        control_counter = control.mean_affinity[counter]
    except KeyError as exc:
        raise ConfigurationError(
            f"control ligand {cfg.control_ligand!r} has no mean for {exc.args[0]}"
        ) from None

    selected: list[str] = []
    rationale: list[SelectionRationale] = []
    for profile in sorted(profiles, key=lambda p: p.ligand_id):
        if target not in profile.mean_affinity or counter not in profile.mean_affinity:
            continue
        target_mean = profile.mean_affinity[target]
        counter_mean = profile.mean_affinity[counter]
        deviation = abs(counter_mean - control_counter)
        advantage = control_target - target_mean
        tolerance_ok = deviation <= cfg.apisimin_tolerance
        margin_ok = target_mean <= control_target - cfg.mrjp1_margin
        is_control = profile.ligand_id == cfg.control_ligand
        chosen = tolerance_ok and margin_ok and not is_control
        rationale.append(
            SelectionRationale(
                ligand_id=profile.ligand_id,
                selected=chosen,
                is_control=is_control,
                counter_mean=counter_mean,
                counter_deviation=deviation,
                tolerance_ok=tolerance_ok,
                target_mean=target_mean,
                target_advantage=advantage,
                margin_ok=margin_ok,
            )
        )
        if chosen:
            selected.append(profile.ligand_id)
    return selected, rationale


def load_mode_table_csv(stream: io.TextIOBase | Iterable[str]) -> list[DockingResult]:
    """Read a condensed mode table (one row per retained pose).

    Columns: receptor,ligand,mode,affinity_kcal_mol,rmsd_ub_angstrom.
    Rows are grouped into one DockingResult per (receptor, ligand); mode
    index gaps are expected since the table is post-filter.
    """
    reader = csv.DictReader(stream)
    missing = set(FIXTURE_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"mode table missing columns: {sorted(missing)}")

    grouped: dict[tuple[str, str], list[BindingMode]] = {}
    for row in reader:
        key = (row["receptor"].strip(), row["ligand"].strip())
        grouped.setdefault(key, []).append(
            BindingMode(
                mode=int(row["mode"]),
                affinity=float(row["affinity_kcal_mol"]),
                rmsd_lb=0.0,
                rmsd_ub=float(row["rmsd_ub_angstrom"]),
            )
        )
    return [
        DockingResult(receptor_id, ligand_id, tuple(modes))
        for (receptor_id, ligand_id), modes in sorted(grouped.items())
    ]
