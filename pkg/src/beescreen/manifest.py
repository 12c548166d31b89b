"""Pipeline manifest: key = value lines under section headers.

The syntax deliberately mirrors the docking config files so users only
learn one format. The parser is strict: unknown sections, unknown keys,
bad values and duplicate ids all fail with the offending line number.

Example:

    [engine]
    command = mock
    max_parallel = 4

    [screening]
    rmsd_ub_max = 3.5
    control_ligand = 94R

    [receptor MRJP1]
    path = receptors/mrjp1.pdbqt
    chains = A
    drop_hetero = true

    [grid MRJP1]
    center_x = 10.0
    ...

    [ligand VD3]
    path = ligands/vd3.pdbqt
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dockrun import DEFAULT_EXHAUSTIVENESS, DEFAULT_NUM_MODES, DEFAULT_TIMEOUT_S
from .errors import ManifestError
from .geometry import GridBox
from .screen import ScreeningConfig
from .structio import ChainSelection

_GRID_KEYS = ("center_x", "center_y", "center_z", "size_x", "size_y", "size_z")


@dataclass(frozen=True)
class ReceptorSpec:
    receptor_id: str
    path: str
    selection: ChainSelection | None = None


@dataclass(frozen=True)
class LigandSpec:
    ligand_id: str
    path: str


@dataclass(frozen=True)
class PipelineManifest:
    receptors: tuple[ReceptorSpec, ...]
    ligands: tuple[LigandSpec, ...]
    grid_overrides: dict[str, GridBox] = field(default_factory=dict)
    screening: ScreeningConfig = field(default_factory=ScreeningConfig)
    engine_command: str = "mock"
    max_parallel: int = 1
    num_modes: int = DEFAULT_NUM_MODES
    exhaustiveness: int = DEFAULT_EXHAUSTIVENESS
    grid_margin: float = 5.0
    timeout: float = DEFAULT_TIMEOUT_S

    def __post_init__(self):
        if not self.receptors:
            raise ManifestError("manifest defines no receptors")
        if not self.ligands:
            raise ManifestError("manifest defines no ligands")
        receptor_ids = [r.receptor_id for r in self.receptors]
        ligand_ids = [l.ligand_id for l in self.ligands]
        for name, ids in (("receptor", receptor_ids), ("ligand", ligand_ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            if dupes:
                raise ManifestError(f"duplicate {name} ids: {dupes}")
        unknown = set(self.grid_overrides) - set(receptor_ids)
        if unknown:
            raise ManifestError(f"grid overrides for unknown receptors: {sorted(unknown)}")


def _parse_bool(raw: str, lineno: int) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ManifestError(f"expected a boolean, got {raw!r}", lineno)


def _parse_float(raw: str, lineno: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ManifestError(f"expected a number, got {raw!r}", lineno) from None


def _parse_int(raw: str, lineno: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ManifestError(f"expected an integer, got {raw!r}", lineno) from None


def parse_manifest(text: str, base_dir: str | Path = ".") -> PipelineManifest:
    """Parse manifest text; relative paths resolve against base_dir."""
    base = Path(base_dir)

    # section -> {key: (value, lineno)}
    sections: list[tuple[str, int, dict[str, tuple[str, int]]]] = []
    current: dict[str, tuple[str, int]] | None = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ManifestError("unterminated section header", lineno)
            current = {}
            sections.append((stripped[1:-1].strip(), lineno, current))
        else:
            if current is None:
                raise ManifestError("key outside any section", lineno)
            if "=" not in stripped:
                raise ManifestError(f"expected 'key = value', got {stripped!r}", lineno)
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key in current:
                raise ManifestError(f"duplicate key {key!r} in section", lineno)
            current[key] = (value.strip(), lineno)

    receptors: list[ReceptorSpec] = []
    ligands: list[LigandSpec] = []
    grids: dict[str, GridBox] = {}
    screening_kwargs: dict = {}
    engine_command = "mock"
    max_parallel = 1
    num_modes = DEFAULT_NUM_MODES
    exhaustiveness = DEFAULT_EXHAUSTIVENESS
    grid_margin = 5.0
    timeout = DEFAULT_TIMEOUT_S

    def require(keys: dict, name: str, header_lineno: int) -> tuple[str, int]:
        if name not in keys:
            raise ManifestError(f"missing required key {name!r}", header_lineno)
        return keys[name]

    for header, header_lineno, keys in sections:
        parts = header.split()
        kind = parts[0].lower() if parts else ""

        if kind == "engine" and len(parts) == 1:
            for key, (value, lineno) in keys.items():
                if key == "command":
                    engine_command = value
                elif key == "max_parallel":
                    max_parallel = _parse_int(value, lineno)
                elif key == "num_modes":
                    num_modes = _parse_int(value, lineno)
                elif key == "exhaustiveness":
                    exhaustiveness = _parse_int(value, lineno)
                elif key == "grid_margin":
                    grid_margin = _parse_float(value, lineno)
                elif key == "timeout":
                    timeout = _parse_float(value, lineno)
                else:
                    raise ManifestError(f"unknown engine key {key!r}", lineno)
        elif kind == "screening" and len(parts) == 1:
            for key, (value, lineno) in keys.items():
                if key in ("rmsd_ub_max", "apisimin_tolerance", "mrjp1_margin"):
                    screening_kwargs[key] = _parse_float(value, lineno)
                elif key in ("control_ligand", "aggregate"):
                    screening_kwargs[key] = value
                else:
                    raise ManifestError(f"unknown screening key {key!r}", lineno)
        elif kind == "receptor" and len(parts) == 2:
            receptor_id = parts[1]
            path_value, _ = require(keys, "path", header_lineno)
            selection = None
            if "chains" in keys:
                chains_raw, chains_lineno = keys["chains"]
                chains = frozenset(
                    c.strip() for c in chains_raw.split(",") if c.strip()
                )
                if not chains:
                    raise ManifestError("chains list is empty", chains_lineno)
                drop = True
                if "drop_hetero" in keys:
                    drop = _parse_bool(*keys["drop_hetero"])
                selection = ChainSelection(keep_chains=chains, drop_hetero=drop)
            elif "drop_hetero" in keys:
                raise ManifestError(
                    "drop_hetero requires a chains key", keys["drop_hetero"][1]
                )
            for key in keys:
                if key not in ("path", "chains", "drop_hetero"):
                    raise ManifestError(f"unknown receptor key {key!r}", keys[key][1])
            receptors.append(
                ReceptorSpec(receptor_id, str(base / path_value), selection)
            )
        elif kind == "ligand" and len(parts) == 2:
            path_value, _ = require(keys, "path", header_lineno)
            for key in keys:
                if key != "path":
                    raise ManifestError(f"unknown ligand key {key!r}", keys[key][1])
            ligands.append(LigandSpec(parts[1], str(base / path_value)))
        elif kind == "grid" and len(parts) == 2:
            values = {}
            for key in _GRID_KEYS:
                raw, lineno = require(keys, key, header_lineno)
                values[key] = _parse_float(raw, lineno)
            for key in keys:
                if key not in _GRID_KEYS:
                    raise ManifestError(f"unknown grid key {key!r}", keys[key][1])
            try:
                grids[parts[1]] = GridBox(**values)
            except ValueError as exc:
                raise ManifestError(str(exc), header_lineno) from None
        else:
            raise ManifestError(f"unknown section [{header}]", header_lineno)

    try:
        screening = ScreeningConfig(**screening_kwargs)
    except ValueError as exc:
        raise ManifestError(str(exc)) from None

    return PipelineManifest(
        receptors=tuple(receptors),
        ligands=tuple(ligands),
        grid_overrides=grids,
        screening=screening,
        engine_command=engine_command,
        max_parallel=max_parallel,
        num_modes=num_modes,
        exhaustiveness=exhaustiveness,
        grid_margin=grid_margin,
        timeout=timeout,
    )
