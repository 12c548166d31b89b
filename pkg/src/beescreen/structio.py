"""Parsing, chain isolation, validation and serialization of PDB/PDBQT files.

Fixed-column layout follows the de facto PDB standard (serial in columns
7-11, coordinates in 31-54); PDBQT adds partial charge in columns 71-76 and
the AutoDock atom type in 78-79, so files written by Vina, PyMOL or
OpenBabel parse without preprocessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import (
    EmptyStructureError,
    SelectionError,
    SerializationError,
    StructureParseError,
)

PDB = "PDB"
PDBQT = "PDBQT"

# Record types we recognise but deliberately skip.
_STRUCTURAL_RECORDS = ("ATOM", "HETATM", "MODEL", "ENDMDL", "TORSDOF", "END")


@dataclass(frozen=True)
class Atom:
    serial: int
    name: str
    element: str
    residue_name: str
    chain_id: str
    residue_seq: int
    x: float
    y: float
    z: float
    partial_charge: float | None = None
    autodock_type: str | None = None
    hetero: bool = False

    def __post_init__(self):
        if self.serial <= 0:
            raise ValueError(f"atom serial must be positive, got {self.serial}")
        for axis, value in (("x", self.x), ("y", self.y), ("z", self.z)):
            if not math.isfinite(value):
                raise ValueError(f"non-finite {axis} coordinate for atom {self.serial}")

    @property
    def coords(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Model:
    model_id: int
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class MolecularStructure:
    models: tuple[Model, ...]
    source_kind: str
    torsion_count: int | None = None
    skipped_records: int = 0

    def __post_init__(self):
        if not self.models:
            raise EmptyStructureError("structure has no models")
        for model in self.models:
            if not model.atoms:
                raise EmptyStructureError(f"model {model.model_id} has no atoms")
            seen = set()
            for atom in model.atoms:
                if atom.serial in seen:
                    raise ValueError(
                        f"duplicate atom serial {atom.serial} in model {model.model_id}"
                    )
                seen.add(atom.serial)
        if self.torsion_count is not None and self.source_kind != PDBQT:
            raise ValueError("torsion_count is only meaningful for PDBQT structures")

    @property
    def atom_count(self) -> int:
        return sum(len(m.atoms) for m in self.models)


@dataclass(frozen=True)
class ChainSelection:
    keep_chains: frozenset[str]
    drop_hetero: bool = False

    def __post_init__(self):
        if not self.keep_chains:
            raise ValueError("keep_chains must be non-empty")


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    message: str
    failing_serials: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _field(line: str, start: int, end: int) -> str:
    """1-based inclusive column slice, tolerant of short lines."""
    return line[start - 1 : end].strip()


def _float_field(line: str, start: int, end: int, what: str, lineno: int) -> float:
    raw = _field(line, start, end)
    try:
        return float(raw)
    except ValueError:
        raise StructureParseError(f"non-numeric {what} field {raw!r}", lineno) from None


def _int_field(line: str, start: int, end: int, what: str, lineno: int) -> int:
    raw = _field(line, start, end)
    try:
        return int(raw)
    except ValueError:
        raise StructureParseError(f"non-numeric {what} field {raw!r}", lineno) from None


def _parse_atom_line(line: str, lineno: int, kind: str) -> Atom:
    hetero = line.startswith("HETATM")
    serial = _int_field(line, 7, 11, "serial", lineno)
    name = _field(line, 13, 16)
    residue_name = _field(line, 18, 20)
    chain_id = _field(line, 22, 22) or " "
    residue_seq = _int_field(line, 23, 26, "residue sequence", lineno)
    x = _float_field(line, 31, 38, "x coordinate", lineno)
    y = _float_field(line, 39, 46, "y coordinate", lineno)
    z = _float_field(line, 47, 54, "z coordinate", lineno)

    partial_charge = None
    autodock_type = None
    if kind == PDBQT:
        charge_raw = _field(line, 71, 76)
        if charge_raw:
            partial_charge = _float_field(line, 71, 76, "partial charge", lineno)
        autodock_type = _field(line, 78, 79) or None
        element = (autodock_type or name[:1]).rstrip("0123456789") or name[:1]
    else:
        element = _field(line, 77, 78) or name[:1]

    try:
        return Atom(
            serial=serial,
            name=name,
            element=element,
            residue_name=residue_name,
            chain_id=chain_id,
            residue_seq=residue_seq,
            x=x,
            y=y,
            z=z,
            partial_charge=partial_charge,
            autodock_type=autodock_type,
            hetero=hetero,
        )
    except ValueError as exc:
        raise StructureParseError(str(exc), lineno) from None


def parse_structure(text: str, kind: str = PDB) -> MolecularStructure:
    """Parse PDB/PDBQT text into a structure.

    MODEL/ENDMDL boundaries create models; a file without MODEL records
    yields a single model with id 1. TORSDOF sets the torsion count
    (PDBQT only). Unknown record types are skipped and counted.
    """
    if kind not in (PDB, PDBQT):
        raise ValueError(f"unknown structure kind {kind!r}")

    models: list[Model] = []
    current_atoms: list[Atom] = []
    current_model_id: int | None = None
    saw_model_records = False
    torsion_count: int | None = None
    skipped = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        record = line[:6].strip()
        if not record:
            continue
        if line.startswith("TORSDOF"):
            if kind == PDBQT:
                torsion_count = _int_field(line, 8, 80, "TORSDOF", lineno)
            else:
                skipped += 1
        elif record in ("ATOM", "HETATM"):
            current_atoms.append(_parse_atom_line(line, lineno, kind))
        elif record == "MODEL":
            saw_model_records = True
            if current_atoms:
                models.append(Model(current_model_id or 1, tuple(current_atoms)))
                current_atoms = []
            try:
                current_model_id = int(line[6:].strip() or "1")
            except ValueError:
                raise StructureParseError("non-numeric MODEL id", lineno) from None
        elif record == "ENDMDL":
            if current_atoms:
                models.append(Model(current_model_id or len(models) + 1, tuple(current_atoms)))
                current_atoms = []
            current_model_id = None
        elif record == "END":
            continue
        else:
            skipped += 1

    if current_atoms:
        model_id = current_model_id if current_model_id is not None else (
            len(models) + 1 if saw_model_records else 1
        )
        models.append(Model(model_id, tuple(current_atoms)))

    if not models:
        raise EmptyStructureError("no ATOM/HETATM records found")

    return MolecularStructure(
        models=tuple(models),
        source_kind=kind,
        torsion_count=torsion_count,
        skipped_records=skipped,
    )


def isolate_receptor(s: MolecularStructure, sel: ChainSelection) -> MolecularStructure:
    """Keep only atoms on the selected chains, optionally dropping HETATMs.

    Mirrors the receptor-preparation step of deleting the other chains and
    any pre-existing ligands. Input is never modified; atom order is kept.
    """
    new_models = []
    for model in s.models:
        kept = tuple(
            a
            for a in model.atoms
            if a.chain_id in sel.keep_chains and not (sel.drop_hetero and a.hetero)
        )
        if kept:
            new_models.append(Model(model.model_id, kept))

    if not new_models:
        chains = ",".join(sorted(sel.keep_chains))
        raise SelectionError(f"no atoms match chain selection {{{chains}}}")

    return replace(s, models=tuple(new_models), skipped_records=0)


def validate_prepared_ligand(s: MolecularStructure) -> ValidationReport:
    """Check that a structure looks like a docking-ready ligand.

    Reports (not raises): every atom charged, every atom typed, torsion
    count present, single model.
    """
    atoms = [a for m in s.models for a in m.atoms]

    missing_charge = tuple(a.serial for a in atoms if a.partial_charge is None)
    missing_type = tuple(a.serial for a in atoms if not a.autodock_type)

    checks = (
        ValidationCheck(
            name="partial_charges",
            passed=not missing_charge,
            message="all atoms carry a partial charge"
            if not missing_charge
            else f"{len(missing_charge)} atom(s) lack a partial charge",
            failing_serials=missing_charge,
        ),
        ValidationCheck(
            name="atom_types",
            passed=not missing_type,
            message="all atoms carry an AutoDock type"
            if not missing_type
            else f"{len(missing_type)} atom(s) lack an AutoDock type",
            failing_serials=missing_type,
        ),
        ValidationCheck(
            name="torsion_count",
            passed=s.torsion_count is not None,
            message="torsion count present"
            if s.torsion_count is not None
            else "no TORSDOF record; torsional properties missing",
        ),
        ValidationCheck(
            name="single_model",
            passed=len(s.models) == 1,
            message="single model"
            if len(s.models) == 1
            else f"expected 1 model, found {len(s.models)}",
        ),
    )
    return ValidationReport(checks)


def _format_atom(atom: Atom, kind: str) -> str:
    for axis, value in (("x", atom.x), ("y", atom.y), ("z", atom.z)):
        if not -999.999 <= value <= 9999.999:
            raise SerializationError(
                f"{axis} coordinate {value} of atom {atom.serial} exceeds fixed-column width"
            )
    if atom.serial > 99999:
        raise SerializationError(f"atom serial {atom.serial} exceeds fixed-column width")

    record = "HETATM" if atom.hetero else "ATOM  "
    # Short atom names start one column in, per PDB convention.
    name = atom.name if len(atom.name) >= 4 else f" {atom.name:<3}"
    line = (
        f"{record}{atom.serial:>5} {name:<4} {atom.residue_name:>3} "
        f"{atom.chain_id}{atom.residue_seq:>4}    "
        f"{atom.x:8.3f}{atom.y:8.3f}{atom.z:8.3f}{1.0:6.2f}{0.0:6.2f}"
    )
    if kind == PDBQT:
        charge = atom.partial_charge if atom.partial_charge is not None else 0.0
        if not -9.999 <= charge <= 9.999:
            raise SerializationError(
                f"partial charge {charge} of atom {atom.serial} exceeds fixed-column width"
            )
        line += f"    {charge:6.3f} {atom.autodock_type or atom.element:<2}"
    else:
        line += f"          {atom.element:>2}"
    return line.rstrip()


def serialize_structure(s: MolecularStructure) -> str:
    """Render a structure in canonical fixed-column text.

    Canonical means parse(serialize(x)) re-serializes byte-identically:
    coordinates at 3 decimals, charges at 3 decimals, single trailing END.
    """
    lines: list[str] = []
    multi = len(s.models) > 1
    for model in s.models:
        if multi:
            lines.append(f"MODEL {model.model_id:>8}")
        lines.extend(_format_atom(a, s.source_kind) for a in model.atoms)
        if s.source_kind == PDBQT and s.torsion_count is not None:
            lines.append(f"TORSDOF {s.torsion_count}")
        if multi:
            lines.append("ENDMDL")
    lines.append("END")
    return "\n".join(lines) + "\n"
