"""Pose geometry: RMSD bounds between conformers, grid-box suggestion.

RMSD here is computed in the receptor frame with no superposition, the
convention docking engines use when comparing poses to the best mode. The
upper bound uses identity atom correspondence; the lower bound is the max
of the two directed nearest-same-element matchings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyStructureError, IncomparablePosesError
from .structio import Model, MolecularStructure


@dataclass(frozen=True)
class PoseRmsd:
    lower_bound: float
    upper_bound: float

    def __post_init__(self):
        if self.lower_bound < 0 or self.upper_bound < 0:
            raise ValueError("RMSD bounds must be non-negative")
        # Allow for float noise at the boundary of equality.
        if self.lower_bound > self.upper_bound + 1e-9:
            raise ValueError("RMSD lower bound exceeds upper bound")


@dataclass(frozen=True)
class GridBox:
    center_x: float
    center_y: float
    center_z: float
    size_x: float
    size_y: float
    size_z: float

    def __post_init__(self):
        for axis, size in (("x", self.size_x), ("y", self.size_y), ("z", self.size_z)):
            if size <= 0:
                raise ValueError(f"grid size_{axis} must be positive, got {size}")

    def contains(self, x: float, y: float, z: float, slack: float = 1e-9) -> bool:
        return (
            abs(x - self.center_x) <= self.size_x / 2 + slack
            and abs(y - self.center_y) <= self.size_y / 2 + slack
            and abs(z - self.center_z) <= self.size_z / 2 + slack
        )


def _sq_dist(a, b) -> float:
    return (a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2


def _directed_nearest_rms(from_atoms, to_atoms) -> float:
    """RMS over from_atoms of the distance to the nearest same-element atom."""
    by_element: dict[str, list] = {}
    for atom in to_atoms:
        by_element.setdefault(atom.element, []).append(atom)

    total = 0.0
    for atom in from_atoms:
        candidates = by_element.get(atom.element)
        if not candidates:
            raise IncomparablePosesError(
                f"no atom of element {atom.element!r} in the other pose"
            )
        total += min(_sq_dist(atom, other) for other in candidates)
    return math.sqrt(total / len(from_atoms))


def pose_rmsd(a: Model, b: Model) -> PoseRmsd:
    """RMSD bounds between two poses of the same molecule.

    Requires equal atom counts with positionally matching elements; poses
    differing in composition (e.g. hydrogen counts) are rejected rather
    than silently filtered.
    """
    if len(a.atoms) != len(b.atoms):
        raise IncomparablePosesError(
            f"atom count mismatch: {len(a.atoms)} vs {len(b.atoms)}"
        )
    if not a.atoms:
        raise IncomparablePosesError("poses are empty")
    for i, (atom_a, atom_b) in enumerate(zip(a.atoms, b.atoms)):
        if atom_a.element != atom_b.element:
            raise IncomparablePosesError(
                f"element mismatch at position {i}: "
                f"{atom_a.element!r} vs {atom_b.element!r}"
            )

    n = len(a.atoms)
    upper = math.sqrt(sum(_sq_dist(x, y) for x, y in zip(a.atoms, b.atoms)) / n)
    lower = max(
        _directed_nearest_rms(a.atoms, b.atoms),
        _directed_nearest_rms(b.atoms, a.atoms),
    )
    # Each nearest-match distance is <= the identity-match distance per atom,
    # but float rounding can leave lower a hair above upper when poses match.
    lower = min(lower, upper)
    return PoseRmsd(lower_bound=lower, upper_bound=upper)


def suggest_grid_box(receptor: MolecularStructure, margin: float = 5.0) -> GridBox:
    """Axis-aligned bounding box of all atoms, expanded by margin per face.

    The default 5 A margin is a blind-docking style choice for when no
    grid has been hand-placed around a known site.
    """
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    atoms = [atom for model in receptor.models for atom in model.atoms]
    if not atoms:
        raise EmptyStructureError("cannot suggest a grid box for an empty structure")

    min_x = min(a.x for a in atoms) - margin
    max_x = max(a.x for a in atoms) + margin
    min_y = min(a.y for a in atoms) - margin
    max_y = max(a.y for a in atoms) + margin
    min_z = min(a.z for a in atoms) - margin
    max_z = max(a.z for a in atoms) + margin

    return GridBox(
        center_x=(min_x + max_x) / 2,
        center_y=(min_y + max_y) / 2,
        center_z=(min_z + max_z) / 2,
        size_x=max_x - min_x,
        size_y=max_y - min_y,
        size_z=max_z - min_z,
    )
