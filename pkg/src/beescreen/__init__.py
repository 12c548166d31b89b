"""Batch virtual-screening post-processing and classifier evaluation.

Submodules:
    structio  - PDB/PDBQT parsing, chain isolation, serialization
    geometry  - pose RMSD bounds, grid-box suggestion
    dockrun   - docking configs, batch orchestration, log parsing
    screen    - RMSD filtering, affinity aggregation, candidate selection
    claseval  - confusion-matrix metrics and class coarsening
    report    - CSV/JSON/SVG/PNG report emission
    pipeline  - manifest-driven end-to-end runs
    cli       - the `beescreen` command
"""

from importlib import resources

__version__ = "0.1.0"


def mode_table_fixture_path():
    """Path to the shipped condensed mode table (the screening fixture)."""
    return resources.files("beescreen.data") / "mode_table.csv"
