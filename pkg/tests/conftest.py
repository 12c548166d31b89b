from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def receptor_pdbqt_text() -> str:
    return (FIXTURES / "mrjp1_receptor.pdbqt").read_text()


@pytest.fixture
def oligomer_pdb_text() -> str:
    return (FIXTURES / "oligomer.pdb").read_text()


@pytest.fixture
def ligand_pdbqt_text() -> str:
    return (FIXTURES / "ligand.pdbqt").read_text()


@pytest.fixture
def vina_log_text() -> str:
    return (FIXTURES / "vina_log.txt").read_text()
