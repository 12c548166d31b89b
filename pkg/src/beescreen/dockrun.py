"""Docking job configuration, batch orchestration, and result-log parsing.

The engine is any callable taking a DockingJob and returning its log text.
Two implementations ship: ExternalEngine (shells out to a user-supplied
command template) and mock_engine (deterministic synthetic logs so the
whole pipeline runs and tests without a docking program installed).
"""

from __future__ import annotations

import hashlib
import random
import re
import shlex
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import LogParseError, MalformedResultError, MissingTableError
from .geometry import GridBox

DEFAULT_NUM_MODES = 9
DEFAULT_EXHAUSTIVENESS = 8
DEFAULT_TIMEOUT_S = 600.0

CONFIG_KEYS = (
    "receptor",
    "ligand",
    "center_x",
    "center_y",
    "center_z",
    "size_x",
    "size_y",
    "size_z",
    "num_modes",
    "exhaustiveness",
    "out",
)


@dataclass(frozen=True)
class DockingJob:
    receptor_id: str
    ligand_id: str
    receptor_path: str
    ligand_path: str
    grid: GridBox
    num_modes: int = DEFAULT_NUM_MODES
    exhaustiveness: int = DEFAULT_EXHAUSTIVENESS
    out_path: str = "out.pdbqt"

    def __post_init__(self):
        if self.num_modes <= 0:
            raise ValueError("num_modes must be positive")
        if self.exhaustiveness <= 0:
            raise ValueError("exhaustiveness must be positive")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.receptor_id, self.ligand_id)


@dataclass(frozen=True)
class BindingMode:
    mode: int
    affinity: float
    rmsd_lb: float
    rmsd_ub: float

    def __post_init__(self):
        if self.mode <= 0:
            raise ValueError("mode index must be positive")
        if self.rmsd_lb < 0 or self.rmsd_ub < 0:
            raise ValueError("RMSD bounds must be non-negative")


@dataclass(frozen=True)
class DockingResult:
    receptor_id: str
    ligand_id: str
    modes: tuple[BindingMode, ...]


@dataclass(frozen=True)
class JobFailure:
    receptor_id: str
    ligand_id: str
    cause: str


def _format_number(value: float) -> str:
    """Compact decimal with at least one fractional digit (20 -> "20.0")."""
    text = f"{value:.6f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def generate_config(job: DockingJob) -> str:
    """Engine configuration as key = value lines, byte-deterministic."""
    values = {
        "receptor": job.receptor_path,
        "ligand": job.ligand_path,
        "center_x": _format_number(job.grid.center_x),
        "center_y": _format_number(job.grid.center_y),
        "center_z": _format_number(job.grid.center_z),
        "size_x": _format_number(job.grid.size_x),
        "size_y": _format_number(job.grid.size_y),
        "size_z": _format_number(job.grid.size_z),
        "num_modes": str(job.num_modes),
        "exhaustiveness": str(job.exhaustiveness),
        "out": job.out_path,
    }
    return "".join(f"{key} = {values[key]}\n" for key in CONFIG_KEYS)


def parse_config(text: str) -> dict[str, str]:
    """Read a key = value config file back into a dict."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise LogParseError(f"expected 'key = value', got {stripped!r}", lineno)
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


_ROW_RE = re.compile(
    r"^\s*(\d+)\s+(-?\d+(?:\.\d+)?)\s+(-?\d+(?:\.\d+)?)\s+(-?\d+(?:\.\d+)?)\s*$"
)


def parse_result_log(log: str) -> tuple[BindingMode, ...]:
    """Extract the binding-mode table from engine output.

    The table is a header line starting with "mode", a dashed separator,
    then rows of (mode, affinity, rmsd_lb, rmsd_ub). Rows are consumed
    until the first line that does not start with an integer.
    """
    lines = log.splitlines()
    i = 0
    while i < len(lines) and not lines[i].lstrip().lower().startswith("mode"):
        i += 1
    if i >= len(lines):
        raise MissingTableError("no result table found in log")

    # Skip the header (possibly multi-line) until the dashed separator.
    def is_separator(line: str) -> bool:
        stripped = line.strip()
        return bool(stripped) and set(stripped) <= set("-+")

    while i < len(lines) and not is_separator(lines[i]):
        i += 1
    if i >= len(lines):
        raise MissingTableError("result table header has no separator line")
    i += 1

    modes: list[BindingMode] = []
    for lineno in range(i, len(lines)):
        line = lines[lineno]
        tokens = line.split()
        if not tokens or not re.fullmatch(r"\d+", tokens[0]):
            break
        match = _ROW_RE.match(line)
        if not match:
            raise LogParseError(
                f"expected 4 numeric fields, got {line.strip()!r}", lineno + 1
            )
        try:
            modes.append(
                BindingMode(
                    mode=int(match.group(1)),
                    affinity=float(match.group(2)),
                    rmsd_lb=float(match.group(3)),
                    rmsd_ub=float(match.group(4)),
                )
            )
        except ValueError as exc:
            raise LogParseError(str(exc), lineno + 1) from None

    if not modes:
        raise MissingTableError("result table contains no rows")
    _check_mode_invariants(modes)
    return tuple(modes)


def _check_mode_invariants(modes: Sequence[BindingMode]) -> None:
    for i, mode in enumerate(modes, start=1):
        if mode.mode != i:
            raise MalformedResultError(
                f"mode indices must be 1..{len(modes)} without gaps, "
                f"got {mode.mode} at position {i}"
            )
    first = modes[0]
    if first.rmsd_lb != 0.0 or first.rmsd_ub != 0.0:
        raise MalformedResultError("mode 1 must have zero RMSD bounds")
    for prev, cur in zip(modes, modes[1:]):
        if cur.affinity < prev.affinity:
            raise MalformedResultError(
                f"affinities out of order: {cur.affinity} after {prev.affinity}"
            )


def mock_engine(job: DockingJob) -> str:
    """Deterministic synthetic result log keyed only by the job's pair ids."""
    digest = hashlib.sha256(
        f"{job.receptor_id}/{job.ligand_id}".encode()
    ).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))

    affinities = sorted(rng.uniform(-8.0, -4.0) for _ in range(job.num_modes))
    rows = []
    rmsd_lb = rmsd_ub = 0.0
    for i, affinity in enumerate(affinities, start=1):
        if i > 1:
            rmsd_lb += rng.uniform(0.1, 1.5)
            rmsd_ub = rmsd_lb + rng.uniform(0.0, 2.0)
        rows.append(f"{i:>4}    {affinity:>8.1f}    {rmsd_lb:>8.3f}    {rmsd_ub:>8.3f}")

    header = (
        f"Synthetic docking of {job.ligand_id} against {job.receptor_id}\n"
        "\n"
        "mode |   affinity | dist from best mode\n"
        "     | (kcal/mol) | rmsd l.b.| rmsd u.b.\n"
        "-----+------------+----------+----------\n"
    )
    return header + "\n".join(rows) + "\n"


class ExternalEngine:
    """Runs a user-supplied command with a {config} placeholder per job.

    The config file is written to a temporary directory; the command's
    standard output is the log.
    """

    def __init__(self, command_template: str, timeout: float = DEFAULT_TIMEOUT_S):
        if "{config}" not in command_template:
            raise ValueError("engine command template must contain {config}")
        self.command_template = command_template
        self.timeout = timeout

    def __call__(self, job: DockingJob) -> str:
        with tempfile.TemporaryDirectory(prefix="beescreen-") as tmp:
            config_path = Path(tmp) / f"{job.receptor_id}_{job.ligand_id}.cfg"
            config_path.write_text(generate_config(job))
            command = [
                part.replace("{config}", str(config_path))
                for part in shlex.split(self.command_template)
            ]
            proc = subprocess.run(
                command,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
            if proc.returncode != 0:
                raise RuntimeError(
                    f"engine exited with status {proc.returncode}: "
                    f"{proc.stderr.strip()[:200]}"
                )
            return proc.stdout


Engine = Callable[[DockingJob], str]


def run_batch(
    jobs: Sequence[DockingJob],
    engine: Engine = mock_engine,
    max_parallel: int = 1,
) -> tuple[list[DockingResult], list[JobFailure]]:
    """Run every job, collecting results and failures.

    Failures never abort other jobs. Output order is lexicographic by
    (receptor_id, ligand_id) regardless of execution order, so reports
    built from it are deterministic at any parallelism.
    """
    if max_parallel <= 0:
        raise ValueError("max_parallel must be positive")
    pairs = [job.pair for job in jobs]
    if len(set(pairs)) != len(pairs):
        dupes = sorted({p for p in pairs if pairs.count(p) > 1})
        raise ValueError(f"duplicate (receptor, ligand) pairs in batch: {dupes}")

    def run_one(job: DockingJob) -> DockingResult | JobFailure:
        try:
            if not Path(job.receptor_path).exists():
                raise FileNotFoundError(f"receptor file missing: {job.receptor_path}")
            if not Path(job.ligand_path).exists():
                raise FileNotFoundError(f"ligand file missing: {job.ligand_path}")
            modes = parse_result_log(engine(job))
            if len(modes) > job.num_modes:
                raise MalformedResultError(
                    f"engine returned {len(modes)} modes, requested {job.num_modes}"
                )
            return DockingResult(job.receptor_id, job.ligand_id, modes)
        except subprocess.TimeoutExpired:
            return JobFailure(job.receptor_id, job.ligand_id, "engine timed out")
        except Exception as exc:
            return JobFailure(job.receptor_id, job.ligand_id, str(exc))

    with ThreadPoolExecutor(max_workers=max_parallel) as pool:
        outcomes = list(pool.map(run_one, jobs))

    results = sorted(
        (o for o in outcomes if isinstance(o, DockingResult)),
        key=lambda r: (r.receptor_id, r.ligand_id),
    )
    failures = sorted(
        (o for o in outcomes if isinstance(o, JobFailure)),
        key=lambda f: (f.receptor_id, f.ligand_id),
    )
    return results, failures
