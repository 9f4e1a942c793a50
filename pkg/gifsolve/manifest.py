# Run manifests

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from gifsolve.errors import InvalidInputError
from gifsolve.io import atomic_write_text

MANIFEST_NAME = "manifest.json"


def sha256_of(data: bytes) -> str:
    """Hex SHA-256 digest."""
    return hashlib.sha256(data).hexdigest()


def file_hash(path: Path) -> str:
    """Hex SHA-256 digest of a file's content."""
    return sha256_of(path.read_bytes())


@dataclass(frozen=True)
class RunManifest:
    """
    Record tying the outputs of one command to its inputs and certified bounds.

    Attributes
    ----------
    command : list[str]
        Command-line arguments of the run.
    spec_hash : Optional[str]
        SHA-256 of the spec document (None if the command read no spec).
    schedules : dict[str, str]
        Schedules used (beta, sigma).
    seeds : dict[str, int]
        Rng seeds.
    tolerances : dict[str, float]
        Tolerances and budgets.
    outputs : dict[str, str]
        Output file name (relative to the manifest) to SHA-256 of its content.
    bounds : dict[str, float]
        Final certified bounds.
    wall_clock : float
        Elapsed seconds.
    version : str
        Package version.
    """

    command: list[str]
    spec_hash: Optional[str] = None
    schedules: dict[str, str] = field(default_factory=dict)
    seeds: dict[str, int] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    bounds: dict[str, float] = field(default_factory=dict)
    wall_clock: float = 0.0
    version: str = ""

    def to_json(self) -> str:
        """
        Serialize to JSON with sorted keys.
        """
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, directory: Path) -> Path:
        """
        Write the manifest into a directory.

        Parameters
        ----------
        directory : Path
            Output directory (where the listed outputs live).

        Returns
        -------
        path : Path
            Path of the written manifest.
        """
        path = directory / MANIFEST_NAME
        atomic_write_text(path, self.to_json())
        return path

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        """
        Load a manifest.

        Raises
        ------
        InvalidInputError
            If the file is missing or malformed.
        """
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
            return cls(**document)
        except (OSError, ValueError, TypeError) as e:
            raise InvalidInputError(f"Can not load manifest {path}.") from e

    def verify(self, directory: Path) -> list[str]:
        """
        Re-hash every listed output.

        Parameters
        ----------
        directory : Path
            Directory holding the outputs.

        Returns
        -------
        problems : list[str]
            Missing or modified outputs (empty when everything matches).
        """
        problems: list[str] = []
        for name, digest in sorted(self.outputs.items()):
            path = directory / name
            if not path.exists():
                problems.append(f"{name}: missing")
            elif file_hash(path) != digest:
                problems.append(f"{name}: content changed")
        return problems


def outputs_of(directory: Path, names: list[str]) -> dict[str, str]:
    """
    Hash the named outputs in a directory.
    """
    return {name: file_hash(directory / name) for name in names}
