# System specification documents (JSON)

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from gifsolve.errors import InvalidInputError, SpecError
from gifsolve.gifs import GifsSystem, MultiAffineMap
from gifsolve.ifs import lipschitz_constant
from gifsolve.measure import NORMALIZATION_TOL, GifsP

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MapSpec:
    """
    One map of a system specification.

    Attributes
    ----------
    matrices : tuple[tuple[float, ...], ...]
        m matrices, each flattened row-major to d * d entries.
    offset : tuple[float, ...]
        Offset of length d.
    """

    matrices: tuple[tuple[float, ...], ...]
    offset: tuple[float, ...]


@dataclass(frozen=True)
class SystemSpec:
    """
    Validated description of a GIFS (with optional probabilities).

    Attributes
    ----------
    dim : int
        Ambient dimension d.
    order : int
        Order m.
    maps : tuple[MapSpec, ...]
        Maps of the system.
    probs : Optional[tuple[float, ...]], default None
        Probabilities of the maps.
    metadata : dict[str, Any], default {}
        Free-form name / description.
    schema_version : int, default 1
        Document schema version.
    """

    dim: int
    order: int
    maps: tuple[MapSpec, ...]
    probs: Optional[tuple[float, ...]] = None
    metadata: dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_system(self) -> GifsSystem:
        """
        Build the GIFS.

        Returns
        -------
        system : GifsSystem
            System with the specified maps.
        """
        d = self.dim
        return GifsSystem(
            [
                MultiAffineMap(
                    [
                        np.reshape(np.array(a, dtype=np.float64), (d, d))
                        for a in m.matrices
                    ],
                    np.array(m.offset, dtype=np.float64),
                )
                for m in self.maps
            ]
        )

    def to_gifsp(self) -> GifsP:
        """
        Build the GIFS with probabilities (uniform if none are specified).

        Returns
        -------
        p : GifsP
            System with probabilities.
        """
        system = self.to_system()
        if self.probs is None:
            return GifsP.uniform(system)
        return GifsP(system, self.probs)


def _number(value: Any) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    number = float(value)
    if not math.isfinite(number):
        return None
    return number


def _numbers(value: Any) -> Optional[tuple[float, ...]]:
    if not isinstance(value, list):
        return None
    numbers = [_number(v) for v in value]
    if any(n is None for n in numbers):
        return None
    return tuple(n for n in numbers if n is not None)


def _matrix(value: Any, dim: int) -> Optional[tuple[float, ...]]:
    # Accepts a flattened list of d * d numbers or a nested d x d list.
    if isinstance(value, list) and len(value) > 0 and isinstance(value[0], list):
        rows = [_numbers(row) for row in value]
        if len(rows) != dim or any(r is None or len(r) != dim for r in rows):
            return None
        return tuple(x for r in rows if r is not None for x in r)
    flat = _numbers(value)
    if flat is None or len(flat) != dim * dim:
        return None
    return flat


def _positive_int(document: dict[str, Any], key: str, violations: list[str]) -> int:
    value = document.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        violations.append(f"'{key}' must be a positive integer, got {value!r}.")
        return 0
    return value


def _parse_map(
    j: int, item: Any, dim: int, order: int, violations: list[str]
) -> Optional[MapSpec]:
    if not isinstance(item, dict):
        violations.append(f"maps[{j}] must be an object.")
        return None
    matrices_value = item.get("matrices")
    if not isinstance(matrices_value, list) or len(matrices_value) != order:
        violations.append(f"maps[{j}].matrices must be a list of {order} matrices.")
        return None

    matrices: list[tuple[float, ...]] = []
    count = len(violations)
    for i, value in enumerate(matrices_value):
        matrix = _matrix(value, dim)
        if matrix is None:
            violations.append(
                f"maps[{j}].matrices[{i}] must be a {dim}x{dim} matrix "
                "of finite numbers."
            )
        else:
            matrices.append(matrix)

    offset = _numbers(item.get("offset"))
    if offset is None or len(offset) != dim:
        violations.append(f"maps[{j}].offset must be a list of {dim} finite numbers.")
    if len(violations) > count:
        return None
    assert offset is not None  # for lint

    total = math.fsum(
        lipschitz_constant(np.reshape(np.array(a), (dim, dim))) for a in matrices
    )
    if total >= 1.0:
        violations.append(f"maps[{j}] is not contractive: sum of a_i = {total!r}.")
    return MapSpec(tuple(matrices), offset)


def parse_spec(text: str) -> SystemSpec:
    """
    Parse and validate a JSON system specification.

    Parameters
    ----------
    text : str
        JSON document.

    Returns
    -------
    spec : SystemSpec
        Validated specification.

    Raises
    ------
    SpecError
        With the list of all violations found.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError([f"Malformed JSON: {e}"]) from e
    if not isinstance(document, dict):
        raise SpecError(["Document must be a JSON object."])

    violations: list[str] = []
    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        violations.append(f"Unsupported schema_version {version!r}.")
    dim = _positive_int(document, "dim", violations)
    order = _positive_int(document, "order", violations)

    maps_value = document.get("maps")
    maps: list[MapSpec] = []
    if not isinstance(maps_value, list) or len(maps_value) == 0:
        violations.append("'maps' must be a nonempty list.")
    elif dim > 0 and order > 0:
        for j, item in enumerate(maps_value):
            parsed = _parse_map(j, item, dim, order, violations)
            if parsed is not None:
                maps.append(parsed)

    probs: Optional[tuple[float, ...]] = None
    if document.get("probs") is not None:
        probs = _numbers(document["probs"])
        if probs is None:
            violations.append("'probs' must be a list of finite numbers.")
        else:
            if isinstance(maps_value, list) and len(probs) != len(maps_value):
                violations.append(
                    f"'probs' has {len(probs)} entries for {len(maps_value)} maps."
                )
            if any(q <= 0.0 for q in probs):
                violations.append("'probs' must be positive.")
            total = math.fsum(probs)
            if abs(total - 1.0) > NORMALIZATION_TOL:
                violations.append(f"'probs' sum to {total!r}, not 1.")

    metadata = document.get("metadata", {})
    if not isinstance(metadata, dict):
        violations.append("'metadata' must be an object.")
        metadata = {}

    if violations:
        raise SpecError(violations)
    return SystemSpec(dim, order, tuple(maps), probs, dict(metadata), SCHEMA_VERSION)


def serialize_spec(spec: SystemSpec) -> str:
    """
    Serialize a specification to JSON (floats in shortest round-trip form).

    Parameters
    ----------
    spec : SystemSpec
        Specification.

    Returns
    -------
    text : str
        JSON document accepted by parse_spec.
    """
    document: dict[str, Any] = {
        "schema_version": spec.schema_version,
        "dim": spec.dim,
        "order": spec.order,
        "maps": [
            {"matrices": [list(a) for a in m.matrices], "offset": list(m.offset)}
            for m in spec.maps
        ],
    }
    if spec.probs is not None:
        document["probs"] = list(spec.probs)
    if spec.metadata:
        document["metadata"] = spec.metadata
    return json.dumps(document, indent=2) + "\n"


def load_spec(path: Path) -> SystemSpec:
    """
    Read and parse a specification file.

    Raises
    ------
    InvalidInputError
        If the file can not be read.
    SpecError
        If the document is invalid.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"Can not read spec {path}.") from e
    return parse_spec(text)
