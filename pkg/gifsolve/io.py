# Files: CSV point sets, measures and ledgers, PGM rasters, atomic writes

import io
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Optional, Union

import numpy as np
import numpy.typing as npt
from PIL import Image

from gifsolve.errors import InvalidInputError
from gifsolve.ledger import ConvergenceReport, OstrowskiLedger
from gifsolve.measure import DiscreteMeasure
from gifsolve.metric import FloatArray, PointSet

LEDGER_HEADER = ("k", "beta", "sigma", "eps", "bound")
REPORT_HEADER = ("k", "width", "eps", "bound", "displacement")
INNER_HEADER = ("step",) + REPORT_HEADER

Cell = Union[int, float, str]


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """
    Write a file atomically (temporary file in the same directory, then rename).

    Parameters
    ----------
    path : Path
        Destination.
    data : bytes
        Content.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    """
    Write a UTF-8 text file atomically.
    """
    atomic_write_bytes(path, text.encode("utf-8"))


def _format(value: Cell) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _to_csv(
    rows: Iterable[Sequence[Cell]], header: Optional[Sequence[str]] = None
) -> str:
    header_text = "" if header is None else ",".join(header)
    cells = [[_format(v) for v in row] for row in rows]
    if len(cells) == 0:
        return header_text + "\n" if header_text else ""
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        np.array(cells, dtype=str),
        fmt="%s",
        delimiter=",",
        header=header_text,
        comments="",
    )
    return buffer.getvalue()


def _read_rows(path: Path, header: Optional[Sequence[str]] = None) -> FloatArray:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"Can not read {path}.") from e

    lines = [line for line in text.splitlines() if line.strip()]
    if header is not None:
        first = tuple(c.strip() for c in lines[0].split(",")) if lines else ()
        if first != tuple(header):
            raise InvalidInputError(f"{path}: expected header {','.join(header)}.")
        lines = lines[1:]
    if len(lines) == 0:
        raise InvalidInputError(f"{path}: no rows.")

    try:
        return np.loadtxt(lines, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        message = f"{path}: rows must be numeric with equal arity."
        raise InvalidInputError(message) from e


def pointset_csv(a: Union[PointSet, FloatArray]) -> str:
    """
    Return CSV text of a point set or orbit: one point per row, no header.
    """
    points = a.points if isinstance(a, PointSet) else np.asarray(a, dtype=np.float64)
    return _to_csv(points.tolist())


def write_pointset_csv(path: Path, a: Union[PointSet, FloatArray]) -> None:
    """
    Write a point set (or raw orbit array) as CSV.

    Parameters
    ----------
    path : Path
        Destination.
    a : Union[PointSet, FloatArray]
        Points to be written.
    """
    atomic_write_text(path, pointset_csv(a))


def read_pointset_csv(path: Path) -> PointSet:
    """
    Read a point set written by write_pointset_csv.

    Raises
    ------
    InvalidInputError
        If rows have inconsistent arity or non-numeric entries.
    """
    return PointSet(np.array(_read_rows(path)))


def write_measure_csv(path: Path, mu: DiscreteMeasure) -> None:
    """
    Write a measure as CSV: d coordinate columns followed by the weight.
    """
    rows = np.column_stack([mu.atoms, mu.weights]).tolist()
    atomic_write_text(path, _to_csv(rows))


def read_measure_csv(path: Path) -> DiscreteMeasure:
    """
    Read a measure written by write_measure_csv.

    Raises
    ------
    InvalidInputError
        If rows are inconsistent or weights are not a probability vector.
    """
    values = np.array(_read_rows(path))
    if values.shape[1] < 2:
        raise InvalidInputError(f"{path}: measure rows need coordinates and a weight.")
    return DiscreteMeasure(values[:, :-1], values[:, -1])


def write_ledger_csv(path: Path, ledger: OstrowskiLedger) -> None:
    """
    Write the ledger rows (k, beta, sigma, eps, bound) with a header.
    """
    atomic_write_text(path, _to_csv(ledger.rows(), LEDGER_HEADER))


def read_ledger_csv(path: Path) -> list[tuple[int, float, float, float, float]]:
    """
    Read ledger rows written by write_ledger_csv.
    """
    return [
        (int(k), float(beta), float(sigma), float(eps), float(bound))
        for k, beta, sigma, eps, bound in _read_rows(path, LEDGER_HEADER)
    ]


def write_reports_csv(path: Path, reports: Sequence[ConvergenceReport]) -> None:
    """
    Write the rows of the inner solves, one block per outer step.

    Each row is (step, k, width, eps, bound, displacement) where step is the
    1-based position of the report in reports.
    """
    rows = [
        (step, *row)
        for step, report in enumerate(reports, start=1)
        for row in report.rows()
    ]
    atomic_write_text(path, _to_csv(rows, INNER_HEADER))


def render_pointset(
    a: PointSet,
    width: int,
    height: int,
    bounds: Optional[tuple[npt.ArrayLike, npt.ArrayLike]] = None,
) -> npt.NDArray[np.uint8]:
    """
    Rasterize a point set onto a grayscale canvas.

    Pixel column = floor(t * (width - 1) + 0.5) where t is the relative position
    of the x coordinate in the bounds (rows likewise with y, row 0 at the upper
    bound). Lit pixels are 255. Sets on the line are drawn as a vertical strip.

    Parameters
    ----------
    a : PointSet
        Set of dimension 1 or 2.
    width : int
        Canvas width.
    height : int
        Canvas height.
    bounds : Optional[tuple[ArrayLike, ArrayLike]], default None
        Lower and upper corners of the drawn region.
        If None, the bounding box of the set.

    Returns
    -------
    raster : NDArray[uint8]
        Array of shape (height, width).

    Raises
    ------
    InvalidInputError
        If the dimension is greater than 2.
    """
    if a.dim > 2:
        raise InvalidInputError(
            f"Can not render dimension {a.dim}; project onto two coordinates first."
        )
    if width < 1 or height < 1:
        raise InvalidInputError("Canvas size must be positive.")

    if bounds is None:
        lower, upper = a.bounding_box()
    else:
        lower = np.atleast_1d(np.asarray(bounds[0], dtype=np.float64))
        upper = np.atleast_1d(np.asarray(bounds[1], dtype=np.float64))
    span = np.where(upper > lower, upper - lower, 1.0)
    t = (a.points - lower) / span
    inside = np.all((t >= 0.0) & (t <= 1.0), axis=1)
    t = t[inside]

    raster = np.zeros((height, width), dtype=np.uint8)
    cols = np.floor(t[:, 0] * (width - 1) + 0.5).astype(np.intp)
    if a.dim == 1:
        raster[:, cols] = 255
    else:
        rows = height - 1 - np.floor(t[:, 1] * (height - 1) + 0.5).astype(np.intp)
        raster[rows, cols] = 255
    return raster


def write_pgm(path: Path, raster: npt.NDArray[np.uint8]) -> None:
    """
    Write a grayscale raster as binary PGM (P5, maxval 255).
    """
    if raster.ndim != 2 or raster.dtype != np.uint8:
        raise InvalidInputError("Raster must be a 2-D uint8 array.")
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(raster)).save(buffer, format="PPM")
    atomic_write_bytes(path, buffer.getvalue())
