# Point sets and the Hausdorff-Pompeiu metric

import logging
from collections.abc import Iterable, Iterator
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from gifsolve.errors import DimensionMismatchError, InvalidInputError

FloatArray = npt.NDArray[np.float64]

DEDUP_RELATIVE_TOL = 1e-12

logger = logging.getLogger(__name__)


def as_points(data: npt.ArrayLike) -> FloatArray:
    """
    Convert array-like data into an (N, d) float array.

    A flat sequence of scalars is read as N points in one dimension.

    Parameters
    ----------
    data : ArrayLike
        Points to be converted.

    Returns
    -------
    points : FloatArray
        Array of shape (N, d).

    Raises
    ------
    InvalidInputError
        If the data is not one- or two-dimensional or has non-finite entries.
    """
    points = np.array(data, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2:
        raise InvalidInputError(
            f"Points must be a 2-D array, got shape {points.shape}."
        )
    if not np.all(np.isfinite(points)):
        raise InvalidInputError("Points must have finite coordinates.")
    # NOTE: Adding 0.0 turns -0.0 into 0.0.
    return points + 0.0


def canonical_order(points: FloatArray) -> npt.NDArray[np.intp]:
    """
    Return indices sorting points lexicographically on coordinates.

    Parameters
    ----------
    points : FloatArray
        Array of shape (N, d).

    Returns
    -------
    order : NDArray[intp]
        Sorting permutation (first coordinate is the primary key).
    """
    return np.lexsort(points.T[::-1])


def dedup_points(points: FloatArray, tol: float) -> FloatArray:
    """
    Sort points lexicographically and drop near duplicates.

    Within a cluster of points closer than tol, the lexicographically smallest
    point survives.

    Parameters
    ----------
    points : FloatArray
        Array of shape (N, d).
    tol : float
        Dedup tolerance (0 removes exact duplicates only).

    Returns
    -------
    deduped : FloatArray
        Sorted array without near duplicates.
    """
    unique = np.unique(points, axis=0)
    if tol <= 0.0 or len(unique) < 2:
        return unique

    pairs = cKDTree(unique).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return unique

    removed = np.zeros(len(unique), dtype=bool)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    for i, j in pairs:
        if not removed[i]:
            removed[j] = True
    return unique[~removed]


class PointSet:
    """
    Finite nonempty set of points in R^d.

    Points are kept in canonical (lexicographic) order without near duplicates,
    so two point sets are equal iff their arrays are equal.
    """

    def __init__(
        self, points: npt.ArrayLike, dedup_tol: Optional[float] = None
    ) -> None:
        """
        Parameters
        ----------
        points : ArrayLike
            Points of shape (N, d), or a flat sequence for d = 1.
        dedup_tol : Optional[float], default None
            Dedup tolerance.
            If None, 1e-12 times the bounding-box diameter is used.

        Raises
        ------
        InvalidInputError
            If no point is given or coordinates are not finite.
        """
        array = as_points(points)
        if len(array) == 0:
            raise InvalidInputError("Point set must be nonempty.")

        if dedup_tol is None:
            dedup_tol = DEDUP_RELATIVE_TOL * _box_diameter(array)

        array = dedup_points(array, dedup_tol)
        array.flags.writeable = False
        self.__points = array
        self.__tree: Optional[cKDTree] = None

    @classmethod
    def from_array(
        cls, points: npt.ArrayLike, dedup_tol: Optional[float] = None
    ) -> "PointSet":
        """Alias for the constructor."""
        return cls(points, dedup_tol)

    @classmethod
    def union(cls, sets: Iterable["PointSet"]) -> "PointSet":
        """
        Return the union of point sets.

        Parameters
        ----------
        sets : Iterable[PointSet]
            Point sets sharing one dimension.

        Returns
        -------
        union : PointSet
            Union of the sets.
        """
        arrays = [s.points for s in sets]
        if len(arrays) == 0:
            raise InvalidInputError("Union of no sets is empty.")
        dim = arrays[0].shape[1]
        for array in arrays:
            if array.shape[1] != dim:
                raise DimensionMismatchError(dim, array.shape[1])
        return cls(np.concatenate(arrays))

    @property
    def points(self) -> FloatArray:
        """Read-only array of shape (N, d)."""
        return self.__points

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return int(self.__points.shape[1])

    @property
    def tree(self) -> cKDTree:
        """k-d tree over the points (built on first use)."""
        if self.__tree is None:
            self.__tree = cKDTree(self.__points)
        return self.__tree

    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        """
        Return the lower and upper corners of the bounding box.
        """
        return self.__points.min(axis=0), self.__points.max(axis=0)

    def diameter(self) -> float:
        """
        Return the diagonal length of the bounding box.
        """
        return _box_diameter(self.__points)

    def __len__(self) -> int:
        return len(self.__points)

    def __iter__(self) -> Iterator[FloatArray]:
        return iter(self.__points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return bool(np.array_equal(self.__points, other.__points))

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, dim={self.dim})"


def _box_diameter(points: FloatArray) -> float:
    if len(points) == 0:
        return 0.0
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def check_dims(a: PointSet, b: PointSet) -> None:
    """
    Raise DimensionMismatchError if two point sets differ in dimension.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(a.dim, b.dim)


def distance(p: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """
    Euclidean distance between two points.

    Parameters
    ----------
    p : ArrayLike
        Point of length d.
    q : ArrayLike
        Point of length d.

    Returns
    -------
    dist : float
        Norm of p - q.

    Raises
    ------
    DimensionMismatchError
        If the points have different lengths.
    """
    x = np.atleast_1d(np.asarray(p, dtype=np.float64))
    y = np.atleast_1d(np.asarray(q, dtype=np.float64))
    if x.shape != y.shape:
        raise DimensionMismatchError(len(x), len(y))
    return float(np.linalg.norm(x - y))


def directed_distance(a: PointSet, b: PointSet) -> float:
    """
    Hausdorff-Pompeiu semi-distance, max over a in A of min over b in B of |a - b|.

    Parameters
    ----------
    a : PointSet
        Set whose points are measured.
    b : PointSet
        Set measured against.

    Returns
    -------
    dist : float
        Directed distance from a to b.
    """
    check_dims(a, b)
    dists, _ = b.tree.query(a.points, k=1)
    return float(np.max(dists))


def hausdorff(a: PointSet, b: PointSet) -> float:
    """
    Hausdorff-Pompeiu distance, the max of the two directed distances.

    Parameters
    ----------
    a : PointSet
        First set.
    b : PointSet
        Second set.

    Returns
    -------
    dist : float
        Hausdorff distance between a and b.
    """
    return max(directed_distance(a, b), directed_distance(b, a))


def beta_dense_subset(a: PointSet, beta: float) -> PointSet:
    """
    Choose a subset S of A with hausdorff(A, S) < beta.

    Farthest-point sampling is seeded at the lexicographically smallest point
    and stops as soon as every point of A is closer than beta to S.
    Ties go to the lexicographically smaller point.

    Parameters
    ----------
    a : PointSet
        Set to be subsampled.
    beta : float
        Density radius (positive).

    Returns
    -------
    subset : PointSet
        Greedily small beta-dense subset of A.
    """
    if beta <= 0.0:
        raise InvalidInputError("beta must be positive.")

    points = a.points
    chosen = [0]
    nearest = np.linalg.norm(points - points[0], axis=1)
    while True:
        farthest = int(np.argmax(nearest))
        if nearest[farthest] < beta:
            break
        chosen.append(farthest)
        nearest = np.minimum(nearest, np.linalg.norm(points - points[farthest], axis=1))

    logger.debug(
        "beta-dense subset: %d of %d points (beta=%g)", len(chosen), len(a), beta
    )
    return PointSet(points[np.sort(chosen)], dedup_tol=0.0)


def prune_to_grid(a: PointSet, delta: float) -> PointSet:
    """
    Snap points to the centres of a grid of spacing delta.

    The result satisfies hausdorff(A, result) <= delta * sqrt(d) / 2.

    Parameters
    ----------
    a : PointSet
        Set to be pruned.
    delta : float
        Grid spacing (positive).

    Returns
    -------
    pruned : PointSet
        Distinct occupied cell centres.
    """
    if delta <= 0.0:
        raise InvalidInputError("delta must be positive.")
    return PointSet(snap_to_grid(a.points, delta), dedup_tol=0.0)


def snap_to_grid(points: FloatArray, delta: float) -> FloatArray:
    """
    Map each point to the centre of its grid cell.
    """
    return (np.floor(points / delta) + 0.5) * delta


def grid_error(delta: float, dim: int) -> float:
    """
    Worst-case displacement of snap_to_grid, delta * sqrt(d) / 2.
    """
    return float(delta * np.sqrt(dim) / 2.0)
