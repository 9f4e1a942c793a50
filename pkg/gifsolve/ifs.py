# Finite iterated function systems of affine contractions

import logging
import math
from collections.abc import Callable, Sequence
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from gifsolve.budget import DEFAULT_BUDGET, Budget
from gifsolve.errors import (
    BudgetExceededError,
    ConvergenceError,
    DimensionMismatchError,
    InvalidInputError,
)
from gifsolve.ledger import ConvergenceReport, OstrowskiLedger
from gifsolve.metric import (
    FloatArray,
    PointSet,
    grid_error,
    hausdorff,
    prune_to_grid,
)

DeltaSchedule = Union[Sequence[float], Callable[[int], float]]

logger = logging.getLogger(__name__)


def spectral_norm(
    matrix: npt.ArrayLike, tol: float = 1e-12, max_iter: int = 10000
) -> float:
    """
    Largest singular value by power iteration on M^T M.

    Parameters
    ----------
    matrix : ArrayLike
        Real matrix with finite entries.
    tol : float, default 1e-12
        Relative tolerance on the Rayleigh quotient.
    max_iter : int, default 10000
        Iteration cap.

    Returns
    -------
    norm : float
        Operator 2-norm of the matrix.

    Raises
    ------
    ConvergenceError
        If the iteration cap is hit (the last estimate is attached).
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("Matrix must have finite entries.")

    gram = m.T @ m
    if not np.any(gram):
        return 0.0

    # NOTE: A fixed random start avoids starting orthogonal to the top vector.
    rng = np.random.default_rng(0)
    x = rng.standard_normal(gram.shape[0])
    x /= np.linalg.norm(x)

    estimate = 0.0
    for _ in range(max_iter):
        y = gram @ x
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0:
            return 0.0
        rayleigh = float(x @ y)
        x = y / norm_y
        if abs(rayleigh - estimate) <= tol * rayleigh:
            return math.sqrt(rayleigh)
        estimate = rayleigh

    raise ConvergenceError(
        f"Power iteration did not converge in {max_iter} iterations.",
        math.sqrt(estimate),
    )


def lipschitz_constant(matrix: FloatArray) -> float:
    """
    Spectral norm of a matrix, falling back to the Frobenius norm.

    The Frobenius norm is an upper bound of the spectral norm, so the fallback
    keeps every certificate valid.
    """
    try:
        return spectral_norm(matrix)
    except ConvergenceError as e:
        logger.warning("%s Using the Frobenius bound instead.", e)
        return float(np.linalg.norm(matrix, "fro"))


class AffineMap:
    """
    Affine map x -> M x + c on R^d.
    """

    def __init__(
        self,
        matrix: npt.ArrayLike,
        offset: npt.ArrayLike,
        lip: Optional[float] = None,
    ) -> None:
        """
        Parameters
        ----------
        matrix : ArrayLike
            d x d matrix M.
        offset : ArrayLike
            Offset c of length d.
        lip : Optional[float], default None
            Known spectral norm of M.
            If None, it is computed.
        """
        m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        c = np.atleast_1d(np.asarray(offset, dtype=np.float64))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"Matrix must be square, got shape {m.shape}.")
        if c.shape != (m.shape[0],):
            raise DimensionMismatchError(m.shape[0], c.shape[0])
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            raise InvalidInputError("Affine map must have finite coefficients.")
        m.flags.writeable = False
        c.flags.writeable = False
        self.__matrix = m
        self.__offset = c
        self.__lip = lipschitz_constant(m) if lip is None else lip

    @property
    def matrix(self) -> FloatArray:
        """Linear part M."""
        return self.__matrix

    @property
    def offset(self) -> FloatArray:
        """Translation c."""
        return self.__offset

    @property
    def lip(self) -> float:
        """Lipschitz constant (spectral norm of M)."""
        return self.__lip

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return int(self.__matrix.shape[0])

    def apply(self, points: FloatArray) -> FloatArray:
        """
        Apply the map to an (N, d) array of points.
        """
        return points @ self.__matrix.T + self.__offset

    def fixed_point(self) -> FloatArray:
        """
        Return the solution of (I - M) x = c.

        Raises
        ------
        InvalidInputError
            If I - M is singular.
        """
        eye = np.eye(self.dim)
        try:
            return np.linalg.solve(eye - self.__matrix, self.__offset)
        except np.linalg.LinAlgError as e:
            raise InvalidInputError("Affine map has no unique fixed point.") from e

    def __repr__(self) -> str:
        return f"AffineMap(dim={self.dim}, lip={self.__lip:.6g})"


class FiniteIfs:
    """
    Finite family of affine contractions on R^d.
    """

    def __init__(self, maps: Sequence[AffineMap]) -> None:
        """
        Parameters
        ----------
        maps : Sequence[AffineMap]
            Nonempty list of maps sharing one dimension.

        Raises
        ------
        InvalidInputError
            If no map is given or the family is not contractive.
        DimensionMismatchError
            If the maps differ in dimension.
        """
        if len(maps) == 0:
            raise InvalidInputError("IFS needs at least one map.")
        dim = maps[0].dim
        for m in maps:
            if m.dim != dim:
                raise DimensionMismatchError(dim, m.dim)
        alpha = max(m.lip for m in maps)
        if alpha >= 1.0:
            raise InvalidInputError(f"IFS is not contractive (alpha = {alpha!r}).")

        self.__maps = tuple(maps)
        self.__dim = dim
        self.__alpha = alpha
        self.__groups = _group_by_matrix(self.__maps)

    @property
    def maps(self) -> tuple[AffineMap, ...]:
        """Maps of the system."""
        return self.__maps

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return self.__dim

    @property
    def alpha(self) -> float:
        """Largest Lipschitz constant of the maps."""
        return self.__alpha

    @property
    def groups(self) -> tuple[tuple[FloatArray, FloatArray], ...]:
        """(matrix, stacked offsets) for every distinct linear part."""
        return self.__groups

    def __len__(self) -> int:
        return len(self.__maps)

    def __repr__(self) -> str:
        return f"FiniteIfs(n={len(self)}, dim={self.dim}, alpha={self.alpha:.6g})"


def _group_by_matrix(
    maps: Sequence[AffineMap],
) -> tuple[tuple[FloatArray, FloatArray], ...]:
    # Induced systems share a handful of linear parts among many offsets,
    # so images are computed once per linear part.
    offsets: dict[bytes, list[FloatArray]] = {}
    matrices: dict[bytes, FloatArray] = {}
    for m in maps:
        key = m.matrix.tobytes()
        matrices.setdefault(key, m.matrix)
        offsets.setdefault(key, []).append(m.offset)
    return tuple((matrices[key], np.stack(offsets[key])) for key in matrices)


def images(head: FloatArray, offsets: FloatArray) -> FloatArray:
    """
    All sums head[i] + offsets[t], flattened with t varying fastest.

    Parameters
    ----------
    head : FloatArray
        Linear images, shape (N, d).
    offsets : FloatArray
        Offsets, shape (T, d).

    Returns
    -------
    sums : FloatArray
        Array of shape (N * T, d).
    """
    return (head[:, None, :] + offsets[None, :, :]).reshape(-1, head.shape[1])


def fractal_step(
    ifs: FiniteIfs,
    a: PointSet,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> PointSet:
    """
    Fractal operator F(A) = union of the images of A, pruned to a grid.

    Parameters
    ----------
    ifs : FiniteIfs
        System to be applied.
    a : PointSet
        Input set.
    delta : float, default 0.0
        Grid spacing for pruning (0 disables pruning).
    budget : Budget, default DEFAULT_BUDGET
        Raw image count is limited by budget.points.

    Returns
    -------
    image : PointSet
        F(A), pruned when delta > 0.

    Raises
    ------
    BudgetExceededError
        If |maps| * |A| exceeds the point budget.
    """
    if a.dim != ifs.dim:
        raise DimensionMismatchError(ifs.dim, a.dim)
    raw_count = len(ifs) * len(a)
    if raw_count > budget.points:
        raise BudgetExceededError(
            f"Fractal step needs {raw_count} images (budget {budget.points})."
        )

    parts = [images(a.points @ matrix.T, offsets) for matrix, offsets in ifs.groups]
    image = PointSet(np.concatenate(parts))
    if delta > 0.0:
        image = prune_to_grid(image, delta)
    return image


def default_delta(tol: float, alpha: float, dim: int) -> float:
    """
    Constant pruning width keeping the accumulated pruning error within tol / 2.

    With delta = tol * (1 - alpha) / sqrt(d) every step adds at most
    delta * sqrt(d) / 2 and sum_i alpha^(k-i) <= 1 / (1 - alpha).
    """
    return tol * (1.0 - alpha) / math.sqrt(dim)


def delta_at(schedule: DeltaSchedule, k: int) -> float:
    """
    Return the k-th pruning width (k >= 1) of a schedule.

    A finite sequence keeps its last value once exhausted.
    """
    if callable(schedule):
        return float(schedule(k))
    if len(schedule) == 0:
        return 0.0
    return float(schedule[min(k, len(schedule)) - 1])


def attractor(
    ifs: FiniteIfs,
    seed: Optional[PointSet] = None,
    tol: float = 1e-3,
    delta_schedule: Optional[DeltaSchedule] = None,
    budget: Budget = DEFAULT_BUDGET,
    posterior: bool = False,
) -> tuple[PointSet, ConvergenceReport]:
    """
    Approximate the attractor of a finite IFS with a certified error.

    Iterates A_k = prune(F(A_{k-1}), delta_k) and stops as soon as the Ostrowski
    estimate alpha^k / (1 - alpha) * h(A_0, F(A_0)) + sum alpha^(k-i) * eps_i,
    with eps_i = delta_i * sqrt(d) / 2, is at most tol.

    Parameters
    ----------
    ifs : FiniteIfs
        Contractive system.
    seed : Optional[PointSet], default None
        Initial set.
        If None, the fixed point of the first map is used.
    tol : float, default 1e-3
        Target Hausdorff distance to the exact attractor.
    delta_schedule : Optional[DeltaSchedule], default None
        Pruning widths delta_1, delta_2, ...
        If None, the constant default_delta(tol, alpha, d) is used.
    budget : Budget, default DEFAULT_BUDGET
        Point and iteration caps.
    posterior : bool, default False
        Whether to compute the a-posteriori certificate for the returned set.

    Returns
    -------
    result : PointSet
        Last iterate.
    report : ConvergenceReport
        Bounds and flags.
        If a budget stopped the iteration, budget_exceeded is set and
        the certified bound of the returned iterate may exceed tol.
    """
    if tol <= 0.0:
        raise InvalidInputError("tol must be positive.")
    if seed is None:
        seed = PointSet([ifs.maps[0].fixed_point()])
    if seed.dim != ifs.dim:
        raise DimensionMismatchError(ifs.dim, seed.dim)

    alpha = ifs.alpha
    if delta_schedule is None:
        delta_schedule = [default_delta(tol, alpha, ifs.dim)]

    current = seed
    image = fractal_step(ifs, current, 0.0, budget)
    ledger = OstrowskiLedger(alpha, hausdorff(current, image))
    widths: list[float] = []
    displacements: list[float] = []
    budget_exceeded = False
    notes: list[str] = []

    while ledger.final_bound > tol:
        k = ledger.steps + 1
        if k > budget.iterations:
            budget_exceeded = True
            notes.append(f"iteration cap {budget.iterations} reached")
            break

        delta = delta_at(delta_schedule, k)
        following = prune_to_grid(image, delta) if delta > 0.0 else image
        eps = grid_error(delta, ifs.dim) if delta > 0.0 else 0.0
        bound = ledger.record(eps)
        widths.append(delta)
        displacements.append(hausdorff(current, following))
        current = following
        logger.debug("attractor k=%d |A|=%d bound=%.3e", k, len(current), bound)

        if bound <= tol:
            break
        try:
            image = fractal_step(ifs, current, 0.0, budget)
        except BudgetExceededError as e:
            budget_exceeded = True
            notes.append(str(e))
            break

    if budget_exceeded:
        logger.warning(
            "Attractor iteration stopped early; certified bound %.3e",
            ledger.final_bound,
        )
        ledger.budget_exceeded = True

    posterior_bound: Optional[float] = None
    if posterior and len(ifs) * len(current) <= budget.points:
        image = fractal_step(ifs, current, 0.0, budget)
        posterior_bound = hausdorff(current, image) / (1.0 - alpha)

    report = ConvergenceReport(
        ledger=ledger,
        widths=tuple(widths),
        displacements=tuple(displacements),
        converged=ledger.final_bound <= tol,
        budget_exceeded=budget_exceeded,
        posterior_bound=posterior_bound,
        notes=tuple(notes),
    )
    return current, report
