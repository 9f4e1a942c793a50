# Generalized iterated function systems (GIFS) of order m

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from gifsolve.budget import DEFAULT_BUDGET, Budget
from gifsolve.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidInputError,
)
from gifsolve.ifs import AffineMap, FiniteIfs, attractor, images, lipschitz_constant
from gifsolve.ledger import ConvergenceReport, OstrowskiLedger
from gifsolve.metric import (
    FloatArray,
    PointSet,
    beta_dense_subset,
    grid_error,
    hausdorff,
    prune_to_grid,
)
from gifsolve.schedule import HARMONIC, Schedule

logger = logging.getLogger(__name__)


class MultiAffineMap:
    """
    Affine map phi(x_1, ..., x_m) = A_1 x_1 + ... + A_m x_m + c from (R^d)^m to R^d.

    Images are always evaluated as A_1 x_1 + ((A_2 x_2 + ... + A_m x_m) + c),
    so that an induced map x -> phi(x, b_2, ..., b_m) gives bit-identical results.
    """

    def __init__(
        self, matrices: Sequence[npt.ArrayLike], offset: npt.ArrayLike
    ) -> None:
        """
        Parameters
        ----------
        matrices : Sequence[ArrayLike]
            m square matrices A_1, ..., A_m of size d x d.
        offset : ArrayLike
            Offset c of length d.
        """
        if len(matrices) == 0:
            raise InvalidInputError("A map of order m needs m >= 1 matrices.")
        arrays = [np.atleast_2d(np.asarray(m, dtype=np.float64)) for m in matrices]
        c = np.atleast_1d(np.asarray(offset, dtype=np.float64))
        dim = c.shape[0]
        for a in arrays:
            if a.shape != (dim, dim):
                raise DimensionMismatchError(dim, a.shape[0])
            if not np.all(np.isfinite(a)):
                raise InvalidInputError("Matrices must have finite entries.")
            a.flags.writeable = False
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("Offset must be finite.")
        c.flags.writeable = False

        self.__matrices = tuple(arrays)
        self.__offset = c
        self.__arg_lips = tuple(lipschitz_constant(a) for a in arrays)

    @property
    def matrices(self) -> tuple[FloatArray, ...]:
        """Linear parts A_1, ..., A_m."""
        return self.__matrices

    @property
    def offset(self) -> FloatArray:
        """Translation c."""
        return self.__offset

    @property
    def arg_lips(self) -> tuple[float, ...]:
        """Per-argument Lipschitz constants (a_1, ..., a_m)."""
        return self.__arg_lips

    @property
    def lip(self) -> float:
        """Sum of the per-argument constants."""
        return math.fsum(self.__arg_lips)

    @property
    def order(self) -> int:
        """Number of arguments m."""
        return len(self.__matrices)

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return int(self.__offset.shape[0])

    def head(self, points: FloatArray) -> FloatArray:
        """
        First-argument part A_1 x for an (N, d) array.
        """
        return points @ self.__matrices[0].T

    def tail_offsets(self, tail_points: Sequence[FloatArray]) -> FloatArray:
        """
        Offsets A_2 b_2 + ... + A_m b_m + c over a product of point arrays.

        Parameters
        ----------
        tail_points : Sequence[FloatArray]
            m - 1 arrays of shape (T_i, d) for the arguments 2, ..., m.

        Returns
        -------
        offsets : FloatArray
            Array of shape (T_2 * ... * T_m, d) in itertools.product order.
        """
        if len(tail_points) != self.order - 1:
            raise InvalidInputError(
                f"Expected {self.order - 1} tail arguments, got {len(tail_points)}."
            )
        acc: Optional[FloatArray] = None
        for matrix, points in zip(self.__matrices[1:], tail_points):
            term = points @ matrix.T
            acc = term if acc is None else images(acc, term)
        if acc is None:
            return self.__offset[None, :] + 0.0
        return acc + self.__offset

    def evaluate(self, arguments: Sequence[FloatArray]) -> FloatArray:
        """
        Images of all tuples in the product of m point arrays.

        Parameters
        ----------
        arguments : Sequence[FloatArray]
            m arrays of shape (N_i, d).

        Returns
        -------
        values : FloatArray
            Array of shape (N_1 * ... * N_m, d) in itertools.product order.
        """
        return images(self.head(arguments[0]), self.tail_offsets(arguments[1:]))

    def __repr__(self) -> str:
        return f"MultiAffineMap(order={self.order}, dim={self.dim}, a={self.arg_lips})"


class GifsSystem:
    """
    GIFS of order m: finitely many contractions phi_j from (R^d)^m to R^d.
    """

    def __init__(self, maps: Sequence[MultiAffineMap]) -> None:
        """
        Parameters
        ----------
        maps : Sequence[MultiAffineMap]
            Nonempty list of maps sharing order and dimension.

        Raises
        ------
        InvalidInputError
            If no map is given or some map has sum of a_i >= 1.
        """
        if len(maps) == 0:
            raise InvalidInputError("GIFS needs at least one map.")
        order = maps[0].order
        dim = maps[0].dim
        for j, m in enumerate(maps):
            if m.order != order:
                raise InvalidInputError(
                    f"Map {j} has order {m.order}, expected {order}."
                )
            if m.dim != dim:
                raise DimensionMismatchError(dim, m.dim)
            if m.lip >= 1.0:
                raise InvalidInputError(
                    f"Map {j} is not contractive: sum of a_i = {m.lip!r}."
                )

        self.__maps = tuple(maps)
        self.__order = order
        self.__dim = dim
        self.__lip_fs = max(m.lip for m in maps)

    @property
    def maps(self) -> tuple[MultiAffineMap, ...]:
        """Maps phi_1, ..., phi_n."""
        return self.__maps

    @property
    def order(self) -> int:
        """Order m."""
        return self.__order

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return self.__dim

    @property
    def lip_fs(self) -> float:
        """Max over maps of sum_i a_i, a bound on Lip(F_S)."""
        return self.__lip_fs

    def __len__(self) -> int:
        return len(self.__maps)

    def __repr__(self) -> str:
        return (
            f"GifsSystem(n={len(self)}, m={self.order}, dim={self.dim}, "
            f"lip_fs={self.lip_fs:.6g})"
        )


@dataclass(frozen=True)
class LipschitzData:
    """
    Lipschitz data of a GIFS.

    Attributes
    ----------
    arg_lips : tuple[tuple[float, ...], ...]
        (a_1, ..., a_m) for every map.
    lip_fs : float
        max_j sum_i a_i^(j).
    alpha_ev_bound : float
        Bound on Lip(ev_S); equals lip_fs.
    """

    arg_lips: tuple[tuple[float, ...], ...]
    lip_fs: float
    alpha_ev_bound: float


def lipschitz_data(system: GifsSystem) -> LipschitzData:
    """
    Report the per-argument constants, Lip(F_S) and the ev_S contraction bound.
    """
    arg_lips = tuple(m.arg_lips for m in system.maps)
    return LipschitzData(arg_lips, system.lip_fs, system.lip_fs)


def _check_set(system: GifsSystem, a: PointSet) -> None:
    if a.dim != system.dim:
        raise DimensionMismatchError(system.dim, a.dim)


def gifs_operator(
    system: GifsSystem,
    sets: Sequence[PointSet],
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> PointSet:
    """
    F_S(A_1, ..., A_m) = union over j of phi_j(A_1 x ... x A_m).

    Parameters
    ----------
    system : GifsSystem
        GIFS of order m.
    sets : Sequence[PointSet]
        m finite sets.
    delta : float, default 0.0
        Grid spacing for pruning (0 disables pruning).
    budget : Budget, default DEFAULT_BUDGET
        Raw image count is limited by budget.points.

    Returns
    -------
    image : PointSet
        F_S of the sets.

    Raises
    ------
    BudgetExceededError
        If n * |A_1| * ... * |A_m| exceeds the point budget.
    """
    if len(sets) != system.order:
        raise InvalidInputError(f"Expected {system.order} sets, got {len(sets)}.")
    for s in sets:
        _check_set(system, s)

    raw_count = len(system) * math.prod(len(s) for s in sets)
    if raw_count > budget.points:
        raise BudgetExceededError(
            f"GIFS step needs {raw_count} images (budget {budget.points}); "
            "raise delta or shrink the input."
        )

    arguments = [s.points for s in sets]
    parts = [m.evaluate(arguments) for m in system.maps]
    image = PointSet(np.concatenate(parts))
    if delta > 0.0:
        image = prune_to_grid(image, delta)
    return image


def gifs_step(
    system: GifsSystem,
    a: PointSet,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> PointSet:
    """
    Simplified fractal operator F_S(A, ..., A) on the m-fold power of A.
    """
    return gifs_operator(system, [a] * system.order, delta, budget)


def classical_gifs_iterate(
    system: GifsSystem,
    seeds: Sequence[PointSet],
    steps: int,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> PointSet:
    """
    Run the recursion A_{k+m} = F_S(A_k, ..., A_{k+m-1}).

    Parameters
    ----------
    system : GifsSystem
        GIFS of order m.
    seeds : Sequence[PointSet]
        Initial terms A_0, ..., A_{m-1}.
    steps : int
        Number of new terms to compute (positive).
    delta : float, default 0.0
        Grid spacing for pruning each new term.
    budget : Budget, default DEFAULT_BUDGET
        Point budget of every step.

    Returns
    -------
    last : PointSet
        Last computed term.

    Raises
    ------
    BudgetExceededError
        If a step exceeds the point budget; partial is the last completed term.
    """
    if steps < 1:
        raise InvalidInputError("steps must be positive.")
    if len(seeds) != system.order:
        raise InvalidInputError(f"Expected {system.order} seeds, got {len(seeds)}.")

    window = list(seeds)
    for k in range(steps):
        try:
            following = gifs_operator(system, window, delta, budget)
        except BudgetExceededError as e:
            raise BudgetExceededError(
                f"Term {k + system.order}: {e}", partial=window[-1]
            ) from e
        window = window[1:] + [following]
        logger.debug("classical k=%d |A|=%d", k + 1, len(following))
    return window[-1]


def posterior_bound(
    system: GifsSystem,
    a: PointSet,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> float:
    """
    Certified bound on h(A, A_S) from one application of F_S(A, ..., A).

    h(A, A_S) <= (h(A, F(A)) + delta * sqrt(d) / 2) / (1 - Lip(F_S)), where the
    image is pruned at delta before measuring.
    """
    image = gifs_step(system, a, delta, budget)
    slack = grid_error(delta, system.dim) if delta > 0.0 else 0.0
    return (hausdorff(a, image) + slack) / (1.0 - system.lip_fs)


def diagonal_fixed_point(system: GifsSystem) -> FloatArray:
    """
    Fixed point of x -> phi_1(x, ..., x), a point of the attractor.
    """
    first = system.maps[0]
    diagonal = AffineMap(sum(first.matrices), first.offset, lip=first.lip)
    return diagonal.fixed_point()


def induce_ifs(
    system: GifsSystem, b: PointSet, budget: Budget = DEFAULT_BUDGET
) -> FiniteIfs:
    """
    Finite IFS induced by B: psi_(b, j)(x) = phi_j(x, b_2, ..., b_m).

    Maps are ordered by j first and then by b in itertools.product order of
    B^(m-1).

    Parameters
    ----------
    system : GifsSystem
        GIFS of order m.
    b : PointSet
        Finite set supplying the arguments 2, ..., m.
    budget : Budget, default DEFAULT_BUDGET
        Map count is limited by budget.maps.

    Returns
    -------
    ifs : FiniteIfs
        The induced system, with alpha = max_j a_1^(j).

    Raises
    ------
    BudgetExceededError
        If n * |B|^(m-1) exceeds the map budget.
    """
    _check_set(system, b)
    count = len(system) * len(b) ** (system.order - 1)
    if count > budget.maps:
        raise BudgetExceededError(
            f"Induced system needs {count} maps (budget {budget.maps})."
        )

    tails = [b.points] * (system.order - 1)
    maps: list[AffineMap] = []
    for m in system.maps:
        matrix = m.matrices[0]
        lip = m.arg_lips[0]
        for offset in m.tail_offsets(tails):
            maps.append(AffineMap(matrix, offset, lip=lip))
    return FiniteIfs(maps)


def evaluation_map(
    system: GifsSystem,
    b: PointSet,
    sigma: float,
    seed: Optional[PointSet] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> tuple[PointSet, ConvergenceReport]:
    """
    ev_S(B): the attractor of the IFS induced by B, to certified tolerance sigma.

    Parameters
    ----------
    system : GifsSystem
        GIFS of order m.
    b : PointSet
        Finite set.
    sigma : float
        Tolerance of the inner solve (positive).
    seed : Optional[PointSet], default None
        Initial set of the inner solve.
        If None, the fixed point of the first induced map is used.
    budget : Budget, default DEFAULT_BUDGET
        Budgets of the induced system and the inner solve.

    Returns
    -------
    result : PointSet
        Approximation of ev_S(B).
    report : ConvergenceReport
        Report of the inner solve.
    """
    if sigma <= 0.0:
        raise InvalidInputError("sigma must be positive.")
    ifs = induce_ifs(system, b, budget)
    return attractor(ifs, seed, sigma, budget=budget)


def fit_map_budget(
    system: GifsSystem,
    current: PointSet,
    beta: float,
    budget: Budget,
    notes: list[str],
    k: int,
) -> tuple[PointSet, float]:
    """
    Beta-dense subset of the current set whose induced system fits budget.maps.

    Beta is doubled while n * |B^beta|^(m-1) exceeds the budget and each raise
    is appended to notes. Doubling stops at a single point; a system that does
    not fit even then is left to induce_ifs, which raises BudgetExceededError.

    Returns
    -------
    subset : PointSet
        The beta-dense subset.
    beta : float
        The density radius actually used.
    """
    subset = beta_dense_subset(current, beta)
    if system.order == 1:
        return subset, beta
    while (
        len(subset) > 1
        and len(system) * len(subset) ** (system.order - 1) > budget.maps
    ):
        beta *= 2.0
        subset = beta_dense_subset(current, beta)
        notes.append(f"k={k}: beta raised to {beta!r} to fit the map budget")
    return subset, beta


def approximate_attractor(
    system: GifsSystem,
    b0: PointSet,
    beta_schedule: Schedule = HARMONIC,
    sigma_schedule: Schedule = HARMONIC,
    steps: int = 12,
    budget: Budget = DEFAULT_BUDGET,
    warm_start: bool = True,
    reports: Optional[list[ConvergenceReport]] = None,
) -> tuple[PointSet, OstrowskiLedger]:
    """
    Approximate A_S by iterating the evaluation map with inexact steps.

    At step k the previous output B_{k-1} is subsampled to a beta_k-dense subset,
    the induced finite IFS is built and its attractor is solved to sigma_k.
    The step is recorded with eps_k = alpha * beta_k + sigma_k, alpha = Lip(F_S),
    and d01 = h(B_0, B_1) + eps_1.

    Parameters
    ----------
    system : GifsSystem
        GIFS of order m.
    b0 : PointSet
        Finite initial set B_0.
    beta_schedule : Schedule, default 1/k
        Density radii beta_k.
    sigma_schedule : Schedule, default 1/k
        Inner tolerances sigma_k.
    steps : int, default 12
        Number of outer steps K.
    budget : Budget, default DEFAULT_BUDGET
        When n * |B^beta|^(m-1) exceeds budget.maps, beta is doubled until it fits
        and the raise is noted in the ledger.
    warm_start : bool, default True
        Whether each inner solve starts from B_{k-1}.
    reports : Optional[list[ConvergenceReport]], default None
        If given, the report of every completed inner solve is appended.

    Returns
    -------
    result : PointSet
        B_K (or the last iterate reached).
    ledger : OstrowskiLedger
        Ledger whose final bound certifies h(result, A_S).

    Raises
    ------
    BudgetExceededError
        If the very first step can't be completed (no ledger exists yet).
    """
    if steps < 1:
        raise InvalidInputError("K must be positive.")
    _check_set(system, b0)

    alpha = system.lip_fs
    current = b0
    ledger: Optional[OstrowskiLedger] = None
    notes: list[str] = []

    for k in range(1, steps + 1):
        beta = beta_schedule(k)
        sigma = sigma_schedule(k)
        subset, beta = fit_map_budget(system, current, beta, budget, notes, k)

        try:
            seed = current if warm_start else None
            following, report = evaluation_map(system, subset, sigma, seed, budget)
        except BudgetExceededError as e:
            if ledger is None:
                raise BudgetExceededError(str(e), partial=current) from e
            ledger.annotate(f"k={k}: {e}")
            ledger.budget_exceeded = True
            break

        inner = max(sigma, report.certified_bound)
        eps = alpha * beta + inner
        if ledger is None:
            ledger = OstrowskiLedger(alpha, hausdorff(b0, following) + eps)
        for note in notes:
            ledger.annotate(note)
        notes.clear()
        if report.budget_exceeded:
            ledger.annotate(f"k={k}: inner solve stopped at bound {inner!r}")
            ledger.budget_exceeded = True

        bound = ledger.record(eps, beta, sigma)
        current = following
        if reports is not None:
            reports.append(report)
        logger.info(
            "evmap k=%d |B^beta|=%d |B|=%d eps=%.3e bound=%.3e",
            k,
            len(subset),
            len(current),
            eps,
            bound,
        )
        if report.budget_exceeded:
            break

    assert ledger is not None
    return current, ledger
