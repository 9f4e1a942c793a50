# Discrete measures, Monge-Kantorovich distance and Markov operators

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import ot
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from gifsolve.budget import DEFAULT_BUDGET, Budget
from gifsolve.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidInputError,
)
from gifsolve.gifs import GifsSystem, evaluation_map, fit_map_budget
from gifsolve.ifs import AffineMap, FiniteIfs, default_delta, images
from gifsolve.ledger import ConvergenceReport, OstrowskiLedger
from gifsolve.metric import (
    DEDUP_RELATIVE_TOL,
    FloatArray,
    PointSet,
    as_points,
    directed_distance,
    hausdorff,
    snap_to_grid,
)
from gifsolve.schedule import HARMONIC, Schedule

NORMALIZATION_TOL = 1e-12
MK_MAX_ATOMS = 2000
TRANSPORT_METHODS = ("auto", "network-simplex")

logger = logging.getLogger(__name__)


class DiscreteMeasure:
    """
    Finitely supported probability measure on R^d.

    Atoms are kept in lexicographic order, pairwise distinct, with strictly
    positive weights summing to 1.
    """

    def __init__(
        self,
        atoms: npt.ArrayLike,
        weights: npt.ArrayLike,
        dedup_tol: Optional[float] = None,
    ) -> None:
        """
        Parameters
        ----------
        atoms : ArrayLike
            Atoms of shape (N, d), or a flat sequence for d = 1.
        weights : ArrayLike
            N positive weights summing to 1 within 1e-12.
        dedup_tol : Optional[float], default None
            Atoms closer than this are merged (weights added).
            If None, 1e-12 times the bounding-box diameter is used.

        Raises
        ------
        InvalidInputError
            If weights are not positive or fail normalization.
        """
        points = as_points(atoms)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if len(points) == 0:
            raise InvalidInputError("Measure must have at least one atom.")
        if len(points) != len(w):
            raise InvalidInputError(
                f"Got {len(points)} atoms but {len(w)} weights."
            )
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InvalidInputError("Weights must be finite and strictly positive.")
        total = math.fsum(w)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidInputError(f"Weights sum to {total!r}, not 1.")

        if dedup_tol is None:
            dedup_tol = DEDUP_RELATIVE_TOL * _diameter(points)
        merged, merged_weights, _ = merge_atoms(points, w, dedup_tol)
        merged_weights = merged_weights / math.fsum(merged_weights)
        merged.flags.writeable = False
        merged_weights.flags.writeable = False
        self.__atoms = merged
        self.__weights = merged_weights

    @classmethod
    def dirac(cls, point: npt.ArrayLike) -> "DiscreteMeasure":
        """
        Unit point mass at a point.
        """
        return cls(np.atleast_2d(np.asarray(point, dtype=np.float64)), [1.0])

    @classmethod
    def uniform(cls, points: npt.ArrayLike) -> "DiscreteMeasure":
        """
        Equal weights on distinct points.
        """
        array = as_points(points)
        return cls(array, np.full(len(array), 1.0 / len(array)))

    @property
    def atoms(self) -> FloatArray:
        """Read-only array of shape (N, d)."""
        return self.__atoms

    @property
    def weights(self) -> FloatArray:
        """Read-only array of N weights."""
        return self.__weights

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return int(self.__atoms.shape[1])

    def support(self) -> PointSet:
        """
        Return the atoms as a point set.
        """
        return PointSet(self.__atoms, dedup_tol=0.0)

    def integrate(self, f: Callable[[FloatArray], FloatArray]) -> float:
        """
        Integral of a vectorized observable.

        Parameters
        ----------
        f : Callable[[FloatArray], FloatArray]
            Function mapping (N, d) points to N values.

        Returns
        -------
        value : float
            Sum of f(atom) * weight.
        """
        return float(np.dot(f(self.__atoms), self.__weights))

    def mean(self) -> FloatArray:
        """
        Barycentre of the measure.
        """
        return np.asarray(self.__weights @ self.__atoms, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.__atoms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return bool(
            np.array_equal(self.__atoms, other.__atoms)
            and np.array_equal(self.__weights, other.__weights)
        )

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"DiscreteMeasure(n={len(self)}, dim={self.dim})"


def _diameter(points: FloatArray) -> float:
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def merge_atoms(
    atoms: FloatArray, weights: FloatArray, tol: float
) -> tuple[FloatArray, FloatArray, float]:
    """
    Merge equal (or tol-close) atoms, adding their weights.

    Atoms are sorted lexicographically, with the weight as last key, before
    weights are accumulated, so the result doesn't depend on input order.

    Parameters
    ----------
    atoms : FloatArray
        Array of shape (N, d).
    weights : FloatArray
        N nonnegative weights.
    tol : float
        Merge radius; within a cluster the lexicographically smallest atom survives.

    Returns
    -------
    atoms : FloatArray
        Distinct atoms in lexicographic order.
    weights : FloatArray
        Accumulated weights.
    cost : float
        Transport cost of the merge (moved mass times distance moved).
    """
    order = np.lexsort(np.vstack([weights[None, :], atoms.T[::-1]]))
    atoms = atoms[order]
    weights = weights[order]

    unique, inverse = np.unique(atoms, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    accumulated = np.bincount(inverse, weights=weights, minlength=len(unique))
    if tol <= 0.0 or len(unique) < 2:
        return unique, accumulated, 0.0

    pairs = cKDTree(unique).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return unique, accumulated, 0.0

    target = np.arange(len(unique))
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    for i, j in pairs:
        if target[i] == i and target[j] == j and i != j:
            target[j] = i
    moved = target != np.arange(len(unique))
    cost = float(
        np.sum(
            accumulated[moved]
            * np.linalg.norm(unique[moved] - unique[target[moved]], axis=1)
        )
    )
    survivors, new_index = np.unique(target, return_inverse=True)
    merged_weights = np.bincount(
        new_index, weights=accumulated, minlength=len(survivors)
    )
    return unique[survivors], merged_weights, cost


def merge_light_atoms(
    atoms: FloatArray, weights: FloatArray, w_min: float
) -> tuple[FloatArray, FloatArray, float]:
    """
    Move atoms lighter than w_min to their nearest surviving atom.

    Total mass is preserved exactly. If every atom is light, the heaviest one
    survives.

    Returns
    -------
    atoms : FloatArray
        Surviving atoms.
    weights : FloatArray
        Their weights.
    cost : float
        Transport cost of the moves.
    """
    light = weights < w_min
    if not np.any(light):
        return atoms, weights, 0.0
    if np.all(light):
        light[int(np.argmax(weights))] = False

    heavy_index = np.flatnonzero(~light)
    dists, nearest = cKDTree(atoms[heavy_index]).query(atoms[light], k=1)
    merged = weights[heavy_index].copy()
    np.add.at(merged, nearest, weights[light])
    cost = float(np.dot(weights[light], dists))
    return atoms[heavy_index], merged, cost


def merge_to_grid(
    mu: DiscreteMeasure, delta: float
) -> tuple[DiscreteMeasure, float]:
    """
    Snap atoms to the centres of a grid of spacing delta.

    Returns
    -------
    merged : DiscreteMeasure
        Measure on occupied cell centres.
    cost : float
        Transport cost, at most delta * sqrt(d) / 2.
    """
    if delta <= 0.0:
        raise InvalidInputError("delta must be positive.")
    snapped = snap_to_grid(mu.atoms, delta)
    cost = float(np.dot(mu.weights, np.linalg.norm(mu.atoms - snapped, axis=1)))
    return DiscreteMeasure(snapped, mu.weights, dedup_tol=0.0), cost


def project_onto(mu: DiscreteMeasure, b: PointSet) -> tuple[DiscreteMeasure, float]:
    """
    Move every atom to its nearest point of B.

    Returns
    -------
    projected : DiscreteMeasure
        Measure supported on B.
    cost : float
        Transport cost, at most the directed distance from supp(mu) to B.
    """
    if mu.dim != b.dim:
        raise DimensionMismatchError(b.dim, mu.dim)
    dists, nearest = b.tree.query(mu.atoms, k=1)
    cost = float(np.dot(mu.weights, dists))
    return DiscreteMeasure(b.points[nearest], mu.weights, dedup_tol=0.0), cost


def mk_distance(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    method: str = "auto",
    max_atoms: int = MK_MAX_ATOMS,
) -> float:
    """
    Monge-Kantorovich (Wasserstein-1) distance with Euclidean ground cost.

    Parameters
    ----------
    mu : DiscreteMeasure
        First measure.
    nu : DiscreteMeasure
        Second measure.
    method : str, default "auto"
        "auto" uses the exact 1-D quantile formula when d = 1, the closed form
        when one measure is a point mass, and network simplex otherwise;
        "network-simplex" always solves the transport LP.
    max_atoms : int, default 2000
        Largest support handed to the network simplex solver.

    Returns
    -------
    dist : float
        Exact W1 distance.

    Raises
    ------
    BudgetExceededError
        If the transport LP would exceed max_atoms on either side.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatchError(mu.dim, nu.dim)
    if method not in TRANSPORT_METHODS:
        raise InvalidInputError(f"Unknown transport method '{method}'.")

    if method == "auto":
        if len(mu) == 1 or len(nu) == 1:
            single, other = (mu, nu) if len(mu) == 1 else (nu, mu)
            dists = np.linalg.norm(other.atoms - single.atoms[0], axis=1)
            return float(np.dot(other.weights, dists))
        if mu.dim == 1:
            return float(
                ot.wasserstein_1d(
                    mu.atoms[:, 0], nu.atoms[:, 0], mu.weights, nu.weights, p=1
                )
            )

    if len(mu) > max_atoms or len(nu) > max_atoms:
        raise BudgetExceededError(
            f"Transport problem of size {len(mu)} x {len(nu)} "
            f"exceeds {max_atoms} atoms."
        )
    cost = cdist(mu.atoms, nu.atoms)
    return float(ot.emd2(mu.weights, nu.weights, cost, numItermax=10**7))


def mk_upper_bound(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """
    Exact W1 when it is cheap, otherwise the largest atom-to-atom distance.
    """
    try:
        return mk_distance(mu, nu)
    except BudgetExceededError:
        box = np.vstack([mu.atoms, nu.atoms])
        return _diameter(box)


@dataclass(frozen=True)
class GifsP:
    """
    GIFS with probabilities q_1, ..., q_n.

    Attributes
    ----------
    system : GifsSystem
        Underlying GIFS.
    probs : tuple[float, ...]
        Positive probabilities summing to 1.
    """

    system: GifsSystem
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) != len(self.system):
            raise InvalidInputError(
                f"Got {len(self.probs)} probabilities for {len(self.system)} maps."
            )
        if any(not q > 0.0 for q in self.probs):
            raise InvalidInputError("Probabilities must be positive.")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidInputError(f"Probabilities sum to {total!r}, not 1.")

    @classmethod
    def uniform(cls, system: GifsSystem) -> "GifsP":
        """
        Equal probabilities 1 / n.
        """
        n = len(system)
        return cls(system, tuple([1.0 / n] * n))

    @property
    def dim(self) -> int:
        """Ambient dimension d."""
        return self.system.dim

    @property
    def order(self) -> int:
        """Order m."""
        return self.system.order


def _tail_weights(tails: Sequence[DiscreteMeasure]) -> FloatArray:
    acc: Optional[FloatArray] = None
    for mu in tails:
        if acc is None:
            acc = mu.weights
        else:
            acc = (acc[:, None] * mu.weights[None, :]).reshape(-1)
    if acc is None:
        return np.ones(1)
    return acc


def _check_measures(p: GifsP, measures: Sequence[DiscreteMeasure]) -> None:
    for mu in measures:
        if mu.dim != p.dim:
            raise DimensionMismatchError(p.dim, mu.dim)


@dataclass(frozen=True)
class InducedIfsp:
    """
    IFS with probabilities induced by a GIFSp and a measure nu.

    Maps are psi_(b, j)(x) = phi_j(x, b_2, ..., b_m) with probabilities
    q_j * nu(b_2) * ... * nu(b_m).

    Attributes
    ----------
    ifs : FiniteIfs
        Induced maps, ordered by j and then by b.
    probs : FloatArray
        Probability of every map.
    lam : float
        Average contraction sum_j q_j * a_1^(j).
    """

    ifs: FiniteIfs
    probs: FloatArray
    lam: float

    def pushforward(self, mu: DiscreteMeasure) -> tuple[FloatArray, FloatArray]:
        """
        Raw atoms and weights of the Markov image of mu (before merging).
        """
        head_atoms: list[FloatArray] = []
        head_weights: list[FloatArray] = []
        start = 0
        for matrix, offsets in self.ifs.groups:
            probs = self.probs[start : start + len(offsets)]
            start += len(offsets)
            head_atoms.append(images(mu.atoms @ matrix.T, offsets))
            head_weights.append((mu.weights[:, None] * probs[None, :]).reshape(-1))
        return np.concatenate(head_atoms), np.concatenate(head_weights)


def induce_ifsp(
    p: GifsP, nu: DiscreteMeasure, budget: Budget = DEFAULT_BUDGET
) -> InducedIfsp:
    """
    Build the IFSp induced by a GIFSp and a finitely supported measure nu.

    Raises
    ------
    BudgetExceededError
        If n * |supp(nu)|^(m-1) exceeds the map budget.
    """
    _check_measures(p, [nu])
    system = p.system
    count = len(system) * len(nu) ** (system.order - 1)
    if count > budget.maps:
        raise BudgetExceededError(
            f"Induced system needs {count} maps (budget {budget.maps})."
        )

    tails = [nu] * (system.order - 1)
    tail_points = [mu.atoms for mu in tails]
    tail_weights = _tail_weights(tails)

    maps: list[AffineMap] = []
    probs: list[FloatArray] = []
    lam = 0.0
    for q, m in zip(p.probs, system.maps):
        for offset in m.tail_offsets(tail_points):
            maps.append(AffineMap(m.matrices[0], offset, lip=m.arg_lips[0]))
        probs.append(q * tail_weights)
        lam += q * m.arg_lips[0]

    ifs = FiniteIfs(maps)
    # Groups of the IFS follow first-appearance order of the linear parts, so
    # probabilities are regrouped the same way.
    grouped = _regroup(ifs, maps, np.concatenate(probs))
    return InducedIfsp(ifs, grouped, lam)


def _regroup(
    ifs: FiniteIfs, maps: Sequence[AffineMap], probs: FloatArray
) -> FloatArray:
    keys = [m.matrix.tobytes() for m in maps]
    order: list[int] = []
    for matrix, _ in ifs.groups:
        key = matrix.tobytes()
        order.extend(i for i, k in enumerate(keys) if k == key)
    return probs[np.asarray(order, dtype=np.intp)]


def _finish(
    atoms: FloatArray,
    weights: FloatArray,
    w_min: float,
    delta: float,
) -> tuple[DiscreteMeasure, float]:
    # Merge at the dedup tolerance, then light atoms, then (optionally) the grid.
    tol = DEDUP_RELATIVE_TOL * _diameter(atoms)
    merged, merged_weights, cost = merge_atoms(atoms, weights, tol)
    merged_weights = merged_weights / math.fsum(merged_weights)
    if w_min > 0.0:
        merged, merged_weights, light_cost = merge_light_atoms(
            merged, merged_weights, w_min
        )
        cost += light_cost
    mu = DiscreteMeasure(merged, merged_weights, dedup_tol=0.0)
    if delta > 0.0:
        mu, grid_cost = merge_to_grid(mu, delta)
        cost += grid_cost
    return mu, cost


def _markov_step_gifsp(
    p: GifsP,
    mus: Sequence[DiscreteMeasure],
    w_min: float,
    delta: float,
    budget: Budget,
) -> tuple[DiscreteMeasure, float]:
    if len(mus) != p.order:
        raise InvalidInputError(f"Expected {p.order} measures, got {len(mus)}.")
    _check_measures(p, mus)
    raw_count = len(p.system) * math.prod(len(mu) for mu in mus)
    if raw_count > budget.atoms:
        raise BudgetExceededError(
            f"Markov step needs {raw_count} atoms (budget {budget.atoms})."
        )

    first = mus[0]
    tails = mus[1:]
    tail_points = [mu.atoms for mu in tails]
    tail_weights = _tail_weights(tails)
    atoms: list[FloatArray] = []
    weights: list[FloatArray] = []
    for q, m in zip(p.probs, p.system.maps):
        atoms.append(images(m.head(first.atoms), m.tail_offsets(tail_points)))
        probs = q * tail_weights
        weights.append((first.weights[:, None] * probs[None, :]).reshape(-1))
    return _finish(np.concatenate(atoms), np.concatenate(weights), w_min, delta)


def markov_step_gifsp(
    p: GifsP,
    mus: Sequence[DiscreteMeasure],
    w_min: float = 1e-10,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> DiscreteMeasure:
    """
    Generalized Markov operator M_S(mu_1, ..., mu_m).

    The image is the pushforward of q_j times the product measure under phi_j,
    summed over j. Atoms are merged at the dedup tolerance, atoms lighter than
    w_min are moved to their nearest surviving atom, and when delta > 0 atoms
    are snapped to a grid.

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    mus : Sequence[DiscreteMeasure]
        m measures.
    w_min : float, default 1e-10
        Weight threshold for merging.
    delta : float, default 0.0
        Grid spacing for merging (0 disables it).
    budget : Budget, default DEFAULT_BUDGET
        Raw atom count is limited by budget.atoms.

    Returns
    -------
    image : DiscreteMeasure
        Markov image.
    """
    return _markov_step_gifsp(p, mus, w_min, delta, budget)[0]


def _markov_step_induced(
    induced: InducedIfsp,
    mu: DiscreteMeasure,
    w_min: float,
    delta: float,
    budget: Budget,
) -> tuple[DiscreteMeasure, float]:
    raw_count = len(induced.ifs) * len(mu)
    if raw_count > budget.atoms:
        raise BudgetExceededError(
            f"Markov step needs {raw_count} atoms (budget {budget.atoms})."
        )
    atoms, weights = induced.pushforward(mu)
    return _finish(atoms, weights, w_min, delta)


def markov_step_induced(
    p: GifsP,
    b_measure: DiscreteMeasure,
    mu: DiscreteMeasure,
    w_min: float = 1e-10,
    delta: float = 0.0,
    budget: Budget = DEFAULT_BUDGET,
) -> DiscreteMeasure:
    """
    Markov operator of the IFSp induced by nu = b_measure, applied to mu.

    Equals markov_step_gifsp(p, (mu, nu, ..., nu)) exactly.
    """
    _check_measures(p, [b_measure, mu])
    induced = induce_ifsp(p, b_measure, budget)
    return _markov_step_induced(induced, mu, w_min, delta, budget)[0]


def hutchinson_measure(
    p: GifsP,
    b_measure: DiscreteMeasure,
    mu0: Optional[DiscreteMeasure] = None,
    tol: float = 1e-3,
    w_min: float = 1e-10,
    delta: Optional[float] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> tuple[DiscreteMeasure, ConvergenceReport]:
    """
    Invariant measure of the IFSp induced by nu = b_measure, to certified tol.

    The Markov operator contracts d_MK by lam = sum_j q_j * a_1^(j) (contractive
    on average). Iterates are merged (dedup, w_min, grid) and the transport cost
    of every merge is the step inexactness of the Ostrowski estimate.

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    b_measure : DiscreteMeasure
        Measure nu on the tail arguments.
    mu0 : Optional[DiscreteMeasure], default None
        Initial measure.
        If None, the point mass at the fixed point of the first induced map.
    tol : float, default 1e-3
        Target d_MK to the exact invariant measure.
    w_min : float, default 1e-10
        Weight threshold for merging.
    delta : Optional[float], default None
        Grid spacing for merging.
        If None, tol * (1 - lam) / sqrt(d).
    budget : Budget, default DEFAULT_BUDGET
        Atom, map and iteration caps.

    Returns
    -------
    result : DiscreteMeasure
        Last iterate.
    report : ConvergenceReport
        Bounds and flags.
    """
    if tol <= 0.0:
        raise InvalidInputError("tol must be positive.")
    induced = induce_ifsp(p, b_measure, budget)
    lam = induced.lam
    if mu0 is None:
        mu0 = DiscreteMeasure.dirac(induced.ifs.maps[0].fixed_point())
    _check_measures(p, [mu0])
    if delta is None:
        delta = default_delta(tol, lam, p.dim)

    current = mu0
    exact_image, _ = _markov_step_induced(induced, current, 0.0, 0.0, budget)
    ledger = OstrowskiLedger(lam, mk_upper_bound(current, exact_image))
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
        try:
            following, cost = _markov_step_induced(
                induced, current, w_min, delta, budget
            )
        except BudgetExceededError as e:
            budget_exceeded = True
            notes.append(str(e))
            break
        bound = ledger.record(cost)
        widths.append(delta)
        try:
            displacements.append(mk_distance(current, following))
        except BudgetExceededError:
            displacements.append(math.nan)
        current = following
        logger.debug("hutchinson k=%d |mu|=%d bound=%.3e", k, len(current), bound)

    if budget_exceeded:
        logger.warning(
            "Measure iteration stopped early; certified bound %.3e", ledger.final_bound
        )
        ledger.budget_exceeded = True

    report = ConvergenceReport(
        ledger=ledger,
        widths=tuple(widths),
        displacements=tuple(displacements),
        converged=ledger.final_bound <= tol,
        budget_exceeded=budget_exceeded,
        notes=tuple(notes),
    )
    return current, report


def d_max(
    first: tuple[PointSet, DiscreteMeasure],
    second: tuple[PointSet, DiscreteMeasure],
) -> float:
    """
    max(h(A, B), d_MK(mu, nu)) on pairs (set, measure).
    """
    return max(hausdorff(first[0], second[0]), mk_distance(first[1], second[1]))


class JointResult(NamedTuple):
    """
    Output of the joint evaluation map.
    """

    attractor: PointSet
    measure: DiscreteMeasure
    attractor_report: ConvergenceReport
    measure_report: ConvergenceReport


def joint_evaluation(
    p: GifsP,
    b: PointSet,
    nu: DiscreteMeasure,
    sigma: float,
    seed_set: Optional[PointSet] = None,
    seed_measure: Optional[DiscreteMeasure] = None,
    w_min: float = 1e-10,
    budget: Budget = DEFAULT_BUDGET,
) -> JointResult:
    """
    EV_S(B, nu): attractor and invariant measure of the induced system.

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    b : PointSet
        Finite set.
    nu : DiscreteMeasure
        Probability measure supported on B.
    sigma : float
        Tolerance of both inner solves.
    seed_set : Optional[PointSet], default None
        Initial set of the attractor solve.
    seed_measure : Optional[DiscreteMeasure], default None
        Initial measure of the measure solve.
    w_min : float, default 1e-10
        Weight threshold for merging.
    budget : Budget, default DEFAULT_BUDGET
        Budgets of both solves.

    Returns
    -------
    result : JointResult
        Attractor, measure and both reports.

    Raises
    ------
    InvalidInputError
        If supp(nu) is not contained in B.
    """
    _check_measures(p, [nu])
    tol = max(DEDUP_RELATIVE_TOL * b.diameter(), 1e-12)
    if directed_distance(nu.support(), b) > tol:
        raise InvalidInputError("Support of nu must be contained in B.")

    attractor, attractor_report = evaluation_map(p.system, b, sigma, seed_set, budget)
    measure, measure_report = hutchinson_measure(
        p, nu, seed_measure, sigma, w_min, budget=budget
    )
    return JointResult(attractor, measure, attractor_report, measure_report)


def joint_contraction_factor(system: GifsSystem) -> float:
    """
    max(Lip(F_S), sum_{i>=2} a_i / (1 - a_1)) with a_i maximized over maps.

    Raises
    ------
    InvalidInputError
        If the factor is not below 1.
    """
    a1 = max(m.arg_lips[0] for m in system.maps)
    rest = math.fsum(
        max(m.arg_lips[i] for m in system.maps) for i in range(1, system.order)
    )
    factor = max(system.lip_fs, rest / (1.0 - a1))
    if factor >= 1.0:
        raise InvalidInputError(
            f"Joint evaluation map is not certified contractive (factor {factor!r})."
        )
    return factor


class JointIterate(NamedTuple):
    """
    Output of joint_iterate.
    """

    attractor: PointSet
    measure: DiscreteMeasure
    ledger: OstrowskiLedger
    history: tuple[tuple[PointSet, DiscreteMeasure], ...]


def joint_iterate(
    p: GifsP,
    b0: PointSet,
    nu0: DiscreteMeasure,
    beta_schedule: Schedule = HARMONIC,
    sigma_schedule: Schedule = HARMONIC,
    steps: int = 10,
    w_min: float = 1e-10,
    budget: Budget = DEFAULT_BUDGET,
    evaluations: Optional[list[JointResult]] = None,
) -> JointIterate:
    """
    Iterate EV_S with inexact inner solves towards (A_S, mu_S).

    At step k the set B_{k-1} is subsampled to a beta_k-dense subset S_k,
    nu_{k-1} is projected onto S_k, and EV_S(S_k, nu_S) is solved to sigma_k.
    With c = joint_contraction_factor, the step inexactness in d_max is
    eps_k = c * max(beta_k, projection cost) + sigma_k.

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    b0 : PointSet
        Initial set.
    nu0 : DiscreteMeasure
        Initial measure supported on b0.
    beta_schedule : Schedule, default 1/k
        Density radii.
    sigma_schedule : Schedule, default 1/k
        Inner tolerances.
    steps : int, default 10
        Number of outer steps K.
    w_min : float, default 1e-10
        Weight threshold for merging.
    budget : Budget, default DEFAULT_BUDGET
        Budgets of all inner solves.
    evaluations : Optional[list[JointResult]], default None
        If given, the output of every completed joint evaluation is appended.

    Returns
    -------
    result : JointIterate
        (B_K, nu_K), the ledger, and all iterates (B_0, nu_0), ..., (B_K, nu_K).
    """
    if steps < 1:
        raise InvalidInputError("K must be positive.")
    factor = joint_contraction_factor(p.system)
    system = p.system

    current_set = b0
    current_measure = nu0
    history: list[tuple[PointSet, DiscreteMeasure]] = [(b0, nu0)]
    ledger: Optional[OstrowskiLedger] = None
    notes: list[str] = []

    for k in range(1, steps + 1):
        beta = beta_schedule(k)
        sigma = sigma_schedule(k)
        subset, beta = fit_map_budget(system, current_set, beta, budget, notes, k)
        projected, cost = project_onto(current_measure, subset)

        try:
            result = joint_evaluation(
                p,
                subset,
                projected,
                sigma,
                seed_set=current_set,
                seed_measure=current_measure,
                w_min=w_min,
                budget=budget,
            )
        except BudgetExceededError as e:
            if ledger is None:
                raise BudgetExceededError(
                    str(e), partial=(current_set, current_measure)
                ) from e
            ledger.annotate(f"k={k}: {e}")
            ledger.budget_exceeded = True
            break

        inner = max(
            sigma,
            result.attractor_report.certified_bound,
            result.measure_report.certified_bound,
        )
        eps = factor * max(beta, cost) + inner
        if ledger is None:
            d01 = max(
                hausdorff(b0, result.attractor),
                mk_upper_bound(nu0, result.measure),
            )
            ledger = OstrowskiLedger(factor, d01 + eps)
        for note in notes:
            ledger.annotate(note)
        notes.clear()

        bound = ledger.record(eps, beta, sigma)
        current_set = result.attractor
        current_measure = result.measure
        history.append((current_set, current_measure))
        if evaluations is not None:
            evaluations.append(result)
        logger.info(
            "joint k=%d |B|=%d |mu|=%d eps=%.3e bound=%.3e",
            k,
            len(current_set),
            len(current_measure),
            eps,
            bound,
        )
        if (
            result.attractor_report.budget_exceeded
            or result.measure_report.budget_exceeded
        ):
            ledger.annotate(f"k={k}: inner solve stopped early")
            ledger.budget_exceeded = True
            break

    assert ledger is not None
    return JointIterate(current_set, current_measure, ledger, tuple(history))

