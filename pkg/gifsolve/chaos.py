# Random orbits (chaos game) of induced systems and ergodic averages

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from gifsolve.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidInputError,
)
from gifsolve.measure import DiscreteMeasure, GifsP, mk_distance
from gifsolve.metric import FloatArray, PointSet, hausdorff, snap_to_grid

Observable = Callable[[FloatArray], FloatArray]
ObservableFactory = Callable[[Optional[str]], Observable]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrbitConfig:
    """
    Configuration of one random orbit.

    Attributes
    ----------
    seed_point : tuple[float, ...]
        Starting point x_0.
    rng_seed : int
        Seed of the counter-based generator.
    burn_in : int
        Number of leading points to discard.
    length : int
        Number of steps; the orbit keeps x_{burn_in + 1}, ..., x_length.
    """

    seed_point: tuple[float, ...]
    rng_seed: int
    burn_in: int
    length: int

    def __post_init__(self) -> None:
        if self.burn_in < 0:
            raise InvalidInputError("burn_in must be nonnegative.")
        if self.length <= self.burn_in:
            raise InvalidInputError(
                f"length ({self.length}) must exceed burn_in ({self.burn_in})."
            )
        if not 0 <= self.rng_seed < 2**64:
            raise InvalidInputError("rng_seed must be a 64-bit unsigned integer.")
        if len(self.seed_point) == 0:
            raise InvalidInputError("seed_point must have at least one coordinate.")

    @property
    def dim(self) -> int:
        """Dimension of the seed point."""
        return len(self.seed_point)

    def with_seed(self, rng_seed: int) -> "OrbitConfig":
        """
        Return a copy with another rng seed.
        """
        return OrbitConfig(self.seed_point, rng_seed, self.burn_in, self.length)


def _generator(rng_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(rng_seed))


def _stacked(p: GifsP) -> tuple[FloatArray, FloatArray]:
    # matrices: (n, m, d, d), offsets: (n, d)
    matrices = np.stack([np.stack(m.matrices) for m in p.system.maps])
    offsets = np.stack([m.offset for m in p.system.maps])
    return matrices, offsets


def random_orbit(p: GifsP, nu: DiscreteMeasure, cfg: OrbitConfig) -> FloatArray:
    """
    Random orbit of the IFSp induced by a GIFSp and nu.

    At each step j is drawn from q, the tail arguments b_2, ..., b_m are drawn
    i.i.d. from nu, and x_{k+1} = phi_j(x_k, b_2, ..., b_m).

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    nu : DiscreteMeasure
        Finitely supported measure on the tail arguments.
    cfg : OrbitConfig
        Seed point, rng seed, burn-in and length.

    Returns
    -------
    orbit : FloatArray
        Points x_{burn_in + 1}, ..., x_length as an array of shape (N, d).
    """
    if nu.dim != p.dim:
        raise DimensionMismatchError(p.dim, nu.dim)
    if cfg.dim != p.dim:
        raise DimensionMismatchError(p.dim, cfg.dim)

    rng = _generator(cfg.rng_seed)
    matrices, offsets = _stacked(p)
    order = p.order

    js = rng.choice(len(p.system), size=cfg.length, p=np.asarray(p.probs))
    bs = rng.choice(len(nu), size=(cfg.length, order - 1), p=nu.weights)

    tails = offsets[js].copy()
    for i in range(1, order):
        tails += np.einsum("kab,kb->ka", matrices[js, i], nu.atoms[bs[:, i - 1]])
    heads = matrices[:, 0]

    x = np.asarray(cfg.seed_point, dtype=np.float64)
    orbit = np.empty((cfg.length, p.dim))
    for k in range(cfg.length):
        x = heads[js[k]] @ x + tails[k]
        orbit[k] = x

    logger.debug("orbit seed=%d length=%d", cfg.rng_seed, cfg.length)
    return orbit[cfg.burn_in :]


def sliding_orbit(
    p: GifsP, seeds: Optional[Sequence[npt.ArrayLike]], cfg: OrbitConfig
) -> FloatArray:
    """
    Sliding-window process x_{k+m} = phi_j(x_k, ..., x_{k+m-1}), j drawn from q.

    This process only reaches part of the GIFS attractor in general; it is
    kept for comparison with random_orbit.

    Parameters
    ----------
    p : GifsP
        GIFS with probabilities.
    seeds : Optional[Sequence[ArrayLike]]
        m initial points x_0, ..., x_{m-1}.
        If None, cfg.seed_point is used m times.
    cfg : OrbitConfig
        Rng seed, burn-in and length.

    Returns
    -------
    orbit : FloatArray
        Generated points after burn-in, shape (length - burn_in, d).
    """
    order = p.order
    if seeds is None:
        seeds = [cfg.seed_point] * order
    window = [np.asarray(s, dtype=np.float64).reshape(-1) for s in seeds]
    if len(window) != order:
        raise InvalidInputError(f"Expected {order} seeds, got {len(window)}.")
    for point in window:
        if len(point) != p.dim:
            raise DimensionMismatchError(p.dim, len(point))

    rng = _generator(cfg.rng_seed)
    matrices, offsets = _stacked(p)
    js = rng.choice(len(p.system), size=cfg.length, p=np.asarray(p.probs))

    orbit = np.empty((cfg.length, p.dim))
    for k in range(cfg.length):
        j = js[k]
        x = offsets[j].copy()
        for i in range(order):
            x += matrices[j, i] @ window[i]
        window = window[1:] + [x]
        orbit[k] = x
    return orbit[cfg.burn_in :]


class ObservableRegistry:
    """
    Registry of built-in observables.

    Names are either plain ("identity") or carry one argument after a colon
    ("coord:0", "const:2.5").
    """

    __instance: Optional["ObservableRegistry"] = None

    @classmethod
    def get_instance(cls) -> "ObservableRegistry":
        """
        Return the singleton instance of observable registry.

        Returns
        -------
        registry : ObservableRegistry
            The instance of observable registry.
        """
        if cls.__instance is None:
            cls.__instance = cls()
            cls.__instance.__register_builtins()
        return cls.__instance

    def __init__(self) -> None:
        self.__factories: dict[str, ObservableFactory] = {}

    def register(self, name: str, factory: ObservableFactory) -> None:
        """
        Register an observable factory.

        Parameters
        ----------
        name : str
            Name (the part before the colon).
        factory : ObservableFactory
            Function from the optional argument string to an observable.

        Raises
        ------
        InvalidInputError
            If the name is already registered.
        """
        if name in self.__factories:
            raise InvalidInputError(f"Observable {name} already exists.")
        self.__factories[name] = factory

    @property
    def names(self) -> list[str]:
        """Registered names."""
        return sorted(self.__factories)

    def resolve(self, spec: str) -> Observable:
        """
        Return the observable named by spec.

        Parameters
        ----------
        spec : str
            Name with optional argument, such as "coord:1".

        Returns
        -------
        f : Observable
            Vectorized function from (N, d) points to N values.

        Raises
        ------
        InvalidInputError
            If the name is unknown or the argument is malformed.
        """
        name, _, argument = spec.partition(":")
        factory = self.__factories.get(name)
        if factory is None:
            raise InvalidInputError(f"Unknown observable '{spec}'.")
        try:
            return factory(argument or None)
        except ValueError as e:
            raise InvalidInputError(f"Malformed observable '{spec}'.") from e

    def __register_builtins(self) -> None:
        self.register("identity", _identity)
        self.register("coord", _coordinate(lambda c: c))
        self.register("const", _constant)
        self.register("norm", _norm)
        self.register("sin", _coordinate(np.sin))
        self.register("cos", _coordinate(np.cos))
        self.register("clip", _coordinate(lambda c: np.minimum(1.0, np.abs(c))))


def _no_argument(name: str, argument: Optional[str]) -> None:
    if argument is not None:
        raise ValueError(f"{name} takes no argument")


def _identity(argument: Optional[str]) -> Observable:
    _no_argument("identity", argument)

    def f(points: FloatArray) -> FloatArray:
        # Defined on the line; uses the first coordinate otherwise.
        return np.asarray(points[:, 0], dtype=np.float64)

    return f


def _norm(argument: Optional[str]) -> Observable:
    _no_argument("norm", argument)

    def f(points: FloatArray) -> FloatArray:
        return np.asarray(np.linalg.norm(points, axis=1), dtype=np.float64)

    return f


def _constant(argument: Optional[str]) -> Observable:
    if argument is None:
        raise ValueError("const needs a value")
    value = float(argument)

    def f(points: FloatArray) -> FloatArray:
        return np.full(len(points), value)

    return f


def _coordinate(
    transform: Callable[[FloatArray], FloatArray]
) -> ObservableFactory:
    def factory(argument: Optional[str]) -> Observable:
        index = int(argument) if argument is not None else 0
        if index < 0:
            raise ValueError("coordinate index must be nonnegative")

        def f(points: FloatArray) -> FloatArray:
            if index >= points.shape[1]:
                raise InvalidInputError(
                    f"Coordinate {index} out of range for dimension {points.shape[1]}."
                )
            return np.asarray(transform(points[:, index]), dtype=np.float64)

        return f

    return factory


def ergodic_average(orbit: npt.ArrayLike, f: Union[str, Observable]) -> float:
    """
    Arithmetic mean of an observable along an orbit.

    Parameters
    ----------
    orbit : ArrayLike
        Orbit points of shape (N, d).
    f : Union[str, Observable]
        Registered observable name, or a vectorized function.

    Returns
    -------
    average : float
        Mean of f over the orbit.
    """
    points = np.asarray(orbit, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if len(points) == 0:
        raise InvalidInputError("Orbit must be nonempty.")
    if isinstance(f, str):
        f = ObservableRegistry.get_instance().resolve(f)
    return math.fsum(f(points)) / len(points)


def empirical_measure(orbit: npt.ArrayLike, bin_width: float) -> DiscreteMeasure:
    """
    Occupation measure of an orbit, binned to grid cell centres.

    Parameters
    ----------
    orbit : ArrayLike
        Orbit points of shape (N, d).
    bin_width : float
        Grid spacing (positive).

    Returns
    -------
    measure : DiscreteMeasure
        Fraction of orbit points in each occupied cell.
    """
    if bin_width <= 0.0:
        raise InvalidInputError("bin_width must be positive.")
    points = np.asarray(orbit, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if len(points) == 0:
        raise InvalidInputError("Orbit must be nonempty.")
    snapped = snap_to_grid(points, bin_width)
    cells, counts = np.unique(snapped, axis=0, return_counts=True)
    return DiscreteMeasure(cells, counts / len(points), dedup_tol=0.0)


@dataclass(frozen=True)
class OrbitDiagnostics:
    """
    Distances of an orbit to reference objects.

    Attributes
    ----------
    length : int
        Number of orbit points.
    hausdorff : Optional[float]
        Hausdorff distance of the orbit closure to the reference attractor.
    mk : Optional[float]
        d_MK of the binned orbit to the reference measure
        (None when no reference is given or the transport problem is too large).
    """

    length: int
    hausdorff: Optional[float] = None
    mk: Optional[float] = None


def orbit_diagnostics(
    orbit: npt.ArrayLike,
    attractor: Optional[PointSet] = None,
    measure: Optional[DiscreteMeasure] = None,
    bin_width: float = 1e-2,
) -> OrbitDiagnostics:
    """
    Compare an orbit with a reference attractor and a reference measure.
    """
    points = np.asarray(orbit, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    h = None
    if attractor is not None:
        h = hausdorff(PointSet(points), attractor)
    mk = None
    if measure is not None:
        try:
            mk = mk_distance(empirical_measure(points, bin_width), measure)
        except BudgetExceededError as e:
            logger.warning("Skipped transport diagnostic: %s", e)
    return OrbitDiagnostics(len(points), h, mk)
