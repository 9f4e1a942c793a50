# Error ledgers for inexact fixed-point iterations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from gifsolve.errors import InvalidInputError


def ostrowski_bound(alpha: float, d01: float, eps: Sequence[float], k: int) -> float:
    """
    Ostrowski estimate for the k-th inexact iterate of an alpha-contraction.

    d(y_k, p) <= alpha^k / (1 - alpha) * d(x_0, T x_0)
                 + sum_{i=1..k} alpha^(k - i) * eps_i

    Parameters
    ----------
    alpha : float
        Contraction factor in [0, 1).
    d01 : float
        Upper bound on the initial displacement d(x_0, T x_0).
    eps : Sequence[float]
        Per-step inexactness eps_1, eps_2, ... (at least k values).
    k : int
        Iteration index.

    Returns
    -------
    bound : float
        Certified distance of y_k to the fixed point.
    """
    head = alpha**k / (1.0 - alpha) * d01
    tail = 0.0
    for i in range(1, k + 1):
        tail += alpha ** (k - i) * eps[i - 1]
    return head + tail


class OstrowskiLedger:
    """
    Running record of an inexact Picard iteration and its certified bounds.

    bounds[k] is the Ostrowski estimate after k steps; bounds[0] is
    d01 / (1 - alpha).
    """

    def __init__(self, alpha: float, d01: float) -> None:
        """
        Parameters
        ----------
        alpha : float
            Contraction factor in [0, 1).
        d01 : float
            Upper bound on the initial displacement.

        Raises
        ------
        InvalidInputError
            If alpha is not in [0, 1) or d01 is negative.
        """
        if not 0.0 <= alpha < 1.0:
            raise InvalidInputError(f"Contraction factor must be in [0, 1): {alpha}")
        if d01 < 0.0:
            raise InvalidInputError("Initial displacement must be nonnegative.")
        self.__alpha = alpha
        self.__d01 = d01
        self.__eps: list[float] = []
        self.__betas: list[float] = []
        self.__sigmas: list[float] = []
        self.__bounds: list[float] = [d01 / (1.0 - alpha)]
        self.__notes: list[str] = []
        self.budget_exceeded = False

    @property
    def alpha(self) -> float:
        """Contraction factor."""
        return self.__alpha

    @property
    def d01(self) -> float:
        """Initial displacement bound."""
        return self.__d01

    @property
    def eps(self) -> tuple[float, ...]:
        """Per-step inexactness eps_1, ..., eps_k."""
        return tuple(self.__eps)

    @property
    def betas(self) -> tuple[float, ...]:
        """Density radius used at each step (0 when not applicable)."""
        return tuple(self.__betas)

    @property
    def sigmas(self) -> tuple[float, ...]:
        """Inner tolerance used at each step (0 when not applicable)."""
        return tuple(self.__sigmas)

    @property
    def bounds(self) -> tuple[float, ...]:
        """Certified bounds bounds[0], ..., bounds[k]."""
        return tuple(self.__bounds)

    @property
    def notes(self) -> tuple[str, ...]:
        """Annotations made during the run."""
        return tuple(self.__notes)

    @property
    def steps(self) -> int:
        """Number of recorded steps."""
        return len(self.__eps)

    @property
    def final_bound(self) -> float:
        """Bound for the last recorded iterate."""
        return self.__bounds[-1]

    def record(self, eps: float, beta: float = 0.0, sigma: float = 0.0) -> float:
        """
        Record one step and return its certified bound.

        Parameters
        ----------
        eps : float
            Inexactness of the step, d(y_k, T y_{k-1}) <= eps.
        beta : float, default 0.0
            Density radius used at the step.
        sigma : float, default 0.0
            Inner tolerance used at the step.

        Returns
        -------
        bound : float
            bounds[k] for the new step.
        """
        if eps < 0.0:
            raise InvalidInputError("Inexactness must be nonnegative.")
        self.__eps.append(eps)
        self.__betas.append(beta)
        self.__sigmas.append(sigma)
        bound = ostrowski_bound(self.__alpha, self.__d01, self.__eps, len(self.__eps))
        self.__bounds.append(bound)
        return bound

    def annotate(self, note: str) -> None:
        """
        Add an annotation.

        Parameters
        ----------
        note : str
            Free-form note (e.g. an automatic budget adjustment).
        """
        self.__notes.append(note)

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        """
        Return (k, beta, sigma, eps, bound) rows for k = 1, ..., steps.
        """
        return [
            (k, self.__betas[k - 1], self.__sigmas[k - 1], self.__eps[k - 1], bound)
            for k, bound in enumerate(self.__bounds[1:], start=1)
        ]


@dataclass(frozen=True)
class ConvergenceReport:
    """
    Record of an inner fixed-point solve.

    Attributes
    ----------
    ledger : OstrowskiLedger
        Per-step inexactness and certified bounds.
    widths : tuple[float, ...]
        Grid width used to merge each iterate (0 when no merge happened).
    displacements : tuple[float, ...]
        Distance between consecutive iterates.
    converged : bool
        Whether the certified bound reached the tolerance.
    budget_exceeded : bool
        Whether a budget stopped the iteration early.
    posterior_bound : Optional[float]
        A-posteriori certificate d(y_k, T y_k) / (1 - alpha) for the returned iterate,
        if it was computed.
    notes : tuple[str, ...]
        Annotations.
    """

    ledger: OstrowskiLedger
    widths: tuple[float, ...] = ()
    displacements: tuple[float, ...] = ()
    converged: bool = True
    budget_exceeded: bool = False
    posterior_bound: Optional[float] = None
    notes: tuple[str, ...] = field(default=())

    @property
    def alpha(self) -> float:
        """Contraction factor used for certification."""
        return self.ledger.alpha

    @property
    def steps(self) -> int:
        """Number of iterations performed."""
        return self.ledger.steps

    @property
    def certified_bound(self) -> float:
        """Certified distance of the returned iterate to the exact fixed point."""
        return self.ledger.final_bound

    @property
    def bounds(self) -> tuple[float, ...]:
        """Certified bound after each iteration."""
        return self.ledger.bounds

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        """
        Return (k, width, eps, bound, displacement) rows for k = 1, ..., steps.
        """
        return [
            (k, width, eps, bound, disp)
            for k, (width, eps, bound, disp) in enumerate(
                zip(self.widths, self.ledger.eps, self.bounds[1:], self.displacements),
                start=1,
            )
        ]
