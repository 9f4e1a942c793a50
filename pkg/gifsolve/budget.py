# Budget

from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    """
    Cardinality and iteration guardrails.

    Attributes
    ----------
    points : int, default 10**7
        Maximum number of raw images produced by one set operator step.
    maps : int, default 2 * 10**5
        Maximum number of maps in an induced system.
    atoms : int, default 5 * 10**5
        Maximum number of raw atoms produced by one Markov step.
    iterations : int, default 10**4
        Maximum number of inner iterations.
    """

    points: int = 10**7
    maps: int = 2 * 10**5
    atoms: int = 5 * 10**5
    iterations: int = 10**4


DEFAULT_BUDGET = Budget()
