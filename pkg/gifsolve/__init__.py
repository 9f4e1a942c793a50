__version__ = "0.1.0"

from gifsolve.budget import Budget
from gifsolve.errors import (
    BudgetExceededError,
    ConvergenceError,
    InvalidInputError,
    SpecError,
)
from gifsolve.gifs import (
    GifsSystem,
    MultiAffineMap,
    approximate_attractor,
    classical_gifs_iterate,
    evaluation_map,
    gifs_step,
    induce_ifs,
    lipschitz_data,
)
from gifsolve.ifs import AffineMap, FiniteIfs, attractor, fractal_step
from gifsolve.measure import (
    DiscreteMeasure,
    GifsP,
    hutchinson_measure,
    joint_iterate,
    markov_step_gifsp,
    markov_step_induced,
    mk_distance,
)
from gifsolve.metric import PointSet, directed_distance, hausdorff
from gifsolve.schedule import Schedule
from gifsolve.spec import SystemSpec, parse_spec, serialize_spec

__all__ = [
    "Budget",
    "BudgetExceededError",
    "ConvergenceError",
    "InvalidInputError",
    "SpecError",
    "PointSet",
    "directed_distance",
    "hausdorff",
    "AffineMap",
    "FiniteIfs",
    "fractal_step",
    "attractor",
    "MultiAffineMap",
    "GifsSystem",
    "gifs_step",
    "classical_gifs_iterate",
    "induce_ifs",
    "evaluation_map",
    "approximate_attractor",
    "lipschitz_data",
    "DiscreteMeasure",
    "GifsP",
    "mk_distance",
    "markov_step_gifsp",
    "markov_step_induced",
    "hutchinson_measure",
    "joint_iterate",
    "Schedule",
    "SystemSpec",
    "parse_spec",
    "serialize_spec",
]
