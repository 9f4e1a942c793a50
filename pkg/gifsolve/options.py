# Definitions of the run options

from collections.abc import Sequence
from pathlib import Path
from typing import Optional, TypeVar

from gifsolve.budget import Budget
from gifsolve.config import (
    AT_LEAST_ONE,
    NON_NEGATIVE,
    POSITIVE,
    Config,
    ConfigItem,
    ConfigRegistry,
    Converter,
    LowerBound,
)
from gifsolve.measure import TRANSPORT_METHODS
from gifsolve.schedule import HARMONIC, Schedule

T = TypeVar("T")


def add_config(
    name: str,
    converter: Converter[T],
    default_value: T,
    help: str,
    bound: Optional[LowerBound] = None,
) -> None:
    """
    Register a run option in the shared registry.

    Parameters
    ----------
    name : str
        Option name; the flag is '--' followed by the name with dashes.
    converter : Converter[T]
        Parses the flag text.
    default_value : T
        Value used when the flag is absent.
    help : str
        Description shown by --help.
    bound : LowerBound, optional
        Admissible range of a numeric option.
    """
    item = ConfigItem(name, converter, default_value, help, bound)
    ConfigRegistry.get_instance().add_item(item)


def _str_to_int(value: str) -> int:
    # Accepts "10000000" as well as "1e7".
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{value} is not an integer")
    return int(number)


def add_int_config(
    name: str, help: str, default_value: int = 0, bound: Optional[LowerBound] = None
) -> None:
    """
    Register an integer option. The flag also accepts "1e7".

    Parameters
    ----------
    name : str
        Option name.
    help : str
        Description shown by --help.
    default_value : int, default 0
        Value used when the flag is absent.
    bound : LowerBound, optional
        Admissible range.
    """
    add_config(name, _str_to_int, default_value, help, bound)


def add_float_config(
    name: str,
    help: str,
    default_value: float = 0.0,
    bound: Optional[LowerBound] = None,
) -> None:
    """
    Register a float option.

    Parameters
    ----------
    name : str
        Option name.
    help : str
        Description shown by --help.
    default_value : float, default 0.0
        Value used when the flag is absent.
    bound : LowerBound, optional
        Admissible range.
    """
    add_config(name, float, default_value, help, bound)


def add_str_config(
    name: str,
    help: str,
    default_value: str = "",
    choices: Optional[Sequence[str]] = None,
) -> None:
    """
    Register a string option.

    Parameters
    ----------
    name : str
        Option name.
    help : str
        Description shown by --help.
    default_value : str, default ""
        Value used when the flag is absent.
    choices : Sequence[str], optional
        Admissible values. If None, any text is accepted.
    """

    def converter(value: str) -> str:
        if choices is not None and value not in choices:
            raise ValueError(f"{value} is not one of {', '.join(choices)}")
        return value

    add_config(name, converter, default_value, help)


def add_path_config(name: str, help: str, default_value: Path = Path()) -> None:
    """
    Register a path option.

    Parameters
    ----------
    name : str
        Option name.
    help : str
        Description shown by --help.
    default_value : Path, default Path()
        Value used when the flag is absent.
    """
    add_config(name, Path, default_value, help)


def add_schedule_config(
    name: str, help: str, default_value: Schedule = HARMONIC
) -> None:
    """Register a schedule option ("1/k", "geometric:r", "const:c", ...)."""
    add_config(name, Schedule.parse, default_value, help)


def register_default_options() -> None:
    """
    Register the run options shared by all commands (once per process).
    """
    if ConfigRegistry.get_instance().has_item("tol"):
        return

    default = Budget()
    add_float_config("tol", "target tolerance of inner solves", 1e-3, POSITIVE)
    add_int_config("K", "number of outer steps", 12, AT_LEAST_ONE)
    add_schedule_config("beta_schedule", "density radii beta_k")
    add_schedule_config("sigma_schedule", "inner tolerances sigma_k")
    add_int_config("seed", "rng seed of random orbits", 0, NON_NEGATIVE)
    for name, help, value in [
        ("budget_points", "max raw images per set step", default.points),
        ("budget_maps", "max maps of an induced system", default.maps),
        ("budget_atoms", "max raw atoms per Markov step", default.atoms),
        ("max_iterations", "max iterations of an inner solve", default.iterations),
    ]:
        add_int_config(name, help, value, AT_LEAST_ONE)
    add_float_config(
        "w_min", "weight below which atoms are merged", 1e-10, NON_NEGATIVE
    )
    add_str_config(
        "transport",
        "transport solver of MK distances",
        "auto",
        TRANSPORT_METHODS,
    )
    add_path_config("out_dir", "directory for outputs", Path("out"))


def get_config() -> Config:
    """
    Get the run options of the running command.
    Note that this function can only be used in command procedures.

    Raises
    ------
    RuntimeError
        If no command is running.
    """
    return Config.get_instance()
