# Run options shared by all commands

from argparse import ArgumentParser, Namespace
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Generic, Optional, TypeVar

from gifsolve.budget import Budget
from gifsolve.errors import InvalidInputError

T = TypeVar("T")

Converter = Callable[[str], T]


@dataclass(frozen=True)
class LowerBound:
    """
    Lower bound of a numeric run option.

    Attributes
    ----------
    value : float
        Bound.
    inclusive : bool
        Whether the bound itself is admitted.
    """

    value: float
    inclusive: bool = False

    def admits(self, number: float) -> bool:
        """
        Whether a value lies in the admissible range.

        Parameters
        ----------
        number : float
            Value to check.

        Returns
        -------
        bool
            return True if the value satisfies the bound.
        """
        return number >= self.value if self.inclusive else number > self.value

    def __str__(self) -> str:
        return f"{'>=' if self.inclusive else '>'} {self.value:g}"


POSITIVE = LowerBound(0.0)
AT_LEAST_ONE = LowerBound(1.0, inclusive=True)
NON_NEGATIVE = LowerBound(0.0, inclusive=True)


@dataclass(frozen=True)
class ConfigItem(Generic[T]):
    """
    Run option such as the tolerance, a schedule or a budget cap.

    Attributes
    ----------
    name : str
        Option name, also the key in confirmed values.
    converter : Converter[T]
        Parses the command-line text.
    default_value : T
        Value used when the flag is absent.
    help : str
        Description shown by --help.
    bound : LowerBound, optional
        Admissible range of a numeric option.
    """

    name: str
    converter: Converter[T]
    default_value: T
    help: str
    bound: Optional[LowerBound] = None

    @property
    def flag(self) -> str:
        """Command-line flag, e.g. '--budget-points' for 'budget_points'."""
        return "--" + self.name.replace("_", "-")

    def convert(self, text: str) -> T:
        """
        Parse a flag value and check its range.

        Raises
        ------
        InvalidInputError
            If the text can not be parsed or the value is out of range.
        """
        try:
            value = self.converter(text)
        except ValueError as e:
            raise InvalidInputError(f"Can't convert '{text}' for {self.flag}.") from e
        if self.bound is None:
            return value
        number = float(value)  # type: ignore[arg-type]
        if not self.bound.admits(number):
            raise InvalidInputError(f"{self.flag} must be {self.bound}, got {text}.")
        return value


class ConfigRegistry:
    """
    Registry of the run options, turned into flags of every subcommand.
    """

    __instance: Optional["ConfigRegistry"] = None

    @classmethod
    def get_instance(cls) -> "ConfigRegistry":
        """
        Get the shared registry, creating it on first use.

        Returns
        -------
        registry : ConfigRegistry
            The registry of this process.
        """
        if cls.__instance is None:
            cls.__instance = cls()
        return cls.__instance

    def __init__(self) -> None:
        self.__items: dict[str, ConfigItem] = {}

    def add_item(self, item: ConfigItem) -> None:
        """
        Register a run option.

        Raises
        ------
        RuntimeError
            If an option with the same name is registered.
        """
        if item.name in self.__items:
            raise RuntimeError(f"Configuration item {item.name} already exists.")
        self.__items[item.name] = item

    def has_item(self, name: str) -> bool:
        """
        Whether an option is registered.

        Parameters
        ----------
        name : str
            Option name.

        Returns
        -------
        bool
            return True if the option exists.
        """
        return name in self.__items

    @property
    def items(self) -> list[ConfigItem]:
        """Registered options in registration order."""
        return list(self.__items.values())

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Add one flag per option to the parser.

        Parsed values stay strings (None when absent); get_confirmed_values
        converts them, so that defaults never go through a converter.
        """
        for item in self.__items.values():
            parser.add_argument(
                item.flag,
                dest=item.name,
                metavar="VALUE",
                default=None,
                help=f"{item.help} (default: {item.default_value})",
            )

    def values_of(self, namespace: Namespace) -> dict[str, str]:
        """Flag values given on the command line, keyed by option name."""
        return {
            name: getattr(namespace, name)
            for name in self.__items
            if getattr(namespace, name, None) is not None
        }

    def get_confirmed_values(self, values: dict[str, str]) -> dict[str, Any]:
        """
        Convert the given flag values and fill in defaults.

        Parameters
        ----------
        values : dict[str, str]
            Flag values keyed by option name.

        Returns
        -------
        confirmed_values : dict[str, Any]
            Value of every registered option.

        Raises
        ------
        RuntimeError
            If a value is given for an unknown option.
        InvalidInputError
            If a value can not be converted or is out of range.
        """
        unknown = sorted(set(values) - set(self.__items))
        if unknown:
            raise RuntimeError(f"There is no configuration item named {unknown[0]}.")
        return {
            name: item.convert(values[name]) if name in values else item.default_value
            for name, item in self.__items.items()
        }


class Config:
    """
    Confirmed run options of the running command.

    Values are read by attribute (`config.tol`) or by key (`config["tol"]`).
    """

    __instance: Optional["Config"] = None

    @classmethod
    def get_instance(cls) -> "Config":
        """
        Return the options of the running command.

        Raises
        ------
        RuntimeError
            If no command is running.
        """
        if cls.__instance is None:
            raise RuntimeError("Configuration is not confirmed.")
        return cls.__instance

    @classmethod
    def set(cls, values: dict[str, Any]) -> None:
        """
        Confirm the options of the running command.

        Parameters
        ----------
        values : dict[str, Any]
            Confirmed value of every option.

        Raises
        ------
        RuntimeError
            If options are already confirmed.
        """
        if cls.__instance is not None:
            raise RuntimeError("Configuration is already set.")
        cls.__instance = cls(values)

    @classmethod
    def clear(cls) -> None:
        """Forget the confirmed options."""
        cls.__instance = None

    @classmethod
    @contextmanager
    def scoped(cls, values: dict[str, Any]) -> Iterator["Config"]:
        """
        Confirm the options for the duration of a command.
        """
        cls.set(values)
        try:
            yield cls.get_instance()
        finally:
            cls.clear()

    def __init__(self, values: dict[str, Any]) -> None:
        self.__values = dict(values)

    def get(self, name: str) -> Any:
        """
        Get the value of an option.

        Parameters
        ----------
        name : str
            Option name.

        Returns
        -------
        value : Any
            Confirmed value.

        Raises
        ------
        RuntimeError
            If there is no option with the name.
        """
        if name not in self.__values:
            raise RuntimeError(f"There is no configuration item named {name}.")
        return self.__values[name]

    def __getattr__(self, name: str) -> Any:
        if name.startswith("_"):
            raise AttributeError(name)
        return self.get(name)

    def __getitem__(self, name: str) -> Any:
        return self.get(name)

    @property
    def values(self) -> dict[str, Any]:
        """Copy of all confirmed values, keyed by option name."""
        return dict(self.__values)

    @property
    def budget(self) -> Budget:
        """Guardrails built from the budget options."""
        return Budget(
            points=self.get("budget_points"),
            maps=self.get("budget_maps"),
            atoms=self.get("budget_atoms"),
            iterations=self.get("max_iterations"),
        )

    @property
    def schedules(self) -> dict[str, str]:
        """Schedule texts as recorded in the run manifest."""
        return {
            "beta": str(self.get("beta_schedule")),
            "sigma": str(self.get("sigma_schedule")),
        }

    @property
    def tolerances(self) -> dict[str, float]:
        """Tolerance and budget options as recorded in the run manifest."""
        names = [
            "tol",
            "w_min",
            "budget_points",
            "budget_maps",
            "budget_atoms",
            "max_iterations",
        ]
        return {name: self.get(name) for name in names}
