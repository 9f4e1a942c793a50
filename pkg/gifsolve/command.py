# Command

from argparse import ArgumentParser, Namespace
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Optional

CommandProcedure = Callable[[Namespace], int]


@dataclass(frozen=True)
class ArgumentSpec:
    """
    Positional argument or flag of a command.

    Attributes
    ----------
    flags : tuple[str, ...]
        Names passed to ArgumentParser.add_argument.
    options : dict[str, Any]
        Keyword arguments passed to ArgumentParser.add_argument.
    """

    flags: tuple[str, ...]
    options: dict[str, Any] = field(default_factory=dict)

    def add_to(self, parser: ArgumentParser) -> None:
        """
        Add this argument to a parser.
        """
        parser.add_argument(*self.flags, **self.options)


@dataclass(frozen=True)
class Command:
    """
    Command.

    Attributes
    ----------
    name : str
        Command name (the subcommand on the command line).
    procedure : CommandProcedure
        Procedure to be executed; returns the exit code.
    arguments : list[ArgumentSpec]
        Arguments of the command.
    help : Optional[str]
        Command description.
    """

    name: str
    procedure: CommandProcedure
    arguments: list[ArgumentSpec]
    help: Optional[str]

    @property
    def has_help(self) -> bool:
        """
        Whether the command has a description.

        Returns
        -------
        bool
            return True if the command has a description.
        """
        return self.help is not None

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Add all arguments of the command to a parser.
        """
        for argument in self.arguments:
            argument.add_to(parser)

    def run(self, namespace: Namespace) -> int:
        """
        Execute command procedure.

        Parameters
        ----------
        namespace : Namespace
            Parsed arguments.

        Returns
        -------
        exit_code : int
            Exit code of the procedure.
        """
        return self.procedure(namespace)
