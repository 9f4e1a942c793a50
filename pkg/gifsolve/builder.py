# Command builder

from typing import Any, Optional, Protocol

from gifsolve.command import ArgumentSpec, Command, CommandProcedure


class ArgumentsConfigurable(Protocol):
    """
    Protocol for command builder which can add arguments to command.
    """

    def add_argument(self, argument: ArgumentSpec) -> None:
        """
        Add an argument to command.

        Parameters
        ----------
        argument : ArgumentSpec
            Argument to be added.
        """
        ...  # pragma: no cover


class HelpConfigurable(Protocol):
    """
    Protocol for command builder which can set command description.
    """

    def set_help(self, help: str) -> None:
        """
        Set command description.

        Parameters
        ----------
        help : str
            Command description to be set.
        """
        ...  # pragma: no cover


class CommandBuilder(ArgumentsConfigurable, HelpConfigurable):
    """
    Builder for command.
    """

    def __init__(self, name: str) -> None:
        """
        Parameters
        ----------
        name : str
            Command name.
        """
        self.__name = name
        self.__arguments: list[ArgumentSpec] = []
        self.__help: Optional[str] = None

    def add_argument(self, argument: ArgumentSpec) -> None:
        """
        Add an argument to command.

        Parameters
        ----------
        argument : ArgumentSpec
            Argument to be added.
        """
        self.__arguments.append(argument)

    def set_help(self, help: str) -> None:
        """
        Set command description.

        Parameters
        ----------
        help : str
            Command description to be set.
        """
        self.__help = help

    def build(self, procedure: CommandProcedure) -> Command:
        """
        Build a command with specified settings.

        Parameters
        ----------
        procedure : CommandProcedure
            Procedure to be executed by the command.

        Returns
        -------
        command : Command
            Built command.
        """
        return Command(self.__name, procedure, list(self.__arguments), self.__help)


def argument_spec(*flags: str, **options: Any) -> ArgumentSpec:
    """
    Shorthand for ArgumentSpec(flags, options).
    """
    return ArgumentSpec(tuple(flags), dict(options))
