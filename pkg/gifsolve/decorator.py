# Decorator to create and register command

from collections.abc import Callable
from typing import Any, Generic, Optional, TypeVar, Union

from gifsolve.builder import (
    ArgumentsConfigurable,
    CommandBuilder,
    HelpConfigurable,
    argument_spec,
)
from gifsolve.command import CommandProcedure
from gifsolve.manager import CommandManager

T = TypeVar("T")


class CommandConfig(Generic[T]):
    """
    Decorator class to set up command builder.
    """

    def __init__(
        self,
        base: Union[CommandProcedure, "CommandConfig[T]"],
        config_procedure: Callable[[T], None],
    ) -> None:
        """
        Parameters
        ----------
        base : Union[CommandProcedure, "CommandConfig[T]"]
            Base object to be decorated.
        config_procedure : Callable[[T], None]
            Procedure to set up command builder.
        """
        self.__base = base
        self.__config_procedure = config_procedure

    # NOTE: Make CommandConfig Callable in order to use as Decorator
    def __call__(self) -> None:
        pass  # pragma: no cover

    def setup_builder(self, builder: T) -> CommandProcedure:
        """
        Set up command builder and return command procedure.

        Decorators are applied in reading order (top to bottom), so positional
        arguments keep the order in which they are written.

        Parameters
        ----------
        builder : T
            Command builder to be set up.
            Type T is a class or a protocol of command builder.

        Returns
        -------
        procedure : CommandProcedure
            Procedure to be executed by the command.
        """
        self.__config_procedure(builder)
        if isinstance(self.__base, CommandConfig):
            return self.__base.setup_builder(builder)
        return self.__base


def command(name: str) -> Callable:
    """
    Decorator to define and register a command.

    Parameters
    ----------
    name : str
        Command name.
    """

    def decorator(
        base: Union[CommandProcedure, CommandConfig[CommandBuilder]]
    ) -> CommandProcedure:
        command_config: CommandConfig[CommandBuilder] = CommandConfig(
            base, lambda builder: None
        )

        builder = CommandBuilder(name)
        procedure = command_config.setup_builder(builder)
        new_command = builder.build(procedure)

        CommandManager.get_instance().register(new_command)

        return procedure

    return decorator


def argument(*flags: str, **options: Any) -> Callable:
    """
    Decorator to add an argument (same parameters as ArgumentParser.add_argument).

    Parameters
    ----------
    *flags : str
        Argument name or flags.
    **options : Any
        Options of the argument.
    """

    def decorator(
        base: Union[CommandProcedure, CommandConfig[ArgumentsConfigurable]]
    ) -> CommandConfig[ArgumentsConfigurable]:
        spec = argument_spec(*flags, **options)
        return CommandConfig(base, lambda builder: builder.add_argument(spec))

    return decorator


def help(desc: Optional[str]) -> Callable:
    """
    Decorator to set command description.

    Parameters
    ----------
    desc : Optional[str]
        Command description.
    """

    def decorator(
        base: Union[CommandProcedure, CommandConfig[HelpConfigurable]]
    ) -> CommandConfig[HelpConfigurable]:
        def set_help_if_needed(builder: HelpConfigurable) -> None:
            if desc is not None:
                builder.set_help(desc)

        return CommandConfig(base, set_help_if_needed)

    return decorator
