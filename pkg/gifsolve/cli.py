# CLI

import logging
import sys
from argparse import ArgumentParser, Namespace
from collections.abc import Sequence
from typing import NoReturn, Optional

import gifsolve
from gifsolve.config import Config, ConfigRegistry
from gifsolve.errors import InvalidInputError, exit_code_of
from gifsolve.manager import CommandManager
from gifsolve.options import register_default_options
from gifsolve.runner import CommandRunner

logger = logging.getLogger(__name__)


class _ArgumentParser(ArgumentParser):
    # Usage errors are invalid input (exit 1), not argparse's exit 2.
    def error(self, message: str) -> NoReturn:
        raise InvalidInputError(f"{self.prog}: {message}")


class CLI:
    """
    Command Line Interface.
    """

    @classmethod
    def create(cls, argv: Optional[Sequence[str]] = None) -> "CLI":
        """
        Parse command line arguments and create a CLI instance.

        Parameters
        ----------
        argv : Optional[Sequence[str]], default None
            Arguments without the program name.
            If None, sys.argv[1:] is used.

        Returns
        -------
        cli : CLI
            Created CLI instance.
        """
        args = list(sys.argv[1:] if argv is None else argv)

        register_default_options()
        # Importing the module registers the commands.
        import gifsolve.commands  # noqa: F401

        registry = ConfigRegistry.get_instance()
        manager = CommandManager.get_instance()
        option = cls.__parse_args(registry, manager, args)
        option.argv = args

        return cls(registry, option.command, option.verbose, option)

    @classmethod
    def __parse_args(
        cls, registry: ConfigRegistry, manager: CommandManager, args: list[str]
    ) -> Namespace:
        config_parser = _ArgumentParser(add_help=False)
        registry.add_arguments(config_parser)

        parser = _ArgumentParser(
            prog="gifsolve",
            description="Attractors and Hutchinson measures of GIFS.",
        )
        parser.add_argument("--version", action="version", version=gifsolve.__version__)
        parser.add_argument(
            "-v",
            "--verbose",
            action="count",
            default=0,
            help="show progress (-vv for debug output)",
        )
        parser.add_argument(
            "-j",
            "--jobs",
            metavar="N",
            type=int,
            default=1,
            help="generate chaos orbits with N workers",
        )

        subparsers = parser.add_subparsers(dest="command", metavar="command")
        subparsers.required = True
        for command in manager.get_all_commands():
            subparser = subparsers.add_parser(
                command.name, parents=[config_parser], help=command.help
            )
            if command.has_help:
                subparser.description = command.help
            command.add_arguments(subparser)

        return parser.parse_args(args)

    def __init__(
        self,
        registry: ConfigRegistry,
        command: str,
        verbose: int,
        namespace: Namespace,
    ) -> None:
        """
        Parameters
        ----------
        registry : ConfigRegistry
            Config registry.
        command : str
            Command name to be executed.
        verbose : int
            Verbosity (0: warnings, 1: progress, 2: debug output).
        namespace : Namespace
            Parsed arguments.
        """
        self.__registry = registry
        self.__command = command
        self.__verbose = verbose
        self.__namespace = namespace

    def run(self) -> int:
        """
        Run CLI and execute the command.

        Returns
        -------
        exit_code : int
            Exit code of the command.
        """
        self.__setup_logging()

        values = self.__registry.values_of(self.__namespace)
        confirmed_values = self.__registry.get_confirmed_values(values)
        with Config.scoped(confirmed_values):
            runner = CommandRunner(self.__verbose > 0)
            return runner.run(self.__command, self.__namespace)

    def __setup_logging(self) -> None:
        if self.__verbose >= 2:
            level = logging.DEBUG
        elif self.__verbose == 1:
            level = logging.INFO
        else:
            level = logging.WARNING
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
        logging.getLogger("gifsolve").setLevel(level)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command and return its exit code.

    0 means success, 2 a budget-limited partial result and 1 invalid input.

    Parameters
    ----------
    argv : Optional[Sequence[str]], default None
        Arguments without the program name.

    Returns
    -------
    exit_code : int
        Process exit code.
    """
    try:
        cli = CLI.create(argv)
        return cli.run()
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
    except RuntimeError as e:
        message = str(e)
        cause = e.__cause__
        while cause is not None:
            message += f"\n  caused by: {cause}"
            cause = cause.__cause__
        print(f"error: {message}", file=sys.stderr)
        return exit_code_of(e)


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
