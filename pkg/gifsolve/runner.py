# Command runner

import logging
from argparse import Namespace

from gifsolve.manager import CommandManager

logger = logging.getLogger(__name__)


class CommandRunner:
    """
    Command runner.
    """

    def __init__(self, verbose: bool = False) -> None:
        """
        Parameters
        ----------
        verbose : bool, default False
            Whether to display the running command name or not.
        """
        self.__manager = CommandManager.get_instance()
        self.__verbose = verbose

    def run(self, name: str, namespace: Namespace) -> int:
        """
        Execute the named command.

        Parameters
        ----------
        name : str
            Command name.
        namespace : Namespace
            Parsed arguments.

        Returns
        -------
        exit_code : int
            Exit code returned by the command.

        Raises
        ------
        RuntimeError
            If the command is not found.
            If command execution causes an error.
        """
        command = self.__manager.find(name)
        if command is None:
            raise RuntimeError(f"Command {name} is not found.")

        if self.__verbose:
            print(f"[Command] {command.name}")

        try:
            exit_code = command.run(namespace)
        except Exception as e:
            raise RuntimeError(f"Command {name} causes an error.") from e
        logger.debug("command %s finished with %d", name, exit_code)
        return exit_code
