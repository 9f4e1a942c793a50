# Command manager

from typing import Optional

from gifsolve.command import Command


class CommandManager:
    """
    Command manager.
    """

    __instance: Optional["CommandManager"] = None

    @classmethod
    def get_instance(cls) -> "CommandManager":
        """
        Return the singleton instance of command manager.

        Returns
        -------
        manager : CommandManager
            The instance of command manager.
        """
        if cls.__instance is None:
            cls.__instance = cls()
        return cls.__instance

    def __init__(self) -> None:
        self.__commands: dict[str, Command] = {}

    def register(self, command: Command) -> None:
        """
        Register a command.

        Parameters
        ----------
        command : Command
            Command to be registered.

        Raises
        ------
        RuntimeError
            If a command with the same name has already been registered.
        """
        name = command.name
        if name in self.__commands:
            raise RuntimeError(f"Command {name} already exists.")
        self.__commands[name] = command

    def find(self, name: str) -> Optional[Command]:
        """
        Find a command with the specified name.

        Parameters
        ----------
        name : str
            Name of the command to be found.

        Returns
        -------
        command : Optional[Command]
            Found command.
            If not found, return None.
        """
        return self.__commands.get(name)

    def get_all_commands(self) -> list[Command]:
        """
        Return all registered commands in registration order.

        Returns
        -------
        commands : list[Command]
            List of all registered commands.
        """
        return list(self.__commands.values())
