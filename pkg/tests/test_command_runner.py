from argparse import Namespace
from collections.abc import Generator
from contextlib import contextmanager, redirect_stdout
from io import StringIO
from unittest import TestCase
from unittest.mock import patch

from gifsolve.decorator import command
from gifsolve.errors import InvalidInputError
from gifsolve.manager import CommandManager
from gifsolve.runner import CommandRunner


# to reduce indent
@contextmanager
def setup() -> Generator[tuple[CommandManager, StringIO], None, None]:
    manager = CommandManager()
    with patch("gifsolve.manager.CommandManager.get_instance", return_value=manager):
        with StringIO() as stdout:
            with redirect_stdout(stdout):
                yield (manager, stdout)


class TestCommandRunner(TestCase):
    def test_run(self) -> None:
        with setup() as (_, stdout):

            @command("test")
            def procedure(namespace: Namespace) -> int:
                print(namespace.value)
                return 2

            runner = CommandRunner()
            self.assertEqual(runner.run("test", Namespace(value="hello")), 2)
            self.assertEqual(stdout.getvalue(), "hello\n")

    def test_run_with_verbose(self) -> None:
        with setup() as (_, stdout):

            @command("test")
            def procedure(namespace: Namespace) -> int:
                return 0

            runner = CommandRunner(verbose=True)
            runner.run("test", Namespace())
            self.assertEqual(stdout.getvalue(), "[Command] test\n")

    def test_run_not_found(self) -> None:
        with setup():
            runner = CommandRunner()
            with self.assertRaises(RuntimeError) as cm:
                runner.run("missing", Namespace())
            self.assertEqual(str(cm.exception), "Command missing is not found.")

    def test_run_with_error(self) -> None:
        with setup():

            @command("test")
            def procedure(namespace: Namespace) -> int:
                raise InvalidInputError("bad input")

            runner = CommandRunner()
            with self.assertRaises(RuntimeError) as cm:
                runner.run("test", Namespace())
            self.assertEqual(str(cm.exception), "Command test causes an error.")
            self.assertIsInstance(cm.exception.__cause__, InvalidInputError)
