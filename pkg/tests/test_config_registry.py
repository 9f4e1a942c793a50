from argparse import ArgumentParser
from unittest import TestCase

from gifsolve.config import (
    AT_LEAST_ONE,
    POSITIVE,
    ConfigItem,
    ConfigRegistry,
    LowerBound,
)
from gifsolve.errors import InvalidInputError


def make_registry() -> ConfigRegistry:
    registry = ConfigRegistry()
    registry.add_item(ConfigItem("steps", int, 12, "Steps."))
    registry.add_item(ConfigItem("w_min", float, 1e-10, "Weight threshold."))
    return registry


class TestConfigRegistry(TestCase):
    def test_get_instance(self) -> None:
        registry = ConfigRegistry.get_instance()
        another = ConfigRegistry.get_instance()
        self.assertEqual(registry, another)

    def test_add_item(self) -> None:
        registry = make_registry()
        self.assertTrue(registry.has_item("steps"))
        self.assertFalse(registry.has_item("tol"))
        self.assertEqual(len(registry.items), 2)

        with self.assertRaises(RuntimeError):
            registry.add_item(ConfigItem("steps", int, 0, "Another."))

    def test_flag(self) -> None:
        self.assertEqual(ConfigItem("w_min", float, 0.0, "").flag, "--w-min")

    def test_add_arguments_and_values_of(self) -> None:
        registry = make_registry()
        parser = ArgumentParser()
        registry.add_arguments(parser)

        namespace = parser.parse_args(["--w-min", "1e-6"])
        self.assertEqual(registry.values_of(namespace), {"w_min": "1e-6"})
        self.assertIsNone(namespace.steps)

    def test_get_confirmed_values(self) -> None:
        registry = make_registry()

        confirmed = registry.get_confirmed_values({})
        self.assertEqual(confirmed, {"steps": 12, "w_min": 1e-10})

        confirmed = registry.get_confirmed_values({"steps": "3"})
        self.assertEqual(confirmed, {"steps": 3, "w_min": 1e-10})

    def test_get_confirmed_values_with_not_added_item(self) -> None:
        registry = make_registry()
        with self.assertRaises(RuntimeError):
            registry.get_confirmed_values({"tol": "0.1"})

    def test_get_confirmed_values_with_bad_value(self) -> None:
        registry = make_registry()
        with self.assertRaises(InvalidInputError) as cm:
            registry.get_confirmed_values({"steps": "many"})
        self.assertEqual(str(cm.exception), "Can't convert 'many' for --steps.")

    def test_bounds(self) -> None:
        registry = ConfigRegistry()
        registry.add_item(ConfigItem("tol", float, 1e-3, "Tol.", POSITIVE))
        registry.add_item(ConfigItem("K", int, 12, "Steps.", AT_LEAST_ONE))

        self.assertEqual(registry.get_confirmed_values({"K": "1"})["K"], 1)
        with self.assertRaises(InvalidInputError) as cm:
            registry.get_confirmed_values({"tol": "0"})
        self.assertEqual(str(cm.exception), "--tol must be > 0, got 0.")
        with self.assertRaises(InvalidInputError):
            registry.get_confirmed_values({"K": "0"})


class TestLowerBound(TestCase):
    def test_admits(self) -> None:
        self.assertFalse(POSITIVE.admits(0.0))
        self.assertTrue(POSITIVE.admits(1e-300))
        self.assertTrue(LowerBound(0.0, inclusive=True).admits(0.0))
        self.assertEqual(str(AT_LEAST_ONE), ">= 1")
