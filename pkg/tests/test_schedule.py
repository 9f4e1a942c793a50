from unittest import TestCase

from gifsolve.errors import InvalidInputError
from gifsolve.schedule import HARMONIC, Schedule


class TestSchedule(TestCase):
    def test_harmonic(self) -> None:
        self.assertEqual(HARMONIC(1), 1.0)
        self.assertEqual(HARMONIC(4), 0.25)
        self.assertEqual(Schedule.parse("1/k"), HARMONIC)
        self.assertEqual(Schedule.parse("0.5/k")(2), 0.25)

    def test_geometric(self) -> None:
        schedule = Schedule.parse("geometric:0.5")
        self.assertEqual(schedule(1), 0.5)
        self.assertEqual(schedule(3), 0.125)
        self.assertEqual(Schedule.parse("geometric:0.5:2")(1), 1.0)

    def test_constant(self) -> None:
        schedule = Schedule.parse("const:0.01")
        self.assertEqual(schedule(1), 0.01)
        self.assertEqual(schedule(100), 0.01)

    def test_str_round_trip(self) -> None:
        for text in ["1/k", "geometric:0.55", "const:0.25"]:
            schedule = Schedule.parse(text)
            self.assertEqual(Schedule.parse(str(schedule)), schedule)

    def test_str(self) -> None:
        self.assertEqual(str(HARMONIC), "1/k")
        self.assertEqual(str(Schedule.parse("geometric:0.5")), "geometric:0.5")
        self.assertEqual(str(Schedule.parse("geometric:0.5:2")), "geometric:0.5:2")
        self.assertEqual(str(Schedule.parse("const:1e-3")), "const:0.001")

    def test_invalid(self) -> None:
        for text in ["", "k", "geometric:1.5", "geometric:x", "const:-1", "linear:2"]:
            with self.assertRaises(InvalidInputError, msg=text):
                Schedule.parse(text)
        for text in [
            "nan/k",
            "inf/k",
            "const:inf",
            "geometric:nan",
            "geometric:0.5:inf",
        ]:
            with self.assertRaises(InvalidInputError, msg=text):
                Schedule.parse(text)
        with self.assertRaises(InvalidInputError):
            Schedule("geometric", ratio=1.0)
        with self.assertRaises(InvalidInputError):
            HARMONIC(0)
