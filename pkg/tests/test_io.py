from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np
import numpy.testing as npt
from PIL import Image

from gifsolve.errors import InvalidInputError
from gifsolve.io import (
    INNER_HEADER,
    LEDGER_HEADER,
    atomic_write_text,
    pointset_csv,
    read_ledger_csv,
    read_measure_csv,
    read_pointset_csv,
    render_pointset,
    write_ledger_csv,
    write_measure_csv,
    write_pgm,
    write_pointset_csv,
    write_reports_csv,
)
from gifsolve.ledger import ConvergenceReport, OstrowskiLedger
from gifsolve.measure import DiscreteMeasure
from gifsolve.metric import PointSet


class TestAtomicWrite(TestCase):
    def test_replaces_file(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "sub" / "out.txt"
            atomic_write_text(path, "first")
            atomic_write_text(path, "second")
            self.assertEqual(path.read_text(), "second")
            self.assertEqual([p.name for p in path.parent.iterdir()], ["out.txt"])


class TestPointSetCsv(TestCase):
    def test_format(self) -> None:
        text = pointset_csv(PointSet([[0.1, 1.0], [0.0, 2.5]]))
        self.assertEqual(text, "0.0,2.5\n0.1,1.0\n")

    def test_read_back(self) -> None:
        a = PointSet(np.random.default_rng(1).uniform(size=(50, 2)))
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "a.csv"
            write_pointset_csv(path, a)
            self.assertEqual(read_pointset_csv(path), a)

    def test_invalid_files(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "a.csv"
            for text in ["0.0,1.0\n2.0\n", "0.0,x\n", ""]:
                path.write_text(text)
                with self.assertRaises(InvalidInputError, msg=text):
                    read_pointset_csv(path)
            with self.assertRaises(InvalidInputError):
                read_pointset_csv(Path(tmpdir) / "missing.csv")


class TestMeasureCsv(TestCase):
    def test_read_back(self) -> None:
        mu = DiscreteMeasure([[0.0, 1.0], [0.5, 0.5]], [0.25, 0.75])
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "mu.csv"
            write_measure_csv(path, mu)
            self.assertEqual(path.read_text(), "0.0,1.0,0.25\n0.5,0.5,0.75\n")
            self.assertEqual(read_measure_csv(path), mu)

    def test_weights_must_be_normalized(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "mu.csv"
            path.write_text("0.0,0.5\n1.0,0.4\n")
            with self.assertRaises(InvalidInputError):
                read_measure_csv(path)
            path.write_text("0.5\n0.5\n")
            with self.assertRaises(InvalidInputError):
                read_measure_csv(path)


class TestLedgerCsv(TestCase):
    def test_read_back(self) -> None:
        ledger = OstrowskiLedger(0.5, 1.0)
        ledger.record(0.1, 0.2, 0.3)
        ledger.record(0.05, 0.1, 0.15)
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "ledger.csv"
            write_ledger_csv(path, ledger)
            self.assertTrue(path.read_text().startswith(",".join(LEDGER_HEADER) + "\n"))
            self.assertEqual(read_ledger_csv(path), ledger.rows())

    def test_header_is_required(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "ledger.csv"
            path.write_text("1,0.1,0.1,0.1,1.0\n")
            with self.assertRaises(InvalidInputError):
                read_ledger_csv(path)

    def test_empty_ledger_writes_header(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "ledger.csv"
            write_ledger_csv(path, OstrowskiLedger(0.5, 1.0))
            self.assertEqual(path.read_text(), ",".join(LEDGER_HEADER) + "\n")


class TestReportsCsv(TestCase):
    def test_one_block_per_step(self) -> None:
        first = OstrowskiLedger(0.5, 1.0)
        first.record(0.1)
        second = OstrowskiLedger(0.5, 0.5)
        second.record(0.1)
        second.record(0.01)
        reports = [
            ConvergenceReport(first, widths=(0.01,), displacements=(0.3,)),
            ConvergenceReport(second, widths=(0.0, 0.0), displacements=(0.2, 0.1)),
        ]
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "inner.csv"
            write_reports_csv(path, reports)
            lines = path.read_text().splitlines()
        self.assertEqual(lines[0], ",".join(INNER_HEADER))
        cells = [line.split(",") for line in lines[1:]]
        self.assertEqual([c[:2] for c in cells], [["1", "1"], ["2", "1"], ["2", "2"]])
        self.assertEqual([c[2] for c in cells], ["0.01", "0.0", "0.0"])
        self.assertEqual([c[5] for c in cells], ["0.3", "0.2", "0.1"])


class TestRender(TestCase):
    def test_plane(self) -> None:
        raster = render_pointset(PointSet([[0.0, 0.0], [1.0, 1.0]]), 3, 2)
        expected = np.zeros((2, 3), dtype=np.uint8)
        expected[1, 0] = 255
        expected[0, 2] = 255
        npt.assert_array_equal(raster, expected)

    def test_upright(self) -> None:
        # a point high on the y axis lands in the top row
        a = PointSet([[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]])
        raster = render_pointset(a, 3, 3)
        npt.assert_array_equal(raster[0], [0, 255, 0])
        npt.assert_array_equal(raster[2], [255, 0, 255])

    def test_line_is_a_strip(self) -> None:
        raster = render_pointset(PointSet([0.0, 1.0]), 5, 2)
        npt.assert_array_equal(raster[:, 0], [255, 255])
        npt.assert_array_equal(raster[:, 4], [255, 255])
        self.assertEqual(int(raster[:, 1:4].sum()), 0)

    def test_points_outside_bounds_are_dropped(self) -> None:
        raster = render_pointset(PointSet([0.5, 3.0]), 3, 1, bounds=([0.0], [1.0]))
        npt.assert_array_equal(raster, [[0, 255, 0]])

    def test_invalid(self) -> None:
        with self.assertRaises(InvalidInputError):
            render_pointset(PointSet([[0.0, 0.0, 0.0]]), 3, 3)
        with self.assertRaises(InvalidInputError):
            render_pointset(PointSet([0.0]), 0, 3)

    def test_write_pgm(self) -> None:
        raster = np.array([[0, 255, 0], [255, 0, 255]], dtype=np.uint8)
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "a.pgm"
            write_pgm(path, raster)
            expected = b"P5\n3 2\n255\n\x00\xff\x00\xff\x00\xff"
            self.assertEqual(path.read_bytes(), expected)
            with self.assertRaises(InvalidInputError):
                write_pgm(path, raster.astype(np.float64))

    def test_pgm_opens_as_grayscale(self) -> None:
        raster = render_pointset(PointSet([[0.0, 0.0], [1.0, 1.0]]), 4, 3)
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "a.pgm"
            write_pgm(path, raster)
            with Image.open(path) as image:
                self.assertEqual(image.mode, "L")
                self.assertEqual(image.size, (4, 3))
                npt.assert_array_equal(np.asarray(image), raster)
