# End-to-end checks at desk scale (run with GIFSOLVE_SLOW=1)

import os
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase, skipUnless

import numpy as np

from gifsolve.budget import Budget
from gifsolve.chaos import OrbitConfig, ergodic_average, random_orbit
from gifsolve.cli import run_command
from gifsolve.gifs import (
    approximate_attractor,
    evaluation_map,
    gifs_operator,
    induce_ifs,
)
from gifsolve.ifs import attractor, fractal_step
from gifsolve.measure import (
    DiscreteMeasure,
    d_max,
    joint_contraction_factor,
    joint_iterate,
    markov_step_gifsp,
    mk_distance,
)
from gifsolve.metric import PointSet, directed_distance, hausdorff
from gifsolve.schedule import Schedule

from tests.systems import (
    halves_ifs,
    halves_p,
    quarter_pair,
    quarter_pair_json,
    quarter_pair_p,
    random_system,
    sierpinski,
    sierpinski_ifs,
)

SLOW = os.environ.get("GIFSOLVE_SLOW") == "1"


def random_measure(rng: np.random.Generator, n: int, dim: int) -> DiscreteMeasure:
    weights = rng.uniform(0.05, 1.0, size=n)
    weights /= weights.sum()
    weights[-1] = 1.0 - weights[:-1].sum()
    return DiscreteMeasure(rng.uniform(-1.0, 1.0, size=(n, dim)), weights)


@skipUnless(SLOW, "set GIFSOLVE_SLOW=1 to run")
class TestAttractors(TestCase):
    def test_order_one_matches_classical_ifs(self) -> None:
        tol = 1e-3
        result, _ = approximate_attractor(
            sierpinski(),
            PointSet([[0.0, 0.0]]),
            sigma_schedule=Schedule.parse(f"const:{tol}"),
            steps=1,
        )
        reference, _ = attractor(sierpinski_ifs(), tol=tol)
        self.assertLessEqual(hausdorff(result, reference), 2 * tol)

    def test_known_attractor(self) -> None:
        grid = PointSet(np.linspace(0.0, 1.0, 1001))

        result, ledger = approximate_attractor(
            quarter_pair(), PointSet([0.0]), steps=12
        )
        self.assertLessEqual(hausdorff(result, grid), ledger.final_bound)

        geometric = Schedule.parse("geometric:0.55")
        result, ledger = approximate_attractor(
            quarter_pair(), PointSet([0.0]), geometric, geometric, steps=12
        )
        self.assertLessEqual(ledger.final_bound, 0.02)
        self.assertLessEqual(hausdorff(result, grid), ledger.final_bound)

    def test_evaluation_map_contraction(self) -> None:
        rng = np.random.default_rng(2024)
        sigma = 1e-4
        violations = 0
        for _ in range(5):
            system = random_system(rng, 2, 2, 1)
            for _ in range(20):
                b = PointSet(rng.uniform(-1.0, 1.0, size=(rng.integers(1, 21), 1)))
                c = PointSet(rng.uniform(-1.0, 1.0, size=(rng.integers(1, 21), 1)))
                ev_b, _ = evaluation_map(system, b, sigma)
                ev_c, _ = evaluation_map(system, c, sigma)
                limit = system.lip_fs * hausdorff(b, c) + 2 * sigma
                if hausdorff(ev_b, ev_c) > limit + 1e-12:
                    violations += 1
        self.assertEqual(violations, 0)

    def test_operator_identity(self) -> None:
        rng = np.random.default_rng(99)
        for _ in range(1000):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(1, 4))
            dim = int(rng.integers(1, 3))
            system = random_system(rng, n, m, dim)
            a = PointSet(rng.uniform(-1.0, 1.0, size=(rng.integers(1, 7), dim)))
            b = PointSet(rng.uniform(-1.0, 1.0, size=(rng.integers(1, 7), dim)))
            self.assertEqual(
                fractal_step(induce_ifs(system, b), a),
                gifs_operator(system, [a] + [b] * (m - 1)),
            )


@skipUnless(SLOW, "set GIFSOLVE_SLOW=1 to run")
class TestMeasures(TestCase):
    def test_mk_distance_on_the_line(self) -> None:
        rng = np.random.default_rng(31)
        for _ in range(500):
            mu = random_measure(rng, int(rng.integers(1, 51)), 1)
            nu = random_measure(rng, int(rng.integers(1, 51)), 1)
            grid = np.union1d(mu.atoms[:, 0], nu.atoms[:, 0])
            cdf_mu = np.array([mu.weights[mu.atoms[:, 0] <= x].sum() for x in grid])
            cdf_nu = np.array([nu.weights[nu.atoms[:, 0] <= x].sum() for x in grid])
            expected = float(np.sum(np.abs(cdf_mu - cdf_nu)[:-1] * np.diff(grid)))
            self.assertLessEqual(abs(mk_distance(mu, nu) - expected), 1e-9)

    def test_mk_metric_axioms(self) -> None:
        rng = np.random.default_rng(32)
        for _ in range(50):
            mu, nu, rho = (
                random_measure(rng, int(rng.integers(1, 20)), 2) for _ in range(3)
            )
            self.assertLessEqual(abs(mk_distance(mu, nu) - mk_distance(nu, mu)), 1e-9)
            self.assertLessEqual(
                mk_distance(mu, rho), mk_distance(mu, nu) + mk_distance(nu, rho) + 1e-9
            )
        self.assertEqual(
            mk_distance(DiscreteMeasure.dirac([0.0]), DiscreteMeasure.dirac([1.0])), 1.0
        )

    def test_markov_fixed_point_and_support(self) -> None:
        geometric = Schedule.parse("geometric:0.5")
        result = joint_iterate(
            quarter_pair_p(),
            PointSet([0.0]),
            DiscreteMeasure.dirac([0.0]),
            geometric,
            geometric,
            steps=10,
            budget=Budget(atoms=10**7),
        )
        mu = result.measure
        image = markov_step_gifsp(
            quarter_pair_p(), [mu, mu], budget=Budget(atoms=10**8)
        )
        self.assertLessEqual(mk_distance(image, mu), 1e-3)
        self.assertLessEqual(directed_distance(mu.support(), result.attractor), 1e-2)
        self.assertLessEqual(directed_distance(result.attractor, mu.support()), 5e-2)

    def test_joint_contraction(self) -> None:
        # Successive differences shrink by the joint factor up to the step errors.
        geometric = Schedule.parse("geometric:0.5")
        result = joint_iterate(
            quarter_pair_p(),
            PointSet([0.0]),
            DiscreteMeasure.dirac([0.0]),
            geometric,
            geometric,
            steps=8,
        )
        factor = joint_contraction_factor(quarter_pair())
        self.assertEqual(factor, 0.5)
        history = result.history
        eps = result.ledger.eps
        for k in range(1, len(history) - 1):
            previous = d_max(history[k], history[k - 1])
            current = d_max(history[k + 1], history[k])
            self.assertLessEqual(
                current, (factor + 0.05) * previous + eps[k] + eps[k - 1]
            )


@skipUnless(SLOW, "set GIFSOLVE_SLOW=1 to run")
class TestChaosGame(TestCase):
    def test_halves(self) -> None:
        cfg = OrbitConfig((0.0,), 12345, 100, 10**5)
        orbit = random_orbit(halves_p(), DiscreteMeasure.dirac([0.0]), cfg)
        reference, _ = attractor(halves_ifs(), tol=1e-3)
        self.assertLessEqual(hausdorff(PointSet(orbit), reference), 0.02)
        average = ergodic_average(orbit, "identity")
        self.assertGreaterEqual(average, 0.49)
        self.assertLessEqual(average, 0.51)


@skipUnless(SLOW, "set GIFSOLVE_SLOW=1 to run")
class TestDeterminism(TestCase):
    def run_twice(
        self, args: list[str], outputs: list[str], options: tuple[str, ...] = ()
    ) -> None:
        with TemporaryDirectory() as tmpdir:
            spec = Path(tmpdir) / "system.json"
            spec.write_text(quarter_pair_json())
            contents = []
            for name in ["first", "second"]:
                out_dir = Path(tmpdir) / name
                with redirect_stdout(StringIO()), redirect_stderr(StringIO()):
                    code = run_command(
                        [
                            *options,
                            args[0],
                            str(spec),
                            *args[1:],
                            "--out-dir",
                            str(out_dir),
                        ]
                    )
                self.assertEqual(code, 0)
                contents.append([(out_dir / o).read_bytes() for o in outputs])
            self.assertEqual(contents[0], contents[1])

    def test_attractor_evmap(self) -> None:
        self.run_twice(["attractor-evmap"], ["attractor.csv", "ledger.csv"])

    def test_measure(self) -> None:
        self.run_twice(
            ["measure", "--K", "5", "--beta-schedule", "geometric:0.5"],
            ["attractor.csv", "measure.csv", "ledger.csv"],
        )

    def test_chaos(self) -> None:
        self.run_twice(
            ["chaos", "--length", "10000", "--orbits", "3"],
            ["orbit_0.csv", "orbit_1.csv", "orbit_2.csv", "empirical.csv"],
            options=("-j", "2"),
        )
