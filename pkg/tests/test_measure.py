import math
from unittest import TestCase

import numpy as np
import numpy.testing as npt

from gifsolve.budget import Budget
from gifsolve.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidInputError,
)
from gifsolve.gifs import GifsSystem, MultiAffineMap
from gifsolve.measure import (
    DiscreteMeasure,
    GifsP,
    JointResult,
    d_max,
    hutchinson_measure,
    induce_ifsp,
    joint_contraction_factor,
    joint_evaluation,
    joint_iterate,
    markov_step_gifsp,
    markov_step_induced,
    merge_light_atoms,
    merge_to_grid,
    mk_distance,
    project_onto,
)
from gifsolve.metric import PointSet, hausdorff
from gifsolve.schedule import Schedule

from tests.systems import (
    halves_p,
    quarter_pair,
    quarter_pair_p,
    random_system,
    sierpinski,
)


def random_measure(rng: np.random.Generator, n: int, dim: int) -> DiscreteMeasure:
    weights = rng.uniform(0.1, 1.0, size=n)
    weights /= weights.sum()
    weights[-1] = 1.0 - weights[:-1].sum()
    return DiscreteMeasure(rng.uniform(-1.0, 1.0, size=(n, dim)), weights)


class TestDiscreteMeasure(TestCase):
    def test_duplicates_are_merged(self) -> None:
        mu = DiscreteMeasure([1.0, 0.0, 0.0], [0.5, 0.25, 0.25])
        self.assertEqual(len(mu), 2)
        npt.assert_array_equal(mu.atoms[:, 0], [0.0, 1.0])
        npt.assert_array_equal(mu.weights, [0.5, 0.5])

    def test_invalid_weights(self) -> None:
        with self.assertRaises(InvalidInputError):
            DiscreteMeasure([0.0, 1.0], [0.5, 0.4])
        with self.assertRaises(InvalidInputError):
            DiscreteMeasure([0.0, 1.0], [1.0, 0.0])
        with self.assertRaises(InvalidInputError):
            DiscreteMeasure([0.0, 1.0], [1.0])

    def test_integrate_and_mean(self) -> None:
        mu = DiscreteMeasure.uniform([0.0, 1.0])
        self.assertEqual(mu.integrate(lambda x: x[:, 0] ** 2), 0.5)
        npt.assert_array_equal(mu.mean(), [0.5])
        self.assertEqual(mu.support(), PointSet([0.0, 1.0]))

    def test_dirac(self) -> None:
        mu = DiscreteMeasure.dirac([1.0, 2.0])
        self.assertEqual(mu.dim, 2)
        npt.assert_array_equal(mu.weights, [1.0])

    def test_read_only(self) -> None:
        mu = DiscreteMeasure.uniform([0.0, 1.0])
        with self.assertRaises(ValueError):
            mu.weights[0] = 1.0


class TestMerging(TestCase):
    def test_merge_light_atoms(self) -> None:
        atoms, weights, cost = merge_light_atoms(
            np.array([[0.0], [1.0], [1.1]]), np.array([0.5, 0.49, 0.01]), 0.05
        )
        npt.assert_array_equal(atoms, [[0.0], [1.0]])
        npt.assert_allclose(weights, [0.5, 0.5])
        self.assertAlmostEqual(cost, 0.001)

    def test_heaviest_survives_when_all_light(self) -> None:
        atoms, weights, _ = merge_light_atoms(
            np.array([[0.0], [1.0], [2.0]]), np.array([0.3, 0.3, 0.4]), 1.0
        )
        npt.assert_array_equal(atoms, [[2.0]])
        self.assertAlmostEqual(float(weights[0]), 1.0)

    def test_merge_to_grid(self) -> None:
        mu = DiscreteMeasure.uniform([0.01, 0.02, 0.26])
        merged, cost = merge_to_grid(mu, 0.25)
        npt.assert_allclose(merged.atoms[:, 0], [0.125, 0.375])
        npt.assert_allclose(merged.weights, [2.0 / 3.0, 1.0 / 3.0])
        self.assertAlmostEqual(cost, (0.115 + 0.105 + 0.115) / 3.0)
        self.assertLessEqual(mk_distance(mu, merged), cost + 1e-15)

    def test_project_onto(self) -> None:
        mu = DiscreteMeasure.uniform([0.1, 0.9])
        projected, cost = project_onto(mu, PointSet([0.0, 1.0]))
        npt.assert_array_equal(projected.atoms[:, 0], [0.0, 1.0])
        self.assertAlmostEqual(cost, 0.1)
        with self.assertRaises(DimensionMismatchError):
            project_onto(mu, PointSet([[0.0, 0.0]]))


class TestMkDistance(TestCase):
    def test_point_masses(self) -> None:
        self.assertEqual(
            mk_distance(DiscreteMeasure.dirac([0.0]), DiscreteMeasure.dirac([1.0])), 1.0
        )

    def test_identical_measures(self) -> None:
        mu = DiscreteMeasure.uniform([0.0, 0.3, 1.0])
        self.assertEqual(mk_distance(mu, mu), 0.0)

    def test_half_half_against_point_mass(self) -> None:
        mu = DiscreteMeasure.uniform([0.0, 1.0])
        self.assertEqual(mk_distance(mu, DiscreteMeasure.dirac([0.0])), 0.5)

    def test_one_dimensional_matches_cdf_formula(self) -> None:
        rng = np.random.default_rng(2)
        for _ in range(10):
            mu = random_measure(rng, 7, 1)
            nu = random_measure(rng, 5, 1)
            grid = np.union1d(mu.atoms[:, 0], nu.atoms[:, 0])
            cdf_mu = np.array([mu.weights[mu.atoms[:, 0] <= x].sum() for x in grid])
            cdf_nu = np.array([nu.weights[nu.atoms[:, 0] <= x].sum() for x in grid])
            expected = float(np.sum(np.abs(cdf_mu - cdf_nu)[:-1] * np.diff(grid)))
            self.assertAlmostEqual(mk_distance(mu, nu), expected, places=10)
            self.assertAlmostEqual(
                mk_distance(mu, nu, method="network-simplex"), expected, places=10
            )

    def test_two_dimensional(self) -> None:
        mu = DiscreteMeasure.uniform([[0.0, 0.0], [1.0, 0.0]])
        nu = DiscreteMeasure.uniform([[0.0, 1.0], [1.0, 1.0]])
        self.assertAlmostEqual(mk_distance(mu, nu), 1.0)

    def test_symmetric(self) -> None:
        rng = np.random.default_rng(8)
        mu = random_measure(rng, 6, 2)
        nu = random_measure(rng, 4, 2)
        self.assertAlmostEqual(mk_distance(mu, nu), mk_distance(nu, mu))

    def test_limits(self) -> None:
        mu = DiscreteMeasure.uniform([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        with self.assertRaises(BudgetExceededError):
            mk_distance(mu, mu, max_atoms=2)
        with self.assertRaises(InvalidInputError):
            mk_distance(mu, mu, method="sinkhorn")
        with self.assertRaises(DimensionMismatchError):
            mk_distance(mu, DiscreteMeasure.dirac([0.0]))

    def test_bounds_every_lipschitz_test_function(self) -> None:
        rng = np.random.default_rng(21)
        for _ in range(5):
            mu = random_measure(rng, 2, 2)
            nu = random_measure(rng, 2, 2)
            dist = mk_distance(mu, nu)
            for _ in range(100):
                # max of affine pieces with slopes in the unit ball
                slopes = rng.normal(size=(4, 2))
                slopes /= np.maximum(np.linalg.norm(slopes, axis=1), 1.0)[:, None]
                slopes *= rng.uniform(0.0, 1.0, size=(4, 1))
                heights = rng.normal(size=4)

                def f(x: np.ndarray) -> np.ndarray:
                    return np.max(x @ slopes.T + heights, axis=1)

                gap = abs(mu.integrate(f) - nu.integrate(f))
                self.assertLessEqual(gap, dist + 1e-9)


class TestGifsP(TestCase):
    def test_uniform(self) -> None:
        self.assertEqual(GifsP.uniform(quarter_pair()).probs, (0.5, 0.5))

    def test_invalid(self) -> None:
        with self.assertRaises(InvalidInputError):
            GifsP(quarter_pair(), (0.5,))
        with self.assertRaises(InvalidInputError):
            GifsP(quarter_pair(), (1.0, 0.0))
        with self.assertRaises(InvalidInputError):
            GifsP(quarter_pair(), (0.5, 0.4))


class TestMarkovStep(TestCase):
    def test_point_masses(self) -> None:
        dirac = DiscreteMeasure.dirac([0.0])
        image = markov_step_gifsp(quarter_pair_p(), [dirac, dirac])
        self.assertEqual(image, DiscreteMeasure.uniform([0.0, 0.5]))

    def test_mass_is_preserved(self) -> None:
        rng = np.random.default_rng(6)
        mu = random_measure(rng, 20, 1)
        image = markov_step_gifsp(quarter_pair_p(), [mu, mu], w_min=1e-2)
        self.assertAlmostEqual(float(image.weights.sum()), 1.0, places=12)
        self.assertTrue(np.all(image.weights >= 1e-2))

    def test_induced_system_gives_the_same_image(self) -> None:
        rng = np.random.default_rng(12)
        for _ in range(30):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(1, 4))
            dim = int(rng.integers(1, 3))
            probs = rng.uniform(0.1, 1.0, size=n)
            probs /= probs.sum()
            probs[-1] = 1.0 - probs[:-1].sum()
            p = GifsP(random_system(rng, n, m, dim), tuple(float(q) for q in probs))
            mu = random_measure(rng, int(rng.integers(1, 6)), dim)
            nu = random_measure(rng, int(rng.integers(1, 5)), dim)
            self.assertEqual(
                markov_step_induced(p, nu, mu),
                markov_step_gifsp(p, [mu] + [nu] * (m - 1)),
            )

    def test_budget(self) -> None:
        mu = DiscreteMeasure.uniform([0.0, 1.0, 2.0])
        with self.assertRaises(BudgetExceededError):
            markov_step_gifsp(quarter_pair_p(), [mu, mu], budget=Budget(atoms=10))
        with self.assertRaises(InvalidInputError):
            markov_step_gifsp(quarter_pair_p(), [mu])

    def test_induce_ifsp(self) -> None:
        nu = DiscreteMeasure([0.0, 1.0], [0.25, 0.75])
        induced = induce_ifsp(quarter_pair_p(), nu)
        self.assertEqual(len(induced.ifs), 4)
        self.assertAlmostEqual(float(induced.probs.sum()), 1.0)
        self.assertEqual(induced.lam, 0.25)
        with self.assertRaises(BudgetExceededError):
            induce_ifsp(quarter_pair_p(), nu, Budget(maps=3))

    def test_contractive_on_average(self) -> None:
        rng = np.random.default_rng(17)
        for _ in range(10):
            m = int(rng.integers(1, 3))
            dim = int(rng.integers(1, 3))
            p = GifsP.uniform(random_system(rng, 3, m, dim))
            b_measure = random_measure(rng, 2, dim)
            lam = induce_ifsp(p, b_measure).lam
            mu = random_measure(rng, 3, dim)
            nu = random_measure(rng, 4, dim)
            images = [
                markov_step_induced(p, b_measure, x, w_min=0.0) for x in (mu, nu)
            ]
            self.assertLessEqual(
                mk_distance(*images), lam * mk_distance(mu, nu) + 1e-9
            )


class TestHutchinsonMeasure(TestCase):
    def test_uniform_measure_on_unit_interval(self) -> None:
        tol = 1e-3
        result, report = hutchinson_measure(
            halves_p(), DiscreteMeasure.dirac([0.0]), tol=tol
        )
        self.assertTrue(report.converged)
        self.assertLessEqual(report.certified_bound, tol)
        cells = 4096
        lebesgue = DiscreteMeasure.uniform((np.arange(cells) + 0.5) / cells)
        self.assertLessEqual(mk_distance(result, lebesgue), tol + 1.0 / (4 * cells))

    def test_mean_of_invariant_measure(self) -> None:
        # psi_1(x) = x/4, psi_2(x) = x/4 + 1/2 with equal weights: mean 1/3
        tol = 1e-3
        result, _ = hutchinson_measure(
            quarter_pair_p(), DiscreteMeasure.dirac([0.0]), tol=tol
        )
        self.assertLessEqual(abs(float(result.mean()[0]) - 1.0 / 3.0), tol)

    def test_iteration_cap(self) -> None:
        with self.assertLogs("gifsolve.measure", level="WARNING"):
            _, report = hutchinson_measure(
                halves_p(),
                DiscreteMeasure.dirac([0.0]),
                tol=1e-6,
                budget=Budget(iterations=3),
            )
        self.assertTrue(report.budget_exceeded)
        self.assertFalse(report.converged)
        self.assertEqual(report.steps, 3)

    def test_invalid_tol(self) -> None:
        with self.assertRaises(InvalidInputError):
            hutchinson_measure(halves_p(), DiscreteMeasure.dirac([0.0]), tol=0.0)

    def test_invariant_measure_depends_lipschitz_on_nu(self) -> None:
        # a_1 = a_2 = 1/4 for both maps: d(mu_nu, mu_nu') <= (1/3) d(nu, nu')
        tol = 1e-3
        rng = np.random.default_rng(19)
        for _ in range(5):
            nu = DiscreteMeasure.uniform(rng.uniform(0.0, 1.0, size=3))
            other = DiscreteMeasure.uniform(rng.uniform(0.0, 1.0, size=3))
            mu_nu, _ = hutchinson_measure(quarter_pair_p(), nu, tol=tol)
            mu_other, _ = hutchinson_measure(quarter_pair_p(), other, tol=tol)
            self.assertLessEqual(
                mk_distance(mu_nu, mu_other), mk_distance(nu, other) / 3.0 + 2 * tol
            )

    def test_large_initial_measure(self) -> None:
        # transport between 2-D measures this large is not solved exactly
        rng = np.random.default_rng(23)
        mu0 = DiscreteMeasure.uniform(rng.uniform(size=(2500, 2)))
        with self.assertLogs("gifsolve.measure", level="WARNING"):
            _, report = hutchinson_measure(
                GifsP.uniform(sierpinski()),
                DiscreteMeasure.dirac([0.0, 0.0]),
                mu0=mu0,
                delta=0.25,
                budget=Budget(iterations=1),
            )
        self.assertEqual(report.steps, 1)
        self.assertTrue(math.isnan(report.displacements[0]))


class TestJoint(TestCase):
    def test_d_max(self) -> None:
        first = (PointSet([0.0, 2.0]), DiscreteMeasure.dirac([0.0]))
        second = (PointSet([0.0]), DiscreteMeasure.dirac([1.0]))
        self.assertEqual(d_max(first, second), 2.0)

    def test_support_must_lie_in_b(self) -> None:
        with self.assertRaises(InvalidInputError):
            joint_evaluation(
                quarter_pair_p(),
                PointSet([0.0, 1.0]),
                DiscreteMeasure.dirac([0.5]),
                1e-2,
            )

    def test_joint_evaluation(self) -> None:
        sigma = 1e-2
        result = joint_evaluation(
            quarter_pair_p(), PointSet([0.0]), DiscreteMeasure.dirac([0.0]), sigma
        )
        self.assertLessEqual(result.attractor_report.certified_bound, sigma)
        self.assertLessEqual(result.measure_report.certified_bound, sigma)
        support = result.measure.support()
        lower, upper = support.bounding_box()
        self.assertGreaterEqual(float(lower[0]), -2 * sigma)
        self.assertLessEqual(float(upper[0]), 2.0 / 3.0 + 2 * sigma)

    def test_contraction_factor(self) -> None:
        self.assertEqual(joint_contraction_factor(quarter_pair()), 0.5)
        unbalanced = GifsSystem(
            [
                MultiAffineMap([[[0.9]], [[0.05]]], [0.0]),
                MultiAffineMap([[[0.05]], [[0.9]]], [1.0]),
            ]
        )
        with self.assertRaises(InvalidInputError):
            joint_contraction_factor(unbalanced)

    def test_joint_iterate(self) -> None:
        geometric = Schedule.parse("geometric:0.5")
        result = joint_iterate(
            quarter_pair_p(),
            PointSet([0.0]),
            DiscreteMeasure.dirac([0.0]),
            geometric,
            geometric,
            steps=6,
        )
        self.assertEqual(result.ledger.steps, 6)
        self.assertEqual(len(result.history), 7)
        bound = result.ledger.final_bound
        unit = PointSet(np.linspace(0.0, 1.0, 1001))
        self.assertLessEqual(hausdorff(result.attractor, unit), bound + 5e-4)
        # the invariant measure is symmetric about 1/2
        self.assertLessEqual(abs(float(result.measure.mean()[0]) - 0.5), bound)

    def test_joint_iterate_keeps_evaluations(self) -> None:
        evaluations: list[JointResult] = []
        result = joint_iterate(
            quarter_pair_p(),
            PointSet([0.0]),
            DiscreteMeasure.dirac([0.0]),
            steps=3,
            evaluations=evaluations,
        )
        self.assertEqual(len(evaluations), result.ledger.steps)
        self.assertEqual(evaluations[-1].measure, result.measure)

    def test_joint_iterate_budget_on_first_step(self) -> None:
        start = (PointSet([0.0]), DiscreteMeasure.dirac([0.0]))
        with self.assertRaises(BudgetExceededError) as cm:
            joint_iterate(quarter_pair_p(), *start, budget=Budget(points=1))
        self.assertEqual(cm.exception.partial, start)

    def test_joint_iterate_invalid_steps(self) -> None:
        with self.assertRaises(InvalidInputError):
            joint_iterate(
                quarter_pair_p(), PointSet([0.0]), DiscreteMeasure.dirac([0.0]), steps=0
            )
