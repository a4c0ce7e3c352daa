from django.conf import settings
from django.test import SimpleTestCase

from moduli.bounds import check_accuracy, check_confidence
from moduli.calculus import (
    PRODUCT, SUM,
    boundedness_from_direct_rate, combine_boundedness, combine_learnable,
    crossing_bound, crossing_partition, crossing_partition_bound,
    learnable_from_boundedness, learnable_from_fluctuations, monotone_learnable,
    uniform_partition, ville_boundedness,
)
from moduli.exceptions import InvalidParameterError
from moduli.leaves import (
    constant_boundedness, constant_rate, log2_inverse_rate, power_boundedness, power_rate,
)

ALMOST_ONE = 1 - 2 ** -53


class ValidationTests(SimpleTestCase):
    def test_confidence_and_accuracy_are_open_unit_intervals(self):
        for bad in (0, 0.0, 1, 1.0, -0.5, 2.0, "0.5", None):
            with self.assertRaises(InvalidParameterError):
                check_confidence(bad)
            with self.assertRaises(InvalidParameterError):
                check_accuracy(bad)
        self.assertEqual(check_confidence(0.25), 0.25)

    def test_rate_rejects_arguments_outside_domain(self):
        phi = power_rate(1.0)
        with self.assertRaises(InvalidParameterError):
            phi(0.5, 0.0)
        with self.assertRaises(InvalidParameterError):
            phi(1.0, 0.5)


class MonotoneTests(SimpleTestCase):
    def test_monotone_learnable(self):
        self.assertEqual(monotone_learnable(10)(0.5), 20)
        self.assertAlmostEqual(monotone_learnable(1)(ALMOST_ONE), 1.0)

    def test_monotone_learnable_rejects_nonpositive_bound(self):
        for K in (0, -1):
            with self.assertRaises(InvalidParameterError):
                monotone_learnable(K)

    def test_learnable_from_boundedness(self):
        phi = learnable_from_boundedness(constant_boundedness(5))
        self.assertAlmostEqual(phi(0.1, 0.2), 500)
        unit = learnable_from_boundedness(constant_boundedness(1))
        self.assertAlmostEqual(unit(ALMOST_ONE, ALMOST_ONE), 2)
        self.assertEqual(unit(0.5, 0.5), 8)

    def test_boundedness_from_direct_rate(self):
        self.assertEqual(boundedness_from_direct_rate(constant_rate(10), 1, 0.5)(0.1), 10.5)
        self.assertEqual(boundedness_from_direct_rate(constant_rate(0), 1, 0.5)(0.1), 0.5)

    def test_direct_rate_of_dyadic_series_bounds_its_sum(self):
        # A_n = 2^(-n-1) sums to 1
        rho = boundedness_from_direct_rate(log2_inverse_rate(), 0.5, 0.25)
        self.assertEqual(rho(0.5), 1.25)
        self.assertGreaterEqual(rho(0.5), 1.0)

    def test_boundedness_from_direct_rate_rejects_nonpositive_term_bound(self):
        with self.assertRaises(InvalidParameterError):
            boundedness_from_direct_rate(constant_rate(1), 0, 0.5)


class CombineTests(SimpleTestCase):
    def test_sum_of_rates(self):
        phi = combine_learnable(SUM, power_rate(1.0), power_rate(2.0))
        self.assertAlmostEqual(phi(0.2, 0.5), 120)

    def test_product_of_rates(self):
        phi = combine_learnable(
            PRODUCT, power_rate(1.0), power_rate(1.0),
            rho=constant_boundedness(2), sigma=constant_boundedness(2),
        )
        self.assertEqual(phi(0.5, 0.5), 128)

    def test_product_with_unit_process_dominates_the_single_rate(self):
        phi = power_rate(1.0)
        product = combine_learnable(
            PRODUCT, phi, constant_rate(0),
            rho=power_boundedness(1.0), sigma=constant_boundedness(1),
        )
        for lam in settings.QRS_GRID:
            for eps in settings.QRS_GRID:
                self.assertGreaterEqual(product(lam, eps), phi(lam / 4, eps / 2))

    def test_product_requires_both_moduli(self):
        with self.assertRaises(InvalidParameterError):
            combine_learnable(PRODUCT, power_rate(1.0), power_rate(1.0), rho=constant_boundedness(1))

    def test_unknown_mode_rejected(self):
        with self.assertRaises(InvalidParameterError):
            combine_learnable("difference", power_rate(1.0), power_rate(1.0))
        with self.assertRaises(InvalidParameterError):
            combine_boundedness("difference", constant_boundedness(1), constant_boundedness(1))

    def test_combine_boundedness(self):
        rho, sigma = power_boundedness(1.0), power_boundedness(2.0)
        self.assertEqual(combine_boundedness(SUM, rho, sigma)(0.5), 12)
        self.assertEqual(combine_boundedness(PRODUCT, rho, sigma)(0.5), 32)
        unit = combine_boundedness(PRODUCT, constant_boundedness(1), constant_boundedness(1))
        for lam in settings.QRS_GRID:
            self.assertEqual(unit(lam), 1)

    def test_sum_of_rates_is_symmetric(self):
        phi, psi = power_rate(1.0), power_rate(3.0, 2.0)
        forward = combine_learnable(SUM, phi, psi)
        backward = combine_learnable(SUM, psi, phi)
        for lam in settings.QRS_GRID:
            for eps in settings.QRS_GRID:
                self.assertEqual(forward(lam, eps), backward(lam, eps))

    def test_product_of_moduli_is_symmetric(self):
        rho, sigma = power_boundedness(2.0), power_boundedness(1.0, 2.0)
        for lam in settings.QRS_GRID:
            self.assertEqual(
                combine_boundedness(PRODUCT, rho, sigma)(lam),
                combine_boundedness(PRODUCT, sigma, rho)(lam),
            )

    def test_compositions_are_nonincreasing_on_grid(self):
        rho, sigma = power_boundedness(2.0), constant_boundedness(3)
        phi, psi = power_rate(1.0), power_rate(2.0, 2.0)
        for mode in (SUM, PRODUCT):
            self.assertTrue(combine_boundedness(mode, rho, sigma).is_nonincreasing())
            self.assertTrue(combine_learnable(mode, phi, psi, rho=rho, sigma=sigma).is_nonincreasing())
        self.assertTrue(learnable_from_boundedness(rho).is_nonincreasing())
        self.assertTrue(monotone_learnable(3).is_nonincreasing())


class SupplementTests(SimpleTestCase):
    def test_ville_boundedness(self):
        rho = ville_boundedness(2)
        self.assertEqual(rho(0.25), 8)
        self.assertTrue(rho.floor)
        self.assertTrue(rho.satisfies_floor())

    def test_learnable_from_fluctuations_uses_the_nearest_smaller_accuracy(self):
        phi = learnable_from_fluctuations([[0.5, 1.0], [0.1, 4.0]])
        self.assertEqual(phi(0.5, 0.5), 2.0)
        self.assertEqual(phi(0.5, 0.3), 8.0)
        with self.assertRaises(InvalidParameterError):
            phi(0.5, 0.05)

    def test_uniform_partition_and_crossing_bound(self):
        intervals = uniform_partition(4.0, 8)
        self.assertEqual(len(intervals), 8)
        self.assertEqual(intervals[0], (0.0, 0.5))
        self.assertEqual(intervals[-1], (3.5, 4.0))
        self.assertEqual(crossing_bound(4.0, 8, 1.0), 5.0)

    def test_crossing_partition_bound_is_below_quadratic_bound(self):
        for K in (1.5, 2.0, 10.0):
            for lam in settings.QRS_GRID:
                for eps in settings.QRS_GRID:
                    self.assertLess(crossing_partition_bound(K, lam, eps), 100 * K ** 2 / (lam * eps ** 2))

    def test_crossing_partition_covers_twice_the_ville_level(self):
        intervals = crossing_partition(2.0, 0.5, 0.5)
        # p = 64 intervals of width 1/8 up to 2K/λ = 8, plus one on top
        self.assertEqual(len(intervals), 65)
        self.assertAlmostEqual(intervals[-2][1], 8.0)
