from django.test import SimpleTestCase

from estimators.montecarlo import chunks, mc_expectation, mc_expectations, mc_probabilities, mc_probability
from estimators.schemes import IntervalScheme
from estimators.statistics import (
    PathFunction, crossing_statistic, fluctuation_statistic, initial_value, oscillates, sum_at_least,
    sup_at_least,
)
from moduli.calculus import crossing_bound, uniform_partition
from moduli.exceptions import InvalidParameterError
from processes.families import general_rs, multiplicative_supermartingale, sgd_quadratic

SEED = 20240917


class ProbabilityTests(SimpleTestCase):
    def setUp(self):
        self.family = multiplicative_supermartingale()

    def test_sure_and_null_events(self):
        sure = mc_probability(self.family, lambda trace: True, 20, 10, SEED)
        self.assertEqual((sure.point, sure.ci_high), (1.0, 1.0))
        null = mc_probability(self.family, lambda trace: False, 20, 10, SEED)
        self.assertEqual((null.point, null.ci_low), (0.0, 0.0))

    def test_ville_inequality(self):
        levels = (2, 4, 8)
        estimates = mc_probabilities(self.family, [sup_at_least(x) for x in levels], 2000, 1000, SEED)
        for x, estimate in zip(levels, estimates):
            with self.subTest(level=x):
                self.assertLessEqual(estimate.point, 1 / x + estimate.halfwidth)
        # nested events, same paths
        self.assertGreaterEqual(estimates[0].point, estimates[1].point)
        self.assertGreaterEqual(estimates[1].point, estimates[2].point)

    def test_vectorised_and_plain_events_agree(self):
        event = sup_at_least(3)
        plain = PathFunction(fn=event.fn)
        vectorised, unvectorised = mc_probabilities(self.family, [event, plain], 300, 200, SEED)
        self.assertEqual(vectorised, unvectorised)

    def test_rejects_zero_paths(self):
        with self.assertRaises(InvalidParameterError):
            mc_probability(self.family, lambda trace: True, 0, 10, SEED)

    def test_rejects_missing_track(self):
        with self.assertRaises(InvalidParameterError):
            mc_probability(self.family, sum_at_least(1.0), 10, 10, SEED)


class ExpectationTests(SimpleTestCase):
    def test_constant_statistic(self):
        estimate = mc_expectation(sgd_quadratic(), lambda trace: 7.0, 30, 5, SEED)
        self.assertEqual((estimate.point, estimate.ci_low, estimate.ci_high), (7.0, 7.0, 7.0))

    def test_initial_value(self):
        estimate = mc_expectation(multiplicative_supermartingale(u0=1.0), initial_value(), 50, 5, SEED)
        self.assertEqual(estimate.point, 1.0)
        self.assertEqual(estimate.halfwidth, 0.0)

    def test_crossing_inequality(self):
        family = multiplicative_supermartingale()
        intervals = uniform_partition(4.0, 8)
        bound = crossing_bound(4.0, 8, family.initial_mean)
        self.assertEqual(bound, 5.0)
        estimates = mc_expectations(family, [crossing_statistic(a, b) for a, b in intervals], 2000, 1000, SEED)
        for (a, b), estimate in zip(intervals, estimates):
            with self.subTest(interval=(a, b)):
                self.assertLessEqual(estimate.point + estimate.halfwidth, bound)

    def test_hoeffding_support(self):
        estimate = mc_expectation(
            multiplicative_supermartingale(), PathFunction(fn=lambda trace: float(trace.x[-1] < 1)),
            200, 20, SEED, support=(0.0, 1.0),
        )
        self.assertEqual(estimate.method, "hoeffding")


class ReproducibilityTests(SimpleTestCase):
    def test_chunks_cover_paths_in_order(self):
        self.assertEqual([list(part) for part in chunks(7, 3)], [[0, 1, 2], [3, 4, 5], [6]])
        with self.assertRaises(InvalidParameterError):
            chunks(7, 0)

    def test_identical_across_workers_and_chunks(self):
        families = [
            multiplicative_supermartingale(),
            sgd_quadratic(),
            general_rs(a=0.0, cbar=[0.5, 0.25, 0.125], noise_sd=0.5),
        ]
        for family in families:
            statistics = [fluctuation_statistic(0.25), crossing_statistic(0.25, 0.75), initial_value()]
            events = [oscillates(window, 0.25) for window in IntervalScheme.dyadic(256)]
            baseline = (
                mc_expectations(family, statistics, 300, 256, SEED, workers=1),
                mc_probabilities(family, events, 300, 256, SEED, workers=1),
            )
            for workers, chunk_size in ((4, None), (8, None), (4, 7), (1, 300)):
                with self.subTest(family=family.kind, workers=workers, chunk_size=chunk_size):
                    self.assertEqual(
                        (
                            mc_expectations(family, statistics, 300, 256, SEED, workers=workers, chunk_size=chunk_size),
                            mc_probabilities(family, events, 300, 256, SEED, workers=workers, chunk_size=chunk_size),
                        ),
                        baseline,
                    )

    def test_different_seeds_differ(self):
        family = sgd_quadratic()
        first = mc_expectation(family, fluctuation_statistic(0.1), 100, 100, 1)
        second = mc_expectation(family, fluctuation_statistic(0.1), 100, 100, 2)
        self.assertNotEqual(first, second)
