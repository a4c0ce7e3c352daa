from django.test import SimpleTestCase

from estimators.schemes import IntervalScheme
from moduli.calculus import crossing_partition_bound, ville_boundedness
from moduli.counterfunctions import Counterfunction, ExtendedIndex
from moduli.exceptions import InvalidParameterError
from moduli.leaves import constant_boundedness, constant_liminf, constant_rate, identity_drift
from moduli.robbins_monro import (
    constant_step_solution_bound, liminf_modulus, liminf_transfer, metastable_bound,
)
from moduli.robbins_siegmund import (
    rs_bsum_boundedness, rs_learnable_closed, rs_learnable_pipeline, rs_x_boundedness,
    supermartingale_learnable,
)
from processes.families import deterministic_rs, general_rs, multiplicative_supermartingale, sgd_quadratic
from processes.schedules import StepSchedule
from verify.procedures import (
    verify_boundedness, verify_bsum, verify_compensator, verify_crossing_inequality, verify_learnable,
    verify_liminf, verify_metastable, verify_nonstochastic, verify_partition_sum, verify_solution_search,
)
from verify.reports import FAIL, INCONCLUSIVE, PASS

SEED = 4242


def decaying_sgd():
    """u ≡ 1/2 with noise 2⁻ⁿ: K = 2 and ρ = σ = 1"""
    return sgd_quadratic(x0=1.0, steps=0.5, noise_sd=1.0, noise_decay=0.5)


def rm_moduli(family, cap=None):
    """(Φ for V, Ψ for X) built from the family's certificates"""
    rho, sigma = family.rho(), family.sigma()
    Phi = liminf_modulus(rs_bsum_boundedness(family.K, rho, sigma), family.steps.rate_of_divergence(cap=cap))
    Psi = liminf_transfer(Phi, family.delta(), rs_x_boundedness(family.K, rho, sigma))
    return Phi, Psi


class BoundednessTests(SimpleTestCase):
    def test_constant_process_passes(self):
        report = verify_boundedness(general_rs(x0=0.5), constant_boundedness(1.0), 0.25, 200, 20, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.estimate.point, 0.0)
        self.assertEqual(report.details["level"], 1.0)

    def test_ville_modulus_for_the_martingale(self):
        family = multiplicative_supermartingale()
        report = verify_boundedness(family, ville_boundedness(family.K), 0.25, 2000, 1000, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertLess(report.estimate.point, 0.25)
        self.assertEqual(report.details["modulus"]["rule"], "ville_boundedness")

    def test_false_modulus_fails(self):
        report = verify_boundedness(general_rs(x0=1.0), constant_boundedness(0.5), 0.25, 200, 20, SEED)
        self.assertEqual(report.verdict, FAIL)
        self.assertTrue(report.failed)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(InvalidParameterError):
            verify_boundedness(general_rs(), constant_boundedness(1.0), 0.25, 10, 0, SEED)
        with self.assertRaises(InvalidParameterError):
            verify_boundedness(general_rs(), constant_boundedness(1.0), 1.0, 10, 10, SEED)
        with self.assertRaises(InvalidParameterError):
            verify_boundedness(general_rs(), constant_boundedness(1.0), 0.25, 10, 10, SEED, track="v")


class LearnableTests(SimpleTestCase):
    def test_constant_process_passes_at_the_first_window(self):
        report = verify_learnable(
            general_rs(x0=0.5), supermartingale_learnable(2.0), 0.25, 0.5, IntervalScheme.dyadic(64),
            200, 64, SEED,
        )
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.estimate.ci_high, 0.0)
        self.assertEqual(report.details["first_good_window"], 0)

    def test_martingale_against_every_scheme(self):
        family = multiplicative_supermartingale()
        phi = supermartingale_learnable(family.K)
        lam, eps, paths, horizon = 0.25, 0.5, 500, 1024
        schemes = (
            IntervalScheme.dyadic(horizon),
            IntervalScheme.sliding(128, horizon),
            IntervalScheme.greedy_pilot(family, eps, lam, paths, horizon, SEED + 1),
        )
        for scheme in schemes:
            with self.subTest(scheme=scheme.name):
                report = verify_learnable(family, phi, lam, eps, scheme, paths, horizon, SEED)
                self.assertEqual(report.verdict, PASS)
                self.assertLessEqual(report.estimate.ci_high, report.bound)
                self.assertEqual(report.details["scheme"]["name"], scheme.name)
                self.assertEqual(len(report.details["scheme"]["windows"]), len(report.details["windows"]))

    def test_composite_rate_for_sgd(self):
        family = sgd_quadratic()
        phi = rs_learnable_pipeline(family.K, family.rho(), family.sigma())
        report = verify_learnable(family, phi, 0.25, 0.5, IntervalScheme.dyadic(1024), 300, 1024, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(len(report.details["windows"]), 10)

    def test_zero_rate_fails_on_an_early_oscillation(self):
        # x₂ is 0 or ±1 with probability 1/2 each
        report = verify_learnable(
            sgd_quadratic(), constant_rate(0.0), 0.25, 0.1, IntervalScheme.sliding(2, 16), 500, 16, SEED,
        )
        self.assertEqual(report.verdict, FAIL)
        self.assertGreaterEqual(report.estimate.ci_low, 1.0)

    def test_scheme_must_fit_the_horizon(self):
        with self.assertRaises(InvalidParameterError):
            verify_learnable(
                general_rs(), constant_rate(1.0), 0.25, 0.5, IntervalScheme.explicit([(10, 20)]), 10, 15, SEED,
            )


class LiminfTests(SimpleTestCase):
    def test_noiseless_contraction(self):
        family = sgd_quadratic(steps=0.5, noise_sd=0.0)
        Phi, _ = rm_moduli(family)
        report = verify_liminf(family, Phi, 0.25, 0.25, 0, 200, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["window"], [0, 960])
        self.assertFalse(report.details["truncated"])
        self.assertEqual(report.repro["horizon"], 960)

    def test_transferred_modulus_for_x(self):
        family = decaying_sgd()
        _, Psi = rm_moduli(family)
        self.assertEqual(Psi(0.25, 0.25, 0), 1920)
        report = verify_liminf(family, Psi, 0.25, 0.25, 0, 500, SEED, track="x")
        self.assertEqual(report.verdict, PASS)

    def test_zero_window_fails(self):
        report = verify_liminf(sgd_quadratic(steps=0.5, noise_sd=0.0), constant_liminf(0), 0.25, 0.25, 0, 200, SEED, 10)
        self.assertEqual(report.verdict, FAIL)

    def test_truncated_window_never_fails(self):
        frozen = sgd_quadratic(steps=0.0, noise_sd=1.0)
        report = verify_liminf(frozen, constant_liminf(100), 0.25, 0.25, 0, 200, SEED, 10)
        self.assertEqual(report.verdict, INCONCLUSIVE)
        self.assertTrue(report.details["truncated"])
        self.assertEqual(report.estimate.point, 1.0)

    def test_start_past_horizon(self):
        report = verify_liminf(decaying_sgd(), constant_liminf(5), 0.25, 0.25, 50, 100, SEED, 10)
        self.assertEqual(report.verdict, INCONCLUSIVE)
        self.assertIsNone(report.estimate)

    def test_rate_of_divergence_past_its_cap(self):
        family = sgd_quadratic()
        _, Psi = rm_moduli(family, cap=10 ** 4)
        with self.assertLogs("verify.procedures", level="WARNING"):
            report = verify_liminf(family, Psi, 0.25, 0.25, 0, 100, SEED, track="x")
        self.assertEqual(report.verdict, INCONCLUSIVE)
        self.assertIsNone(report.estimate)


class MetastableTests(SimpleTestCase):
    def test_zero_process(self):
        report = verify_metastable(general_rs(x0=0.0), 10, 0.25, 0.5, Counterfunction.zero(), 200, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["scanned"], [[0, 0]])

    def test_metastable_bound_for_sgd(self):
        family = decaying_sgd()
        _, Psi = rm_moduli(family)
        phi = rs_learnable_closed(family.K, family.rho(), family.sigma())
        bound = metastable_bound(0.5, 0.5, Counterfunction.identity(), phi, Psi)
        self.assertTrue(bound.saturated)
        report = verify_metastable(family, bound, 0.5, 0.5, Counterfunction.identity(), 300, SEED, horizon=4000)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["window"], [1920, 3840])
        self.assertFalse(report.details["exhausted"])

    def test_saturated_bound_is_never_refuted(self):
        stuck = general_rs(x0=1.0)
        g = Counterfunction.affine(1, 1)
        report = verify_metastable(stuck, ExtendedIndex.saturated_at(2 ** 48), 0.25, 0.5, g, 100, SEED, horizon=64)
        self.assertEqual(report.verdict, INCONCLUSIVE)
        self.assertTrue(report.details["saturated"])

        report = verify_metastable(stuck, 10, 0.25, 0.5, g, 100, SEED)
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.details["scanned"], [[0, 1], [1, 3], [3, 7], [7, 15]])
        self.assertEqual(report.repro["horizon"], 31)

    def test_counterfunction_by_name(self):
        report = verify_metastable(general_rs(x0=0.0), 3, 0.25, 0.5, "constant:2", 50, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.repro["parameters"]["g"], "constant:2")

    def test_oscillation_windows(self):
        stuck = general_rs(x0=1.0)
        g = Counterfunction.affine(1, 1)
        report = verify_metastable(stuck, 10, 0.25, 0.5, g, 100, SEED, oscillation=True)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["window"], [0, 1])
        self.assertTrue(report.repro["parameters"]["oscillation"])

    def test_oscillation_windows_for_the_martingale(self):
        family = multiplicative_supermartingale()
        report = verify_metastable(
            family, ExtendedIndex.saturated_at(2 ** 48), 0.25, 0.5, Counterfunction.affine(1, 1), 300, SEED,
            horizon=1024, oscillation=True,
        )
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["scanned"][-1], [511, 1023])


class CrossingInequalityTests(SimpleTestCase):
    def test_martingale_partition(self):
        report = verify_crossing_inequality(multiplicative_supermartingale(), 4.0, 8, 2000, 1000, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.bound, 5.0)
        self.assertEqual(len(report.details["intervals"]), 8)

    def test_rejects_bad_partition_and_family(self):
        with self.assertRaises(InvalidParameterError):
            verify_crossing_inequality(multiplicative_supermartingale(), 4.0, 0, 10, 10, SEED)
        with self.assertRaises(InvalidParameterError):
            verify_crossing_inequality(sgd_quadratic(), 4.0, 8, 10, 10, SEED)


class PartitionSumTests(SimpleTestCase):
    def test_martingale_passes(self):
        family = multiplicative_supermartingale()
        report = verify_partition_sum(family, family.K, 0.5, 0.5, IntervalScheme.dyadic(1024), 500, 1024, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.bound, crossing_partition_bound(2, 0.5, 0.5))
        self.assertEqual(report.bound, 2145)
        self.assertEqual(report.details["p"], 64)
        self.assertEqual(report.details["width"], 0.125)
        self.assertEqual(report.estimate.method, "hoeffding")

    def test_zero_bound_fails(self):
        # the first window [0; 1] always moves by exactly 1/2
        family = multiplicative_supermartingale()
        report = verify_partition_sum(
            family, family.K, 0.5, 0.5, IntervalScheme.sliding(1, 8), 500, 8, SEED, bound=0.0,
        )
        self.assertEqual(report.verdict, FAIL)
        self.assertGreaterEqual(report.estimate.point, 1.0)

    def test_requires_a_supermartingale(self):
        with self.assertRaises(InvalidParameterError):
            verify_partition_sum(sgd_quadratic(), 2.0, 0.5, 0.5, IntervalScheme.dyadic(16), 10, 16, SEED)


class BSumTests(SimpleTestCase):
    def test_certified_modulus_passes(self):
        family = decaying_sgd()
        chi = rs_bsum_boundedness(family.K, family.rho(), family.sigma())
        report = verify_bsum(family, chi, 0.25, 300, 200, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["level"], 120.0)

    def test_zero_modulus_fails(self):
        report = verify_bsum(decaying_sgd(), constant_boundedness(0.0), 0.25, 200, 50, SEED)
        self.assertEqual(report.verdict, FAIL)

    def test_requires_b_track(self):
        with self.assertRaises(InvalidParameterError):
            verify_bsum(multiplicative_supermartingale(), constant_boundedness(1.0), 0.25, 10, 10, SEED)


class CompensatorTests(SimpleTestCase):
    def test_certified_sigma_passes(self):
        family = decaying_sgd()
        report = verify_compensator(family, family.sigma(), 0.25, 200, 100, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.estimate.point, 0.0)
        self.assertEqual(report.details["level"], family.sigma()(0.25))

    def test_zero_sigma_fails(self):
        report = verify_compensator(decaying_sgd(), constant_boundedness(0.0), 0.25, 100, 20, SEED)
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.estimate.point, 1.0)

    def test_requires_c_track(self):
        with self.assertRaises(InvalidParameterError):
            verify_compensator(multiplicative_supermartingale(), constant_boundedness(1.0), 0.25, 10, 10, SEED)


class NonstochasticTests(SimpleTestCase):
    def setUp(self):
        self.family = deterministic_rs(
            x0=0.5, alpha=StepSchedule.geometric(0.25, 0.5), beta="tight",
            gamma=StepSchedule.geometric(0.25, 0.5), K=1,
        )

    def test_tight_case_passes(self):
        family = self.family
        report = verify_nonstochastic(family, family.K, family.L(), family.M(), 0.1, 500)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.estimate.point, 0.0)
        self.assertEqual(report.estimate.method, "exact")
        self.assertAlmostEqual(report.details["beta_sum"], 0.75)
        self.assertEqual(report.details["clamped"], [])

    def test_understated_constants_fail(self):
        report = verify_nonstochastic(self.family, 1.0, 0.1, 0.1, 0.1, 500)
        self.assertEqual(report.verdict, FAIL)


class SolutionSearchTests(SimpleTestCase):
    def test_constant_step_bound(self):
        family = decaying_sgd()
        N = constant_step_solution_bound(family.K, 1.0, 1.0, 0.5, identity_drift(), 0.5, 0.5)
        self.assertEqual(N, 480)
        report = verify_solution_search(family, N, 0.5, 0.5, 300, SEED)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.details["solution_probability"], 1.0)

    def test_stuck_process(self):
        stuck = general_rs(x0=1.0)
        self.assertEqual(verify_solution_search(stuck, 10, 0.25, 0.5, 100, SEED).verdict, FAIL)
        report = verify_solution_search(stuck, 100, 0.25, 0.5, 100, SEED, horizon=10)
        self.assertEqual(report.verdict, INCONCLUSIVE)
        self.assertTrue(report.details["truncated"])


class ReproducibilityTests(SimpleTestCase):
    def test_reports_do_not_depend_on_workers(self):
        family = multiplicative_supermartingale()
        rho = ville_boundedness(family.K)
        reports = [
            verify_boundedness(family, rho, 0.25, 500, 200, SEED, workers=workers).to_dict()
            for workers in (1, 4, 8)
        ]
        self.assertEqual(reports[0], reports[1])
        self.assertEqual(reports[0], reports[2])
