import math

import numpy as np
from django.test import SimpleTestCase, tag

from sumfree.exceptions import InvalidLaw, NotNice, RangeError
from sumfree.experiments import (
    ModerateProbe,
    TinyProbe,
    chernoff_step,
    compute_profile,
    concentration_experiment,
    concentration_sweep,
    crossing_point,
    default_subgroup,
    fkg_safe_bound,
    nice_max_sweep,
    nice_maximal_coset_check,
    one_statement_sweep,
    sweep_manifest,
    zero_statement_sweep,
)
from sumfree.extremal import safe_elements
from sumfree.groups import SampleSet, make_group
from sumfree.index2 import enumerate_index2_subgroups, make_subgroup, odd_coset
from sumfree.sampling import SampleLaw, exact_event_probability, parse_law_family

TINY_GROUPS = [
    make_group([1], [3]),
    make_group([3]),
    make_group([1, 2]),
    make_group([1, 1, 1]),
]


def rows_for(result, event):
    return [row for row in result.rows if row.event == event]


class HasSafeElement:
    def __init__(self, sub):
        self.sub = sub

    def __call__(self, A):
        return bool(np.any(safe_elements(self.sub, A).mask & A.mask))


class SafeCountOf:
    def __init__(self, sub):
        self.sub = sub

    def __call__(self, A):
        return len(safe_elements(self.sub, A))


class ProfileTests(SimpleTestCase):
    def test_cyclic(self):
        profile = compute_profile(make_group([2], [25]), 0.1)
        self.assertAlmostEqual(profile.alpha, math.log(2) / math.log(50))
        self.assertEqual(profile.lam, 1 / 3)
        self.assertEqual(profile.branch, "alpha<=5/6")
        self.assertAlmostEqual(profile.p_star, math.sqrt(math.log(50) / (3 * 50)))

    def test_elementary(self):
        profile = compute_profile(make_group([1] * 10), 0.1)
        self.assertEqual(profile.beta, 2.0)
        self.assertEqual(profile.lam, 1.0)
        self.assertEqual(profile.branch, "beta>=delta")

    def test_middle_branch(self):
        g = make_group([1] * 30, [101], cap=math.inf)
        profile = compute_profile(g, 0.05)
        self.assertAlmostEqual(profile.alpha, 0.8413, places=4)
        self.assertAlmostEqual(profile.beta, 2 / 101)
        self.assertEqual(profile.branch, "beta<delta")
        self.assertAlmostEqual(profile.lam, 0.3413, places=4)

    def test_boundary_is_right_continuous(self):
        g = make_group([1, 1, 1], [3])
        beta = g.r / g.n
        at = compute_profile(g, beta)
        self.assertEqual(at.branch, "beta>=delta")
        self.assertAlmostEqual(at.lam, 2 / (4 - beta))
        below = compute_profile(g, beta + 0.01)
        self.assertEqual(below.branch, "beta<delta")
        self.assertGreater(at.lam, 1 / 3)
        self.assertGreater(below.lam, 1 / 3)

    def test_lambda_range(self):
        for g in [make_group([1] * k, odd) for k in range(1, 9) for odd in ((), (3,), (15,))][1:]:
            for delta in (0.05, 0.3, 0.9):
                profile = compute_profile(g, delta)
                self.assertTrue(1 / 3 <= profile.lam <= 1, (g.spec, delta, profile))

    def test_range_errors(self):
        with self.assertRaises(RangeError):
            compute_profile(make_group([1]), 0.1)
        for delta in (0, 1, -0.5):
            with self.assertRaises(RangeError):
                compute_profile(make_group([2]), delta)

    def test_default_subgroup(self):
        g = make_group([1] * 4)
        self.assertEqual(default_subgroup(g, 0.1).index_set, (0,))
        g = make_group([2, 3], [3])
        self.assertEqual(default_subgroup(g, 0.1).index_set, (0,))
        with self.assertRaises(NotNice):
            default_subgroup(make_group([2]), 0.1)


class CrossingPointTests(SimpleTestCase):
    def test_interpolation(self):
        self.assertAlmostEqual(crossing_point([(0.0, 1.0), (1.0, 0.0)]), 0.5)
        self.assertAlmostEqual(crossing_point([(0.1, 0.9), (0.2, 0.7), (0.3, 0.3)]), 0.25)

    def test_exact_hits(self):
        self.assertEqual(crossing_point([(0.1, 0.5), (0.2, 0.0)]), 0.1)
        self.assertEqual(crossing_point([(0.1, 0.8), (0.2, 0.5), (0.3, 0.1)]), 0.2)

    def test_no_crossing(self):
        self.assertIsNone(crossing_point([]))
        self.assertIsNone(crossing_point([(0.1, 0.9), (0.2, 0.8)]))


class ZeroStatementTests(SimpleTestCase):
    def test_p_zero(self):
        g = make_group([1, 2], [3])
        sub = make_subgroup(g, [0])
        result = zero_statement_sweep(g, sub, [0.0], trials=20, seed=1, delta=0.1)
        self.assertEqual(rows_for(result, "mean_safe")[0].estimate, g.n - 1)
        self.assertEqual(rows_for(result, "exists_safe")[0].estimate, 0.0)
        self.assertEqual(rows_for(result, "one_swap_maximal")[0].estimate, 1.0)
        self.assertEqual(rows_for(result, "few_safe")[0].estimate, 1.0)
        self.assertEqual(rows_for(result, "chernoff")[0].estimate, g.n**-3)

    def test_p_one(self):
        g = make_group([1, 2], [3])
        sub = make_subgroup(g, [0])
        result = zero_statement_sweep(g, sub, [1.0], trials=5, seed=1, delta=0.1)
        self.assertEqual(rows_for(result, "mean_safe")[0].estimate, 0.0)
        self.assertEqual(rows_for(result, "exists_safe")[0].estimate, 0.0)
        self.assertEqual(rows_for(result, "chernoff")[0].estimate, 0.0)
        self.assertEqual(result.event_name, "exists_safe")

    def test_not_nice(self):
        g = make_group([2])
        with self.assertRaises(NotNice):
            zero_statement_sweep(g, make_subgroup(g, [0]), [0.5], trials=5, seed=0, delta=0.1)

    def test_matches_enumeration(self):
        for g in TINY_GROUPS:
            sub = make_subgroup(g, [0])
            result = zero_statement_sweep(g, sub, [0.5], trials=400, seed=2, delta=0.6)
            (row,) = rows_for(result, "exists_safe")
            exact = exact_event_probability(g, SampleLaw.p_random(0.5), HasSafeElement(sub))
            self.assertLessEqual(abs(row.estimate - exact), max(3 * row.half_width, 0.02), g.spec)

    def test_mean_safe_is_non_increasing(self):
        g = make_group([4], [3])
        sub = make_subgroup(g, [0])
        grid = [0.05, 0.1, 0.2, 0.3, 0.5]
        result = zero_statement_sweep(g, sub, grid, trials=60, seed=3, delta=0.1)
        means = [row.estimate for row in rows_for(result, "mean_safe")]
        self.assertEqual(means, sorted(means, reverse=True))
        self.assertEqual(len(result.estimates), len(grid))

    def test_chernoff_step(self):
        self.assertAlmostEqual(chernoff_step(100, 0.5), 0.5 ** (3 * math.log(100) / 0.5))
        self.assertEqual(chernoff_step(100, 1.0), 0.0)

    def test_manifest(self):
        g = make_group([1, 2], [3])
        sub = make_subgroup(g, [0])
        result = zero_statement_sweep(g, sub, [0.2], trials=5, seed=9, delta=0.1)
        manifest = result.manifest
        self.assertEqual(manifest["group"], g.spec)
        self.assertEqual(manifest["subgroup"], "0")
        self.assertEqual(manifest["seed"], 9)
        same = sweep_manifest("zero", g, [0.2], 5, 9, 0.1, subgroup="0", strict=True, law="p")
        self.assertEqual(manifest["config_hash"], same["config_hash"])
        other = sweep_manifest("zero", g, [0.2], 5, 10, 0.1, subgroup="0", strict=True, law="p")
        self.assertNotEqual(manifest["config_hash"], other["config_hash"])


class OneStatementTests(SimpleTestCase):
    def test_extremes_on_tiny_groups(self):
        for g in TINY_GROUPS:
            result = one_statement_sweep(g, [0.0, 1.0], k_max=1, trials=5, seed=0, delta=0.1)
            self.assertEqual([e for _, e, _, _ in result.estimates], [1.0, 1.0])

    def test_tiny_matches_enumeration(self):
        for g in TINY_GROUPS:
            probe = TinyProbe(tuple(odd_coset(sub) for sub in enumerate_index2_subgroups(g)))
            exact = exact_event_probability(g, SampleLaw.p_random(0.5), lambda A: probe(A)[0])
            result = one_statement_sweep(g, [0.5], k_max=1, trials=300, seed=4, delta=0.1)
            ((_, estimate, half_width, _),) = result.estimates
            self.assertLessEqual(abs(estimate - exact), max(3 * half_width, 0.02), g.spec)

    def test_moderate_events(self):
        g = make_group([1, 2], [5])
        result = one_statement_sweep(g, [0.1, 0.3], k_max=2, trials=30, seed=5, delta=0.1)
        events = {row.event for row in result.rows}
        self.assertEqual(events, {"exists_safe_max", "bk_1", "bk_ck_1", "bk_2", "bk_ck_2"})
        self.assertEqual(result.event_name, "exists_safe_max")
        for p in (0.1, 0.3):
            rows = {row.event: row.estimate for row in result.rows if row.p == p}
            # the maximizing coset always satisfies C_k
            self.assertGreaterEqual(rows["bk_ck_1"], rows["bk_1"])
            self.assertGreaterEqual(rows["bk_ck_2"], rows["bk_2"])

    def test_moderate_probe_on_full_coset(self):
        g = make_group([1, 2], [5])
        subgroups = tuple(enumerate_index2_subgroups(g))
        probe = ModerateProbe(subgroups, 1, True)
        self.assertEqual(probe(odd_coset(subgroups[0])), [False, False, False])
        self.assertEqual(probe(SampleSet.empty(g)), [False, False, False])


class ConcentrationTests(SimpleTestCase):
    def test_p_zero(self):
        g = make_group([2], [3])
        sub = make_subgroup(g, [0])
        report = concentration_experiment(g, sub, 0.0, trials=10, seed=0)
        self.assertEqual(report.mean, g.n - 1)
        self.assertEqual(report.standard_error, 0.0)
        self.assertEqual(report.low_fraction, 0.0)
        self.assertEqual(report.fkg_bound, g.n - 1)
        self.assertTrue(report.bound_ok)

    def test_z6_against_enumeration(self):
        g = make_group([1], [3])
        sub = make_subgroup(g, [0])
        law = SampleLaw.p_random(0.5)
        exact_mean = exact_event_probability(g, law, SafeCountOf(sub))
        report = concentration_experiment(g, sub, 0.5, trials=2000, seed=6)
        self.assertLessEqual(abs(report.mean - exact_mean), 3 * report.standard_error)
        self.assertLessEqual(report.fkg_bound, exact_mean)
        self.assertTrue(report.bound_ok)

    def test_loose_bound_ignores_doublings(self):
        g = make_group([1], [3])
        sub = make_subgroup(g, [0])
        self.assertGreater(fkg_safe_bound(sub, 0.5, strict=False), fkg_safe_bound(sub, 0.5))

    def test_sweep_rows(self):
        g = make_group([1, 2], [3])
        sub = make_subgroup(g, [0])
        result = concentration_sweep(g, sub, [0.1, 0.4], trials=50, seed=7, delta=0.1)
        self.assertEqual(len(result.rows), 8)
        self.assertEqual(result.event_name, "low_fraction")
        self.assertTrue(all(row.estimate == 1.0 for row in rows_for(result, "bound_ok")))


class NiceMaxTests(SimpleTestCase):
    def test_all_nice(self):
        report = nice_maximal_coset_check(make_group([1, 1, 1]), 0.4, 3, trials=50, seed=0, delta=0.1)
        self.assertEqual(report.nice_max_frequency, 1.0)
        self.assertFalse(report.trivial)

    def test_z4_without_nice_subgroup(self):
        report = nice_maximal_coset_check(make_group([2]), 0.5, 3, trials=50, seed=0, delta=0.9)
        self.assertFalse(report.trivial)
        self.assertEqual(report.nice_max_frequency, 0.0)
        self.assertEqual(report.frequencies["event_b"], 0.0)

    def test_z8_trivial_case(self):
        report = nice_maximal_coset_check(make_group([3]), 0.5, 3, trials=50, seed=0, delta=0.9)
        self.assertTrue(report.trivial)
        self.assertEqual(report.nice_max_frequency, 1.0)
        # no coset is outside the nice family
        self.assertEqual(report.frequencies["event_a"], 1.0)

    def test_sweep(self):
        g = make_group([1, 2, 2])
        result = nice_max_sweep(g, [0.2, 0.4], 3, trials=40, seed=1, delta=0.1)
        self.assertEqual(len(result.rows), 8)
        self.assertEqual(result.event_name, "nice_max")
        self.assertEqual(result.manifest["omega"], 3.0)


class SamplingLawTests(SimpleTestCase):
    def setUp(self):
        self.g = make_group([1, 2], [3])
        self.sub = make_subgroup(self.g, [0])

    def test_m_uniform_extremes(self):
        result = zero_statement_sweep(
            self.g, self.sub, [0.0, 1.0], trials=5, seed=1, delta=0.1, law=parse_law_family("m")
        )
        self.assertEqual([row.estimate for row in rows_for(result, "mean_safe")], [self.g.n - 1, 0.0])
        self.assertEqual(result.manifest["law"], "m")

    def test_m_uniform_matches_enumeration(self):
        g = make_group([1], [3])
        sub = make_subgroup(g, [0])
        exact = exact_event_probability(g, SampleLaw.m_uniform(3), HasSafeElement(sub))
        result = zero_statement_sweep(
            g, sub, [0.5], trials=400, seed=3, delta=0.6, law=parse_law_family("m")
        )
        (row,) = rows_for(result, "exists_safe")
        self.assertLessEqual(abs(row.estimate - exact), max(3 * row.half_width, 0.02))

    def test_skewed_law_onto_the_even_coset(self):
        # p1 = 0 and p2 = 1: A is exactly the subgroup, and every x is safe
        law = parse_law_family("pm:0.5:1")
        result = zero_statement_sweep(self.g, self.sub, [0.5], trials=5, seed=1, delta=0.1, law=law)
        self.assertEqual(rows_for(result, "mean_safe")[0].estimate, self.g.n - 1)
        self.assertEqual(rows_for(result, "exists_safe")[0].estimate, 1.0)
        self.assertEqual(result.manifest["law"], "pm:0.5:1.0")

    def test_concentration_under_skewed_law(self):
        report = concentration_experiment(
            self.g, self.sub, 0.5, trials=10, seed=0, law=SampleLaw.skewed(0.5, 1.0)
        )
        self.assertEqual(report.fkg_bound, self.g.n - 1)
        self.assertEqual(report.mean, self.g.n - 1)

    def test_concentration_needs_a_product_law(self):
        with self.assertRaises(InvalidLaw):
            concentration_sweep(
                self.g, self.sub, [0.5], trials=5, seed=0, delta=0.1, law=parse_law_family("m")
            )

    def test_one_and_nicemax_accept_every_family(self):
        for text in ("m", "pm:0.2"):
            with self.subTest(law=text):
                law = parse_law_family(text)
                one = one_statement_sweep(make_group([1], [3]), [0.0], 1, trials=5, seed=0, delta=0.1, law=law)
                self.assertEqual([e for _, e, _, _ in one.estimates], [1.0])
                nicemax = nice_max_sweep(make_group([1, 1, 1]), [0.3], 3, trials=10, seed=0, delta=0.1, law=law)
                self.assertEqual(nicemax.manifest["law"], text)


@tag("slow")
class DeskScaleTests(SimpleTestCase):
    def test_zero_one_separation(self):
        g = make_group([15])
        profile = compute_profile(g, 0.1)
        self.assertEqual(profile.lam, 1 / 3)
        sub = default_subgroup(g, 0.1)
        grid = [0.75 * profile.p_star, 1.25 * profile.p_star]
        result = zero_statement_sweep(g, sub, grid, trials=200, seed=2024, delta=0.1)
        low, high = [estimate for _, estimate, _, _ in result.estimates]
        self.assertGreaterEqual(low - high, 0.5)
        self.assertIsNotNone(result.crossing_p)

    def test_concentration_bound(self):
        g = make_group([13])
        profile = compute_profile(g, 0.1)
        sub = default_subgroup(g, 0.1)
        report = concentration_experiment(g, sub, profile.p_star, trials=1000, seed=2024)
        self.assertTrue(report.bound_ok)
        self.assertGreater(report.mean, 0)
