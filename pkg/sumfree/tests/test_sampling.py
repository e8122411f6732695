import math

import numpy as np
from django.test import SimpleTestCase

from sumfree.cayley import build_cayley
from sumfree.exceptions import (
    ConfigurationError,
    InvalidLaw,
    InvalidTrials,
    SecondFormInapplicable,
)
from sumfree.groups import SampleSet, from_integer, make_group
from sumfree.index2 import make_subgroup, odd_coset
from sumfree.sampling import (
    EventTrial,
    SampleLaw,
    Tally,
    empirical_event_probability,
    exact_event_probability,
    fkg_check,
    fkg_report,
    janson_bound,
    odd_probability,
    parse_law,
    parse_law_family,
    run_trials,
    sample,
)


def size_of(A):
    return len(A)


def is_empty(A):
    return len(A) == 0


def membership(A):
    return A.mask


class LawTests(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(parse_law("p:0.25"), SampleLaw.p_random(0.25))
        self.assertEqual(parse_law("m:4"), SampleLaw.m_uniform(4))
        law = parse_law("pm:0.2:0.5")
        self.assertEqual(law.kind, "skewed_pm")
        self.assertAlmostEqual(law.p1, 0.1)
        self.assertAlmostEqual(law.p2, 0.3)

    def test_parse_errors(self):
        for text in ("q:0.5", "p:abc", "p:1.5", "m:-1", "pm:0.8:0.5", "m:2.5"):
            with self.assertRaises(InvalidLaw, msg=text):
                parse_law(text)

    def test_text_round_trip(self):
        for law in (SampleLaw.p_random(0.125), SampleLaw.m_uniform(3), SampleLaw.skewed(0.25, 0.5)):
            self.assertEqual(parse_law(law.text), law)

    def test_skewed_probabilities(self):
        g = make_group([1], [3])
        sub = make_subgroup(g, [0])
        law = SampleLaw.skewed(0.5, 0.5)
        q = law.probabilities(g, sub)
        self.assertTrue(np.allclose(q[sub.even_mask()], 0.75))
        self.assertTrue(np.allclose(q[~sub.even_mask()], 0.25))
        with self.assertRaises(InvalidLaw):
            law.probabilities(g)
        with self.assertRaises(InvalidLaw):
            SampleLaw.m_uniform(2).probabilities(g)


class LawFamilyTests(SimpleTestCase):
    def setUp(self):
        self.g = make_group([1], [5])

    def test_families_take_the_grid_density(self):
        self.assertEqual(parse_law_family("p").at(self.g, 0.25), SampleLaw.p_random(0.25))
        self.assertEqual(parse_law_family("m").at(self.g, 0.5), SampleLaw.m_uniform(5))
        self.assertEqual(parse_law_family("m").at(self.g, 0.34), SampleLaw.m_uniform(3))
        self.assertEqual(parse_law_family("pm:0.5").at(self.g, 0.4), SampleLaw.skewed(0.4, 0.5))
        self.assertTrue(parse_law_family("pm:0.5").needs_subgroup)
        self.assertFalse(parse_law_family("m").needs_subgroup)

    def test_full_laws_are_fixed(self):
        family = parse_law_family("m:4")
        self.assertEqual(family.at(self.g, 0.9), SampleLaw.m_uniform(4))
        self.assertAlmostEqual(family.nominal_p(self.g), 0.4)
        self.assertEqual(parse_law_family("pm:0.2:0.5").nominal_p(self.g), 0.2)
        self.assertEqual(parse_law_family("p:0.3").nominal_p(self.g), 0.3)
        with self.assertRaises(InvalidLaw):
            parse_law_family("p").nominal_p(self.g)

    def test_text(self):
        for text in ("p", "m", "pm:0.5", "p:0.3", "m:4", "pm:0.2:0.5"):
            self.assertEqual(parse_law_family(text).text, text)
        self.assertEqual(parse_law_family(" p:.5 ").text, "p:0.5")

    def test_errors(self):
        for text in ("q", "pm:x", "pm:2", "pm:0.8:0.5", "m:1.5"):
            with self.assertRaises(InvalidLaw, msg=text):
                parse_law_family(text)

    def test_odd_probability(self):
        self.assertEqual(odd_probability(SampleLaw.p_random(0.3)), 0.3)
        self.assertAlmostEqual(odd_probability(SampleLaw.skewed(0.4, 0.5)), 0.2)
        with self.assertRaises(InvalidLaw):
            odd_probability(SampleLaw.m_uniform(3))


class SampleTests(SimpleTestCase):
    def setUp(self):
        self.g = make_group([1], [5])

    def test_extreme_probabilities(self):
        for trial in range(20):
            self.assertEqual(len(sample(self.g, SampleLaw.p_random(0), 1, trial)), 0)
            self.assertEqual(sample(self.g, SampleLaw.p_random(1), 1, trial), SampleSet.full(self.g))

    def test_m_uniform(self):
        law = SampleLaw.m_uniform(5)
        for trial in range(200):
            self.assertEqual(len(sample(self.g, law, 9, trial)), 5)
        tally = run_trials(EventTrial(self.g, law, membership), 10_000, seed=9)
        self.assertTrue(np.all(np.abs(tally.mean - 0.5) <= 0.02))

    def test_m_uniform_extremes(self):
        self.assertEqual(sample(self.g, SampleLaw.m_uniform(0), 0, 0), SampleSet.empty(self.g))
        self.assertEqual(sample(self.g, SampleLaw.m_uniform(10), 0, 0), SampleSet.full(self.g))
        with self.assertRaises(InvalidLaw):
            sample(self.g, SampleLaw.m_uniform(11), 0, 0)

    def test_reproducible(self):
        g = make_group([1, 2], [3])
        law = SampleLaw.p_random(0.5)
        self.assertEqual(sample(g, law, 42, 7), sample(g, law, 42, 7))
        draws = {sample(g, law, 42, trial) for trial in range(10)}
        self.assertGreater(len(draws), 1)

    def test_monotone_coupling(self):
        g = make_group([3], [3])
        for trial in range(20):
            sets = [sample(g, SampleLaw.p_random(p), 3, trial) for p in (0.1, 0.3, 0.6, 0.9)]
            for smaller, larger in zip(sets, sets[1:]):
                self.assertTrue(smaller.issubset(larger))


class TallyTests(SimpleTestCase):
    def test_statistics(self):
        tally = Tally()
        for value in (1.0, 2.0, 3.0, 4.0):
            tally = tally + Tally.of(value)
        self.assertEqual(tally.count, 4)
        self.assertAlmostEqual(float(tally.mean), 2.5)
        self.assertAlmostEqual(float(tally.variance), 1.25)
        self.assertAlmostEqual(float(tally.standard_error), math.sqrt(1.25 / 4))

    def test_merge_is_order_free(self):
        parts = [Tally.of([v, v * v]) for v in (0.5, 2.0, 3.5)]
        left = (parts[0] + parts[1]) + parts[2]
        right = parts[2] + (parts[1] + parts[0])
        self.assertTrue(np.allclose(left.mean, right.mean))
        self.assertTrue(np.allclose(left.variance, right.variance))

    def test_workers_do_not_change_results(self):
        g = make_group([1, 2], [3])
        fn = EventTrial(g, SampleLaw.p_random(0.3), size_of)
        one = run_trials(fn, 300, seed=4)
        two = run_trials(fn, 300, seed=4, workers=2)
        self.assertEqual(one.count, two.count)
        self.assertEqual(float(one.total), float(two.total))
        self.assertEqual(float(one.total_sq), float(two.total_sq))

    def test_no_trials(self):
        g = make_group([1])
        with self.assertRaises(InvalidTrials):
            run_trials(EventTrial(g, SampleLaw.p_random(0.5), size_of), 0, seed=0)


class ProbabilityTests(SimpleTestCase):
    def setUp(self):
        self.z6 = make_group([1], [3])
        self.sub = make_subgroup(self.z6, [0])
        self.triangle = build_cayley(self.sub, [from_integer(self.z6, 2).dense_index])

    def independent(self, A):
        return self.triangle.is_independent(A & odd_coset(self.sub))

    def test_exact_empty_event(self):
        g = make_group([2])
        self.assertAlmostEqual(exact_event_probability(g, SampleLaw.p_random(0.5), is_empty), 1 / 16)
        self.assertAlmostEqual(exact_event_probability(g, SampleLaw.m_uniform(2), is_empty), 0.0)
        self.assertAlmostEqual(exact_event_probability(g, SampleLaw.m_uniform(0), is_empty), 1.0)

    def test_exact_order_limit(self):
        g = make_group([1], [9])
        with self.assertRaises(ConfigurationError):
            exact_event_probability(g, SampleLaw.p_random(0.5), is_empty)

    def test_empirical_matches_exact(self):
        law = SampleLaw.p_random(0.5)
        exact = exact_event_probability(self.z6, law, self.independent)
        # at most one of the three odd elements
        self.assertAlmostEqual(exact, 0.5)
        estimate, half_width = empirical_event_probability(self.z6, law, self.independent, 2000, seed=1)
        self.assertLessEqual(abs(estimate - exact), 3 * half_width)

    def test_empirical_empty_set(self):
        g = make_group([2])
        estimate, half_width = empirical_event_probability(g, SampleLaw.p_random(0.5), is_empty, 4000, seed=2)
        self.assertLessEqual(abs(estimate - 1 / 16), 3 * half_width)

    def test_empirical_needs_trials(self):
        with self.assertRaises(InvalidTrials):
            empirical_event_probability(self.z6, SampleLaw.p_random(0.5), is_empty, 0, seed=0)


class JansonTests(SimpleTestCase):
    def test_disjoint_sets(self):
        result = janson_bound([{0, 1}, {2, 3}, {4}], 0.5)
        self.assertAlmostEqual(result.mu, 0.25 + 0.25 + 0.5)
        self.assertEqual(result.Delta, 0.0)
        self.assertAlmostEqual(result.bound, math.exp(-1.0))

    def test_single_set(self):
        result = janson_bound([{0, 1}], 0.1)
        self.assertAlmostEqual(result.mu, 0.01)
        self.assertAlmostEqual(result.bound, math.exp(-0.01))

    def test_triangle_edges(self):
        z6 = make_group([1], [3])
        graph = build_cayley(make_subgroup(z6, [0]), [from_integer(z6, 2).dense_index])
        edges = [set(map(int, edge)) for edge in graph.edges]
        result = janson_bound(edges, 0.5)
        self.assertAlmostEqual(result.mu, 0.75)
        # six ordered pairs of edges, each pair spanning three vertices
        self.assertAlmostEqual(result.Delta, 6 * 0.125)
        second = janson_bound(edges, 0.5, c=0.25)
        self.assertEqual(second.form, "second")
        self.assertAlmostEqual(second.bound, math.exp(-0.25 * 0.75**2 / 0.75))
        with self.assertRaises(SecondFormInapplicable):
            janson_bound(edges, 0.2, c=0.25)

    def test_bound_dominates_exact_probability(self):
        z6 = make_group([1], [3])
        sub = make_subgroup(z6, [0])
        graph = build_cayley(sub, [from_integer(z6, 2).dense_index])
        edges = [set(map(int, edge)) for edge in graph.edges]
        for p in (0.1, 0.2, 0.5, 0.8):
            exact = exact_event_probability(z6, SampleLaw.p_random(p), graph.is_independent)
            self.assertGreaterEqual(janson_bound(edges, p).bound, exact - 1e-12)

    def test_empty_set_rejected(self):
        with self.assertRaises(ConfigurationError):
            janson_bound([set()], 0.5)


class FkgTests(SimpleTestCase):
    def setUp(self):
        self.g = make_group([1], [3])
        self.law = SampleLaw.p_random(0.5)

    def test_disjoint_events(self):
        report = fkg_report(self.g, self.law, [{0, 1}, {2, 3}], 2000, seed=3)
        self.assertTrue(report.holds)
        self.assertLessEqual(abs(report.joint - report.product), report.slack)

    def test_overlapping_events(self):
        events = [{3, 4}, {4, 5}, {3, 5}]
        self.assertTrue(fkg_check(self.g, self.law, events, 2000, seed=3))
        exact_joint = exact_event_probability(
            self.g, self.law, lambda A: all(not all(A.mask[list(B)]) for B in events)
        )
        self.assertGreater(exact_joint, 0.75**3)

    def test_single_event(self):
        report = fkg_report(self.g, self.law, [{0, 2}], 500, seed=3)
        self.assertAlmostEqual(report.joint, report.product)
