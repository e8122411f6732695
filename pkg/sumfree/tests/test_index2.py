import itertools

import numpy as np
from django.test import SimpleTestCase

from sumfree.exceptions import ConfigurationError, SubgroupCountOverflow
from sumfree.groups import SampleSet, from_integer, iter_groups, make_group
from sumfree.index2 import (
    coset_counts,
    count_not_nice,
    enumerate_index2_subgroups,
    even_coset,
    is_nice,
    make_subgroup,
    odd_coset,
    sf_ground_truth,
)


def ints(g, *values):
    return sorted(from_integer(g, v).dense_index for v in values)


class EnumerationTests(SimpleTestCase):
    def test_counts(self):
        self.assertEqual(len(enumerate_index2_subgroups(make_group([2]))), 1)
        self.assertEqual(len(enumerate_index2_subgroups(make_group([1, 2]))), 3)
        self.assertEqual(len(enumerate_index2_subgroups(make_group([1, 1, 1]))), 7)

    def test_z4_subgroup(self):
        g = make_group([2])
        (sub,) = enumerate_index2_subgroups(g)
        self.assertEqual(sorted(even_coset(sub)), ints(g, 0, 2))
        self.assertEqual(sorted(odd_coset(sub)), ints(g, 1, 3))

    def test_z6_cosets(self):
        g = make_group([1], [3])
        sub = make_subgroup(g, [0])
        self.assertEqual(sorted(even_coset(sub)), ints(g, 0, 2, 4))
        self.assertEqual(sorted(odd_coset(sub)), ints(g, 1, 3, 5))

    def test_mixed_group_coset(self):
        g = make_group([1, 2])
        sub = make_subgroup(g, [1])
        expected = [g.element(r).dense_index for r in [(0, 1), (0, 3), (1, 1), (1, 3)]]
        self.assertEqual(sorted(odd_coset(sub)), sorted(expected))

    def test_cap(self):
        with self.assertRaises(SubgroupCountOverflow):
            enumerate_index2_subgroups(make_group([1] * 5), cap=30)

    def test_bad_index_set(self):
        g = make_group([1, 2])
        with self.assertRaises(ConfigurationError):
            make_subgroup(g, [])
        with self.assertRaises(ConfigurationError):
            make_subgroup(g, [2])

    def test_census(self):
        for g in iter_groups(128):
            subgroups = enumerate_index2_subgroups(g)
            self.assertEqual(len(subgroups), g.r - 1)
            masks = {sub.even_mask().tobytes() for sub in subgroups}
            self.assertEqual(len(masks), len(subgroups))
            for sub in subgroups:
                members = np.flatnonzero(sub.even_mask())
                self.assertEqual(len(members), g.n)
                sums = g.add_indices(members[:, None], members[None, :])
                self.assertTrue(np.all(sub.contains(sums)))
                odd = np.flatnonzero(~sub.even_mask())
                # O + O ⊆ E, so the odd coset is sum-free
                self.assertTrue(np.all(sub.contains(g.add_indices(odd[:, None], odd[None, :]))))

    def test_predicate_matches_table(self):
        g = make_group([1, 2], [3])
        for index_set in ([0], [1], [0, 1]):
            table = make_subgroup(g, index_set)
            predicate = make_subgroup(g, index_set, materialize_cap=1)
            self.assertFalse(predicate.materialized)
            self.assertTrue(np.array_equal(table.even_mask(), predicate.even_mask()))


class InvolutionAndWTests(SimpleTestCase):
    def test_r_statistics_by_scan(self):
        for g in iter_groups(128):
            involutions = g.neg_indices(g.all_indices()) == g.all_indices()
            for sub in enumerate_index2_subgroups(g):
                even = sub.even_mask()
                self.assertEqual(sub.r_E, int(np.count_nonzero(involutions & even)))
                self.assertEqual(sub.r_O, int(np.count_nonzero(involutions & ~even)))
                self.assertEqual(sub.r_E + sub.r_O, g.r)
                self.assertTrue(sub.r_E == g.r or sub.r_E == sub.r_O)
                self.assertEqual(len(sub.W) * sub.r_E, g.n)
                self.assertTrue(sub.W.issubset(even_coset(sub)))

    def test_w_examples(self):
        g = make_group([2])
        self.assertEqual(sorted(make_subgroup(g, [0]).W), ints(g, 2))
        g = make_group([1], [3])
        self.assertEqual(sorted(make_subgroup(g, [0]).W), ints(g, 0, 2, 4))
        g = make_group([1] * 10)
        for index_set in ([0], [3, 7], list(range(10))):
            self.assertEqual(sorted(make_subgroup(g, index_set).W), [0])


class NiceTests(SimpleTestCase):
    def test_examples(self):
        g = make_group([1] * 10)
        self.assertTrue(is_nice(g, make_subgroup(g, [0, 4]), 0.1))
        g = make_group([2])
        self.assertFalse(is_nice(g, make_subgroup(g, [0]), 0.1))
        g = make_group([2], [25])
        self.assertTrue(is_nice(g, make_subgroup(g, [0]), 0.1))

    def test_count_not_nice(self):
        self.assertEqual(count_not_nice(make_group([2], [25]), 0.1), 0)
        self.assertEqual(count_not_nice(make_group([2]), 0.9), 1)
        self.assertEqual(count_not_nice(make_group([1] * 8), 0.3), 0)

    def test_count_not_nice_bound(self):
        for g in iter_groups(256):
            for delta in (0.05, 0.2, 0.5, 0.9):
                self.assertLessEqual(count_not_nice(g, delta), 2 / delta)


class CosetCountTests(SimpleTestCase):
    def test_matches_direct_intersection(self):
        rng = np.random.default_rng(7)
        for g in [make_group([1, 2, 2]), make_group([1, 1, 3], [3]), make_group([3])]:
            subgroups = enumerate_index2_subgroups(g)
            for _ in range(5):
                A = SampleSet(g, rng.random(g.order) < 0.4)
                expected = [len(A & odd_coset(sub)) for sub in subgroups]
                self.assertEqual(coset_counts(g, subgroups, A), expected)

    def test_empty_and_full(self):
        g = make_group([1, 2])
        subgroups = enumerate_index2_subgroups(g)
        self.assertEqual(coset_counts(g, subgroups, SampleSet.empty(g)), [0, 0, 0])
        self.assertEqual(coset_counts(g, subgroups, SampleSet.full(g)), [g.n] * 3)


class GroundTruthTests(SimpleTestCase):
    def test_small_groups(self):
        for g in iter_groups(12):
            self.assertTrue(sf_ground_truth(g), g.spec)

    def test_brute_force_over_all_subsets(self):
        # Independent of the solver: scan every subset of Z2 + Z4.
        g = make_group([1, 2])
        table = g.add_indices(g.all_indices()[:, None], g.all_indices()[None, :])
        best, maximizers = 0, []
        for size in range(g.order, 0, -1):
            for subset in itertools.combinations(range(g.order), size):
                mask = np.zeros(g.order, dtype=bool)
                mask[list(subset)] = True
                if not np.any(mask[table[np.ix_(subset, subset)]]):
                    maximizers.append(frozenset(subset))
            if maximizers:
                best = size
                break
        cosets = {frozenset(odd_coset(sub)) for sub in enumerate_index2_subgroups(g)}
        self.assertEqual(best, g.n)
        self.assertEqual(set(maximizers), cosets)
