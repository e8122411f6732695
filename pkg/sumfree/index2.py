"""Index-2 subgroups H_I, their odd cosets and the doubling set W.

Every index-2 subgroup of G is ``H_I = {x : sum of x_i over i in I is even}``
for a non-empty set I of even-factor positions, and distinct I give distinct
subgroups, so there are exactly r(G) - 1 of them.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .conf import get_caps
from .exceptions import ConfigurationError, EnumerationTooLarge, SubgroupCountOverflow
from .groups import SampleSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Index2Subgroup:
    group: object
    index_set: tuple[int, ...]
    materialize_cap: int = 2**20

    @property
    def label(self):
        """The index set as it appears in CLI arguments and CSV rows, e.g. ``0+2``."""
        return "+".join(str(i) for i in self.index_set)

    @property
    def materialized(self):
        return self.group.order <= self.materialize_cap

    def contains(self, indices):
        """Membership in the subgroup for an array of dense indices."""
        indices = np.asarray(indices, dtype=np.int64)
        if self.materialized:
            return self.membership[indices]
        return self.group.parity(indices, self.index_set) == 0

    @cached_property
    def membership(self):
        return self.group.parity(self.group.all_indices(), self.index_set) == 0

    def even_mask(self):
        if self.materialized:
            return self.membership
        return self.contains(self.group.all_indices())

    @cached_property
    def _ones(self):
        return sum(1 for i in self.index_set if self.group.even_factors[i] == 1)

    @property
    def r_E(self):
        # An involution has residue 0 or 2^(a_i - 1), which is odd only when a_i = 1.
        k = self.group.k
        return 2**k if self._ones == 0 else 2 ** (k - 1)

    @property
    def r_O(self):
        return 0 if self._ones == 0 else 2 ** (self.group.k - 1)

    @cached_property
    def W(self):
        return compute_W(self)

    def __eq__(self, other):
        if not isinstance(other, Index2Subgroup):
            return NotImplemented
        return self.group == other.group and self.index_set == other.index_set

    def __hash__(self):
        return hash((self.group, self.index_set))

    def __repr__(self):
        return f"Index2Subgroup({self.group.spec}, I={self.label})"


def make_subgroup(g, index_set, materialize_cap=None):
    index_set = tuple(sorted(set(int(i) for i in index_set)))
    if not index_set or index_set[0] < 0 or index_set[-1] >= g.k:
        raise ConfigurationError(
            f"Index set {index_set} must be a non-empty subset of 0..{g.k - 1}"
        )
    if materialize_cap is None:
        materialize_cap = get_caps().materialize_cap
    return Index2Subgroup(g, index_set, materialize_cap)


def enumerate_index2_subgroups(g, cap=None):
    if cap is None:
        cap = get_caps().subgroup_cap
    count = g.r - 1
    if count > cap:
        raise SubgroupCountOverflow(
            f"{g.spec} has {count} index-2 subgroups, more than the cap {cap}"
        )
    materialize_cap = get_caps().materialize_cap
    subgroups = []
    for size in range(1, g.k + 1):
        for index_set in itertools.combinations(range(g.k), size):
            subgroups.append(Index2Subgroup(g, index_set, materialize_cap))
    assert len(subgroups) == count
    logger.debug("%s: %d index-2 subgroups", g.spec, count)
    return subgroups


def even_coset(sub):
    return SampleSet(sub.group, sub.even_mask())


def odd_coset(sub):
    return SampleSet(sub.group, ~sub.even_mask())


def compute_W(sub):
    odd = np.flatnonzero(~sub.even_mask())
    return SampleSet.from_indices(sub.group, np.unique(sub.group.double_indices(odd)))


def is_nice(g, sub, delta):
    return g.r <= delta * g.n or sub.r_O == sub.r_E


def count_not_nice(g, delta, cap=None):
    return sum(1 for sub in enumerate_index2_subgroups(g, cap) if not is_nice(g, sub, delta))


def coset_counts(g, subgroups, A):
    """|A ∩ O| for each listed subgroup.

    Every element contributes its parity vector (x_1 mod 2, ..., x_k mod 2);
    the Walsh-Hadamard transform of the histogram of these vectors gives, for
    every mask I, the difference |A ∩ E_I| - |A ∩ O_I| in one O(k 2^k) pass.
    """
    k = g.k
    indices = A.indices()
    # Bit i of a code is the parity of even factor i.
    codes = (g.digits(indices)[:, :k] % 2) @ (1 << np.arange(k, dtype=np.int64))
    spectrum = np.bincount(codes, minlength=2**k).astype(np.int64)
    h = 1
    while h < 2**k:
        spectrum = spectrum.reshape(-1, 2, h)
        spectrum = np.concatenate(
            (spectrum[:, 0] + spectrum[:, 1], spectrum[:, 0] - spectrum[:, 1]), axis=1
        ).reshape(-1)
        h *= 2
    total = len(indices)
    counts = []
    for sub in subgroups:
        mask = sum(1 << i for i in sub.index_set)
        counts.append((total - int(spectrum[mask])) // 2)
    return counts


def sf_ground_truth(g, max_order=20):
    """Check by brute force that the maximum sum-free subsets of G are its odd cosets."""
    from .extremal import max_sum_free

    if g.order > max_order:
        raise EnumerationTooLarge(f"Ground truth is only checked up to order {max_order}")
    size, maximizers = max_sum_free(g, SampleSet.full(g), enumerate_all=True)
    cosets = {odd_coset(sub) for sub in enumerate_index2_subgroups(g)}
    return size == g.n and set(maximizers) == cosets
