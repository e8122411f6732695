"""Finite abelian groups of even order as direct sums of cyclic groups.

A group is stored as the exponents ``a_1 <= ... <= a_k`` of its cyclic
2-power factors followed by the odd moduli of its odd part. Elements are
residue vectors; every element also has a dense index in ``[0, 2n)``, the
mixed-radix number whose most significant digit is the first factor. Dense
indices address the bitsets of ``SampleSet`` and back all the vectorised
arithmetic (``add_indices`` and friends) the other modules rely on.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .conf import get_caps
from .exceptions import (
    ConfigurationError,
    ElementOutOfRange,
    EmptyEvenPart,
    OrderOverflow,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupElement:
    residues: tuple[int, ...]
    dense_index: int

    def __str__(self):
        return "(" + ",".join(str(r) for r in self.residues) + ")"


@dataclass(frozen=True)
class AbelianGroup:
    even_factors: tuple[int, ...]
    odd_factors: tuple[int, ...]

    @cached_property
    def moduli(self):
        return tuple(2**a for a in self.even_factors) + tuple(self.odd_factors)

    @cached_property
    def order(self):
        return math.prod(self.moduli)

    @property
    def n(self):
        return self.order // 2

    @property
    def k(self):
        return len(self.even_factors)

    @property
    def r(self):
        """r(G), the number of elements with x = -x."""
        return 2**self.k

    @cached_property
    def weights(self):
        weights = []
        weight = 1
        for modulus in reversed(self.moduli):
            weights.append(weight)
            weight *= modulus
        return tuple(reversed(weights))

    @property
    def spec(self):
        return "*".join(f"Z{m}" for m in self.moduli)

    @property
    def is_cyclic(self):
        if self.k != 1:
            return False
        return all(
            math.gcd(a, b) == 1 for a, b in itertools.combinations(self.odd_factors, 2)
        )

    def __str__(self):
        return " + ".join(f"Z_{m}" for m in self.moduli)

    # Scalar arithmetic

    def element(self, residues):
        residues = tuple(int(r) for r in residues)
        if len(residues) != len(self.moduli):
            raise ElementOutOfRange(
                f"{self.spec} has {len(self.moduli)} factors, got {len(residues)} residues"
            )
        for residue, modulus in zip(residues, self.moduli):
            if not 0 <= residue < modulus:
                raise ElementOutOfRange(
                    f"Residue {residue} out of range for factor Z{modulus}"
                )
        index = sum(r * w for r, w in zip(residues, self.weights))
        return GroupElement(residues, index)

    def element_at(self, index):
        index = int(index)
        if not 0 <= index < self.order:
            raise ElementOutOfRange(f"Dense index {index} out of range for {self.spec}")
        residues = tuple(
            (index // w) % m for w, m in zip(self.weights, self.moduli)
        )
        return GroupElement(residues, index)

    @property
    def zero(self):
        return GroupElement((0,) * len(self.moduli), 0)

    def _check(self, x):
        if len(x.residues) != len(self.moduli) or any(
            not 0 <= r < m for r, m in zip(x.residues, self.moduli)
        ):
            raise ElementOutOfRange(f"{x} is not an element of {self.spec}")

    def add(self, x, y):
        self._check(x)
        self._check(y)
        return self.element((a + b) % m for a, b, m in zip(x.residues, y.residues, self.moduli))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def neg(self, x):
        self._check(x)
        return self.element((-a) % m for a, m in zip(x.residues, self.moduli))

    # Vectorised arithmetic over dense indices

    def all_indices(self):
        return np.arange(self.order, dtype=np.int64)

    def digits(self, indices):
        """Residue matrix of shape (len(indices), number of factors)."""
        indices = np.asarray(indices, dtype=np.int64)
        return np.stack(
            [(indices // w) % m for w, m in zip(self.weights, self.moduli)], axis=-1
        )

    def from_digits(self, digits):
        digits = np.asarray(digits, dtype=np.int64)
        return digits @ np.asarray(self.weights, dtype=np.int64)

    def _combine(self, a, b, sign):
        moduli = np.asarray(self.moduli, dtype=np.int64)
        return self.from_digits((self.digits(a) + sign * self.digits(b)) % moduli)

    def add_indices(self, a, b):
        return self._combine(a, b, 1)

    def sub_indices(self, a, b):
        return self._combine(a, b, -1)

    def neg_indices(self, a):
        moduli = np.asarray(self.moduli, dtype=np.int64)
        return self.from_digits((-self.digits(a)) % moduli)

    def double_indices(self, a):
        return self._combine(a, a, 1)

    def parity(self, indices, index_set):
        """Parity of the sum of the residues at the given even-factor positions."""
        digits = self.digits(indices)
        return digits[..., list(index_set)].sum(axis=-1) % 2


def make_group(even_exponents, odd_moduli=(), cap=None):
    even = tuple(sorted(int(a) for a in even_exponents))
    odd = tuple(sorted(int(q) for q in odd_moduli))
    if not even:
        raise EmptyEvenPart("The group must have at least one even cyclic factor")
    if even[0] < 1:
        raise ConfigurationError("Even exponents must be at least 1")
    for q in odd:
        if q < 3 or q % 2 == 0:
            raise ConfigurationError(f"Odd modulus {q} must be odd and at least 3")
    group = AbelianGroup(even, odd)
    if cap is None:
        cap = get_caps().element_cap
    if group.order > cap:
        raise OrderOverflow(f"Order {group.order} of {group.spec} exceeds the element cap {cap}")
    return group


def enumerate_elements(g):
    for index in range(g.order):
        yield g.element_at(index)


def self_inverse_elements(g):
    """Dense indices of R(G), in increasing order."""
    choices = [(0, 2 ** (a - 1)) for a in g.even_factors] + [(0,)] * len(g.odd_factors)
    return np.sort(g.from_digits(np.array(list(itertools.product(*choices)))))


def r_of_set(g, X):
    indices = X.indices()
    return int(np.count_nonzero(g.neg_indices(indices) == indices))


def m_of_set(g, X):
    indices = X.indices()
    negated = g.neg_indices(indices)
    paired = X.mask[negated] & (negated != indices)
    return int(np.count_nonzero(paired)) // 2


def from_integer(g, v):
    """The element with integer label ``v`` in a cyclic group (CRT labels)."""
    if not g.is_cyclic:
        raise ConfigurationError(f"Integer labels need a cyclic group, {g.spec} is not")
    v = int(v)
    if not 0 <= v < g.order:
        raise ElementOutOfRange(f"{v} out of range for Z{g.order}")
    return g.element(v % m for m in g.moduli)


def to_integer(g, x):
    if not g.is_cyclic:
        raise ConfigurationError(f"Integer labels need a cyclic group, {g.spec} is not")
    total = 0
    for residue, modulus in zip(x.residues, g.moduli):
        rest = g.order // modulus
        total += residue * rest * pow(rest, -1, modulus)
    return total % g.order


def _partitions(total, smallest=1):
    if total == 0:
        yield ()
        return
    for part in range(smallest, total + 1):
        for rest in _partitions(total - part, part):
            yield (part,) + rest


def _odd_factorisations(q, smallest=3):
    if q == 1:
        yield ()
        return
    for d in range(smallest, q + 1, 2):
        if q % d == 0:
            for rest in _odd_factorisations(q // d, d):
                yield (d,) + rest


def iter_groups(max_order, min_order=2, cap=None):
    """Every decomposition of every even order in ``[min_order, max_order]``.

    Odd parts are listed in all their factorisations into odd moduli, so
    ``Z3*Z3`` and ``Z9`` both appear.
    """
    groups = []
    for order in range(max(2, min_order), max_order + 1, 2):
        e = (order & -order).bit_length() - 1
        q = order >> e
        for even in _partitions(e):
            for odd in _odd_factorisations(q):
                groups.append(make_group(even, odd, cap=cap))
    groups.sort(key=lambda g: (g.order, g.even_factors, g.odd_factors))
    logger.debug("iter_groups(%d): %d groups", max_order, len(groups))
    return iter(groups)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """A subset of a group as a boolean mask over dense indices."""

    group: AbelianGroup
    mask: np.ndarray
    law: str | None = None

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (self.group.order,):
            raise ConfigurationError("SampleSet mask does not match the group order")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_indices(cls, group, indices, law=None):
        mask = np.zeros(group.order, dtype=bool)
        if isinstance(indices, np.ndarray):
            indices = indices.astype(np.int64)
        else:
            indices = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= group.order):
            raise ElementOutOfRange(f"Dense index out of range for {group.spec}")
        mask[indices] = True
        return cls(group, mask, law)

    @classmethod
    def from_elements(cls, group, elements, law=None):
        return cls.from_indices(group, [x.dense_index for x in elements], law)

    @classmethod
    def empty(cls, group):
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group):
        return cls(group, np.ones(group.order, dtype=bool))

    def indices(self):
        return np.flatnonzero(self.mask)

    def elements(self):
        return [self.group.element_at(i) for i in self.indices()]

    def __len__(self):
        return int(np.count_nonzero(self.mask))

    def __iter__(self):
        return iter(int(i) for i in self.indices())

    def __contains__(self, x):
        index = x.dense_index if isinstance(x, GroupElement) else int(x)
        return 0 <= index < self.group.order and bool(self.mask[index])

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.group == other.group and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.group, self.mask.tobytes()))

    def __and__(self, other):
        return SampleSet(self.group, self.mask & other.mask, self.law)

    def __or__(self, other):
        return SampleSet(self.group, self.mask | other.mask, self.law)

    def __sub__(self, other):
        return SampleSet(self.group, self.mask & ~other.mask, self.law)

    def issubset(self, other):
        return not np.any(self.mask & ~other.mask)

    def __repr__(self):
        return f"SampleSet({self.group.spec}, {sorted(self)})"
