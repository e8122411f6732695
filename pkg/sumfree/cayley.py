"""Cayley graphs G_S on the odd coset and H_W on the subgroup.

For ``S ⊆ E`` the graph G_S has vertex set O and an edge {y, z}, y != z,
whenever y + z, y - z or z - y lies in S. Edges are kept once per unordered
pair as ``min * |G| + max`` codes over dense indices, which makes edge sets
cheap to union and intersect with numpy. Vertices y with y + y in S would be
loops; they are not edges but are recorded as the doubling set of the graph.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import networkx as nx
import numpy as np

from .conf import get_caps
from .exceptions import (
    DegeneratePair,
    EnumerationTooLarge,
    GeneratorNotEven,
    PairedGenerators,
    ZeroGenerator,
)
from .groups import GroupElement, SampleSet, m_of_set, r_of_set
from .index2 import even_coset, odd_coset

logger = logging.getLogger(__name__)


def _indices(g, S):
    if isinstance(S, SampleSet):
        return S.indices()
    items = [x.dense_index if isinstance(x, GroupElement) else int(x) for x in S]
    return np.unique(np.asarray(items, dtype=np.int64))


def _check_even(sub, indices):
    if len(indices) and not np.all(sub.contains(indices)):
        raise GeneratorNotEven("Generators must lie in the index-2 subgroup")


def _pair_codes(order, a, b):
    keep = a != b
    a, b = a[keep], b[keep]
    return np.unique(np.minimum(a, b) * order + np.maximum(a, b))


def generator_edges(sub, s):
    """Edge codes of G_s for a single generator given by dense index."""
    g = sub.group
    odd = np.flatnonzero(~sub.even_mask())
    s_arr = np.full_like(odd, s)
    # The three neighbours of y: s - y, y - s and y + s.
    ends = np.concatenate(
        (g.sub_indices(s_arr, odd), g.sub_indices(odd, s_arr), g.add_indices(odd, s_arr))
    )
    starts = np.concatenate((odd, odd, odd))
    return _pair_codes(g.order, starts, ends)


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    group: object
    vertex_set: SampleSet
    generator_set: SampleSet
    edge_codes: np.ndarray
    doubling: SampleSet = field(default=None)

    @property
    def edge_count(self):
        return len(self.edge_codes)

    @property
    def edges(self):
        order = self.group.order
        return np.stack((self.edge_codes // order, self.edge_codes % order), axis=-1)

    @cached_property
    def graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(int(v) for v in self.vertex_set.indices())
        graph.add_edges_from((int(y), int(z)) for y, z in self.edges)
        return graph

    def degrees(self):
        return np.bincount(self.edges.reshape(-1), minlength=self.group.order)[
            self.vertex_set.indices()
        ]

    @property
    def max_degree(self):
        degrees = self.degrees()
        return int(degrees.max()) if len(degrees) else 0

    def degree_histogram(self):
        return nx.degree_histogram(self.graph)

    def neighbours(self, v):
        return sorted(self.graph.neighbors(int(v)))

    def is_independent(self, X):
        """Whether no edge has both ends in X."""
        edges = self.edges
        return not np.any(X.mask[edges[:, 0]] & X.mask[edges[:, 1]])

    def induced_edges(self, X):
        edges = self.edges
        return edges[X.mask[edges[:, 0]] & X.mask[edges[:, 1]]]


def build_cayley(sub, S):
    g = sub.group
    gens = _indices(g, S)
    _check_even(sub, gens)
    if len(gens):
        codes = np.unique(np.concatenate([generator_edges(sub, s) for s in gens]))
    else:
        codes = np.zeros(0, dtype=np.int64)
    odd = odd_coset(sub)
    gen_set = SampleSet.from_indices(g, gens)
    doubled = gen_set.mask[g.double_indices(odd.indices())]
    doubling = SampleSet.from_indices(g, odd.indices()[doubled])
    logger.debug("G_S on %s with |S| = %d: %d edges", g.spec, len(gens), len(codes))
    return CayleyGraph(g, odd, gen_set, codes, doubling)


def build_hw_graph(sub):
    """H_W: the graph on E with an edge {x, y}, x != y, whenever x + y ∈ W."""
    g = sub.group
    even = even_coset(sub).indices()
    starts, ends = [], []
    for w in sub.W.indices():
        starts.append(even)
        ends.append(g.sub_indices(np.full_like(even, w), even))
    if starts:
        codes = _pair_codes(g.order, np.concatenate(starts), np.concatenate(ends))
    else:
        codes = np.zeros(0, dtype=np.int64)
    return CayleyGraph(g, even_coset(sub), sub.W, codes)


def hw_edges_within(sub, S):
    """e(H_W[S]) for a set of dense indices S."""
    g = sub.group
    S = np.asarray(S, dtype=np.int64)
    count = 0
    for x, y in itertools.combinations(S, 2):
        if int(g.add_indices(x, y)) in sub.W:
            count += 1
    return count


def _even_nonzero(sub, x):
    g = sub.group
    if isinstance(x, GroupElement):
        x = x.dense_index
    x = int(x)
    if x == 0:
        raise ZeroGenerator("The generator must be non-zero")
    if not sub.contains(np.array([x]))[0]:
        raise GeneratorNotEven(f"{g.element_at(x)} is not in the subgroup")
    return x


def _is_involution(g, x):
    return int(g.neg_indices(x)) == x


def edge_count_formula(sub, x):
    g = sub.group
    x = _even_nonzero(sub, x)
    n = g.n
    value = Fraction(n) - Fraction(sub.r_O, 2)
    if x in sub.W:
        value -= Fraction(sub.r_E, 2)
    if not _is_involution(g, x):
        value += Fraction(n - sub.r_O, 2)
    assert value.denominator == 1
    return int(value)


def edge_table(sub, x):
    """The four-case summary of e(G_x), keyed on x ∈ W and x = -x."""
    g = sub.group
    x = _even_nonzero(sub, x)
    n, r_O, r_E = Fraction(g.n), Fraction(sub.r_O), Fraction(sub.r_E)
    table = {
        (True, True): n - r_O / 2 - r_E / 2,
        (True, False): 3 * n / 2 - r_O - r_E / 2,
        (False, True): n - r_O / 2,
        (False, False): 3 * n / 2 - r_O,
    }
    return int(table[(x in sub.W, _is_involution(g, x))])


def pairwise_intersection(sub, x, y):
    g = sub.group
    x = _even_nonzero(sub, x)
    y = _even_nonzero(sub, y)
    if y == x or y == int(g.neg_indices(x)):
        raise DegeneratePair("x and y must satisfy x ∉ {y, -y}")
    return len(np.intersect1d(generator_edges(sub, x), generator_edges(sub, y)))


@dataclass(frozen=True)
class EdgeBoundsReport:
    k: int
    r_S: int
    e: int
    upper: float
    upper_ok: bool
    lower_ok: bool
    generator_edges: dict
    sharp_lower: float
    sharp_ok: bool
    small_r: bool


def edge_bounds_check(sub, S, delta):
    g = sub.group
    gens = _indices(g, S)
    _check_even(sub, gens)
    if 0 in gens:
        raise ZeroGenerator("0 must not be a generator")
    gen_set = SampleSet.from_indices(g, gens)
    if m_of_set(g, gen_set):
        raise PairedGenerators("S must not contain a pair {x, -x}")
    k = len(gens)
    r_S = r_of_set(g, gen_set)
    e = build_cayley(sub, gen_set).edge_count
    per = {int(x): edge_count_formula(sub, x) for x in gens}
    upper = (3 * k - r_S) * g.n / 2
    floor = max(g.n - g.r, g.n / 2)
    lower_ok = e >= sum(per.values()) / 2 and all(v >= floor for v in per.values())
    sharp_lower = upper - 2 * sub.r_E * hw_edges_within(sub, gens) - k * g.r
    return EdgeBoundsReport(
        k=k,
        r_S=r_S,
        e=e,
        upper=upper,
        upper_ok=e <= upper,
        lower_ok=lower_ok,
        generator_edges=per,
        sharp_lower=sharp_lower,
        sharp_ok=e >= sharp_lower,
        small_r=g.r <= delta * g.n,
    )


def _candidate_sets(sub, k, cap):
    g = sub.group
    if cap is None:
        cap = get_caps().enumeration_cap
    if math.comb(g.n, k) > cap:
        raise EnumerationTooLarge(f"C({g.n}, {k}) exceeds the enumeration cap {cap}")
    even = even_coset(sub).indices()
    nonzero = [int(x) for x in even if x != 0]
    negs = {x: int(g.neg_indices(x)) for x in nonzero}
    for S in itertools.combinations(nonzero, k):
        members = set(S)
        if any(negs[x] != x and negs[x] in members for x in S):
            continue
        yield S


@dataclass(frozen=True)
class ExceptionalSets:
    regime: str
    sets: list
    small_r_count: int
    small_r_bound: float
    small_r_applicable: bool
    large_r_counts: dict
    large_r_bounds: dict
    large_r_applicable: bool

    @property
    def within_bounds(self):
        ok = True
        if self.small_r_applicable:
            ok = ok and self.small_r_count <= self.small_r_bound
        if self.large_r_applicable:
            ok = ok and all(
                self.large_r_counts[s] <= self.large_r_bounds[s] for s in self.large_r_counts
            )
        return ok


def enumerate_exceptional_sets(sub, k, a, delta, regime=None, cap=None):
    """Every S ⊆ E \\ {0}, |S| = k, m(S) = 0 with few edges in G_S.

    The small-r regime lists the S with e(G_S) <= ((3k - r(S))/2 - ak) n; the
    large-r regime counts, for each s, the S with e(G_S) < (s + 1)(n - r(O)/2).
    Both are reported along with their counting bounds. ``regime`` forces
    which list ends up in ``sets``; by default it follows r(G) vs delta n.
    """
    g = sub.group
    n = g.n
    if regime is None:
        regime = "small" if g.r <= delta * n else "large"
    small, large = [], []
    large_counts = {s: 0 for s in range(k + 1)}
    if k > 0:
        edges = {}
        unit = n - Fraction(sub.r_O, 2)
        for S in _candidate_sets(sub, k, cap):
            for x in S:
                if x not in edges:
                    edges[x] = generator_edges(sub, x)
            e = len(np.unique(np.concatenate([edges[x] for x in S])))
            r_S = sum(1 for x in S if _is_involution(g, x))
            if e <= (Fraction(3 * k - r_S, 2) - Fraction(a) * k) * n:
                small.append(frozenset(S))
            for s in range(k + 1):
                if e < (s + 1) * unit:
                    large_counts[s] += 1
            if e < k * unit:
                large.append(frozenset(S))
    small_bound = (
        (6 / delta**2) ** k * (n / k) ** (k - (a / 2 - delta) * k) if k else 1.0
    )
    large_bounds = {
        s: (12 / delta) ** k * (n / k) ** s if k else 1.0 for s in range(k + 1)
    }
    result = ExceptionalSets(
        regime=regime,
        sets=sorted((small if regime == "small" else large), key=sorted),
        small_r_count=len(small),
        small_r_bound=small_bound,
        small_r_applicable=g.r <= delta * n and 4 * delta <= a <= 1,
        large_r_counts=large_counts,
        large_r_bounds=large_bounds,
        large_r_applicable=g.r >= delta * n,
    )
    logger.info(
        "%s, k=%d: %d small-r exceptional sets, regime %s", g.spec, k, len(small), regime
    )
    return result


@dataclass(frozen=True)
class DenseWCount:
    count: int
    bound: float
    applicable: bool


def count_dense_w_sets(sub, k, a, delta, cap=None):
    """Count k-sets S ⊆ E with e(H_W[S]) >= akn / r(E) against their bound."""
    g = sub.group
    if cap is None:
        cap = get_caps().enumeration_cap
    if math.comb(g.n, k) > cap:
        raise EnumerationTooLarge(f"C({g.n}, {k}) exceeds the enumeration cap {cap}")
    threshold = Fraction(a) * k * g.n / sub.r_E
    W = sub.W
    count = 0
    for S in itertools.combinations(even_coset(sub).indices(), k):
        edges = sum(1 for x, y in itertools.combinations(S, 2) if int(g.add_indices(x, y)) in W)
        if edges >= threshold:
            count += 1
    bound = (6 / delta**2) ** k * (g.n / k) ** (k - (1 - delta) * a * k) if k else 1.0
    return DenseWCount(count, bound, delta <= a <= 0.5)


def janson_parameters(graph, p):
    """mu and Delta of Janson's inequality for the event "no edge of the graph is occupied".

    Delta runs over ordered pairs of distinct edges sharing a vertex, as in
    ``sampling.janson_bound``.
    """
    degrees = graph.degrees().astype(float)
    mu = p**2 * graph.edge_count
    delta = p**3 * float(np.sum(degrees * (degrees - 1)))
    return mu, delta
