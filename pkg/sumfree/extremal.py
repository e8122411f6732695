"""Sum-free sets: certificates, exact maximum sum-free subsets, safe elements,
cover-maximal sets and the local-improvement event B_k.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .conf import get_caps
from .exceptions import (
    ConfigurationError,
    CoverCapExceeded,
    EnumerationTooLarge,
    NotAWitness,
    SolverCapExceeded,
    VertexInA,
)
from .groups import GroupElement, SampleSet
from .index2 import coset_counts, enumerate_index2_subgroups, even_coset, odd_coset

logger = logging.getLogger(__name__)


def _as_indices(items):
    if isinstance(items, SampleSet):
        return items.indices()
    return np.asarray(
        sorted({x.dense_index if isinstance(x, GroupElement) else int(x) for x in items}),
        dtype=np.int64,
    )


@dataclass(frozen=True)
class SumFreeCertificate:
    set: SampleSet
    witness: tuple | None = None

    @property
    def is_sum_free(self):
        return self.witness is None


def is_sum_free(g, B):
    """Certificate for B; the witness is the first (x, y, x + y) with x <= y."""
    indices = B.indices()
    for i, x in enumerate(indices):
        ys = indices[i:]
        sums = g.add_indices(np.full_like(ys, x), ys)
        hits = np.flatnonzero(B.mask[sums])
        if len(hits):
            y = ys[hits[0]]
            witness = (g.element_at(x), g.element_at(y), g.element_at(sums[hits[0]]))
            return SumFreeCertificate(B, witness)
    return SumFreeCertificate(B)


def schur_constraints(g, indices):
    """Sets {x, y, x + y} inside ``indices``, as frozensets of positions."""
    indices = np.asarray(indices, dtype=np.int64)
    position = {int(v): i for i, v in enumerate(indices)}
    constraints = set()
    if not len(indices):
        return constraints
    sums = g.add_indices(indices[:, None], indices[None, :])
    for i, j in zip(*np.nonzero(np.isin(sums, indices))):
        if i <= j:
            constraints.add(frozenset((int(i), int(j), position[int(sums[i, j])])))
    return constraints


class SchurSolver:
    """Branch and bound for the largest subsets of A avoiding every Schur triple.

    Positions are branched in order of decreasing Schur-triple degree. A node's
    bound is its size plus the still-includable positions, minus a greedy
    packing of disjoint constraints that each force one more exclusion.
    """

    def __init__(self, g, A, enumerate_all):
        self.group = g
        self.indices = A.indices()
        self.enumerate_all = enumerate_all
        self.constraints = [sum(1 << v for v in c) for c in schur_constraints(g, self.indices)]
        size = len(self.indices)
        degree = [0] * size
        self.rests = [[] for _ in range(size)]
        for c in self.constraints:
            for v in range(size):
                if c >> v & 1:
                    degree[v] += 1
                    self.rests[v].append(c & ~(1 << v))
        self.order = sorted(range(size), key=lambda v: (-degree[v], v))
        greedy = self._greedy(sorted(range(size), key=lambda v: (degree[v], v)))
        self.best = bin(greedy).count("1")
        # Enumeration must rediscover every maximizer, so it starts empty.
        self.found = [] if enumerate_all else [greedy]
        self.nodes = 0

    def _includable(self, v, chosen):
        return all((rest & chosen) != rest for rest in self.rests[v])

    def _greedy(self, order):
        chosen = 0
        for v in order:
            if self._includable(v, chosen):
                chosen |= 1 << v
        return chosen

    def bound(self, depth, chosen, size):
        free = 0
        for v in self.order[depth:]:
            if self._includable(v, chosen):
                free |= 1 << v
        live = chosen | free
        used = 0
        packing = 0
        for c in self.constraints:
            if c & live == c:
                part = c & free
                if part and not part & used:
                    used |= part
                    packing += 1
        return size + bin(free).count("1") - packing

    def branch(self, depth, chosen, size):
        self.nodes += 1
        if depth == len(self.order):
            if size > self.best:
                self.best = size
                self.found = [chosen]
            elif size == self.best and self.enumerate_all:
                self.found.append(chosen)
            return
        bound = self.bound(depth, chosen, size)
        if bound < self.best or (not self.enumerate_all and bound <= self.best):
            return
        v = self.order[depth]
        if self._includable(v, chosen):
            self.branch(depth + 1, chosen | 1 << v, size + 1)
        self.branch(depth + 1, chosen, size)

    def run(self):
        self.branch(0, 0, 0)
        logger.debug(
            "SchurSolver |A|=%d: size %d, %d maximizers, %d nodes",
            len(self.indices), self.best, len(self.found), self.nodes,
        )
        sets = []
        for chosen in self.found:
            members = [self.indices[v] for v in range(len(self.indices)) if chosen >> v & 1]
            sets.append(SampleSet.from_indices(self.group, members))
        sets.sort(key=lambda s: s.indices().tolist())
        return self.best, sets


def max_sum_free(g, A, enumerate_all=False, cap=None):
    caps = get_caps()
    if cap is None:
        cap = caps.solver_enumerate_cap if enumerate_all else caps.solver_size_cap
    if len(A) > cap:
        raise SolverCapExceeded(f"|A| = {len(A)} exceeds the solver cap {cap}")
    return SchurSolver(g, A, enumerate_all).run()


def _odd_part(sub, A):
    return A.indices()[~sub.contains(A.indices())]


def _even_part(sub, A):
    return A.indices()[sub.contains(A.indices())]


def unsafe_elements(sub, B, strict=True):
    """Elements x of E for which B ∪ {x} has a Schur triple, for B ⊆ O."""
    g = sub.group
    B = np.asarray(B, dtype=np.int64)
    unsafe = np.zeros(g.order, dtype=bool)
    if len(B):
        sums = g.add_indices(B[:, None], B[None, :])
        diffs = g.sub_indices(B[:, None], B[None, :])
        upper = np.triu(np.ones((len(B), len(B)), dtype=bool), k=1)
        unsafe[sums[upper]] = True
        unsafe[diffs[~np.eye(len(B), dtype=bool)]] = True
        if strict:
            unsafe[np.diagonal(sums)] = True
    return unsafe


def safe_elements(sub, A, strict=True):
    """S^E(A): the x ∈ E \\ {0} for which (A ∩ O) ∪ {x} is sum-free."""
    g = sub.group
    safe = sub.even_mask() & ~unsafe_elements(sub, _odd_part(sub, A), strict)
    safe[0] = False
    return SampleSet(g, safe)


def difference_set(sub, A, u, strict=True):
    g = sub.group
    u = u.dense_index if isinstance(u, GroupElement) else int(u)
    if u in A:
        raise VertexInA(f"{g.element_at(u)} is already in A")
    if sub.contains(np.array([u]))[0]:
        raise ConfigurationError(f"{g.element_at(u)} is not in the odd coset")
    before = safe_elements(sub, A, strict)
    after = safe_elements(sub, A | SampleSet.from_indices(g, [u]), strict)
    return before - after


def cover_neighbourhood(sub, u, z):
    """N_{G_z}(u) as a frozenset of dense indices."""
    g = sub.group
    candidates = {int(g.sub_indices(z, u)), int(g.sub_indices(u, z)), int(g.add_indices(u, z))}
    candidates.discard(u)
    return frozenset(candidates)


def min_cover_size(neighbourhoods, limit=None):
    """Smallest hitting set of a list of sets, by exact branching."""
    neighbourhoods = [frozenset(n) for n in neighbourhoods]
    if limit is None:
        limit = len(neighbourhoods)

    def search(remaining, budget):
        if not remaining:
            return 0
        if budget <= 0:
            return None
        target = min(remaining, key=len)
        best = None
        for y in sorted(target):
            found = search([n for n in remaining if y not in n], budget - 1)
            if found is not None:
                best = found + 1
                # anything else has to beat this
                budget = found
        return best

    found = search(neighbourhoods, limit)
    return limit if found is None else found


def is_cover_maximal(sub, u, Z):
    Z = list(Z)
    neighbourhoods = [cover_neighbourhood(sub, u, z) for z in Z]
    return min_cover_size(neighbourhoods) >= len(Z)


@dataclass(frozen=True)
class CoverRecord:
    u: int
    Z: tuple
    min_cover_size: int
    is_cover_maximal: bool
    g_Z: tuple


def _check_cover_input(sub, u, Z, cap):
    g = sub.group
    u = u.dense_index if isinstance(u, GroupElement) else int(u)
    Z = tuple(int(z) for z in _as_indices(Z))
    if cap is None:
        cap = get_caps().cover_cap
    if len(Z) > cap:
        raise CoverCapExceeded(f"|Z| = {len(Z)} exceeds the cover cap {cap}")
    if sub.contains(np.array([u]))[0]:
        raise ConfigurationError(f"u = {g.element_at(u)} must lie in the odd coset")
    if Z and (0 in Z or not np.all(sub.contains(np.array(Z)))):
        raise ConfigurationError("Z must be a subset of E \\ {0}")
    return u, Z


def cover_analysis(sub, u, Z, cap=None):
    u, Z = _check_cover_input(sub, u, Z, cap)
    neighbourhoods = {z: cover_neighbourhood(sub, u, z) for z in Z}
    minimum = min_cover_size(list(neighbourhoods.values()))
    g_Z = ()
    for size in range(len(Z), 0, -1):
        # combinations of a sorted tuple come out in lexicographic order
        for subset in itertools.combinations(Z, size):
            if min_cover_size([neighbourhoods[z] for z in subset]) >= size:
                g_Z = subset
                break
        if g_Z:
            break
    return CoverRecord(u, Z, minimum, minimum >= len(Z), g_Z)


def count_preimages(sub, u, Z, cap=None):
    """Number of Z' ⊆ E \\ {0} with g(Z') = Z under the lexicographic tie-break.

    g(Z') is the largest cover-maximal subset of Z'. Cover-maximality is
    inherited by subsets, so g(Z') = Z exactly when Z' ⊇ Z contains no
    cover-maximal set of size |Z| + 1 and no cover-maximal |Z|-set that
    precedes Z. Both conditions fail upwards, which lets a depth-first
    search over supersets stop at the first offending element.
    """
    u, Z = _check_cover_input(sub, u, Z, 4)
    if cap is None:
        cap = get_caps().preimage_cap
    if not is_cover_maximal(sub, u, Z):
        raise ConfigurationError("Z must be cover-maximal")
    g = sub.group
    ground = [int(x) for x in even_coset(sub).indices() if x != 0]
    if math.comb(len(ground), len(Z) + 1) > cap:
        raise EnumerationTooLarge(f"Too many candidate sets around {len(ground)} elements")
    position = {x: i for i, x in enumerate(ground)}
    neighbourhoods = {x: cover_neighbourhood(sub, u, x) for x in ground}

    def maximal(subset):
        return min_cover_size([neighbourhoods[x] for x in subset]) >= len(subset)

    forbidden = []
    for subset in itertools.combinations(ground, len(Z) + 1):
        if maximal(subset):
            forbidden.append(sum(1 << position[x] for x in subset))
    for subset in itertools.combinations(ground, len(Z)):
        if subset < Z and maximal(subset):
            forbidden.append(sum(1 << position[x] for x in subset))
    rest = [position[x] for x in ground if x not in Z]
    start = sum(1 << position[z] for z in Z)
    nodes = 0

    def search(chosen, first):
        nonlocal nodes
        count = 1
        for j in range(first, len(rest)):
            nodes += 1
            if nodes > cap:
                raise EnumerationTooLarge(f"Preimage search exceeded {cap} nodes")
            extended = chosen | 1 << rest[j]
            if any(f & extended == f for f in forbidden):
                continue
            count += search(extended, j + 1)
        return count

    count = search(start, 0)
    logger.debug("count_preimages(%s, u=%d, Z=%s) = %d", g.spec, u, Z, count)
    return count


@dataclass(frozen=True)
class Conflicts:
    doubling: np.ndarray
    edges: np.ndarray


def conflicts(sub, A, S):
    """What stops (A ∩ O) ∪ S from being sum-free, given that S itself is.

    ``doubling`` lists the a ∈ A ∩ O with a + a ∈ S, ``edges`` the edges of
    G_S with both ends in A ∩ O.
    """
    g = sub.group
    B = _odd_part(sub, A)
    S = _as_indices(S)
    in_B = np.zeros(g.order, dtype=bool)
    in_B[B] = True
    in_S = np.zeros(g.order, dtype=bool)
    in_S[S] = True
    doubling = B[in_S[g.double_indices(B)]] if len(B) else B
    codes = [np.zeros(0, dtype=np.int64)]
    for s in S:
        s_arr = np.full_like(B, s)
        for ends in (g.sub_indices(s_arr, B), g.sub_indices(B, s_arr), g.add_indices(B, s_arr)):
            keep = in_B[ends] & (ends != B)
            a, b = B[keep], ends[keep]
            codes.append(np.minimum(a, b) * g.order + np.maximum(a, b))
    codes = np.unique(np.concatenate(codes))
    edges = np.stack((codes // g.order, codes % g.order), axis=-1)
    return Conflicts(doubling, edges)


def _vertex_cover(edges, budget):
    """A vertex cover with at most ``budget`` vertices, or None."""
    if not edges:
        return []
    if budget == 0:
        return None
    y, z = edges[0]
    for v in (y, z):
        rest = [e for e in edges if v not in e]
        cover = _vertex_cover(rest, budget - 1)
        if cover is not None:
            return [v] + cover
    return None


def _removal_set(sub, A, S, budget):
    """Smallest-first T ⊆ A ∩ O with |T| <= budget making ((A ∩ O) ∪ S) \\ T sum-free."""
    found = conflicts(sub, A, S)
    doubling = {int(v) for v in found.doubling}
    if len(doubling) > budget:
        return None
    edges = [
        (int(y), int(z)) for y, z in found.edges if int(y) not in doubling and int(z) not in doubling
    ]
    cover = _vertex_cover(edges, budget - len(doubling))
    if cover is None:
        return None
    return sorted(doubling | set(cover))


def bk_event(sub, A, k, cap=None):
    """A witness (S, T) of the event B_k, or None.

    S ranges over the k-subsets of A ∩ E that are sum-free and avoid 0; T is
    then the doubling vertices plus a vertex cover of G_S[A ∩ O].
    """
    g = sub.group
    if cap is None:
        cap = get_caps().enumeration_cap
    evens = [int(x) for x in _even_part(sub, A)]
    if math.comb(len(evens), k) > cap:
        raise EnumerationTooLarge(f"C({len(evens)}, {k}) exceeds the enumeration cap {cap}")
    for S in itertools.combinations(evens, k):
        if 0 in S:
            continue
        if not is_sum_free(g, SampleSet.from_indices(g, S)).is_sum_free:
            continue
        T = _removal_set(sub, A, S, k)
        if T is not None:
            return list(S), T
    return None


@dataclass(frozen=True)
class GoodTriple:
    S: tuple
    T: tuple
    U: tuple

    @property
    def k(self):
        return len(self.S)


def _independent_without(codes_edges, removed, vertices):
    for y, z in codes_edges:
        if y in vertices and z in vertices and y not in removed and z not in removed:
            return False
    return True


def extract_good_triple(sub, A, S, T):
    g = sub.group
    S = [int(x) for x in _as_indices(S)]
    T = [int(x) for x in _as_indices(T)]
    odd = {int(x) for x in _odd_part(sub, A)}
    if not set(T) <= odd or not set(S) <= {int(x) for x in _even_part(sub, A)}:
        raise NotAWitness("T must lie in A ∩ O and S in A ∩ E")
    if len(T) > len(S):
        raise NotAWitness("|T| must not exceed |S|")
    kept = SampleSet.from_indices(g, sorted((odd - set(T)) | set(S)))
    if not is_sum_free(g, kept).is_sum_free:
        raise NotAWitness("((A ∩ O) ∪ S) \\ T is not sum-free")
    edges = [(int(y), int(z)) for y, z in conflicts(sub, A, S).edges]
    # Shrink T while (A ∩ O) \ T stays independent in G_S.
    removed = set(T)
    for t in sorted(T, reverse=True):
        if _independent_without(edges, removed - {t}, odd):
            removed.discard(t)
    T = sorted(removed)
    outside = odd - removed
    adjacency = {t: [] for t in T}
    for y, z in edges:
        if y in removed and z in outside:
            adjacency[y].append(z)
        elif z in removed and y in outside:
            adjacency[z].append(y)
    matched = set()
    for t in T:
        for v in sorted(adjacency[t]):
            if v not in matched:
                matched.add(v)
                break
    triple = GoodTriple(tuple(S), tuple(T), tuple(sorted(matched)))
    assert check_good_triple(sub, A, triple)
    return triple


def check_good_triple(sub, A, triple):
    odd = {int(x) for x in _odd_part(sub, A)}
    T, U = set(triple.T), set(triple.U)
    if T & U or not T <= odd or not U <= odd:
        return False
    if not len(U) <= len(T) <= triple.k:
        return False
    edges = [(int(y), int(z)) for y, z in conflicts(sub, A, triple.S).edges]
    if not _independent_without(edges, T, odd):
        return False
    neighbours = {t: set() for t in T}
    for y, z in edges:
        if y in T:
            neighbours[y].add(z)
        if z in T:
            neighbours[z].add(y)
    return all(neighbours[t] & U for t in T)


def ck_event(g, A, sub, k, subgroups=None):
    """Whether |A ∩ O'| < |A ∩ O| + k for every odd coset O'."""
    if subgroups is None:
        subgroups = enumerate_index2_subgroups(g)
    counts = coset_counts(g, subgroups + [sub], A)
    own = counts[-1]
    return all(c < own + k for c in counts[:-1])


def stability_distance(g, A):
    """Smallest |B \\ O| over maximum sum-free B ⊆ A and odd cosets O."""
    _, maximizers = max_sum_free(g, A, enumerate_all=True)
    cosets = [odd_coset(sub) for sub in enumerate_index2_subgroups(g)]
    return min(len(B - O) for B in maximizers for O in cosets)
