"""Exhaustive check batteries behind ``manage.py verify``.

Each battery returns ``(passed, detail)``; ``verify_all`` times them and
collects one entry per battery. Failures are report entries, never
exceptions. Batteries look functions up through their modules so a patched
function is what gets checked.
"""

import itertools
import logging
import math
import time

import numpy as np

from . import cayley, extremal, hypergeom, index2
from .exceptions import ConfigurationError
from .groups import iter_groups
from .sampling import generator

logger = logging.getLogger(__name__)

LEVELS = ("fast", "full")

# Largest group order per battery, as (fast, full).
ORDER_LIMITS = {
    "edge_formula": (64, 512),
    "subgroup_census": (128, 1024),
    "sf_ground_truth": (12, 20),
    "edge_upper_bound": (16, 128),
    "observations": (16, 128),
    "cover_preimages": (12, 24),
}

# Groups up to this order get an exhaustive closure check, larger ones a sampled one.
EXHAUSTIVE_CLOSURE_ORDER = 256
SAMPLED_PAIRS = 4096


def _groups(name, level):
    limit = ORDER_LIMITS[name][LEVELS.index(level)]
    return list(iter_groups(limit, cap=limit))


def _nonzero_evens(sub):
    even = np.flatnonzero(sub.even_mask())
    return [int(x) for x in even if x != 0]


def edge_formula_battery(level, seed):
    checked = 0
    failures = []
    for g in _groups("edge_formula", level):
        for sub in index2.enumerate_index2_subgroups(g):
            for x in _nonzero_evens(sub):
                codes = cayley.generator_edges(sub, x)
                degrees = np.bincount(
                    np.concatenate((codes // g.order, codes % g.order)), minlength=g.order
                )
                formula = cayley.edge_count_formula(sub, x)
                table = cayley.edge_table(sub, x)
                mirrored = cayley.generator_edges(sub, int(g.neg_indices(x)))
                checked += 1
                if (
                    formula != len(codes)
                    or table != formula
                    or degrees.max(initial=0) > 3
                    or not np.array_equal(codes, mirrored)
                ):
                    failures.append(
                        {"group": g.spec, "subgroup": sub.label, "x": x, "formula": formula, "edges": len(codes)}
                    )
    return not failures, {"checked": checked, "failures": failures[:10]}


def subgroup_census_battery(level, seed):
    rng = generator(seed, 0)
    groups = _groups("subgroup_census", level)
    failures = []
    for g in groups:
        subgroups = index2.enumerate_index2_subgroups(g)
        masks = {sub.even_mask().tobytes() for sub in subgroups}
        ok = len(subgroups) == g.r - 1 and len(masks) == len(subgroups)
        for sub in subgroups:
            members = np.flatnonzero(sub.even_mask())
            if len(members) != g.n:
                ok = False
                break
            if g.order <= EXHAUSTIVE_CLOSURE_ORDER:
                sums = g.add_indices(members[:, None], members[None, :])
            else:
                pairs = rng.integers(0, len(members), size=(SAMPLED_PAIRS, 2))
                sums = g.add_indices(members[pairs[:, 0]], members[pairs[:, 1]])
            if not np.all(sub.contains(sums)):
                ok = False
                break
        if not ok:
            failures.append(g.spec)
    return not failures, {"groups": len(groups), "failures": failures[:10]}


def sf_ground_truth_battery(level, seed):
    groups = _groups("sf_ground_truth", level)
    failures = [g.spec for g in groups if not index2.sf_ground_truth(g)]
    return not failures, {"groups": len(groups), "failures": failures}


def _generator_sets(sub, negs, k):
    for S in itertools.combinations(_nonzero_evens(sub), k):
        members = set(S)
        if any(negs[x] != x and negs[x] in members for x in S):
            continue
        yield S


def edge_upper_bound_battery(level, seed):
    """e(G_S) <= ((3k - r(S))/2) n, e(G_S) >= sum of e(G_x)/2 and
    e(G_x) >= max(n - r(G), n/2), for |S| <= 3 with 0 ∉ S and m(S) = 0.
    """
    checked = 0
    failures = []
    for g in _groups("edge_upper_bound", level):
        floor = max(g.n - g.r, g.n / 2)
        for sub in index2.enumerate_index2_subgroups(g):
            evens = _nonzero_evens(sub)
            negs = {x: int(g.neg_indices(x)) for x in evens}
            edges = {x: cayley.generator_edges(sub, x) for x in evens}
            for k in range(1, 4):
                for S in _generator_sets(sub, negs, k):
                    e = len(np.unique(np.concatenate([edges[x] for x in S])))
                    r_S = sum(1 for x in S if negs[x] == x)
                    checked += 1
                    if (
                        2 * e > (3 * k - r_S) * g.n
                        or 2 * e < sum(len(edges[x]) for x in S)
                        or any(len(edges[x]) < floor for x in S)
                    ):
                        failures.append({"group": g.spec, "subgroup": sub.label, "S": list(S), "e": e})
    return not failures, {"checked": checked, "failures": failures[:10]}


def observations_battery(level, seed):
    """Pairwise intersections of the graphs G_x, the degree of H_W and the
    summed intersection bound over sets S with |S| <= 3 and m(S) = 0.
    """
    checked = 0
    failures = []
    for g in _groups("observations", level):
        for sub in index2.enumerate_index2_subgroups(g):
            evens = _nonzero_evens(sub)
            negs = {x: int(g.neg_indices(x)) for x in evens}
            edges = {x: cayley.generator_edges(sub, x) for x in evens}
            W = sub.W
            meets = {}
            for x, y in itertools.combinations(evens, 2):
                if y == negs[x]:
                    continue
                common = len(np.intersect1d(edges[x], edges[y], assume_unique=True))
                meets[x, y] = common
                checked += 1
                if common > 2 * sub.r_E or (common and int(g.add_indices(x, y)) not in W):
                    failures.append({"group": g.spec, "subgroup": sub.label, "x": x, "y": y})
            hw = cayley.build_hw_graph(sub)
            if hw.max_degree > len(W):
                failures.append({"group": g.spec, "subgroup": sub.label, "hw_degree": hw.max_degree})
            for k in (2, 3):
                for S in _generator_sets(sub, negs, k):
                    total = sum(meets[x, y] for x, y in itertools.combinations(S, 2))
                    if total > 2 * sub.r_E * cayley.hw_edges_within(sub, S):
                        failures.append({"group": g.spec, "subgroup": sub.label, "S": list(S)})
    return not failures, {"checked": checked, "failures": failures[:10]}


def cover_preimages_battery(level, seed):
    """Preimage counts of cover-maximal Z with |Z| <= 2 stay within 12^|Z|,
    and no cover-maximal Z holds a pair {a, -a} with a != -a.
    """
    checked = 0
    largest = {1: 0, 2: 0}
    failures = []
    for g in _groups("cover_preimages", level):
        for sub in index2.enumerate_index2_subgroups(g):
            odd = np.flatnonzero(~sub.even_mask())
            vertices = odd if level == "full" else odd[:1]
            evens = _nonzero_evens(sub)
            for u in (int(v) for v in vertices):
                for size in (1, 2):
                    for Z in itertools.combinations(evens, size):
                        record = extremal.cover_analysis(sub, u, Z)
                        checked += 1
                        if not record.g_Z:
                            failures.append({"group": g.spec, "u": u, "Z": list(Z), "g_Z": "empty"})
                        if not record.is_cover_maximal:
                            continue
                        if size == 2 and Z[1] == int(g.neg_indices(Z[0])) and Z[0] != Z[1]:
                            failures.append({"group": g.spec, "u": u, "Z": list(Z), "pair": True})
                        count = extremal.count_preimages(sub, u, Z)
                        largest[size] = max(largest[size], count)
                        if count > 12**size:
                            failures.append({"group": g.spec, "u": u, "Z": list(Z), "count": count})
    return not failures, {"checked": checked, "largest_counts": largest, "failures": failures[:10]}


def hypergeometric_battery(level, seed):
    checks = {}
    N, a = 10**6, 10**4
    for b in (0, 20, 50):
        exact = hypergeom.binom_ratio_exact(N, a, b)
        approx = hypergeom.binom_ratio_asymptotic(a, b)
        checks[f"binom_ratio_b{b}"] = abs(exact - approx) / exact <= 0.01
    ctx = hypergeom.HypergeomContext.create(10**5, 10**4, 150)
    exact = hypergeom.tail_probability_exact(ctx)
    approx = hypergeom.tail_probability_asymptotic(ctx, finite_population=True)
    checks["tail"] = abs(exact - approx) / exact <= 0.10
    checks["pmf_total"] = abs(hypergeom.pmf_total(ctx) - 1) <= 1e-10
    ratio = hypergeom.pair_probability_exact(ctx) / exact**2
    checks["pair_ratio"] = 0.9 <= ratio <= 1.1
    value, reference = hypergeom.gaussian_sum(10**4)
    checks["gaussian_sum"] = abs(value - reference) / reference <= 1e-3
    m, n = 10**4, 10**6
    root = math.isqrt(m)
    for k in (root, 2 * root, 3 * root):
        base = hypergeom.tail_probability_exact(hypergeom.HypergeomContext.create(n, m, k))
        for h in (1, 2):
            shifted = hypergeom.tail_probability_exact(hypergeom.HypergeomContext.create(n, m, k + h))
            checks[f"stability_k{k}_h{h}"] = (base - shifted) / base <= 10 * h * k / m
    failed = sorted(name for name, ok in checks.items() if not ok)
    return not failed, {"checked": len(checks), "failures": failed, "pair_ratio": ratio}


BATTERIES = (
    ("edge_formula", edge_formula_battery),
    ("subgroup_census", subgroup_census_battery),
    ("sf_ground_truth", sf_ground_truth_battery),
    ("edge_upper_bound", edge_upper_bound_battery),
    ("observations", observations_battery),
    ("cover_preimages", cover_preimages_battery),
    ("hypergeometric", hypergeometric_battery),
)


def verify_all(level="fast", seed=0, only=None):
    if level not in LEVELS:
        raise ConfigurationError(f'Unknown level "{level}": expected fast or full')
    entries = []
    for name, battery in BATTERIES:
        if only is not None and name not in only:
            continue
        start = time.perf_counter()
        passed, detail = battery(level, seed)
        runtime = time.perf_counter() - start
        logger.info("%s: %s in %.2fs", name, "passed" if passed else "FAILED", runtime)
        entries.append(
            {
                "name": name,
                "passed": bool(passed),
                "runtime": round(runtime, 3),
                "seed": int(seed),
                "detail": detail,
            }
        )
    return {
        "level": level,
        "seed": int(seed),
        "passed": all(entry["passed"] for entry in entries),
        "batteries": entries,
    }
