"""Desk-scale experiments: the threshold profile, p-sweeps for the 0- and
1-statements, concentration of the number of safe elements and the check
that some maximizing odd coset is nice.

Samples for different p share ``(seed, trial)``, so a sweep is a monotone
coupling: A(p) ⊆ A(p') whenever p <= p'.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .cayley import edge_count_formula
from .exceptions import NotNice, RangeError
from .extremal import bk_event, max_sum_free, safe_elements
from .index2 import coset_counts, enumerate_index2_subgroups, is_nice, make_subgroup, odd_coset
from .sampling import (
    Z95,
    EventTrial,
    LawFamily,
    SampleLaw,
    collect_trials,
    odd_probability,
    run_trials,
    sample,
)
from .utils.runconfig import content_hash

logger = logging.getLogger(__name__)

TINY_ORDER = 20

P_RANDOM = LawFamily("p_random")


@dataclass(frozen=True)
class ThresholdProfile:
    alpha: float
    beta: float
    delta: float
    lam: float
    p_star: float
    branch: str


def compute_profile(g, delta):
    """Evaluate the threshold exponent for G; branches are tried in order."""
    if g.n < 2:
        raise RangeError(f"The profile needs n >= 2, got n = {g.n}")
    if not 0 < delta < 1:
        raise RangeError(f"delta = {delta} must lie in (0, 1)")
    log_n = math.log(g.n)
    alpha = math.log(g.r) / log_n
    beta = g.r / g.n
    if alpha <= 5 / 6:
        lam, branch = 1 / 3, "alpha<=5/6"
    elif beta < delta:
        lam, branch = alpha - 1 / 2, "beta<delta"
    else:
        lam, branch = 2 / (4 - beta), "beta>=delta"
    return ThresholdProfile(alpha, beta, delta, lam, math.sqrt(lam * log_n / g.n), branch)


def default_subgroup(g, delta):
    """The first nice index-2 subgroup, by index-set size then lexicographically."""
    for size in range(1, g.k + 1):
        for index_set in itertools.combinations(range(g.k), size):
            sub = make_subgroup(g, index_set)
            if is_nice(g, sub, delta):
                return sub
    raise NotNice(f"{g.spec} has no nice index-2 subgroup for delta = {delta}")


@dataclass(frozen=True)
class SweepRow:
    p: float
    event: str
    estimate: float
    half_width: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    p_grid: tuple
    event_name: str
    rows: tuple
    crossing_p: float | None
    manifest: dict

    @property
    def estimates(self):
        """(p, estimate, half_width, trials) of the headline event, one per grid point."""
        return [
            (row.p, row.estimate, row.half_width, row.trials)
            for row in self.rows
            if row.event == self.event_name
        ]


def crossing_point(points, height=0.5):
    """First p where the piecewise-linear curve through ``points`` meets ``height``."""
    if not points:
        return None
    p0, e0 = points[0]
    if e0 == height:
        return p0
    for (p0, e0), (p1, e1) in itertools.pairwise(points):
        if e1 == height:
            return p1
        if (e0 - height) * (e1 - height) < 0:
            return p0 + (height - e0) * (p1 - p0) / (e1 - e0)
    return None


def sweep_manifest(experiment, g, p_grid, trials, seed, delta, **extra):
    manifest = {
        "experiment": experiment,
        "group": g.spec,
        "p_grid": [float(p) for p in p_grid],
        "trials": int(trials),
        "seed": int(seed),
        "delta": float(delta),
        **extra,
    }
    manifest["config_hash"] = content_hash(manifest)
    return manifest


def _result(experiment, event_name, rows, g, p_grid, trials, seed, delta, **extra):
    points = [(row.p, row.estimate) for row in rows if row.event == event_name]
    return SweepResult(
        p_grid=tuple(float(p) for p in p_grid),
        event_name=event_name,
        rows=tuple(rows),
        crossing_p=crossing_point(points),
        manifest=sweep_manifest(experiment, g, p_grid, trials, seed, delta, **extra),
    )


def _rows(p, names, tally, seed):
    means = np.atleast_1d(tally.mean)
    half_widths = np.atleast_1d(tally.half_width)
    return [
        SweepRow(float(p), name, float(mean), float(hw), tally.count, int(seed))
        for name, mean, hw in zip(names, means, half_widths)
    ]


def few_safe_threshold(n, p):
    return math.inf if p == 0 else 3 * math.log(n) / p


def chernoff_step(n, p):
    """(1 - p)^(3 log n / p), continued by n^-3 at p = 0."""
    if p == 0:
        return float(n) ** -3
    if p == 1:
        return 0.0
    return math.exp(3 * math.log(n) / p * math.log1p(-p))


@dataclass(frozen=True)
class ZeroProbe:
    """Per-sample values for the 0-statement: |S^E(A)|, whether A ∩ E meets
    it, whether no single swap improves A ∩ O, and whether |S^E(A)| is small.
    """

    sub: object
    strict: bool
    few_threshold: float

    def __call__(self, A):
        safe = safe_elements(self.sub, A, self.strict)
        exists_safe = bool(np.any(safe.mask & A.mask))
        one_swap_maximal = not exists_safe and bk_event(self.sub, A, 1) is None
        return [len(safe), exists_safe, one_swap_maximal, len(safe) <= self.few_threshold]


ZERO_EVENTS = ("mean_safe", "exists_safe", "one_swap_maximal", "few_safe")


def zero_statement_sweep(g, sub, p_grid, trials, seed, delta, strict=True, workers=1, law=None):
    law = law or P_RANDOM
    if not is_nice(g, sub, delta):
        raise NotNice(f"Subgroup {sub.label} of {g.spec} is not nice for delta = {delta}")
    rows = []
    for p in p_grid:
        probe = ZeroProbe(sub, strict, few_safe_threshold(g.n, p))
        tally = run_trials(EventTrial(g, law.at(g, p), probe, sub), trials, seed, workers)
        rows.extend(_rows(p, ZERO_EVENTS, tally, seed))
        rows.append(SweepRow(float(p), "chernoff", chernoff_step(g.n, p), 0.0, trials, int(seed)))
        logger.info("zero sweep %s p=%g: %s", g.spec, p, tally.mean)
    return _result(
        "zero", "exists_safe", rows, g, p_grid, trials, seed, delta,
        subgroup=sub.label, strict=bool(strict), law=law.text,
    )


@dataclass(frozen=True)
class TinyProbe:
    """Whether some odd coset O of G has A ∩ O among the maximum sum-free subsets of A."""

    cosets: tuple

    def __call__(self, A):
        size, _ = max_sum_free(A.group, A)
        return [any(len(A & coset) == size for coset in self.cosets)]


@dataclass(frozen=True)
class ModerateProbe:
    """Local events on the odd coset maximizing |A ∩ O|, the first one on ties.

    For each k the probe reports B_k on that coset and B_k on any coset
    satisfying C_k.
    """

    subgroups: tuple
    k_max: int
    strict: bool

    def __call__(self, A):
        g = A.group
        counts = coset_counts(g, list(self.subgroups), A)
        best = self.subgroups[int(np.argmax(counts))]
        safe = safe_elements(best, A, self.strict)
        values = [bool(np.any(safe.mask & A.mask))]
        for k in range(1, self.k_max + 1):
            values.append(bk_event(best, A, k) is not None)
            # C_k: no other coset beats this one by k or more
            competitive = [sub for sub, count in zip(self.subgroups, counts) if count + k > max(counts)]
            values.append(any(bk_event(sub, A, k) is not None for sub in competitive))
        return values


def one_statement_sweep(g, p_grid, k_max, trials, seed, delta, strict=True, workers=1, law=None):
    law = law or P_RANDOM
    subgroups = tuple(enumerate_index2_subgroups(g))
    skew = default_subgroup(g, delta) if law.needs_subgroup else None
    if g.order <= TINY_ORDER:
        probe = TinyProbe(tuple(odd_coset(sub) for sub in subgroups))
        names, headline = ("holds",), "holds"
    else:
        probe = ModerateProbe(subgroups, int(k_max), strict)
        names = ("exists_safe_max",) + tuple(
            itertools.chain.from_iterable((f"bk_{k}", f"bk_ck_{k}") for k in range(1, k_max + 1))
        )
        headline = "exists_safe_max"
    rows = []
    for p in p_grid:
        tally = run_trials(EventTrial(g, law.at(g, p), probe, skew), trials, seed, workers)
        rows.extend(_rows(p, names, tally, seed))
        logger.info("one sweep %s p=%g: %s", g.spec, p, tally.mean)
    return _result(
        "one", headline, rows, g, p_grid, trials, seed, delta,
        k_max=int(k_max), strict=bool(strict), law=law.text,
    )


@dataclass(frozen=True)
class SafeCount:
    sub: object
    law: SampleLaw
    strict: bool

    def __call__(self, seed, trial):
        A = sample(self.sub.group, self.law, seed, trial, self.sub)
        return len(safe_elements(self.sub, A, self.strict))


def fkg_safe_bound(sub, p, strict=True):
    """Σ over x ∈ E \\ {0} of (1 - p²)^e(G_x) (1 - p)^d_x, d_x = #{a ∈ O : a + a = x}."""
    g = sub.group
    evens = np.flatnonzero(sub.even_mask())
    doublings = np.zeros(g.order, dtype=np.int64)
    if strict:
        odd = np.flatnonzero(~sub.even_mask())
        doublings = np.bincount(g.double_indices(odd), minlength=g.order)
    total = 0.0
    for x in evens[evens != 0].tolist():
        total += (1 - p * p) ** edge_count_formula(sub, x) * (1 - p) ** int(doublings[x])
    return total


@dataclass(frozen=True)
class ConcentrationReport:
    p: float
    trials: int
    seed: int
    mean: float
    standard_error: float
    low_fraction: float
    fkg_bound: float

    @property
    def bound_ok(self):
        return self.mean >= self.fkg_bound - 3 * self.standard_error


def concentration_experiment(g, sub, p, trials, seed, strict=True, workers=1, law=None):
    """Spread of |S^E(A)| under a product law (p-random by default) against
    the FKG lower bound on its mean.
    """
    law = law or SampleLaw.p_random(p)
    bound = fkg_safe_bound(sub, odd_probability(law), strict)
    values = np.asarray(
        collect_trials(SafeCount(sub, law, strict), trials, seed, workers),
        dtype=float,
    )
    mean = float(values.mean())
    standard_error = float(values.std() / math.sqrt(len(values)))
    report = ConcentrationReport(
        p=float(p),
        trials=int(trials),
        seed=int(seed),
        mean=mean,
        standard_error=standard_error,
        low_fraction=float(np.mean(values <= mean / 2)),
        fkg_bound=bound,
    )
    logger.info("concentration %s p=%g: %s", g.spec, p, report)
    return report


def concentration_sweep(g, sub, p_grid, trials, seed, delta, strict=True, workers=1, law=None):
    law = law or P_RANDOM
    rows = []
    for p in p_grid:
        report = concentration_experiment(g, sub, p, trials, seed, strict, workers, law.at(g, p))
        rows.extend(
            [
                SweepRow(report.p, "mean_safe", report.mean, Z95 * report.standard_error, trials, int(seed)),
                SweepRow(report.p, "low_fraction", report.low_fraction, 0.0, trials, int(seed)),
                SweepRow(report.p, "fkg_bound", report.fkg_bound, 0.0, trials, int(seed)),
                SweepRow(report.p, "bound_ok", float(report.bound_ok), 0.0, trials, int(seed)),
            ]
        )
    return _result(
        "concentration", "low_fraction", rows, g, p_grid, trials, seed, delta,
        subgroup=sub.label, strict=bool(strict), law=law.text,
    )


@dataclass(frozen=True)
class NiceMaxProbe:
    subgroups: tuple
    nice: tuple
    threshold: float

    def __call__(self, A):
        counts = np.asarray(coset_counts(A.group, list(self.subgroups), A))
        nice = np.asarray(self.nice, dtype=bool)
        maximizers = counts == counts.max()
        nice_max = bool(np.any(maximizers & nice))
        small_outside = bool(np.all(counts[~nice] <= self.threshold))
        large_inside = bool(np.any(counts[nice] >= self.threshold))
        return [nice_max, small_outside, large_inside, small_outside and large_inside]


NICE_MAX_EVENTS = ("nice_max", "event_a", "event_b", "joint")


@dataclass(frozen=True)
class NiceMaxReport:
    p: float
    omega: float
    threshold: float
    trivial: bool
    trials: int
    seed: int
    frequencies: dict
    half_widths: dict

    @property
    def nice_max_frequency(self):
        return self.frequencies["nice_max"]


def nice_maximal_coset_check(g, p, omega, trials, seed, delta, workers=1, law=None, skew=None):
    """How often a maximizer of |A ∩ O| is nice, alongside the events that
    every non-nice coset has |A ∩ O| <= pn + ω√(pn) and some nice coset
    reaches it. A skewed law is taken around the subgroup ``skew``.
    """
    subgroups = tuple(enumerate_index2_subgroups(g))
    nice = tuple(is_nice(g, sub, delta) for sub in subgroups)
    threshold = p * g.n + omega * math.sqrt(p * g.n)
    probe = NiceMaxProbe(subgroups, nice, threshold)
    law = law or SampleLaw.p_random(p)
    tally = run_trials(EventTrial(g, law, probe, skew), trials, seed, workers)
    report = NiceMaxReport(
        p=float(p),
        omega=float(omega),
        threshold=threshold,
        trivial=g.r <= delta * g.n,
        trials=int(trials),
        seed=int(seed),
        frequencies={name: float(v) for name, v in zip(NICE_MAX_EVENTS, tally.mean)},
        half_widths={name: float(v) for name, v in zip(NICE_MAX_EVENTS, tally.half_width)},
    )
    if report.trivial:
        logger.info("%s: r(G) <= delta n, every subgroup is nice", g.spec)
    return report


def nice_max_sweep(g, p_grid, omega, trials, seed, delta, workers=1, law=None):
    law = law or P_RANDOM
    skew = default_subgroup(g, delta) if law.needs_subgroup else None
    rows = []
    for p in p_grid:
        report = nice_maximal_coset_check(
            g, p, omega, trials, seed, delta, workers, law.at(g, p), skew
        )
        rows.extend(
            SweepRow(report.p, name, report.frequencies[name], report.half_widths[name], trials, int(seed))
            for name in NICE_MAX_EVENTS
        )
    return _result(
        "nicemax", "nice_max", rows, g, p_grid, trials, seed, delta,
        omega=float(omega), trivial=g.r <= delta * g.n, law=law.text,
    )
