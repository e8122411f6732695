"""Random subsets of a group and empirical probability oracles.

Every sample is a pure function of ``(seed, trial)``: the pair is the key of
a Philox counter-based generator, so trials can be evaluated in any order
and in any number of processes without changing a single draw.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ConfigurationError,
    InvalidLaw,
    InvalidTrials,
    SecondFormInapplicable,
)
from .groups import SampleSet

logger = logging.getLogger(__name__)

Z95 = 1.959963984540054


@dataclass(frozen=True)
class SampleLaw:
    kind: str
    p: float | None = None
    m: int | None = None
    p1: float | None = None
    p2: float | None = None
    delta: float | None = None

    @classmethod
    def p_random(cls, p):
        p = float(p)
        if not 0 <= p <= 1:
            raise InvalidLaw(f"p = {p} is not a probability")
        return cls("p_random", p=p)

    @classmethod
    def m_uniform(cls, m):
        m = int(m)
        if m < 0:
            raise InvalidLaw(f"m = {m} must be non-negative")
        return cls("m_uniform", m=m)

    @classmethod
    def skewed(cls, p, delta):
        """O-elements with probability (1 - delta)p, E-elements with (1 + delta)p."""
        p, delta = float(p), float(delta)
        p1, p2 = (1 - delta) * p, (1 + delta) * p
        if not (0 <= p1 <= 1 and 0 <= p2 <= 1):
            raise InvalidLaw(f"pm:{p}:{delta} gives probabilities outside [0, 1]")
        return cls("skewed_pm", p=p, p1=p1, p2=p2, delta=delta)

    @property
    def text(self):
        if self.kind == "p_random":
            return f"p:{self.p!r}"
        if self.kind == "m_uniform":
            return f"m:{self.m}"
        return f"pm:{self.p!r}:{self.delta!r}"

    def probabilities(self, g, sub=None):
        """Per-element inclusion probabilities, for the laws that have them."""
        if self.kind == "p_random":
            return np.full(g.order, self.p)
        if self.kind == "skewed_pm":
            if sub is None:
                raise InvalidLaw("The pm law needs an index-2 subgroup")
            return np.where(sub.even_mask(), self.p2, self.p1)
        raise InvalidLaw("The m law has no per-element probabilities")


def parse_law(text):
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "p":
            return SampleLaw.p_random(float(rest))
        if kind == "m":
            return SampleLaw.m_uniform(int(rest))
        if kind == "pm":
            p, _, delta = rest.partition(":")
            return SampleLaw.skewed(float(p), float(delta))
    except ValueError:
        raise InvalidLaw(f'Malformed law "{text}"')
    raise InvalidLaw(f'Unknown law "{text}": expected p:<f>, m:<int> or pm:<f>:<delta>')


@dataclass(frozen=True)
class LawFamily:
    """A sampling law whose density is filled in at each point of a p grid.

    ``p`` and ``m`` stand for p-random and m-uniform subsets, the latter with
    m = round(p |G|); ``pm:<delta>`` is the skewed law around p. A fully
    specified law (``p:0.3``, ``m:12``, ``pm:0.3:0.1``) is a family with a
    single member, placed at its nominal density.
    """

    kind: str
    delta: float | None = None
    fixed: SampleLaw | None = None

    def at(self, g, p):
        if self.fixed is not None:
            return self.fixed
        if self.kind == "p_random":
            return SampleLaw.p_random(p)
        if self.kind == "m_uniform":
            return SampleLaw.m_uniform(round(p * g.order))
        return SampleLaw.skewed(p, self.delta)

    def nominal_p(self, g):
        law = self.fixed
        if law is None:
            raise InvalidLaw(f'"{self.text}" has no density of its own')
        return law.m / g.order if law.kind == "m_uniform" else law.p

    @property
    def needs_subgroup(self):
        return self.kind == "skewed_pm"

    @property
    def text(self):
        if self.fixed is not None:
            return self.fixed.text
        if self.kind == "p_random":
            return "p"
        if self.kind == "m_uniform":
            return "m"
        return f"pm:{self.delta!r}"


def odd_probability(law):
    """The inclusion probability of an odd-coset element under a product law."""
    if law.kind == "p_random":
        return law.p
    if law.kind == "skewed_pm":
        return law.p1
    raise InvalidLaw(f"{law.text} is not a product law")


def parse_law_family(text):
    """``p``, ``m`` or ``pm:<delta>`` for a family, anything ``parse_law`` reads for one law."""
    text = text.strip()
    if text == "p":
        return LawFamily("p_random")
    if text == "m":
        return LawFamily("m_uniform")
    kind, _, rest = text.partition(":")
    if kind == "pm" and ":" not in rest:
        try:
            delta = float(rest)
        except ValueError:
            raise InvalidLaw(f'Malformed law "{text}"')
        if not 0 <= delta <= 1:
            raise InvalidLaw(f"delta = {delta} must lie in [0, 1]")
        return LawFamily("skewed_pm", delta=delta)
    law = parse_law(text)
    return LawFamily(law.kind, law.delta, law)


def generator(seed, trial):
    key = np.array([int(seed) % 2**64, int(trial) % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _partial_shuffle(rng, size, m):
    """The first m entries of a Fisher-Yates shuffle of range(size)."""
    targets = rng.integers(np.arange(m), size)
    swapped = {}
    chosen = np.empty(m, dtype=np.int64)
    for i, j in enumerate(targets.tolist()):
        chosen[i] = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
    return chosen


def sample(g, law, seed, trial, sub=None):
    rng = generator(seed, trial)
    if law.kind == "m_uniform":
        if law.m > g.order:
            raise InvalidLaw(f"m = {law.m} exceeds |G| = {g.order}")
        mask = np.zeros(g.order, dtype=bool)
        mask[_partial_shuffle(rng, g.order, law.m)] = True
    else:
        mask = rng.random(g.order) < law.probabilities(g, sub)
    return SampleSet(g, mask, law.text)


@dataclass(frozen=True)
class JansonBound:
    mu: float
    Delta: float
    bound: float
    form: str


def janson_bound(edge_sets, p, c=None):
    edge_sets = [frozenset(B) for B in edge_sets]
    if any(not B for B in edge_sets):
        raise ConfigurationError("Janson's inequality needs non-empty sets")
    mu = sum(p ** len(B) for B in edge_sets)
    containing = {}
    for i, B in enumerate(edge_sets):
        for x in B:
            containing.setdefault(x, set()).add(i)
    Delta = 0.0
    for i, B in enumerate(edge_sets):
        # ordered pairs i ~ j
        neighbours = set().union(*(containing[x] for x in B)) - {i}
        Delta += sum(p ** len(B | edge_sets[j]) for j in neighbours)
    if c is None:
        return JansonBound(mu, Delta, min(1.0, math.exp(-mu + Delta)), "basic")
    if c > 0.25 or 2 * c * mu > Delta:
        raise SecondFormInapplicable(
            f"The second form needs 2c mu <= Delta and c <= 1/4 (c={c}, mu={mu}, Delta={Delta})"
        )
    bound = math.exp(-c * mu**2 / Delta) if Delta else 1.0
    return JansonBound(mu, Delta, min(1.0, bound), "second")


def all_subsets(order):
    codes = np.arange(2**order, dtype=np.int64)
    return ((codes[:, None] >> np.arange(order)) & 1).astype(bool)


def exact_event_probability(g, law, event, sub=None, max_order=16):
    """Probability of ``event`` under ``law``, summed over all 2^|G| subsets."""
    if g.order > max_order:
        raise ConfigurationError(f"Exhaustive probabilities are limited to |G| <= {max_order}")
    subsets = all_subsets(g.order)
    if law.kind == "m_uniform":
        weights = (subsets.sum(axis=1) == law.m) / math.comb(g.order, law.m)
    else:
        q = law.probabilities(g, sub)
        weights = np.prod(np.where(subsets, q, 1 - q), axis=1)
    total = 0.0
    for mask, weight in zip(subsets, weights):
        if weight > 0:
            total += weight * float(event(SampleSet(g, mask)))
    return total


@dataclass(frozen=True)
class Tally:
    """Count, sum and sum of squares; merging is associative and commutative."""

    count: int = 0
    total: object = 0.0
    total_sq: object = 0.0

    @classmethod
    def of(cls, value):
        value = np.asarray(value, dtype=float)
        return cls(1, value, value**2)

    def __add__(self, other):
        return Tally(
            self.count + other.count,
            self.total + other.total,
            self.total_sq + other.total_sq,
        )

    @property
    def mean(self):
        return self.total / self.count

    @property
    def variance(self):
        return np.maximum(self.total_sq / self.count - self.mean**2, 0.0)

    @property
    def standard_error(self):
        return np.sqrt(self.variance / self.count)

    @property
    def half_width(self):
        return Z95 * self.standard_error


def collect_trials(fn, trials, seed, workers=1):
    """``[fn(seed, 0), ..., fn(seed, trials - 1)]``, whatever the number of workers."""
    if trials < 1:
        raise InvalidTrials("At least one trial is needed")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(
                executor.map(fn, itertools.repeat(seed, trials), range(trials), chunksize=64)
            )
    return [fn(seed, trial) for trial in range(trials)]


def run_trials(fn, trials, seed, workers=1):
    """Fold ``fn(seed, trial)`` over all trials into a Tally, in trial order."""
    tally = Tally()
    for value in collect_trials(fn, trials, seed, workers):
        tally = tally + Tally.of(value)
    return tally


@dataclass(frozen=True)
class EventTrial:
    """Picklable per-trial evaluation of an event on a fresh sample."""

    group: object
    law: SampleLaw
    event: object
    sub: object = None

    def __call__(self, seed, trial):
        return np.asarray(self.event(sample(self.group, self.law, seed, trial, self.sub)), dtype=float)


def empirical_event_probability(g, law, event, trials, seed, sub=None, workers=1):
    tally = run_trials(EventTrial(g, law, event, sub), trials, seed, workers)
    return float(tally.mean), float(tally.half_width)


class AvoidsAll:
    def __init__(self, edge_sets):
        self.edge_sets = [np.asarray(sorted(B), dtype=np.int64) for B in edge_sets]

    def __call__(self, A):
        avoided = [not np.all(A.mask[B]) for B in self.edge_sets]
        return [all(avoided)] + avoided


@dataclass(frozen=True)
class FkgReport:
    joint: float
    marginals: tuple
    product: float
    slack: float

    @property
    def holds(self):
        return self.joint >= self.product - self.slack


def fkg_report(g, law, decreasing_events, trials, seed, sub=None, workers=1):
    """Empirical P(no B_i ⊆ A) against the product of the P(B_i ⊄ A).

    The slack is three combined standard errors of the joint estimate and
    of the product (delta method).
    """
    tally = run_trials(EventTrial(g, law, AvoidsAll(decreasing_events), sub), trials, seed, workers)
    means = np.atleast_1d(tally.mean)
    errors = np.atleast_1d(tally.standard_error)
    joint, marginals = float(means[0]), means[1:]
    product = float(np.prod(marginals))
    relative = errors[1:] / np.where(marginals > 0, marginals, 1.0)
    product_error = product * float(np.sqrt(np.sum(relative**2)))
    slack = 3 * math.hypot(float(errors[0]), product_error)
    return FkgReport(joint, tuple(float(m) for m in marginals), product, slack)


def fkg_check(g, law, decreasing_events, trials, seed, sub=None, workers=1):
    return fkg_report(g, law, decreasing_events, trials, seed, sub, workers).holds
