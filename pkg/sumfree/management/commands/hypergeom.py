#!/usr/bin/env python
#
# Adds a command to manage.py to evaluate hypergeometric tails of |A ∩ O|
# for a uniformly random m-subset A of a group of order 2n.
#
# Command arguments:
# - --n, --m, --k: half the group order, the sample size and the shift above m/2;
# - --finite-population: use the variance-corrected asymptotic tail;
# - --pair: also compute the joint tail of two distinct odd cosets (needs n even and 4 | m);
# - --gamma, --h: select the least b with E[X_b] <= n^gamma (needs --group);
# - -g,--group: the group used by --gamma.
#
# Prints exact and asymptotic values and their ratio as JSON.

from dataclasses import asdict

from django.core.management.base import BaseCommand, CommandError

from sumfree import hypergeom
from sumfree.utils.cli import STRUCTURAL_CAP, command_errors
from sumfree.utils.groupspec import parse_group_spec
from sumfree.utils.output import to_json


def ratio(a, b):
    return a / b if b else None


class Command(BaseCommand):
    help = "Evaluates exact and asymptotic hypergeometric tails"

    def add_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--m", type=int, required=True)
        parser.add_argument("--k", type=int, default=0)
        parser.add_argument("--finite-population", action="store_true")
        parser.add_argument("--pair", action="store_true")
        parser.add_argument("--gamma", type=float)
        parser.add_argument("--h", type=int, default=1)
        parser.add_argument("-g", "--group", help="Group specification, for --gamma")

    def handle(self, *args, **options):
        if options["gamma"] is not None and not options["group"]:
            raise CommandError("--gamma needs --group", returncode=2)
        with command_errors():
            ctx = hypergeom.HypergeomContext.create(options["n"], options["m"], options["k"])
            exact = hypergeom.tail_probability_exact(ctx)
            asymptotic = hypergeom.tail_probability_asymptotic(ctx, options["finite_population"])
            report = {
                "n": ctx.n,
                "m": ctx.m,
                "k": ctx.k,
                "threshold": ctx.threshold,
                "exact": exact,
                "asymptotic": asymptotic,
                "ratio": ratio(exact, asymptotic),
                "theta_reference": hypergeom.theta_reference(ctx) if ctx.k > 0 else None,
                "finite_population": options["finite_population"],
            }
            if options["pair"]:
                pair = hypergeom.pair_probability(ctx)
                report["pair"] = {
                    "exact": pair.value,
                    "asymptotic": hypergeom.pair_probability_asymptotic(ctx),
                    "product": exact**2,
                    "ratio": ratio(pair.value, exact**2),
                    "truncation_radius": pair.truncation_radius,
                    "truncation_bound": pair.truncation_bound,
                }
            if options["gamma"] is not None:
                g = parse_group_spec(options["group"], cap=STRUCTURAL_CAP)
                if g.n != ctx.n:
                    raise CommandError(
                        f"{g.spec} has n = {g.n}, not {ctx.n}", returncode=2
                    )
                report["b"] = asdict(
                    hypergeom.describe_b(g, ctx.m, options["gamma"], options["h"])
                )
        self.stdout.write(to_json(report), ending="")
