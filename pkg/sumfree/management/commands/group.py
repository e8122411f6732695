#!/usr/bin/env python
#
# Adds a command to manage.py to describe an abelian group of even order.
#
# Command arguments:
# - -g,--group: the group, e.g. "Z2^3*Z9" (factors joined by "*", "^" repeats a factor);
# - -d,--delta: the delta used for the threshold profile (default 0.1).
#
# Prints order, n, k, the canonical factors, r(G), alpha, beta and the threshold
# profile as JSON. The group is never materialized, so very large groups
# such as Z2^30*Z101 can be described.

from dataclasses import asdict

from django.core.management.base import BaseCommand

from sumfree.experiments import compute_profile
from sumfree.utils.cli import STRUCTURAL_CAP, command_errors
from sumfree.utils.groupspec import parse_group_spec
from sumfree.utils.output import to_json


class Command(BaseCommand):
    help = "Describes a group and its threshold profile"

    def add_arguments(self, parser):
        parser.add_argument("-g", "--group", required=True, help="Group specification")
        parser.add_argument("-d", "--delta", type=float, default=0.1)

    def handle(self, *args, **options):
        with command_errors():
            g = parse_group_spec(options["group"], cap=STRUCTURAL_CAP)
            profile = compute_profile(g, options["delta"]) if g.n >= 2 else None
            self.stdout.write(
                to_json(
                    {
                        "group": g.spec,
                        "order": g.order,
                        "n": g.n,
                        "k": g.k,
                        "even_factors": list(g.even_factors),
                        "odd_factors": list(g.odd_factors),
                        "r": g.r,
                        "alpha": profile.alpha if profile else None,
                        "beta": profile.beta if profile else None,
                        "profile": asdict(profile) if profile else None,
                    }
                ),
                ending="",
            )
