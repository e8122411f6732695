#!/usr/bin/env python
#
# Adds a command to manage.py to find the maximum sum-free subsets of a set.
#
# Command arguments:
# - -g,--group: the group;
# - --set: the set A, as a list of elements or "random:<p>:<seed>";
# - -e,--enumerate: list every maximum sum-free subset, not just one.
#
# Prints the maximum size, the number of maximizers found and, for each of
# them, its elements and a sum-free certificate.

from django.core.management.base import BaseCommand

from sumfree.extremal import is_sum_free, max_sum_free
from sumfree.utils.cli import command_errors
from sumfree.utils.elements import parse_set
from sumfree.utils.groupspec import parse_group_spec
from sumfree.utils.output import to_json


class Command(BaseCommand):
    help = "Finds the maximum sum-free subsets of a set"

    def add_arguments(self, parser):
        parser.add_argument("-g", "--group", required=True, help="Group specification")
        parser.add_argument("--set", required=True, dest="set", help="Elements or random:p:seed")
        parser.add_argument(
            "-e",
            "--enumerate",
            action="store_true",
            help="Enumerate every maximum sum-free subset",
        )

    def handle(self, *args, **options):
        with command_errors():
            g = parse_group_spec(options["group"])
            A = parse_set(g, options["set"])
            size, maximizers = max_sum_free(g, A, enumerate_all=options["enumerate"])
        certificates = []
        for B in maximizers:
            certificate = is_sum_free(g, B)
            certificates.append(
                {
                    "set": [str(x) for x in B.elements()],
                    "sum_free": certificate.is_sum_free,
                }
            )
        self.stdout.write(
            to_json(
                {
                    "group": g.spec,
                    "A": [str(x) for x in A.elements()],
                    "size": size,
                    "count": len(maximizers),
                    "certificates": certificates,
                }
            ),
            ending="",
        )
