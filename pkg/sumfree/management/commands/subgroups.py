#!/usr/bin/env python
#
# Adds a command to manage.py to list the index-2 subgroups of a group.
#
# Command arguments:
# - -g,--group: the group;
# - -d,--delta: the delta deciding which subgroups are nice (default 0.1).
#
# One CSV row per subgroup H_I, with ";" as separator:
#
#   I;rE;rO;|W|;nice
#   0;2;0;1;True
#
# I is the index set written as "0+2", rE and rO count the involutions in
# the subgroup and in its odd coset, |W| = n / rE.

import csv
import io

from django.core.management.base import BaseCommand

from sumfree.index2 import enumerate_index2_subgroups, is_nice
from sumfree.utils.cli import STRUCTURAL_CAP, command_errors
from sumfree.utils.groupspec import parse_group_spec


class Command(BaseCommand):
    help = "Lists the index-2 subgroups of a group"

    def add_arguments(self, parser):
        parser.add_argument("-g", "--group", required=True, help="Group specification")
        parser.add_argument("-d", "--delta", type=float, default=0.1)

    def handle(self, *args, **options):
        with command_errors():
            g = parse_group_spec(options["group"], cap=STRUCTURAL_CAP)
            subgroups = enumerate_index2_subgroups(g)
        buffer = io.StringIO()
        writer = csv.writer(buffer, delimiter=";", lineterminator="\n")
        writer.writerow(["I", "rE", "rO", "|W|", "nice"])
        not_nice = 0
        for sub in subgroups:
            nice = is_nice(g, sub, options["delta"])
            not_nice += not nice
            writer.writerow([sub.label, sub.r_E, sub.r_O, g.n // sub.r_E, nice])
        self.stdout.write(buffer.getvalue(), ending="")
        if not_nice > 2 / options["delta"]:
            self.stderr.write(
                self.style.WARNING(f"{not_nice} subgroups are not nice, more than 2/delta")
            )
