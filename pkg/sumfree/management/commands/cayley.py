#!/usr/bin/env python
#
# Adds a command to manage.py to build the Cayley graph G_S on an odd coset.
#
# Command arguments:
# - -g,--group: the group;
# - -s,--subgroup: the index set I of the subgroup, e.g. "0" or "0+2";
# - --gens: the generators, as integers (cyclic groups) or residue tuples "(0,2)".
#
# Prints the number of edges, the degree histogram and, for every generator x,
# the closed-form edge count of G_x next to the count of the built graph.

from django.core.management.base import BaseCommand

from sumfree.cayley import build_cayley, edge_count_formula
from sumfree.groups import SampleSet
from sumfree.index2 import make_subgroup
from sumfree.utils.cli import command_errors, parse_index_set
from sumfree.utils.elements import parse_elements
from sumfree.utils.groupspec import parse_group_spec
from sumfree.utils.output import to_json


class Command(BaseCommand):
    help = "Builds the Cayley graph of a generator set on an odd coset"

    def add_arguments(self, parser):
        parser.add_argument("-g", "--group", required=True, help="Group specification")
        parser.add_argument("-s", "--subgroup", default="0", help="Index set, e.g. 0+2")
        parser.add_argument("--gens", required=True, help="Generators")

    def handle(self, *args, **options):
        with command_errors():
            g = parse_group_spec(options["group"])
            sub = make_subgroup(g, parse_index_set(options["subgroup"]))
            gens = parse_elements(g, options["gens"])
            graph = build_cayley(sub, SampleSet.from_indices(g, gens))
            generators = {}
            for x in sorted(set(gens)):
                single = build_cayley(sub, [x]).edge_count
                formula = edge_count_formula(sub, x)
                generators[str(g.element_at(x))] = {"formula": formula, "built": single}
        self.stdout.write(
            to_json(
                {
                    "group": g.spec,
                    "subgroup": sub.label,
                    "edge_count": graph.edge_count,
                    "max_degree": graph.max_degree,
                    "degree_histogram": graph.degree_histogram(),
                    "doubling": [str(v) for v in graph.doubling.elements()],
                    "generators": generators,
                    "agrees": all(v["formula"] == v["built"] for v in generators.values()),
                }
            ),
            ending="",
        )
