#!/usr/bin/env python
#
# Adds a command to manage.py to run a threshold experiment over a grid of p.
#
# Command arguments:
# - -g,--group: the group;
# - -x,--experiment: zero, one, concentration or nicemax;
# - --law: the sampling law. "p" (default), "m" or "pm:<delta>" take their
#   density from the grid (m = round(p |G|)); a full law such as "p:0.3",
#   "m:12" or "pm:0.3:0.1" is a one-point sweep and takes no --p-grid;
# - --p-grid: "a:b:steps" or a comma-separated list; values like "0.75p*"
#   are multiples of the group's threshold p*;
# - --trials, --seed: Monte Carlo trials per grid point and the seed;
# - -d,--delta: the delta of the threshold profile and of niceness (default 0.1);
# - -s,--subgroup: index set of the subgroup (zero and concentration; default:
#   the first nice one);
# - --k-max: largest k of the local events (one; default 1);
# - --omega: the margin of the nicemax events (default 3);
# - --loose: count safe elements by G_x-independence only, ignoring a + a = x;
# - --workers: worker processes (results do not depend on it);
# - -f,--format: csv (default) or json;
# - -o,--out: output file. With csv, the manifest goes to <out>.manifest.json.
#
# CSV columns are p,event,estimate,half_width,trials,seed. Runs with the same
# arguments write byte-identical files whatever the number of workers.

from dataclasses import asdict
from pathlib import Path

from django.core.management.base import BaseCommand

from sumfree import experiments
from sumfree.exceptions import ConfigurationError
from sumfree.index2 import make_subgroup
from sumfree.sampling import parse_law_family
from sumfree.utils.cli import command_errors, parse_index_set, parse_p_grid, write_output
from sumfree.utils.groupspec import parse_group_spec
from sumfree.utils.output import build_manifest, sweep_csv, to_json
from sumfree.utils.runconfig import RunConfig

EXPERIMENTS = ("zero", "one", "concentration", "nicemax")


class Command(BaseCommand):
    help = "Runs a threshold experiment over a grid of p"

    def add_arguments(self, parser):
        parser.add_argument("-g", "--group", required=True, help="Group specification")
        parser.add_argument("-x", "--experiment", required=True, choices=EXPERIMENTS)
        parser.add_argument("--law", default="p", help="p, m, pm:<delta> or a full law")
        parser.add_argument("--p-grid")
        parser.add_argument("--trials", type=int, default=200)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("-d", "--delta", type=float, default=0.1)
        parser.add_argument("-s", "--subgroup")
        parser.add_argument("--k-max", type=int, default=1)
        parser.add_argument("--omega", type=float, default=3.0)
        parser.add_argument("--loose", action="store_true")
        parser.add_argument("--workers", type=int, default=1)
        parser.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
        parser.add_argument("-o", "--out")

    def handle(self, *args, **options):
        with command_errors():
            law = parse_law_family(options["law"])
            config = RunConfig(
                group_spec=options["group"],
                subcommand="sweep",
                law=law.text,
                seed=options["seed"],
                trials=options["trials"],
                delta=options["delta"],
                output=options["out"],
                format=options["format"],
                experiment=options["experiment"],
                p_grid=options["p_grid"],
                k_max=options["k_max"],
                omega=options["omega"],
                subgroup=options["subgroup"],
                strict=not options["loose"],
            )
            g = parse_group_spec(config.group_spec)
            profile = experiments.compute_profile(g, config.delta)
            if law.fixed is not None:
                if config.p_grid:
                    raise ConfigurationError(f"--law {config.law} fixes the density: drop --p-grid")
                p_grid = [law.nominal_p(g)]
            elif config.p_grid:
                p_grid = parse_p_grid(config.p_grid, profile.p_star)
            else:
                raise ConfigurationError(f"--law {config.law} needs --p-grid")
            result = self.run(config, g, p_grid, law, options["workers"])
        manifest = build_manifest(config, result, asdict(profile))
        if config.format == "json":
            rows = [asdict(row) for row in result.rows]
            write_output(self, to_json({"rows": rows, "manifest": manifest}), config.output)
            return
        write_output(self, sweep_csv(result), config.output)
        if config.output:
            Path(f"{config.output}.manifest.json").write_text(
                to_json(manifest), encoding="utf-8", newline="\n"
            )
        if result.crossing_p is None:
            self.stderr.write(self.style.WARNING(f"{result.event_name} never crosses 1/2 on this grid"))

    def run(self, config, g, p_grid, law, workers):
        arguments = dict(
            trials=config.trials, seed=config.seed, delta=config.delta, workers=workers, law=law
        )
        if config.experiment in ("zero", "concentration"):
            if config.subgroup:
                sub = make_subgroup(g, parse_index_set(config.subgroup))
            else:
                sub = experiments.default_subgroup(g, config.delta)
            sweep = (
                experiments.zero_statement_sweep
                if config.experiment == "zero"
                else experiments.concentration_sweep
            )
            return sweep(g, sub, p_grid, strict=config.strict, **arguments)
        if config.experiment == "one":
            return experiments.one_statement_sweep(
                g, p_grid, config.k_max, strict=config.strict, **arguments
            )
        return experiments.nice_max_sweep(g, p_grid, config.omega, **arguments)
