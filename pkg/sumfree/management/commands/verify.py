#!/usr/bin/env python
#
# Adds a command to manage.py to run the exhaustive check batteries.
#
# Command arguments:
# - -l,--level: fast (a minute) or full (up to half an hour);
# - --seed: seed of the sampled checks;
# - -o,--out: write the report to a file instead of stdout.
#
# The report lists, for each battery, whether it passed, its runtime, the
# seed and details of the first failures. The command exits with status 4
# if any battery fails.

from django.core.management.base import BaseCommand, CommandError

from sumfree.exceptions import VerificationFailed
from sumfree.utils.cli import command_errors, write_output
from sumfree.utils.output import to_json
from sumfree.verification import LEVELS, verify_all


class Command(BaseCommand):
    help = "Runs the exhaustive check batteries"

    def add_arguments(self, parser):
        parser.add_argument("-l", "--level", choices=LEVELS, default="fast")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("-o", "--out")

    def handle(self, *args, **options):
        with command_errors():
            report = verify_all(options["level"], options["seed"])
        write_output(self, to_json(report), options["out"])
        if not report["passed"]:
            failed = ", ".join(e["name"] for e in report["batteries"] if not e["passed"])
            raise CommandError(
                f"Verification failed: {failed}", returncode=VerificationFailed.exit_code
            )
