"""Helpers shared by the management commands."""

import contextlib
import math
from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from ..exceptions import ConfigurationError, SumfreeError

# Structural commands (group, subgroups) never materialize the group.
STRUCTURAL_CAP = math.inf


@contextlib.contextmanager
def command_errors():
    """Turn engine errors into CommandErrors carrying the engine's exit code."""
    try:
        yield
    except SumfreeError as exc:
        raise CommandError(str(exc), returncode=exc.exit_code) from exc


def _grid_value(text, p_star):
    text = text.strip()
    if text.endswith("p*"):
        if p_star is None:
            raise ConfigurationError(f'"{text}" needs the group threshold p*')
        factor = text[:-2].strip() or "1"
        return float(factor) * p_star
    return float(text)


def parse_p_grid(text, p_star=None):
    """``a:b:steps`` for evenly spaced values, or a comma-separated list.

    Any value may be written as a multiple of the threshold, e.g. ``0.75p*``.
    """
    try:
        if ":" in text:
            start, stop, steps = text.split(":")
            grid = np.linspace(_grid_value(start, p_star), _grid_value(stop, p_star), int(steps))
            values = [float(p) for p in grid]
        else:
            values = [_grid_value(part, p_star) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f'Malformed p grid "{text}"')
    if not values:
        raise ConfigurationError("The p grid is empty")
    for p in values:
        if not 0 <= p <= 1:
            raise ConfigurationError(f"p = {p} is not a probability")
    return values


def write_output(command, text, path=None):
    """Write to ``path`` if given, otherwise to the command's stdout."""
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        command.stdout.write(text, ending="")


def parse_index_set(text):
    """``0+2`` -> (0, 2)."""
    try:
        return tuple(int(part) for part in text.split("+"))
    except ValueError:
        raise ConfigurationError(f'Malformed index set "{text}": expected e.g. 0 or 0+2')
