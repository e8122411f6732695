"""Caps for exhaustive enumerations, read from ``settings.SUMFREE_LAB_CAPS``.

Outside a configured Django project the ``SUMFREE_LAB_CAPS`` environment
variable is parsed directly, with the same ``key=value,key=value`` syntax.
"""

import dataclasses
import os
from dataclasses import dataclass

from django.conf import settings

from .exceptions import ConfigurationError, UnknownConfigKey


@dataclass(frozen=True)
class Caps:
    element_cap: int = 2**24
    subgroup_cap: int = 2**16
    materialize_cap: int = 2**20
    enumeration_cap: int = 10**7
    solver_enumerate_cap: int = 40
    solver_size_cap: int = 60
    cover_cap: int = 12
    preimage_cap: int = 2**16
    pmf_support_cap: int = 2**22


def parse_caps(text):
    """Parse ``key=value`` pairs separated by commas into a dict of ints."""
    overrides = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f'Malformed cap override "{item}"')
        try:
            overrides[key.strip()] = int(value)
        except ValueError:
            raise ConfigurationError(f'Cap "{key.strip()}" must be an integer')
    return overrides


def make_caps(overrides):
    known = {field.name for field in dataclasses.fields(Caps)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise UnknownConfigKey(f"Unknown cap(s): {', '.join(unknown)}")
    return Caps(**{key: int(value) for key, value in overrides.items()})


def get_caps():
    if settings.configured:
        overrides = getattr(settings, "SUMFREE_LAB_CAPS", {}) or {}
    else:
        overrides = parse_caps(os.environ.get("SUMFREE_LAB_CAPS", ""))
    return make_caps(overrides)
