"""Run configurations and their content hashes.

A RunConfig is everything that determines the output of a run. Its
canonical JSON form (sorted keys, no whitespace) is what gets hashed into
sweep manifests; the number of worker processes is deliberately not part of
it because it never changes a result.
"""

import dataclasses
import hashlib
import json
from dataclasses import dataclass

from ..exceptions import ConfigurationError, UnknownConfigKey

SUBCOMMANDS = ("group", "subgroups", "cayley", "solve", "hypergeom", "sweep", "verify")
FORMATS = ("csv", "json")


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj):
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    group_spec: str
    subcommand: str
    law: str | None = None
    seed: int | None = None
    trials: int | None = None
    delta: float | None = None
    output: str | None = None
    format: str = "csv"
    experiment: str | None = None
    p_grid: str | None = None
    k_max: int | None = None
    omega: float | None = None
    subgroup: str | None = None
    strict: bool = True

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigurationError(f'Unknown subcommand "{self.subcommand}"')
        if self.format not in FORMATS:
            raise ConfigurationError(f'Unknown format "{self.format}": expected csv or json')

    def as_dict(self):
        return dataclasses.asdict(self)

    def emit(self):
        return canonical_json(self.as_dict())

    @classmethod
    def parse(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Run configuration is not valid JSON: {exc}")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data):
        known = {field.name for field in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UnknownConfigKey(f"Unknown run configuration key(s): {', '.join(unknown)}")
        return cls(**data)

    @property
    def config_hash(self):
        return content_hash(self.as_dict())
