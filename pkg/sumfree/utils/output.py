"""CSV and JSON writers whose bytes depend only on the data.

CSV: comma delimiter, LF line endings, a header row, floats written with
``repr``. JSON: sorted keys, two-space indent, trailing newline.
"""

import csv
import io
import json
from importlib.metadata import PackageNotFoundError, version

SWEEP_COLUMNS = ("p", "event", "estimate", "half_width", "trials", "seed")
VERSIONED_PACKAGES = ("sumfreelab", "django", "numpy", "scipy", "networkx")


def to_csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(value)) if isinstance(value, float) else value for value in row])
    return buffer.getvalue()


def to_json(data):
    return json.dumps(data, sort_keys=True, indent=2, default=_default) + "\n"


def _default(value):
    # numpy scalars and arrays
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def sweep_csv(result):
    return to_csv(
        SWEEP_COLUMNS,
        ([row.p, row.event, row.estimate, row.half_width, row.trials, row.seed] for row in result.rows),
    )


def package_versions():
    versions = {}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = None
    return versions


def build_manifest(config, result, profile):
    """The sweep manifest: run configuration, its hash, the profile and versions."""
    return {
        "config": config.as_dict(),
        "config_hash": config.config_hash,
        "group": result.manifest["group"],
        "seed": result.manifest["seed"],
        "sweep": result.manifest,
        "crossing_p": result.crossing_p,
        "profile": profile,
        "versions": package_versions(),
    }
