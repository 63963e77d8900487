"""Deterministic artifact IO: canonical JSON, fixed-column CSV, hashing.

Every float goes through ``repr`` (shortest round-trip decimal), key orders
are fixed by construction, and line endings are always ``\\n``, so a rerun
with identical inputs writes byte-identical files.
"""

import hashlib
import json
from pathlib import Path


def dumps_canonical(data):
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def save_json(data, path):
    Path(path).write_text(dumps_canonical(data), encoding="utf-8")


def load_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def config_hash(config):
    """Order-insensitive digest of a config document."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path):
    text = Path(path).read_text(encoding="utf-8").strip("\n")
    lines = text.split("\n")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def load_instance(path):
    """Load a sampled instance JSON, dispatching on its model tag."""
    from .ensembles import SykInstance, TwoColorInstance

    data = load_json(path)
    model = data.get("model")
    if model in ("syk", "ssyk"):
        return SykInstance.from_dict(data)
    if model == "two-color":
        return TwoColorInstance.from_dict(data)
    raise ValueError(f"unknown instance model {model!r}")
