"""
CSV and JSON output files stamped with the config hash
"""
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

from .util import format_float


log = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    match value:
        case bool():
            return "1" if value else "0"
        case int():
            return str(value)
        case float():
            return format_float(value)
        case _:
            return str(value)


def hash_comment(config_hash: str) -> str:
    """Header line text naming the config hash"""
    return f"config_sha256={config_hash}"


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config_hash: str,
) -> Path:
    """Write a CSV table preceded by a '# config_sha256=...' comment line"""
    with open(path, mode="w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {hash_comment(config_hash)}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"Row has {len(row)} cells, expected {len(columns)}")
            f.write(",".join(_cell(v) for v in row) + "\n")

    log.debug("Wrote %s", path)
    return path


def write_json(path: Path, data: dict, config_hash: str) -> Path:
    """Write a JSON document with a config_hash key"""
    document = {"config_hash": config_hash, **data}
    with open(path, mode="w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")

    log.debug("Wrote %s", path)
    return path
