"""
General utilities
"""

import hashlib
import json
import math
from typing import Any, Iterable, Optional


def complex_dict(value: Any) -> dict:
    """Complex number as a {"re", "im"} mapping for JSON documents"""
    value = complex(value)
    return {"re": json_float(value.real), "im": json_float(value.imag)}


def json_float(value: float) -> Optional[float]:
    """Float for JSON output, None for NaN and infinities"""
    value = float(value)
    return value if math.isfinite(value) else None


def format_float(value: float) -> str:
    """Round-trip exact float formatting for CSV output"""
    value = float(value)
    return format(value, ".17g") if math.isfinite(value) else str(value)


def geometric_mean(values: Iterable[float], floor: float = 1e-300) -> float:
    """Geometric mean with every value clamped below at floor"""
    logs = [math.log(max(float(v), floor)) for v in values]
    if not logs:
        raise ValueError("Geometric mean of an empty sequence")
    return math.exp(sum(logs) / len(logs))


def canonical_json(data: Any) -> str:
    """Key-sorted compact JSON used for hashing"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    """Hex SHA-256 digest of a UTF-8 string"""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
