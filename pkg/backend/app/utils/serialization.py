"""
Byte-stable output encoding
Floats are written with the shortest round-trip decimal representation
(Python's repr), both in CSV and JSON.
"""

import hashlib
import json
import math
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd


def to_plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def canonical_json(value: Any) -> str:
    """Sorted-key, compact JSON used for hashing"""
    return json.dumps(to_plain(value), sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_hash(config: Dict[str, Any]) -> str:
    return sha256_hex(canonical_json(config))


def _cell(value: Any) -> str:
    value = to_plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return canonical_json(value)
    return str(value)


def rows_to_csv(rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    """Render rows as CSV text; column order follows `columns` or the first row"""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    frame = pd.DataFrame(
        [[_cell(row.get(col)) for col in columns] for row in rows],
        columns=columns,
        dtype=object,
    )
    return frame.to_csv(index=False, lineterminator="\n")


def render_csv(rows: List[Dict[str, Any]], header: Dict[str, Any], columns: Optional[List[str]] = None) -> str:
    """CSV with `# key=value` comment lines in front"""
    lines = [f"# {key}={_cell(val)}" for key, val in header.items()]
    return "\n".join(lines) + "\n" + rows_to_csv(rows, columns)


def render_json(envelope: Dict[str, Any]) -> str:
    return json.dumps(to_plain(envelope), indent=2, sort_keys=False, allow_nan=False) + "\n"
