"""
Utility Functions
=================

Deterministic number formatting, CSV/JSON writers, file digests and
range parsing for the command-line tools.
"""

import csv
import hashlib
import json
import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """
    Format a real number with 12 significant digits.

    Args:
        value: Number to format

    Returns:
        Shortest '%.12g' rendering; negative zero prints as 0
    """
    value = float(value)
    if value == 0:
        return "0"
    return f"{value:.12g}"


def format_cell(value: Any) -> str:
    """Render one CSV cell"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def normalize(data: Any) -> Any:
    """
    Make a payload JSON-ready with fixed float precision.

    Floats are rounded through format_float, numpy scalars and arrays become
    Python values, Fractions become "p/q" strings.
    """
    if isinstance(data, dict):
        return {str(key): normalize(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [normalize(value) for value in data]
    if isinstance(data, np.ndarray):
        return normalize(data.tolist())
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        if not math.isfinite(data):
            return str(float(data))
        return float(format_float(data))
    if isinstance(data, Fraction):
        return str(data)
    return data


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    """Write one JSON document (UTF-8, LF, trailing newline)"""
    path = Path(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(normalize(data), f, indent=2)
        f.write('\n')
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a comma-separated table with a header row and LF line endings"""
    path = Path(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    return path


def file_digest(path: PathLike) -> str:
    """SHA-256 hex digest of a file"""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(out: PathLike) -> Path:
    """Sidecar path '<out>.manifest.json'"""
    out = Path(out)
    return out.with_name(out.name + '.manifest.json')


def parse_range(text: str) -> List[float]:
    """
    Parse 'a:b:step' into the inclusive list a, a+step, ..., <= b.

    Steps are accumulated in decimal so 0.25-type grids hit their end points
    exactly.

    Raises:
        ValueError: malformed text or non-positive step
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ValueError(f"range must look like a:b:step, got {text!r}")
    try:
        start, stop, step = (Decimal(part.strip()) for part in parts)
    except InvalidOperation:
        raise ValueError(f"range must look like a:b:step, got {text!r}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    values = []
    count = 0
    while start + count * step <= stop:
        values.append(float(start + count * step))
        count += 1
    return values


def parse_float_list(text: str) -> List[float]:
    """Parse a comma-separated list of reals"""
    return [float(part) for part in text.split(',') if part.strip()]


def parse_pair(text: str) -> tuple:
    """Parse 'a,b' into a pair of reals"""
    values = parse_float_list(text)
    if len(values) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return values[0], values[1]
