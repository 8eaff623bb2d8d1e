"""Shared plumbing: deterministic RNG derivation, stable file writers.

Every random draw in the toolkit flows from a single integer seed through
``make_rng``. Subsystems derive independent streams by tagging the seed with
string keys, so adding a new consumer never perturbs existing streams.
"""

from __future__ import annotations

import json
import os
import zlib
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def make_rng(seed: int, *keys) -> np.random.Generator:
    """Derive a named RNG stream from a root seed.

    Keys may be strings (hashed with crc32) or integers; the same
    (seed, keys) pair always yields an identical generator.
    """
    entropy = [int(seed)] + [_key_to_int(k) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def worker_count() -> int:
    """Worker cap for any internal parallelism.

    Honors the DOCKPILOT_THREADS environment variable; when it is absent or
    unparsable the host's core count decides.
    """
    auto = os.cpu_count() or 1
    raw = os.environ.get("DOCKPILOT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return auto
    return max(1, n)


def write_json(path, obj) -> None:
    """Stable JSON dump: sorted keys, newline-terminated."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def format_value(v) -> str:
    """Canonical cell text for CSV output.

    Floats use repr (shortest round-trip form) so files are byte-stable
    across runs and parse back to the exact same value.
    """
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = [line.split(",") for line in text[1:]]
    return header, rows


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
