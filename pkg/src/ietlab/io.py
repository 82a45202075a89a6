"""Run directories: config hashing, value formatting and atomic writes.

A run lives in ``runs/<hash>/`` where the hash is taken over the canonical JSON
of its :class:`RunConfig`. Every file written through :class:`RunWriter` names
the manifest (CSV files in a leading comment, JSON files under ``"manifest"``),
and the manifest lists every file with its SHA-256.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import scalar

MANIFEST = "manifest.json"


def fmt(x) -> str:
    """Rationals as ``p/q``, floats with 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if scalar.is_interval(x):
        return format(scalar.to_float(x), ".17g")
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return str(x)


def to_jsonable(obj):
    """Recursively convert to JSON types; Fractions become ``p/q`` strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return fmt(obj)


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    precision_bits: int = scalar.DEFAULT_BITS
    fixtures: list = field(default_factory=list)

    def to_json(self) -> str:
        return canonical_json(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def atomic_write(path: Path, data: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class RunWriter:
    def __init__(self, config: RunConfig, root="runs"):
        self.config = config
        self.dir = Path(root) / config.hash
        self.files = {}

    def _record(self, name: str, text: str) -> Path:
        path = self.dir / name
        atomic_write(path, text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()
        return path

    def write_csv(self, name: str, header, rows) -> Path:
        buf = io.StringIO()
        buf.write(f"# manifest={MANIFEST} config={self.config.hash}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
        return self._record(name, buf.getvalue())

    def write_json(self, name: str, obj) -> Path:
        body = {"manifest": MANIFEST, "config": self.config.hash, **to_jsonable(obj)}
        return self._record(name, json.dumps(body, indent=2, sort_keys=True) + "\n")

    def finish(self) -> Path:
        manifest = {
            "config_hash": self.config.hash,
            "config": json.loads(self.config.to_json()),
            "files": dict(sorted(self.files.items())),
        }
        path = self.dir / MANIFEST
        atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return path


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    return list(csv.reader(lines))
