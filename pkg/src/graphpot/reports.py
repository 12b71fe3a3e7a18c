"""CSV / JSON artifact writers with provenance stamps."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__


def config_hash(config: Mapping) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, Mapping):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_clean(v) for v in items]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


class Artifacts:
    """Writes files into ``out_dir``; every file carries the version and config hash."""

    def __init__(self, out_dir, config: Mapping):
        self.out = Path(out_dir)
        self.hash = config_hash(config)
        self.written: list[Path] = []

    @property
    def provenance(self) -> dict:
        return {"tool": "graphpot", "version": __version__, "config_sha256": self.hash}

    def _path(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.written.append(path)
        return path

    def csv(self, name: str, rows: Iterable[Mapping], columns: Sequence[str]) -> Path:
        buf = io.StringIO()
        buf.write(f"# graphpot {__version__} config_sha256={self.hash}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])
        path = self._path(name)
        path.write_text(buf.getvalue())
        return path

    def json(self, name: str, payload: Mapping) -> Path:
        doc = {"provenance": self.provenance, **_clean(dict(payload))}
        path = self._path(name)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def read_csv(path) -> list[dict[str, str]]:
    """Rows of an artifact CSV, skipping the provenance comment."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
