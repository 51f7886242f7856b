"""Deterministic JSON/CSV artifacts and the per-run manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .exterior import KForm, format_form

OUT_DIR_ENV = "SYMPLIE_OUT_DIR"
DEFAULT_OUT_DIR = "symplie-out"


def to_jsonable(x: Any) -> Any:
    """Convert scalars, forms and containers to plain JSON values.

    Exact integers stay integers; other fractions become floats (shortest
    round-trip repr).  Forms are rendered as monomial strings.
    """
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, (float, np.floating)):
        v = float(x) + 0.0
        if v != v or v in (float("inf"), float("-inf")):
            return str(v)
        return v
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, KForm):
        return format_form(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return to_jsonable(x.to_dict())
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def fmt17(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt17(v) for v in row])
    return buf.getvalue()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def resolve_out_dir(arg: Optional[str]) -> Path:
    return Path(arg or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)


def timestamp() -> str:
    """UTC time of the run; SOURCE_DATE_EPOCH pins it for reproducible manifests."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


@dataclass
class RunManifest:
    command: str
    inputs: Dict[str, Any]
    outcome: Dict[str, Any]
    artifacts: Dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    timestamp: str = field(default_factory=timestamp)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outcome": self.outcome,
            "artifacts": self.artifacts,
            "tool": "symplie",
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


class ArtifactWriter:
    """Collects artifact texts, writes them, and finishes with the manifest."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.files: Dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def add_json(self, name: str, obj: Any) -> str:
        text = dumps(obj)
        self.add(name, text)
        return text

    def finish(self, command: str, inputs: Dict[str, Any], outcome: Dict[str, Any]) -> RunManifest:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (self.out_dir / name).write_text(text, encoding="utf-8")
        manifest = RunManifest(
            command=command,
            inputs=inputs,
            outcome=outcome,
            artifacts={name: sha256_text(text) for name, text in sorted(self.files.items())},
        )
        (self.out_dir / "manifest.json").write_text(dumps(manifest), encoding="utf-8")
        return manifest


def trajectory_rows(times: Sequence[float], states: Sequence[Sequence[float]], Q: Sequence[float],
                    rhs_norms: Sequence[float]) -> List[List[float]]:
    return [[t, *s, q, r] for t, s, q, r in zip(times, states, Q, rhs_norms)]
