"""Machine-readable reports: verdicts, residuals and emitted artifacts,
serialized deterministically (floats at 17 significant digits, sorted keys)
so identical runs produce byte-identical JSON.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _pkg_version

__all__ = ["Report", "format_float", "deterministic_json", "write_csv"]


def format_float(x: float) -> float | str:
    """Round-trippable 17-significant-digit rendering used inside JSON."""
    if isinstance(x, (bool, int)):
        return x
    return float(f"{float(x):.17g}")


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return format_float(float(obj))
    if isinstance(obj, (np.complexfloating, complex)):
        z = complex(obj)
        return [format_float(z.real), format_float(z.imag)]
    return obj


def deterministic_json(obj) -> str:
    return json.dumps(_normalize(obj), sort_keys=True, indent=2)


@dataclass
class Report:
    """Outcome of one CLI run: named verdicts, nonnegative residuals, paths of
    emitted files, and an echo of the resolved configuration."""

    command: str
    verdicts: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = _pkg_version

    def add_residual(self, name: str, value: float) -> None:
        v = float(value)
        if v < 0:
            raise ValueError(f"residual {name} is negative: {v}")
        self.residuals[name] = v

    def all_passed(self, tolerances: dict | None = None) -> bool:
        if not all(bool(v) for v in self.verdicts.values()):
            return False
        if tolerances:
            for name, tol in tolerances.items():
                if name in self.residuals and self.residuals[name] > tol:
                    return False
        return True

    def to_json(self) -> str:
        return deterministic_json({
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "verdicts": self.verdicts,
            "residuals": self.residuals,
            "scalars": self.scalars,
            "artifacts": self.artifacts,
        })

    def write(self, path: str) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")
        if path not in self.artifacts:
            self.artifacts.append(path)
        return path


def write_csv(path: str, header: list[str], rows) -> str:
    """Columnar CSV with 17-significant-digit floats."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" if isinstance(v, (float, np.floating))
                             else v for v in row])
    return path
