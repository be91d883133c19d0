"""Sweep records and their CSV / JSON serialization."""

import csv
import io
import json
import math
from dataclasses import dataclass, field


def format_value(v):
    """Deterministic text for a CSV cell."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(float(f"{v:.12g}"))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return _jsonable(obj.as_dict())
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.12g}")
        return str(obj)
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


@dataclass
class ScalingReport:
    """Rows of measurements plus fit blocks and provenance.

    Attributes
    ----------
    experiment : str
        Experiment name.
    columns : list of str
        Fixed CSV column order.
    rows : list of dict
        One dict per measurement, keyed by column.
    fits : dict
        Named :class:`~wavepacket_lab.harness.fitting.FitResult` blocks.
    summary : dict
        Derived statistics (maxima, variation bands).
    checks : dict
        Named pass/fail flags for acceptance thresholds.
    provenance : dict
        Config hash, seed, code version, resolution notes.
    """

    experiment: str
    columns: list
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def add_row(self, **values):
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"columns not in schema: {sorted(unknown)}")
        self.rows.append({c: values.get(c) for c in self.columns})

    def column(self, name):
        return [r[name] for r in self.rows]

    @property
    def passed(self):
        return all(self.checks.values())

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([format_value(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self, config=None):
        payload = {
            "experiment": self.experiment,
            "config": config,
            "fits": self.fits,
            "summary": self.summary,
            "checks": self.checks,
            "passed": self.passed,
            "provenance": self.provenance,
            "n_rows": len(self.rows),
        }
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"

    def write(self, csv_path, json_path=None, config=None):
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        if json_path is not None:
            with open(json_path, "w", encoding="utf-8") as fh:
                fh.write(self.to_json(config))
