"""Reports and their bit-stable serialization.

JSON: sorted keys, floats rounded through ``%.12g``, non-finite floats and
missing optional fields as null.  Timing is written to a separate file so the
report itself is byte-identical across reruns with the same seed.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

# column schema of every CSV the harness writes
TABLE_SCHEMAS = {
    "E5": ["delta", "ap_const", "ratio"],
}
SUMMARY_HEADER = ["experiment", "criterion", "passed"]
METRIC_HEADER = ["key", "value"]


@dataclass
class Report:
    experiment: str
    name: str
    binding: str
    metrics: dict = field(default_factory=dict)
    criteria: dict = field(default_factory=dict)  # "C7" -> bool
    environment: dict = field(default_factory=dict)
    table: list | None = None  # rows matching TABLE_SCHEMAS[experiment]
    notes: str | None = None
    timing: float | None = None

    @property
    def passed(self) -> bool:
        return all(self.criteria.values())

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "name": self.name,
            "binding": self.binding,
            "metrics": self.metrics,
            "criteria": self.criteria,
            "passed": self.passed,
            "environment": self.environment,
            "table": self.table,
            "notes": self.notes,
        }


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float("%.12g" % x)
    if isinstance(x, complex):
        return _clean([x.real, x.imag])
    return x


def to_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def _flatten(d: dict, prefix: str = ""):
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, (list, tuple)):
            yield key, json.dumps(_clean(v), sort_keys=True)
        else:
            yield key, v


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def emit_report(reports, out_dir, fmt: str = "json") -> list:
    """Write one file per report plus a summary; returns the paths written."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to emit")
    if fmt not in ("json", "csv"):
        raise ValueError("format must be json or csv")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for r in reports:
        if fmt == "json":
            p = os.path.join(out_dir, f"{r.experiment}.json")
            with open(p, "w") as fh:
                fh.write(to_json(r.to_dict()))
            paths.append(p)
        else:
            p = os.path.join(out_dir, f"{r.experiment}.csv")
            if r.experiment in TABLE_SCHEMAS and r.table is not None:
                _write_csv(p, TABLE_SCHEMAS[r.experiment], r.table)
            else:
                _write_csv(p, METRIC_HEADER, _flatten({"metrics": r.metrics, "environment": r.environment}))
            paths.append(p)
    rows = [(r.experiment, c, ok) for r in reports for c, ok in sorted(r.criteria.items())]
    if fmt == "json":
        p = os.path.join(out_dir, "summary.json")
        with open(p, "w") as fh:
            fh.write(to_json({"criteria": [list(x) for x in rows],
                              "passed": all(ok for _, _, ok in rows)}))
    else:
        p = os.path.join(out_dir, "summary.csv")
        _write_csv(p, SUMMARY_HEADER, rows)
    paths.append(p)
    tp = os.path.join(out_dir, "timing.json")
    with open(tp, "w") as fh:
        fh.write(json.dumps({r.experiment: r.timing for r in reports}, sort_keys=True, indent=2) + "\n")
    paths.append(tp)
    return paths


def load_reports(out_dir) -> list:
    out = []
    for name in sorted(os.listdir(out_dir)):
        if name.startswith("E") and name.endswith(".json"):
            d = json.load(open(os.path.join(out_dir, name)))
            out.append(Report(d["experiment"], d["name"], d["binding"], d["metrics"], d["criteria"],
                              d["environment"], d.get("table"), d.get("notes")))
    return out
