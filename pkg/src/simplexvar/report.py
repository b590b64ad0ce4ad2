"""Experiment reports: canonical JSON, delimited figures, rendered images.

A report carries the resolved configuration, one record per trial, the
aggregates derived from them, and named pass/fail checks.  Serialization
is canonical (sorted keys, fixed separators, trailing newline) so that
identical runs produce byte-identical bodies; the stable-output mode
replaces the timestamp with a fixed marker.

Every figure is a named two-column (x, y) series.  The delimited form
(one CSV per figure, '.' decimal separator, '\n' line endings, header
row) is the canonical data product; a PNG rendering of the same series
is written alongside it.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

__all__ = [
    "PACKAGE_VERSION",
    "FigureSpec",
    "ExperimentReport",
    "report_to_json",
    "report_from_json",
    "validate_report",
    "write_report_products",
    "write_figure_csv",
    "render_figure_png",
]

PACKAGE_VERSION = "0.1.0"
STABLE_TIMESTAMP = "stable"


@dataclass
class FigureSpec:
    """One named (x, y) series with axis labels."""

    figure_id: str
    xlabel: str
    ylabel: str
    x: list[float]
    y: list[float]
    kind: str = "line"  # line | scatter | loglog | semilogy

    def __post_init__(self) -> None:
        if len(self.x) != len(self.y):
            raise ValueError(f"figure {self.figure_id}: x and y lengths differ")


@dataclass
class ExperimentReport:
    experiment: str
    config: dict[str, Any]
    trials: list[dict[str, Any]]
    aggregates: dict[str, Any]
    checks: list[dict[str, Any]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    figures: list[FigureSpec] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(bool(c.get("passed")) for c in self.checks)

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})


def _plain(obj):
    """Coerce numpy scalars and containers to JSON-clean values."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def report_to_json(report: ExperimentReport, stable: bool = False) -> str:
    body = {
        "experiment": report.experiment,
        "config": _plain(report.config),
        "trials": _plain(report.trials),
        "aggregates": _plain(report.aggregates),
        "checks": _plain(report.checks),
        "flags": list(report.flags),
        "figures": [f.figure_id for f in report.figures],
        "passed": report.passed,
        "provenance": {
            "package": "simplexvar",
            "version": PACKAGE_VERSION,
            "timestamp": STABLE_TIMESTAMP
            if stable
            else _dt.datetime.now(_dt.timezone.utc).isoformat(),
        },
    }
    return json.dumps(body, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def report_from_json(text: str) -> dict[str, Any]:
    return json.loads(text)


_REQUIRED_KEYS = {
    "experiment": str,
    "config": dict,
    "trials": list,
    "aggregates": dict,
    "checks": list,
    "flags": list,
    "figures": list,
    "passed": bool,
    "provenance": dict,
}


def validate_report(doc: dict[str, Any]) -> list[str]:
    """Structural validation; returns a list of problems (empty = valid)."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        return ["report body is not an object"]
    for key, kind in _REQUIRED_KEYS.items():
        if key not in doc:
            problems.append(f"missing key {key!r}")
        elif not isinstance(doc[key], kind):
            problems.append(f"key {key!r} should be {kind.__name__}")
    if problems:
        return problems
    for i, chk in enumerate(doc["checks"]):
        if not isinstance(chk, dict) or not {"name", "passed", "detail"} <= set(chk):
            problems.append(f"checks[{i}] needs name/passed/detail")
    for i, trial in enumerate(doc["trials"]):
        if not isinstance(trial, dict):
            problems.append(f"trials[{i}] is not an object")
    prov = doc["provenance"]
    for key in ("package", "version", "timestamp"):
        if key not in prov:
            problems.append(f"provenance missing {key!r}")
    stated = doc["passed"]
    actual = all(bool(c.get("passed")) for c in doc["checks"])
    if stated != actual:
        problems.append("stated pass flag disagrees with the checks")
    return problems


def write_figure_csv(fig: FigureSpec, directory: Path) -> Path:
    path = directory / f"{fig.figure_id}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([fig.xlabel, fig.ylabel])
        for xv, yv in zip(fig.x, fig.y):
            writer.writerow([repr(float(xv)), repr(float(yv))])
    return path


def render_figure_png(fig: FigureSpec, directory: Path) -> Path:
    """Render the series to a PNG next to its CSV."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    path = directory / f"{fig.figure_id}.png"
    figure, ax = plt.subplots(figsize=(6.0, 4.0))
    if fig.kind == "scatter":
        ax.plot(fig.x, fig.y, linestyle="none", marker="o", markersize=3)
    else:
        ax.plot(fig.x, fig.y, marker="o", markersize=3)
        if fig.kind == "loglog":
            ax.set_xscale("log")
            ax.set_yscale("log")
        elif fig.kind == "semilogy":
            ax.set_yscale("log")
    ax.set_xlabel(fig.xlabel)
    ax.set_ylabel(fig.ylabel)
    ax.set_title(fig.figure_id.replace("_", " "))
    ax.grid(True, alpha=0.3)
    figure.tight_layout()
    figure.savefig(path, dpi=110)
    plt.close(figure)
    return path


def write_report_products(
    report: ExperimentReport,
    directory: str | Path,
    stable: bool = False,
    render: bool = True,
) -> Path:
    """Write report.json plus one CSV (and PNG) per figure; returns the dir."""
    outdir = Path(directory)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.json").write_text(report_to_json(report, stable=stable))
    for fig in report.figures:
        write_figure_csv(fig, outdir)
        if render:
            render_figure_png(fig, outdir)
    return outdir
