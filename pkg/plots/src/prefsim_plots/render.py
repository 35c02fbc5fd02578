"""Render metric-vs-comparisons panels from a summary CSV.

One image is produced per facet (distinct combination of scenario-cell
columns) that has data for the requested metric; each panel draws one line
per sampler with a shaded mean +/- 1 std band, and a vertical marker at the
cell's change timestep when it has one.  File names are derived from the
facet values, so re-rendering an unchanged summary reproduces the same
inventory.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.fonttype"] = "none"  # keep legend text greppable
matplotlib.rcParams["svg.hashsalt"] = "prefsim-plots"  # reproducible ids

import matplotlib.pyplot as plt

DEFAULT_FACET_KEYS = ("experiment", "scenario", "d", "t_change", "sigma", "k", "m", "feature_kind")

REQUIRED_COLUMNS = ("sampler", "timestep", "metric", "mean", "std", "n")

SAMPLER_LABELS = {
    "random": "Random-PE",
    "version-space": "Active-VS-PE",
    "bayes": "Active-Bayes-PE",
}
SAMPLER_ORDER = ("random", "version-space", "bayes")
SAMPLER_COLORS = {"random": "#7f7f7f", "version-space": "#1f77b4", "bayes": "#d62728"}

METRIC_AXES = {
    "accuracy": ("held-out accuracy", (0.0, 1.0)),
    "norm_distance": ("normalized weight distance", (0.0, 2.0)),
}


class MissingColumnError(ValueError):
    def __init__(self, column: str):
        super().__init__(f"summary CSV is missing required column {column!r}")
        self.column = column


@dataclass(frozen=True)
class PlotSpec:
    summary_path: Path
    metric: str = "accuracy"
    facet_keys: tuple[str, ...] = DEFAULT_FACET_KEYS
    out_dir: Path = Path(".")
    image_format: str = "svg"

    def __post_init__(self):
        if self.metric not in METRIC_AXES:
            raise ValueError(f"metric must be one of {sorted(METRIC_AXES)}, got {self.metric!r}")
        if self.image_format not in ("svg", "png"):
            raise ValueError(f"format must be svg or png, got {self.image_format!r}")


@dataclass
class RenderResult:
    written: list[Path] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def _read_summary(path: Path, facet_keys: tuple[str, ...]) -> list[dict]:
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in (*facet_keys, *REQUIRED_COLUMNS):
            if column not in header:
                raise MissingColumnError(column)
        return list(reader)


def _facet_slug(facet_keys: tuple[str, ...], values: tuple[str, ...]) -> str:
    parts = []
    for key, value in zip(facet_keys, values):
        if value == "":
            continue
        clean = re.sub(r"[^A-Za-z0-9.+-]+", "-", value).strip("-")
        parts.append(f"{key}={clean}")
    return "_".join(parts) if parts else "all"


def render(spec: PlotSpec) -> RenderResult:
    """Write one panel per facet with data; returns written paths and skips."""
    rows = _read_summary(spec.summary_path, spec.facet_keys)
    facets: dict[tuple[str, ...], list[dict]] = {}
    facet_order: list[tuple[str, ...]] = []
    for row in rows:
        key = tuple(row[k] for k in spec.facet_keys)
        if key not in facets:
            facets[key] = []
            facet_order.append(key)
        if row["metric"] == spec.metric:
            facets[key].append(row)

    result = RenderResult()
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    ylabel, ylim = METRIC_AXES[spec.metric]
    for key in facet_order:
        facet_rows = facets[key]
        slug = _facet_slug(spec.facet_keys, key)
        if not facet_rows:
            result.skipped.append(slug)
            continue
        path = spec.out_dir / f"{spec.metric}_{slug}.{spec.image_format}"
        _render_facet(facet_rows, key, spec, path, ylabel, ylim)
        result.written.append(path)
    return result


def _render_facet(rows, key, spec, path, ylabel, ylim) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_sampler: dict[str, list[dict]] = {}
    for row in rows:
        by_sampler.setdefault(row["sampler"], []).append(row)
    for sampler in SAMPLER_ORDER:
        series = by_sampler.pop(sampler, None)
        if series is not None:
            _draw_series(ax, sampler, series)
    for sampler in sorted(by_sampler):  # any non-standard samplers, stable order
        _draw_series(ax, sampler, by_sampler[sampler])

    t_change = dict(zip(spec.facet_keys, key)).get("t_change", "")
    if t_change not in ("", None):
        ax.axvline(float(t_change), color="black", linestyle=":", linewidth=1.0,
                   label=f"change at t={t_change}")

    ax.set_xlabel("number of comparisons")
    ax.set_ylabel(ylabel)
    ax.set_ylim(*ylim)
    ax.set_title(_facet_slug(spec.facet_keys, key).replace("_", "  "), fontsize=9)
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format=spec.image_format, metadata=_stable_metadata(spec.image_format))
    plt.close(fig)


def _stable_metadata(image_format: str) -> dict:
    # Strip wall-clock timestamps so reruns are comparable.
    if image_format == "svg":
        return {"Date": None}
    return {}


def _draw_series(ax, sampler: str, series: list[dict]) -> None:
    series = sorted(series, key=lambda r: int(r["timestep"]))
    t = [int(r["timestep"]) for r in series]
    mean = [float(r["mean"]) for r in series]
    std = [float(r["std"]) if r["std"] != "" else 0.0 for r in series]
    color = SAMPLER_COLORS.get(sampler)
    label = SAMPLER_LABELS.get(sampler, sampler)
    ax.plot(t, mean, label=label, color=color, linewidth=1.6)
    lower = [m - s for m, s in zip(mean, std)]
    upper = [m + s for m, s in zip(mean, std)]
    ax.fill_between(t, lower, upper, color=color, alpha=0.18, linewidth=0)
