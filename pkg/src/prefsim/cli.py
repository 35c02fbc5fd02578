"""Command-line entry point: run experiments, list scenarios, summarise CSVs.

Commands:
    prefsim run <config.json>
    prefsim list-scenarios
    prefsim summarize <raw.csv> <out.csv>

The run config is a JSON document; unknown keys are rejected, paths are
resolved relative to the config file, and the fully-resolved configuration
is echoed to ``<output_dir>/config.resolved.json``.  Outputs are written
only after every trial has finished, and the worker count never changes a
single output byte (results are merged in trial order).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import multiprocessing
import os
import sys
from pathlib import Path

from .elicitation import TrialError, run_trial
from .samplers import SAMPLER_NAMES
from .scenarios import (
    RAW_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentSpec,
    TrialTask,
    builtin_catalogue,
    describe,
    expand,
    summarize,
    trace_rows,
    with_run_params,
)
from .settings import SolverSettings

WORKERS_ENV = "PREFSIM_WORKERS"

CONFIG_KEYS = {
    "experiment",
    "master_seed",
    "agents_per_cell",
    "N",
    "pool_size",
    "output_dir",
    "workers",
    "overrides",
}

INLINE_SPEC_KEYS = {
    "name",
    "family",
    "scenarios",
    "d",
    "feature_kind",
    "t_change",
    "sigma",
    "k",
    "m",
    "time_variant",
    "samplers",
}

OVERRIDE_KEYS = {
    "svm_lambda",
    "svm_tol",
    "svm_max_passes",
    "ard_tol",
    "ard_max_iter",
    "ard_alpha_min",
    "ard_alpha_max",
    "ard_noise_in_predictive",
    "heldout_size",
    "sigma_grid",
}

CONFIG_DEFAULTS = {
    "master_seed": 0,
    "agents_per_cell": 50,
    "N": 50,
    "pool_size": 1000,
    "workers": None,
    "overrides": {},
}


class ConfigError(ValueError):
    pass


def _check_keys(given: dict, allowed: set[str], where: str) -> None:
    for key in given:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _inline_spec(raw: dict) -> ExperimentSpec:
    _check_keys(raw, INLINE_SPEC_KEYS, "inline experiment spec")
    for required in ("family", "scenarios", "d"):
        if required not in raw:
            raise ConfigError(f"inline experiment spec needs {required!r}")
    return ExperimentSpec(
        name=raw.get("name", "inline"),
        family=raw["family"],
        scenarios=tuple(raw["scenarios"]),
        d_values=tuple(int(d) for d in raw["d"]),
        feature_kinds=tuple(raw.get("feature_kind", ["integer-range(1,10)"])),
        t_change_values=tuple(int(t) for t in raw.get("t_change", [])),
        sigma_values=tuple(float(s) for s in raw.get("sigma", [])),
        interaction_counts=tuple(int(k) for k in raw.get("k", [])),
        missing_counts=tuple(int(m) for m in raw.get("m", [])),
        time_variant=bool(raw.get("time_variant", False)),
        samplers=tuple(raw.get("samplers", SAMPLER_NAMES)),
    )


def load_run_config(path: Path) -> tuple[ExperimentSpec, SolverSettings, dict]:
    """Parse and validate a run config; returns the spec, solver settings,
    and the fully-resolved config dict (for the echo file)."""
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(raw, CONFIG_KEYS, "run config")
    if "experiment" not in raw:
        raise ConfigError("config needs an 'experiment' key")
    if "output_dir" not in raw:
        raise ConfigError("config needs an 'output_dir' key")

    merged = {**CONFIG_DEFAULTS, **raw}
    overrides = merged["overrides"]
    if not isinstance(overrides, dict):
        raise ConfigError("'overrides' must be an object")
    _check_keys(overrides, OVERRIDE_KEYS, "overrides")

    experiment = merged["experiment"]
    if isinstance(experiment, str):
        catalogue = builtin_catalogue()
        if experiment not in catalogue:
            raise ConfigError(
                f"unknown experiment {experiment!r}; "
                f"choose one of {sorted(catalogue)} or pass an inline spec"
            )
        spec = catalogue[experiment]
    elif isinstance(experiment, dict):
        spec = _inline_spec(experiment)
    else:
        raise ConfigError("'experiment' must be a builtin name or an inline object")

    heldout_size = int(overrides.get("heldout_size", spec.heldout_size))
    spec = with_run_params(
        spec,
        master_seed=int(merged["master_seed"]),
        agents_per_cell=int(merged["agents_per_cell"]),
        n_comparisons=int(merged["N"]),
        pool_size=int(merged["pool_size"]),
        heldout_size=heldout_size,
    )
    if "sigma_grid" in overrides:
        spec = dataclasses.replace(
            spec, sigma_values=tuple(float(s) for s in overrides["sigma_grid"])
        )

    settings_kwargs = {
        key: overrides[key]
        for key in overrides
        if key not in ("heldout_size", "sigma_grid")
    }
    settings = SolverSettings(**settings_kwargs)

    resolved = {
        "experiment": experiment,
        "master_seed": spec.master_seed,
        "agents_per_cell": spec.agents_per_cell,
        "N": spec.n_comparisons,
        "pool_size": spec.pool_size,
        "output_dir": merged["output_dir"],
        "workers": merged["workers"],
        "overrides": dict(overrides),
        "resolved_settings": dataclasses.asdict(settings),
        "resolved_spec": dataclasses.asdict(spec),
    }
    return spec, settings, resolved


def resolve_workers(configured: int | None) -> int:
    """Precedence: PREFSIM_WORKERS env, then config, then CPU count."""
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        workers = int(env)
    elif configured is not None:
        workers = int(configured)
    else:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return workers


def _run_task(task: TrialTask):
    try:
        trace = run_trial(task.config)
    except TrialError as exc:
        return None, {
            "experiment": task.experiment,
            "scenario": task.cell.scenario,
            "sampler": task.sampler,
            "agent_index": task.agent_index,
            "seed": task.config.seed,
            "timestep": exc.timestep,
            "error": str(exc.cause),
        }
    return trace_rows(task, trace), None


def run_tasks(tasks: list[TrialTask], workers: int) -> tuple[list[dict], list[dict]]:
    """Execute trials, merging rows in trial order regardless of worker count."""
    if workers <= 1:
        results = [_run_task(task) for task in tasks]
    else:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_run_task, tasks, chunksize=1)
    rows: list[dict] = []
    aborts: list[dict] = []
    for task_rows, abort in results:
        if abort is not None:
            aborts.append(abort)
        else:
            rows.extend(task_rows)
    return rows, aborts


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_raw_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_COLUMNS)
        for row in rows:
            writer.writerow([_format_value(row[col]) for col in RAW_COLUMNS])


def write_summary_csv(path: Path, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [_format_value(getattr(row, col)) for col in SUMMARY_COLUMNS]
            )


def _parse_optional(text: str, cast):
    return None if text == "" else cast(text)


def read_raw_csv(path: Path) -> list[dict]:
    """Parse a raw results CSV back into typed row dicts."""
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(header) != RAW_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for record in reader:
            if len(record) != len(RAW_COLUMNS):
                raise ValueError(f"{path}: malformed row {record}")
            named = dict(zip(RAW_COLUMNS, record))
            rows.append(
                {
                    "experiment": named["experiment"],
                    "scenario": named["scenario"],
                    "sampler": named["sampler"],
                    "d": int(named["d"]),
                    "t_change": _parse_optional(named["t_change"], int),
                    "sigma": _parse_optional(named["sigma"], float),
                    "k": _parse_optional(named["k"], int),
                    "m": _parse_optional(named["m"], int),
                    "feature_kind": named["feature_kind"],
                    "agent_index": int(named["agent_index"]),
                    "seed": int(named["seed"]),
                    "timestep": int(named["timestep"]),
                    "accuracy": _parse_optional(named["accuracy"], float),
                    "norm_distance": _parse_optional(named["norm_distance"], float),
                }
            )
    return rows


def write_aborts_csv(path: Path, aborts: list[dict]) -> None:
    columns = ("experiment", "scenario", "sampler", "agent_index", "seed", "timestep", "error")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for abort in aborts:
            writer.writerow([_format_value(abort[col]) for col in columns])


def cmd_run(config_path: str) -> int:
    path = Path(config_path)
    try:
        spec, settings, resolved = load_run_config(path)
        workers = resolve_workers(resolved["workers"])
        tasks = expand(spec, settings)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out_dir = (path.parent / resolved["output_dir"]).resolve()
    outputs = [out_dir / "raw.csv", out_dir / "summary.csv", out_dir / "config.resolved.json"]
    try:
        rows, aborts = run_tasks(tasks, workers)
        summary = summarize(rows)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_raw_csv(outputs[0], rows)
        write_summary_csv(outputs[1], summary)
        outputs[2].write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")
        if aborts:
            write_aborts_csv(out_dir / "aborts.csv", aborts)
            print(
                f"warning: {len(aborts)} trial(s) aborted and were excluded "
                f"from summaries (see aborts.csv)",
                file=sys.stderr,
            )
    except Exception as exc:  # noqa: BLE001 - reported as the run's exit status
        for partial in outputs:
            partial.unlink(missing_ok=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows over {len(tasks)} trials to {out_dir}")
    return 0


def cmd_list_scenarios() -> int:
    for name, spec in builtin_catalogue().items():
        print(f"{name}: {describe(spec)}")
    return 0


def cmd_summarize(raw_path: str, out_path: str) -> int:
    try:
        rows = read_raw_csv(Path(raw_path))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not rows:
        print(f"error: {raw_path} has no data rows", file=sys.stderr)
        return 1
    write_summary_csv(Path(out_path), summarize(rows))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="prefsim",
        description="Simulate online pairwise preference elicitation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", help="path to the run config JSON file")
    sub.add_parser("list-scenarios", help="list the builtin experiment grids")
    sum_p = sub.add_parser("summarize", help="recompute a summary CSV from raw rows")
    sum_p.add_argument("raw", help="path to a raw.csv produced by 'prefsim run'")
    sum_p.add_argument("out", help="path for the summary CSV")

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "list-scenarios":
        return cmd_list_scenarios()
    return cmd_summarize(args.raw, args.out)


if __name__ == "__main__":
    sys.exit(main())
