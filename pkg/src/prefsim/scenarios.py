"""The experiment catalogue: named scenario grids, seeding, and aggregation.

An :class:`ExperimentSpec` expands into one :class:`TrialTask` per
(cell, agent, sampler).  Per-trial seeds are derived from the master seed,
the family, the cell parameters, and the agent index - never the sampler -
so the same agent and held-out set are replayed for all samplers and
cross-sampler comparisons are paired.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from .agents import _SCENARIO_KEEP, AgentSpec, INSTABILITY_SCENARIOS
from .core import FeatureSpace
from .elicitation import TrialConfig, TrialTrace
from .samplers import SAMPLER_NAMES, SamplerKind
from .settings import SolverSettings, DEFAULT_SETTINGS

FAMILY_IDEAL = "ideal"
FAMILY_INSTABILITY = "instability"
FAMILY_MISSPEC = "misspecification"
FAMILY_NOISE = "noise"

SCENARIO_IDEAL = "ideal"
SCENARIO_TREE = "tree"
SCENARIO_INTERACTIONS = "interactions"
SCENARIO_MISSING = "missing-features"
SCENARIO_RESPONSE = "response"
SCENARIO_PREFERENCE = "preference"

DEFAULT_FEATURE_KIND = "integer-range(1,10)"

RAW_COLUMNS = (
    "experiment",
    "scenario",
    "sampler",
    "d",
    "t_change",
    "sigma",
    "k",
    "m",
    "feature_kind",
    "agent_index",
    "seed",
    "timestep",
    "accuracy",
    "norm_distance",
)

CELL_COLUMNS = ("experiment", "scenario", "d", "t_change", "sigma", "k", "m", "feature_kind")

SUMMARY_COLUMNS = CELL_COLUMNS + ("sampler", "timestep", "metric", "mean", "std", "n")


@dataclass(frozen=True)
class Cell:
    """One grid point of an experiment; unset axes stay None."""

    scenario: str
    feature_kind: str
    d: int
    t_change: int | None = None
    sigma: float | None = None
    k: int | None = None
    m: int | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    """A named grid of scenario cells, run for every sampler and agent index."""

    name: str
    family: str
    scenarios: tuple[str, ...]
    d_values: tuple[int, ...]
    feature_kinds: tuple[str, ...] = (DEFAULT_FEATURE_KIND,)
    t_change_values: tuple[int, ...] = ()
    sigma_values: tuple[float, ...] = ()
    interaction_counts: tuple[int, ...] = ()
    missing_counts: tuple[int, ...] = ()
    time_variant: bool = False
    samplers: tuple[str, ...] = SAMPLER_NAMES
    n_comparisons: int = 50
    agents_per_cell: int = 50
    pool_size: int = 1000
    heldout_size: int = 1000
    master_seed: int = 0


@dataclass(frozen=True)
class TrialTask:
    """One runnable trial, carrying the cell metadata its rows report."""

    experiment: str
    cell: Cell
    agent_index: int
    sampler: str
    config: TrialConfig


def derive_seed(master_seed: int, family: str, cell: Cell, agent_index: int) -> int:
    """Stable 64-bit trial seed; independent of the sampler by construction."""
    payload = json.dumps(
        [
            int(master_seed),
            family,
            cell.scenario,
            cell.feature_kind,
            cell.d,
            cell.t_change,
            cell.sigma,
            cell.k,
            cell.m,
            int(agent_index),
        ],
        separators=(",", ":"),
    )
    digest = hashlib.blake2b(payload.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _cells(spec: ExperimentSpec) -> list[Cell]:
    cells: list[Cell] = []
    for scenario in spec.scenarios:
        for kind in spec.feature_kinds:
            for d in spec.d_values:
                cells.extend(_scenario_cells(spec, scenario, kind, d))
    return cells


def _scenario_cells(
    spec: ExperimentSpec, scenario: str, kind: str, d: int
) -> list[Cell]:
    base = dict(scenario=scenario, feature_kind=kind, d=d)
    if scenario in INSTABILITY_SCENARIOS:
        keep = _SCENARIO_KEEP[scenario]
        if keep is not None and d < keep:
            raise ValueError(
                f"inconsistent grid: scenario {scenario!r} needs d >= {keep}, got {d}"
            )
        if not spec.t_change_values:
            raise ValueError(f"scenario {scenario!r} needs t_change values")
        return [Cell(**base, t_change=tc) for tc in spec.t_change_values]
    if scenario in (SCENARIO_RESPONSE, SCENARIO_PREFERENCE):
        if not spec.sigma_values:
            raise ValueError(f"scenario {scenario!r} needs sigma values")
        return [Cell(**base, sigma=float(s)) for s in spec.sigma_values]
    if scenario == SCENARIO_INTERACTIONS:
        if not spec.interaction_counts:
            raise ValueError("interaction scenario needs interaction counts")
        cap = d * (d - 1) // 2
        seen: list[int] = []
        for k in spec.interaction_counts:
            k = min(k, cap)
            if k not in seen:
                seen.append(k)
        return [Cell(**base, k=k) for k in seen]
    if scenario == SCENARIO_MISSING:
        if not spec.missing_counts:
            raise ValueError("missing-feature scenario needs missing counts")
        return [Cell(**base, m=m) for m in spec.missing_counts]
    if scenario == SCENARIO_TREE:
        if d < 2:
            raise ValueError(f"tree scenario needs d >= 2, got {d}")
        return [Cell(**base)]
    if scenario == SCENARIO_IDEAL:
        return [Cell(**base)]
    raise ValueError(f"unknown scenario: {scenario!r}")


def _agent_spec(spec: ExperimentSpec, cell: Cell) -> AgentSpec:
    if cell.scenario in INSTABILITY_SCENARIOS:
        return AgentSpec(kind="linear", instability=cell.scenario, t_change=cell.t_change)
    if cell.scenario == SCENARIO_TREE:
        return AgentSpec(kind="tree")
    if cell.scenario == SCENARIO_INTERACTIONS:
        return AgentSpec(kind="interaction", interactions=cell.k)
    if cell.scenario == SCENARIO_MISSING:
        return AgentSpec(kind="hidden", hidden_features=cell.m)
    if cell.scenario == SCENARIO_RESPONSE:
        return AgentSpec(
            kind="linear",
            noise_kind="response",
            sigma=cell.sigma,
            time_variant=spec.time_variant,
        )
    if cell.scenario == SCENARIO_PREFERENCE:
        return AgentSpec(
            kind="linear",
            noise_kind="preference",
            sigma=cell.sigma,
            time_variant=spec.time_variant,
        )
    return AgentSpec(kind="linear")


def expand(
    spec: ExperimentSpec, settings: SolverSettings = DEFAULT_SETTINGS
) -> list[TrialTask]:
    """Enumerate all trials: cells x agent indices x samplers, in that order."""
    tasks: list[TrialTask] = []
    for cell in _cells(spec):
        space = FeatureSpace.from_token(cell.feature_kind, cell.d)
        agent = _agent_spec(spec, cell)
        for agent_index in range(spec.agents_per_cell):
            seed = derive_seed(spec.master_seed, spec.family, cell, agent_index)
            for sampler in spec.samplers:
                config = TrialConfig(
                    space=space,
                    agent=agent,
                    sampler=SamplerKind(sampler, spec.pool_size),
                    n_comparisons=spec.n_comparisons,
                    seed=seed,
                    heldout_size=spec.heldout_size,
                    settings=settings,
                )
                tasks.append(TrialTask(spec.name, cell, agent_index, sampler, config))
    return tasks


def trace_rows(task: TrialTask, trace: TrialTrace) -> list[dict]:
    """Flatten one trace into raw result rows, one per timestep."""
    cell = task.cell
    rows = []
    for step in trace.steps:
        rows.append(
            {
                "experiment": task.experiment,
                "scenario": cell.scenario,
                "sampler": task.sampler,
                "d": cell.d,
                "t_change": cell.t_change,
                "sigma": cell.sigma,
                "k": cell.k,
                "m": cell.m,
                "feature_kind": cell.feature_kind,
                "agent_index": task.agent_index,
                "seed": task.config.seed,
                "timestep": step.t,
                "accuracy": step.accuracy,
                "norm_distance": step.norm_distance,
            }
        )
    return rows


@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    scenario: str
    d: int
    t_change: int | None
    sigma: float | None
    k: int | None
    m: int | None
    feature_kind: str
    sampler: str
    timestep: int
    metric: str
    mean: float
    std: float | None
    n: int


def summarize(raw_rows: list[dict]) -> list[SummaryRow]:
    """Aggregate raw rows into per-(cell, sampler, timestep) mean and std.

    Uses the sample standard deviation (n-1 denominator); a single
    observation reports a blank std.  Group order follows first appearance
    in the raw rows, so re-summarising a written CSV reproduces the summary
    byte for byte.
    """
    groups: dict[tuple, dict[int, dict[str, list[float]]]] = {}
    order: list[tuple] = []
    for row in raw_rows:
        key = tuple(row[col] for col in CELL_COLUMNS) + (row["sampler"],)
        if key not in groups:
            groups[key] = {}
            order.append(key)
        per_t = groups[key].setdefault(row["timestep"], {"accuracy": [], "norm_distance": []})
        for metric in ("accuracy", "norm_distance"):
            if row[metric] is not None:
                per_t[metric].append(row[metric])
    out: list[SummaryRow] = []
    for key in order:
        cell_values = dict(zip(CELL_COLUMNS, key[:-1]))
        sampler = key[-1]
        for t in sorted(groups[key]):
            for metric in ("accuracy", "norm_distance"):
                values = groups[key][t][metric]
                if not values:
                    continue
                arr = np.asarray(values)
                out.append(
                    SummaryRow(
                        sampler=sampler,
                        timestep=t,
                        metric=metric,
                        mean=float(arr.mean()),
                        std=float(arr.std(ddof=1)) if len(arr) > 1 else None,
                        n=len(arr),
                        **cell_values,
                    )
                )
    return out


def builtin_catalogue() -> dict[str, ExperimentSpec]:
    """The named experiment grids, covering every simulated challenge."""
    sigma_grid = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)
    return {
        "ideal": ExperimentSpec(
            name="ideal",
            family=FAMILY_IDEAL,
            scenarios=(SCENARIO_IDEAL,),
            d_values=(5, 10, 15),
        ),
        "instability": ExperimentSpec(
            name="instability",
            family=FAMILY_INSTABILITY,
            scenarios=INSTABILITY_SCENARIOS,
            d_values=(5, 10),
            t_change_values=(10, 20, 30),
        ),
        "misspec-tree": ExperimentSpec(
            name="misspec-tree",
            family=FAMILY_MISSPEC,
            scenarios=(SCENARIO_TREE,),
            d_values=(4, 8, 16),
            feature_kinds=(DEFAULT_FEATURE_KIND, "binary"),
        ),
        "misspec-interactions": ExperimentSpec(
            name="misspec-interactions",
            family=FAMILY_MISSPEC,
            scenarios=(SCENARIO_INTERACTIONS,),
            d_values=(5, 10),
            interaction_counts=(1, 2, 4, 8),
        ),
        "misspec-missing": ExperimentSpec(
            name="misspec-missing",
            family=FAMILY_MISSPEC,
            scenarios=(SCENARIO_MISSING,),
            d_values=(5, 10),
            missing_counts=(1, 2, 5),
        ),
        "noise-response": ExperimentSpec(
            name="noise-response",
            family=FAMILY_NOISE,
            scenarios=(SCENARIO_RESPONSE,),
            d_values=(5,),
            sigma_values=sigma_grid,
        ),
        "noise-preference": ExperimentSpec(
            name="noise-preference",
            family=FAMILY_NOISE,
            scenarios=(SCENARIO_PREFERENCE,),
            d_values=(5,),
            sigma_values=sigma_grid,
        ),
        "noise-timevariant": ExperimentSpec(
            name="noise-timevariant",
            family=FAMILY_NOISE,
            scenarios=(SCENARIO_RESPONSE, SCENARIO_PREFERENCE),
            d_values=(5,),
            sigma_values=(1.0, 2.0, 5.0, 10.0),
            time_variant=True,
        ),
    }


def describe(spec: ExperimentSpec) -> str:
    """One-paragraph grid description for the scenario listing."""
    parts = [f"family={spec.family}", f"scenarios={list(spec.scenarios)}", f"d={list(spec.d_values)}"]
    if spec.t_change_values:
        parts.append(f"t_change={list(spec.t_change_values)}")
    if spec.sigma_values:
        parts.append(f"sigma={list(spec.sigma_values)}")
    if spec.interaction_counts:
        parts.append(f"interactions={list(spec.interaction_counts)}")
    if spec.missing_counts:
        parts.append(f"missing={list(spec.missing_counts)}")
    if len(spec.feature_kinds) > 1 or spec.feature_kinds[0] != DEFAULT_FEATURE_KIND:
        parts.append(f"features={list(spec.feature_kinds)}")
    if spec.time_variant:
        parts.append("time-variant noise (sigma/sqrt(t))")
    return "; ".join(parts)


def with_run_params(
    spec: ExperimentSpec,
    master_seed: int,
    agents_per_cell: int,
    n_comparisons: int,
    pool_size: int,
    heldout_size: int,
) -> ExperimentSpec:
    return replace(
        spec,
        master_seed=master_seed,
        agents_per_cell=agents_per_cell,
        n_comparisons=n_comparisons,
        pool_size=pool_size,
        heldout_size=heldout_size,
    )
