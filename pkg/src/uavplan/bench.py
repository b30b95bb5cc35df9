"""Randomized deployment campaigns comparing hitting-set solvers.

Each (K, trial) pair owns an RNG stream derived from (seed, K, trial), so
trial order or parallel execution can never change the drawn scenarios and
campaign CSVs are byte-identical across runs with the same seed.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PlanningError
from .scenario import ScenarioConfig, random_users
from .solvers import (SOLVERS, build_incidence, build_region_set, make_grid,
                      run_solver)


@dataclass
class TrialRecord:
    k: int
    trial: int
    solver: str
    uav_count: int
    runtime_s: float
    valid: bool
    error: str = ""


@dataclass
class CampaignResult:
    records: list[TrialRecord] = field(default_factory=list)

    def mean_counts(self) -> dict[tuple[int, str], float]:
        """Mean UAV count per (K, solver) over successful trials."""
        sums: dict[tuple[int, str], list[int]] = {}
        for r in self.records:
            if not r.error:
                sums.setdefault((r.k, r.solver), []).append(r.uav_count)
        return {key: float(np.mean(v)) for key, v in sums.items()}


def run_bench(template: ScenarioConfig, k_values: Sequence[int], trials: int,
              solvers: Sequence[str] = SOLVERS, restarts: int = 10,
              time_budget: float = 60.0, verify: bool = False,
              ) -> CampaignResult:
    """Run all solvers over fresh random scenarios for each K and trial.

    Per-trial failures are recorded and the campaign continues.
    """
    unknown = set(solvers) - set(SOLVERS)
    if unknown:
        raise ValueError(f"unknown solvers: {sorted(unknown)}")
    result = CampaignResult()
    for k in k_values:
        for trial in range(trials):
            rng = np.random.default_rng(
                np.random.SeedSequence([template.seed, k, trial]))
            cfg = template.with_ues(random_users(rng, k, template.area))
            try:
                region_set = build_region_set(cfg)
                grid = make_grid(cfg)
                inc = build_incidence(grid, region_set, keep_all_points=True)
            except PlanningError as exc:
                for name in solvers:
                    result.records.append(TrialRecord(
                        k, trial, name, 0, 0.0, False, error=str(exc)))
                continue
            for name in solvers:
                try:
                    t0 = time.perf_counter()
                    plan = run_solver(name, inc, grid, cfg, restarts=restarts,
                                      seed=template.seed,
                                      time_budget=time_budget)
                    runtime = time.perf_counter() - t0
                    valid = True
                    if verify:
                        from .solvers import verify_plan
                        valid = bool(verify_plan(plan, cfg, region_set).valid)
                    result.records.append(TrialRecord(
                        k, trial, name, plan.count, runtime, valid))
                except PlanningError as exc:
                    result.records.append(TrialRecord(
                        k, trial, name, 0, 0.0, False, error=str(exc)))
    return result


def write_campaign_csv(result: CampaignResult, path,
                       include_timing: bool = False) -> None:
    """Per-trial rows; deterministic ordering and fixed formatting.

    Runtime is opt-in so default campaign CSVs are byte-identical across
    runs with the same seed.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["k", "trial", "solver", "uav_count", "valid", "error"]
        if include_timing:
            header.insert(4, "runtime_ms")
        w.writerow(header)
        for r in sorted(result.records, key=lambda r: (r.k, r.trial, r.solver)):
            row = [r.k, r.trial, r.solver, r.uav_count, int(r.valid), r.error]
            if include_timing:
                row.insert(4, f"{r.runtime_s * 1e3:.3f}")
            w.writerow(row)


def write_summary_csv(result: CampaignResult, path) -> None:
    """Mean UAV count per (K, solver)."""
    means = result.mean_counts()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "solver", "mean_uav_count", "trials"])
        counts: dict[tuple[int, str], int] = {}
        for r in result.records:
            if not r.error:
                counts[(r.k, r.solver)] = counts.get((r.k, r.solver), 0) + 1
        for (k, solver) in sorted(means):
            w.writerow([k, solver, f"{means[(k, solver)]:.4f}",
                        counts[(k, solver)]])
