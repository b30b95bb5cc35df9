"""Command-line interface: heatmap sweeps, region dumps, deployment,
benchmark campaigns and plan validation.

Exit codes: 0 success/valid, 2 infeasible scenario, 3 invalid plan,
1 internal error.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import bench as bench_mod
from . import heatmap as heatmap_mod
from .errors import ConfigError, PlanningError, ScenarioInfeasibleError
from .geometry import Point3
from .regions import CommRegion
from .scenario import (DEFAULT_AREA, ScenarioConfig, deployment_preset,
                       load_scenario, motivating_preset, random_users)
from .solvers import (SOLVERS, DeploymentPlan, build_incidence,
                      build_region_set, make_grid, run_solver, verify_plan)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3


def _load_config(config, preset, users, seed) -> ScenarioConfig:
    if config is not None:
        cfg = load_scenario(config)
        return replace(cfg, seed=seed) if seed is not None else cfg
    seed = 0 if seed is None else seed
    if preset == "motivating" and users is None:
        return motivating_preset(seed=seed)
    rng = np.random.default_rng(seed)
    ues = random_users(rng, users or 10, DEFAULT_AREA)
    if preset == "deployment":
        return deployment_preset(ues, seed=seed)
    return motivating_preset(ues, seed=seed)


def _apply_overrides(cfg, grid_spacing, altitude):
    if grid_spacing is not None:
        cfg = replace(cfg, grid_spacing=grid_spacing)
    if altitude is not None:
        cfg = replace(cfg, h_f=altitude)
    return cfg


def _write_regions_csv(region_set, path) -> None:
    """One row per region: type, ue_index and geometric parameters."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["type", "ue_index", "cx", "cy", "radius_or_semi_major",
                    "semi_minor", "rotation_rad", "epsilon"])
        for region in region_set.regions:
            if isinstance(region, CommRegion):
                w.writerow(["disk", region.ue_index,
                            f"{region.center[0]:.6f}",
                            f"{region.center[1]:.6f}",
                            f"{region.radius:.6f}", "", "", ""])
            else:
                e = region.ellipse
                w.writerow(["ellipse", region.ue_index,
                            f"{e.center[0]:.6f}", f"{e.center[1]:.6f}",
                            f"{e.semi_major:.6f}", f"{e.semi_minor:.6f}",
                            f"{e.rotation:.6f}", f"{region.epsilon:.10g}"])


def _config_options(f):
    f = click.option("--config", "-c", type=click.Path(exists=True),
                     default=None, help="Scenario YAML file.")(f)
    f = click.option("--preset", type=click.Choice(["deployment", "motivating"]),
                     default="deployment", show_default=True,
                     help="Built-in scenario used when no config is given.")(f)
    f = click.option("--users", "-k", type=int, default=None,
                     help="Random user count for preset scenarios.")(f)
    f = click.option("--seed", type=int, default=None, help="RNG seed.")(f)
    f = click.option("--out", "-o", type=click.Path(), default=".",
                     show_default=True, help="Output directory.")(f)
    f = click.option("--plot", is_flag=True,
                     help="Also render matplotlib figures next to the data.")(f)
    return f


@click.group()
def main():
    """UAV deployment planning: feasible regions and minimum hitting sets."""


def _run(cmd, *args, **kwargs) -> int:
    try:
        return cmd(*args, **kwargs)
    except ScenarioInfeasibleError as exc:
        for d in exc.diagnostics:
            click.echo(f"infeasible: {d}", err=True)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_INTERNAL
    except PlanningError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INTERNAL


@main.command()
@_config_options
@click.option("--box-width", type=float, default=10.0, show_default=True)
@click.option("--candidate-spacing", type=float, default=20.0,
              show_default=True)
def heatmap(config, preset, users, seed, out, plot, box_width,
            candidate_spacing):
    """Optimized-fourth-anchor variance sweep over the area."""
    def cmd():
        cfg = _load_config(config, "motivating" if config is None else preset,
                           users, seed)
        result = heatmap_mod.run_heatmap(cfg, box_width=box_width,
                                         candidate_spacing=candidate_spacing)
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        heatmap_mod.write_heatmap_csv(result, outdir / "heatmap.csv")
        click.echo(f"wrote {outdir / 'heatmap.csv'}")
        for mode in sorted(result.horiz):
            h0, h1, v0, v1 = result.ranges(mode)
            click.echo(f"{mode}: horiz [{h0:.3f}, {h1:.3f}] "
                       f"vert [{v0:.3f}, {v1:.3f}]")
        if plot:
            from .plots import plot_heatmap
            plot_heatmap(result, outdir / "heatmap.png")
            click.echo(f"wrote {outdir / 'heatmap.png'}")
        return EXIT_OK
    sys.exit(_run(cmd))


@main.command()
@_config_options
@click.option("--altitude", type=float, default=None,
              help="Override flight altitude h_f.")
def regions(config, preset, users, seed, out, plot, altitude):
    """Dump per-user feasible disks and ellipses."""
    def cmd():
        cfg = _apply_overrides(_load_config(config, preset, users, seed),
                               None, altitude)
        region_set = build_region_set(cfg)
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_regions_csv(region_set, outdir / "regions.csv")
        click.echo(f"wrote {outdir / 'regions.csv'} "
                   f"({len(region_set.regions)} regions, "
                   f"{len(region_set.served_by_bs)} users BS-served)")
        if plot:
            from .plots import plot_regions
            plot_regions(cfg, region_set.regions, outdir / "regions.png")
            click.echo(f"wrote {outdir / 'regions.png'}")
        return EXIT_OK
    sys.exit(_run(cmd))


@main.command()
@_config_options
@click.option("--solver", type=click.Choice(SOLVERS), default="df",
              show_default=True)
@click.option("--grid-spacing", type=float, default=None)
@click.option("--altitude", type=float, default=None)
@click.option("--restarts", type=int, default=10, show_default=True)
@click.option("--time-budget", type=float, default=60.0, show_default=True)
def deploy(config, preset, users, seed, out, plot, solver, grid_spacing,
           altitude, restarts, time_budget):
    """Plan a minimum UAV deployment and verify it."""
    def cmd():
        cfg = _apply_overrides(_load_config(config, preset, users, seed),
                               grid_spacing, altitude)
        region_set = build_region_set(cfg)
        grid = make_grid(cfg)
        inc = build_incidence(grid, region_set, keep_all_points=True)
        plan = run_solver(solver, inc, grid, cfg, restarts=restarts,
                          seed=cfg.seed, time_budget=time_budget)
        verify_plan(plan, cfg, region_set)
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_regions_csv(region_set, outdir / "regions.csv")
        (outdir / "plan.json").write_text(plan.to_json() + "\n")
        with open(outdir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["solver", "k", "uav_count", "valid"])
            w.writerow([plan.solver, len(cfg.ues), plan.count,
                        int(bool(plan.valid))])
        click.echo(f"{solver}: {plan.count} UAVs, valid={plan.valid} "
                   f"({plan.runtime_s:.2f} s)")
        click.echo(f"wrote {outdir / 'plan.json'}")
        if plot:
            from .plots import plot_regions
            plot_regions(cfg, region_set.regions, outdir / "plan.png",
                         plan=plan)
            click.echo(f"wrote {outdir / 'plan.png'}")
        return EXIT_OK if plan.valid else EXIT_INVALID
    sys.exit(_run(cmd))


@main.command()
@_config_options
@click.option("--k-values", default="10,20,30,40", show_default=True,
              help="Comma-separated user counts.")
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--solvers", default=",".join(SOLVERS), show_default=True)
@click.option("--restarts", type=int, default=10, show_default=True)
@click.option("--time-budget", type=float, default=60.0, show_default=True)
def bench(config, preset, users, seed, out, plot, k_values, trials, solvers,
          restarts, time_budget):
    """Randomized campaign comparing solvers over K users."""
    def cmd():
        template = _load_config(config, preset, users or 1, seed)
        ks = [int(v) for v in k_values.split(",") if v]
        names = [s.strip() for s in solvers.split(",") if s.strip()]
        result = bench_mod.run_bench(template, ks, trials, names,
                                     restarts=restarts,
                                     time_budget=time_budget)
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        bench_mod.write_campaign_csv(result, outdir / "campaign.csv")
        bench_mod.write_summary_csv(result, outdir / "summary.csv")
        click.echo(f"wrote {outdir / 'campaign.csv'}")
        for (k, name), mean in sorted(result.mean_counts().items()):
            click.echo(f"K={k} {name}: mean {mean:.2f} UAVs")
        if plot:
            from .plots import plot_bench
            plot_bench(result, outdir / "bench.png")
            click.echo(f"wrote {outdir / 'bench.png'}")
        return EXIT_OK
    sys.exit(_run(cmd))


@main.command()
@click.argument("plan_file", type=click.Path(exists=True))
@click.option("--config", "-c", type=click.Path(exists=True), required=True)
def validate(plan_file, config):
    """Check a plan file against a scenario's exact requirements."""
    def cmd():
        cfg = load_scenario(config)
        try:
            data = json.loads(Path(plan_file).read_text())
            positions = [Point3(*map(float, p)) for p in data["positions"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad plan file {plan_file}: {exc}") from exc
        plan = DeploymentPlan(positions=positions,
                              solver=str(data.get("solver", "unknown")))
        verify_plan(plan, cfg)
        for rep in plan.per_ue:
            status = ("ok" if rep["localization_ok"] and rep["rate_ok"]
                      else "FAIL")
            click.echo(
                f"ue {rep['ue_index']}: {status} "
                f"opt_d {rep['achieved_opt_d']:.4g} >= {rep['epsilon']:.4g}: "
                f"{rep['localization_ok']}; "
                f"rate {rep['achieved_rate']:.4g} >= "
                f"{rep['rate_threshold']:.4g}: {rep['rate_ok']}")
        click.echo(f"plan valid: {plan.valid}")
        return EXIT_OK if plan.valid else EXIT_INVALID
    sys.exit(_run(cmd))


if __name__ == "__main__":
    main()
