"""Command line tools: generate tasks, solve, evaluate, run, serve."""

from __future__ import annotations

import json

import click

from .engine import Plan
from .harness import ExperimentConfig, load_result_rows, run_experiment
from .metrics import score_result_rows
from .recipes import CATEGORIES
from .sched import PROFILES, AbstractInstance, generate_instance, solve
from .service import create_app
from .solver import golden_plan
from .taskgen import TaskBundle, assemble_bundle, run_bundle_plan


def _dump(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


@click.group()
def main():
    """Kitchen-grid benchmark: task generation, execution, and scoring."""


@main.command()
@click.option("--category", required=True, type=click.Choice(sorted(CATEGORIES)))
@click.option("--dishes", required=True, type=int)
@click.option("--agents", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def gen(category, dishes, agents, seed, out):
    """Generate one task bundle (map, orders, constants, budgets)."""
    bundle = assemble_bundle(category, dishes, agents, seed)
    _dump(out, bundle.to_json())
    click.echo(
        f"{bundle.bundle_id}: {bundle.n_dishes} dish(es), {bundle.n_agents} agent(s), "
        f"t_max={bundle.t_max} d_max={bundle.d_max} -> {out}"
    )


@main.command()
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def golden(bundle_path, out):
    """Write the scripted reference plan for a bundle."""
    with open(bundle_path, encoding="utf-8") as fh:
        bundle = TaskBundle.from_json(json.load(fh))
    plan = golden_plan(bundle.grid, bundle.orders, constants=bundle.constants)
    _dump(out, plan.to_json())
    click.echo(f"golden plan for {bundle.bundle_id} -> {out}")


@main.command(name="exec")
@click.option("--bundle", "bundle_path", required=True, type=click.Path(exists=True))
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def exec_plan(bundle_path, plan_path, out):
    """Execute a plan file against a bundle and write the run record."""
    with open(bundle_path, encoding="utf-8") as fh:
        bundle = TaskBundle.from_json(json.load(fh))
    with open(plan_path, encoding="utf-8") as fh:
        plan = Plan.from_json(json.load(fh))
    record = run_bundle_plan(bundle, plan)
    _dump(out, record.to_json())
    if record.success:
        click.echo(f"success, oct={record.oct} -> {out}")
    else:
        click.echo(f"failure ({record.failure_reason}) -> {out}")


@main.command()
@click.option("--runs", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def eval(runs, out):
    """Score a results JSONL file into grouped aggregate metrics."""
    rows = load_result_rows(runs)
    scores = score_result_rows(rows)
    _dump(out, scores)
    click.echo(f"{len(rows)} rows -> {len(scores)} group(s) -> {out}")
    for label in sorted(scores):
        group = scores[label]
        noct = "-" if group["noct"] is None else f"{group['noct']:.4f}"
        click.echo(
            f"  {label}: sr={group['sr']:.2f} poct={group['poct']:.1f} "
            f"noct={noct} n={group['n_total']}"
        )


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--budget", type=float, default=None, help="Solver budget in seconds.")
def oracle(in_path, out, budget):
    """Solve a scheduling instance for its minimum makespan."""
    with open(in_path, encoding="utf-8") as fh:
        inst = AbstractInstance.from_json(json.load(fh))
    result = solve(inst, budget=budget)
    _dump(out, result.to_json())
    tag = "optimal" if result.optimal else "best-known (budget hit)"
    click.echo(f"makespan={result.makespan} ({tag}) -> {out}")


@main.command(name="sched-gen")
@click.option("--profile", default="standard", type=click.Choice(sorted(PROFILES)))
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def sched_gen(profile, seed, out):
    """Generate one abstract scheduling instance."""
    inst = generate_instance(PROFILES[profile], seed)
    _dump(out, inst.to_json())
    click.echo(
        f"{profile}/s{seed}: {len(inst.tasks)} tasks, {len(inst.edges)} edges, "
        f"{inst.agents} agent(s) -> {out}"
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def run(config_path):
    """Run the experiment described by a TOML config against an endpoint."""
    config = ExperimentConfig.from_toml(config_path)
    out = run_experiment(config)
    rows = load_result_rows(out)
    click.echo(f"{len(rows)} row(s) in {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--results", default="human_results.jsonl", show_default=True,
              type=click.Path(dir_okay=False, writable=True),
              help="JSONL file finalized sessions are appended to.")
@click.option("--static", "static_dir", default=None, type=click.Path(file_okay=False),
              help="Directory of built UI assets to serve at /.")
def serve(host, port, results, static_dir):
    """Start the interactive session service."""
    import uvicorn

    app = create_app(results_path=results, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
