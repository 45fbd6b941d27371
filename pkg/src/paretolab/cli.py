"""Command-line entry point: serve the game, simulate agents, analyze, report.

Every command is deterministic given its flags (seeds included). Exit codes:
0 success, 1 input error, 2 runtime/numerical error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import testbed
from .agents import AgentPolicy, PolicyKind, run_agent
from .analysis import (
    analyze_traces,
    pareto_counts,
    read_decision_table,
    run_lengths,
    step3_report,
    write_boxplot_data,
    write_counts_csv,
    write_decision_table,
    write_decision_table_wide,
    write_distance_series,
    write_percentage_histogram,
    write_run_length_histogram,
    write_run_lengths_csv,
    write_table1_csv,
    write_table1_json,
)
from .errors import InputError, NumericalError
from .gp import FitOptions
from .kernels import ALL_KERNELS, KernelKind
from .traces import append_click_records, read_traces, trace_to_records
from .uncertainty import ALL_MEASURES, UQMeasure

DEFAULT_GRID = "30x30"


def _parse_grid(text: str) -> tuple[int, ...]:
    parts = text.lower().replace(",", "x").split("x")
    try:
        counts = tuple(int(p) for p in parts if p)
    except ValueError:
        raise InputError(f"cannot parse grid spec {text!r}; use e.g. 30 or 30x30")
    if not counts:
        raise InputError(f"empty grid spec {text!r}")
    return counts[0] if len(counts) == 1 else counts


def _parse_kernels(text: str) -> list[KernelKind]:
    if text.strip().lower() == "all":
        return list(ALL_KERNELS)
    out = []
    by_name = {k.value.lower(): k for k in ALL_KERNELS}
    for part in text.split(","):
        key = part.strip().lower()
        if key not in by_name:
            raise InputError(f"unknown kernel {part!r}; known: {[k.value for k in ALL_KERNELS]}")
        out.append(by_name[key])
    return out


def _parse_measures(text: str) -> list[UQMeasure]:
    if text.strip().lower() == "all":
        return list(ALL_MEASURES)
    out = []
    by_name = {m.value: m for m in ALL_MEASURES}
    for part in text.split(","):
        key = part.strip().lower()
        if key not in by_name:
            raise InputError(f"unknown measure {part!r}; known: {[m.value for m in ALL_MEASURES]}")
        out.append(by_name[key])
    return out


def _parse_policy(text: str) -> PolicyKind:
    by_name = {k.value.lower(): k for k in PolicyKind}
    key = text.strip().lower()
    if key not in by_name:
        raise InputError(f"unknown policy {text!r}; known: {[k.value for k in PolicyKind]}")
    return by_name[key]


def _parse_problems(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(testbed.PROBLEM_IDS)
    ids = [p.strip() for p in text.split(",") if p.strip()]
    for pid in ids:
        testbed.get_problem(pid)
    if not ids:
        raise InputError("empty problem list")
    return ids


@click.group()
def cli() -> None:
    """Exploration-exploitation decision lab."""


@cli.command()
@click.option("--data-dir", type=click.Path(path_type=Path), default=Path("./game-data"),
              show_default=True, help="Directory for the click and session logs.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--budget", default=20, show_default=True, type=int,
              help="Clicks per problem.")
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None,
              help="Optional static frontend directory to mount at /ui.")
def serve(data_dir: Path, host: str, port: int, budget: int, ui_dir: Path | None) -> None:
    """Run the game session service."""
    from .service import serve as run_service

    run_service(data_dir, host=host, port=port, budget=budget, ui_dir=ui_dir)


@cli.command()
def problems() -> None:
    """Print the problem catalog (ids, domains, published optima) as JSON."""
    click.echo(json.dumps(testbed.problem_catalog(), indent=2))


@cli.command()
@click.option("--policy", default="UniformRandom", show_default=True,
              help="Agent policy: " + ", ".join(k.value for k in PolicyKind))
@click.option("--agents", default=1, show_default=True, type=int,
              help="Number of independent agents.")
@click.option("--problems", "problems_spec", default="all", show_default=True)
@click.option("--budget", default=20, show_default=True, type=int)
@click.option("--n-init", default=3, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--kernel", default="SquaredExponential", show_default=True,
              help="Kernel of the agent's internal GP.")
@click.option("--beta", default=3.0, show_default=True, type=float)
@click.option("--xi", default=0.0, show_default=True, type=float)
@click.option("--grid", default=DEFAULT_GRID, show_default=True,
              help="Lattice used to maximize the acquisition.")
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="Click-log path to write (NDJSON).")
def simulate(policy: str, agents: int, problems_spec: str, budget: int, n_init: int,
             seed: int, kernel: str, beta: float, xi: float, grid: str, out: Path) -> None:
    """Generate synthetic traces and write them in the canonical log format."""
    kind = _parse_policy(policy)
    kernel_kind = _parse_kernels(kernel)[0]
    problem_ids = _parse_problems(problems_spec)
    resolution = _parse_grid(grid)
    if out.exists():
        out.unlink()
    n_records = 0
    for i in range(agents):
        agent_seed = seed + i
        pol = AgentPolicy(kind=kind, beta=beta, xi=xi, kernel=kernel_kind, seed=agent_seed)
        player_id = f"{kind.value}-{i:02d}"
        session_id = f"sim-{kind.value}-{seed}-{i:02d}"
        for pid in problem_ids:
            trace = run_agent(testbed.get_problem(pid), pol, budget=budget,
                              n_init=n_init, seed=agent_seed,
                              grid_resolution=resolution, player_id=player_id)
            records = trace_to_records(trace, session_id=session_id)
            append_click_records(out, records)
            n_records += len(records)
    click.echo(f"wrote {n_records} click records "
               f"({agents} agents x {len(problem_ids)} problems) to {out}")


@cli.command()
@click.option("--in", "in_path", type=click.Path(path_type=Path, exists=False), required=True,
              help="Click-log path to analyze.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True,
              help="Output directory for decision tables.")
@click.option("--grid", default=DEFAULT_GRID, show_default=True)
@click.option("--threshold", default=1e-4, show_default=True, type=float)
@click.option("--normalize/--no-normalize", default=True, show_default=True,
              help="Min-max scale objectives before the frontier distance.")
@click.option("--kernels", default="all", show_default=True)
@click.option("--measures", default="all", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int, help="Fit seed.")
@click.option("--workers", default=1, show_default=True, type=int)
def analyze(in_path: Path, out_dir: Path, grid: str, threshold: float, normalize: bool,
            kernels: str, measures: str, seed: int, workers: int) -> None:
    """Build the decision table from a click log."""
    if not in_path.exists():
        raise InputError(f"input log {in_path} does not exist")
    traces = read_traces(in_path)
    traces = [t for t in traces if len(t) >= 4]
    if not traces:
        raise InputError(f"no analyzable traces (>= 4 steps) in {in_path}")
    rows = analyze_traces(
        traces, workers=workers,
        kernels=_parse_kernels(kernels), measures=_parse_measures(measures),
        grid_resolution=_parse_grid(grid), threshold=threshold, normalize=normalize,
        fit_options=FitOptions(seed=seed),
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    write_decision_table(rows, out_dir / "decision_table.csv")
    write_decision_table_wide(rows, out_dir / "decision_table_wide.csv")
    click.echo(f"wrote {len(rows)} rows for {len(traces)} traces to {out_dir}")


@cli.command()
@click.option("--table", type=click.Path(path_type=Path), required=True,
              help="decision_table.csv from the analyze command.")
@click.option("--in", "traces_path", type=click.Path(path_type=Path), required=True,
              help="The click log the table was built from (for ACR).")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--threshold", default=1e-4, show_default=True, type=float)
@click.option("--measures", default="all", show_default=True)
def report(table: Path, traces_path: Path, out_dir: Path, threshold: float,
           measures: str) -> None:
    """Counts, run lengths, ACR comparison and figure-ready data files."""
    if not table.exists():
        raise InputError(f"decision table {table} does not exist")
    if not traces_path.exists():
        raise InputError(f"click log {traces_path} does not exist")
    rows = read_decision_table(table)
    if not rows:
        raise InputError(f"decision table {table} is empty")
    traces = read_traces(traces_path)
    selected = _parse_measures(measures)
    out_dir.mkdir(parents=True, exist_ok=True)

    counts = pareto_counts(rows, threshold)
    write_counts_csv(counts.by_player, out_dir / "counts_by_player.csv", "user_id")
    write_counts_csv(counts.by_problem, out_dir / "counts_by_problem.csv", "problem_id")
    write_percentage_histogram(counts.by_player, out_dir / "pct_histogram_by_player.csv")
    write_percentage_histogram(counts.by_problem, out_dir / "pct_histogram_by_problem.csv")

    runs = run_lengths(rows, threshold)
    write_run_lengths_csv(runs.by_player, out_dir / "run_lengths_by_player.csv",
                          ("user_id", "uncertainty_measure"))
    write_run_lengths_csv(runs.by_problem, out_dir / "run_lengths_by_problem.csv",
                          ("problem_id", "uncertainty_measure"))
    write_run_length_histogram(runs.by_player, out_dir / "run_length_histogram.csv")

    write_distance_series(rows, out_dir / "distance_series.csv")

    for measure in selected:
        rep = step3_report(rows, traces, measure, threshold)
        write_table1_csv(rep, out_dir / f"table1_{measure.value}.csv")
        write_table1_json(rep, out_dir / f"table1_{measure.value}.json")
        write_boxplot_data(rows, traces, measure, out_dir / f"boxplot_{measure.value}.csv",
                           threshold)
    click.echo(f"wrote reports to {out_dir}")


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(2)
    except (NumericalError, Exception) as exc:  # noqa: BLE001 - exit-code boundary
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
