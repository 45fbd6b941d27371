"""The three-step decision-trace analysis pipeline.

Step 1 builds the decision table: for every analyzable decision of every
trace (prefix length n = 3 onward), one GP per kernel is refitted on the
prefix, the decision is mapped to its per-kernel (improvement, uncertainty)
pairs, and its minimum frontier distance across kernels is stored, once per
uncertainty measure. Step 2 derives Pareto-rational counts and run lengths;
step 3 relates rationality to average cumulative reward (ACR) and compares
the two classes per problem with a Mann-Whitney U test.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from . import testbed
from .domain import Box
from .errors import InputError, NumericalError
from .gp import FitOptions, Dataset, GPPosterior, fit_gp
from .kernels import ALL_KERNELS, KernelKind, cross_covariance
from .pareto import DEFAULT_THRESHOLD, ObjectivePair, build_grid, frontier_distance
from .stats import MWUResult, mann_whitney_u
from .traces import Trace
from .uncertainty import ALL_MEASURES, Incumbent, UQMeasure, uq_distance

log = logging.getLogger(__name__)

N_INIT = 3  # decisions before the first analyzable step; a 2-D GP needs 3 points

DECISION_TABLE_COLUMNS = (
    "user_id", "problem_id", "step", "uncertainty_measure", "min_dist_from_Pareto_frontier",
)

TABLE1_COLUMNS = (
    "test function",
    "ACR Pareto mean (sd)",
    "ACR not-Pareto mean (sd)",
    "U Mann-Whitney test p-value",
)


@dataclass(frozen=True)
class DecisionTableRow:
    user_id: str
    problem_id: str
    step: int                                   # the decision index n+1 (1-based)
    uncertainty_measure: str                    # UQMeasure value
    min_dist_from_pareto_frontier: float
    kernel_distances: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class ACRRecord:
    user_id: str
    problem_id: str
    step: int
    acr: float


@dataclass(frozen=True)
class CountStats:
    rational: int
    total: int

    @property
    def percentage(self) -> float:
        return 100.0 * self.rational / self.total if self.total else 0.0


@dataclass(frozen=True)
class ParetoCounts:
    by_player: dict
    by_problem: dict


@dataclass(frozen=True)
class RunLengths:
    by_sequence: dict
    by_player: dict
    by_problem: dict


@dataclass(frozen=True)
class Step3Row:
    problem_id: str
    pareto_n: int
    pareto_mean: float | None
    pareto_sd: float | None
    not_pareto_n: int
    not_pareto_mean: float | None
    not_pareto_sd: float | None
    p_value: float | None
    method: str | None


def _posterior_bundle(gp: GPPosterior, points: np.ndarray):
    """Posterior mean, standard deviation and entropy term for a batch.

    Shares one triangular solve across the three quantities; identical in
    value to posterior_mean / posterior_var / uq_entropy.
    """
    s2 = gp.kernel.amplitude
    kx = cross_covariance(gp.kernel, points, gp.data.X)
    v = solve_triangular(gp.chol, kx.T, lower=True, check_finite=False)
    colsq = np.einsum("ij,ij->j", v, v)
    mu = gp.y_mean + gp.y_std * (kx @ gp.alpha)
    var = np.clip(s2 - colsq, 0.0, s2) * gp.y_std**2
    base = float(np.sum(np.log(np.diag(gp.chol))))
    schur = np.maximum(s2 + gp.noise + gp.jitter - colsq, 1e-300)
    h = base + 0.5 * np.log(schur)
    return mu, np.sqrt(var), h


def _resolve_domain(trace: Trace, domain: Box | None) -> Box:
    if domain is not None:
        return domain
    try:
        return testbed.get_problem(trace.problem_id).domain
    except InputError:
        raise InputError(
            f"trace problem {trace.problem_id!r} is not a known test problem; "
            "pass an explicit domain"
        ) from None


def analyze_trace(trace: Trace, kernels: Sequence[KernelKind] = ALL_KERNELS,
                  measures: Sequence[UQMeasure] = ALL_MEASURES,
                  grid_resolution=30, threshold: float = DEFAULT_THRESHOLD,
                  normalize: bool = True, fit_options: FitOptions | None = None,
                  domain: Box | None = None) -> list[DecisionTableRow]:
    """Decision-table rows for one trace: (len(trace) - 3) * len(measures).

    Steps whose GP fits fail are logged and excluded rather than aborting
    the trace.
    """
    if len(trace) < N_INIT + 1:
        raise InputError(f"trace needs at least {N_INIT + 1} steps, got {len(trace)}")
    if not kernels or not measures:
        raise InputError("need at least one kernel and one measure")
    fit_options = fit_options or FitOptions()
    box = _resolve_domain(trace, domain)
    grid = build_grid(box, grid_resolution)
    X_all, y_all = trace.X, trace.y
    measures = [m for m in ALL_MEASURES if m in set(measures)]  # canonical order

    rows: list[DecisionTableRow] = []
    for n in range(N_INIT, len(trace)):
        X_prefix = X_all[:n]
        y_prefix = y_all[:n]
        x_next = X_all[n]
        incumbent = Incumbent.from_outcomes(y_prefix)
        data = Dataset(X_prefix, y_prefix, box)

        need_z = UQMeasure.DISTANCE in measures
        if need_z:
            z_grid = uq_distance(X_prefix, grid)
            z_next = float(uq_distance(X_prefix, x_next))

        try:
            per_kernel: dict[KernelKind, dict[UQMeasure, float]] = {}
            for kind in kernels:
                gp = fit_gp(data, kind, fit_options)
                batch = np.vstack([grid, x_next[None, :]])
                mu, sigma, h = _posterior_bundle(gp, batch)
                zeta = mu - incumbent.y_best
                zeta_g, zeta_n = zeta[:-1], float(zeta[-1])
                dists: dict[UQMeasure, float] = {}
                for measure in measures:
                    if measure is UQMeasure.SIGMA:
                        u_g, u_n = sigma[:-1], float(sigma[-1])
                    elif measure is UQMeasure.ENTROPY:
                        u_g, u_n = h[:-1], float(h[-1])
                    else:
                        u_g, u_n = z_grid, z_next
                    pair = ObjectivePair(zeta=zeta_n, u=u_n, x=tuple(x_next))
                    verdict = frontier_distance(pair, np.column_stack([zeta_g, u_g]),
                                                normalize=normalize, threshold=threshold)
                    dists[measure] = verdict.distance
                per_kernel[kind] = dists
        except (NumericalError, InputError) as exc:
            log.warning("trace %s/%s step %d excluded: %s",
                        trace.player_id, trace.problem_id, n + 1, exc)
            continue

        for measure in measures:
            kd = tuple((kind.value, per_kernel[kind][measure]) for kind in kernels)
            rows.append(DecisionTableRow(
                user_id=trace.player_id,
                problem_id=trace.problem_id,
                step=n + 1,
                uncertainty_measure=measure.value,
                min_dist_from_pareto_frontier=min(d for _, d in kd),
                kernel_distances=kd,
            ))
    return rows


def analyze_traces(traces: Iterable[Trace], workers: int = 1, **kwargs) -> list[DecisionTableRow]:
    """Analyze many traces, optionally in parallel, preserving input order."""
    traces = list(traces)
    if workers <= 1 or len(traces) <= 1:
        out: list[DecisionTableRow] = []
        for trace in traces:
            out.extend(analyze_trace(trace, **kwargs))
        return out
    from concurrent.futures import ProcessPoolExecutor
    from functools import partial

    fn = partial(analyze_trace, **kwargs)
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for rows in pool.map(fn, traces, chunksize=1):
            out.extend(rows)
    return out


def pareto_counts(rows: Sequence[DecisionTableRow],
                  threshold: float = DEFAULT_THRESHOLD) -> ParetoCounts:
    """Rational-decision counts grouped by (player, measure) and (problem, measure)."""
    if not rows:
        raise InputError("no rows to aggregate")
    by_player: dict[tuple[str, str], list[int]] = {}
    by_problem: dict[tuple[str, str], list[int]] = {}
    for row in rows:
        rational = int(row.min_dist_from_pareto_frontier < threshold)
        by_player.setdefault((row.user_id, row.uncertainty_measure), []).append(rational)
        by_problem.setdefault((row.problem_id, row.uncertainty_measure), []).append(rational)
    return ParetoCounts(
        by_player={k: CountStats(sum(v), len(v)) for k, v in sorted(by_player.items())},
        by_problem={k: CountStats(sum(v), len(v)) for k, v in sorted(by_problem.items())},
    )


def run_lengths(rows: Sequence[DecisionTableRow],
                threshold: float = DEFAULT_THRESHOLD) -> RunLengths:
    """Lengths of maximal runs of consecutive Pareto-rational decisions.

    A run breaks at a non-rational decision, at a problem boundary, and at a
    gap in the step sequence (an excluded row).
    """
    groups: dict[tuple[str, str, str], list[tuple[int, bool]]] = {}
    for row in rows:
        key = (row.user_id, row.problem_id, row.uncertainty_measure)
        groups.setdefault(key, []).append(
            (row.step, row.min_dist_from_pareto_frontier < threshold))

    by_sequence: dict[tuple[str, str, str], list[int]] = {}
    for key, entries in sorted(groups.items()):
        entries.sort(key=lambda e: e[0])
        lengths: list[int] = []
        run = 0
        prev_step = None
        for step, rational in entries:
            gap = prev_step is not None and step != prev_step + 1
            if rational:
                if run and not gap:
                    run += 1
                else:
                    if run:
                        lengths.append(run)
                    run = 1
            else:
                if run:
                    lengths.append(run)
                run = 0
            prev_step = step
        if run:
            lengths.append(run)
        by_sequence[key] = lengths

    by_player: dict[tuple[str, str], list[int]] = {}
    by_problem: dict[tuple[str, str], list[int]] = {}
    for (user, problem, measure), lengths in by_sequence.items():
        by_player.setdefault((user, measure), []).extend(lengths)
        by_problem.setdefault((problem, measure), []).extend(lengths)
    return RunLengths(by_sequence=by_sequence, by_player=by_player, by_problem=by_problem)


def acr(trace: Trace, step: int) -> ACRRecord:
    """Average cumulative reward before decision ``step``: mean of the first step-1 outcomes."""
    n = step - 1
    if not (1 <= n < len(trace)):
        raise InputError(f"step must be in [2, {len(trace)}], got {step}")
    value = float(np.mean(trace.y[:n]))
    return ACRRecord(user_id=trace.player_id, problem_id=trace.problem_id,
                     step=step, acr=value)


def _mean_sd(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if len(values) >= 2 else None
    return mean, sd


def step3_report(rows: Sequence[DecisionTableRow], traces: Sequence[Trace],
                 measure: UQMeasure, threshold: float = DEFAULT_THRESHOLD) -> list[Step3Row]:
    """Per-problem ACR comparison between rational and non-rational decisions."""
    trace_index: dict[tuple[str, str], Trace] = {
        (t.player_id, t.problem_id): t for t in traces}
    acrs: dict[str, dict[bool, list[float]]] = {}
    problems_seen: list[str] = []
    for row in rows:
        if row.uncertainty_measure != measure.value:
            continue
        trace = trace_index.get((row.user_id, row.problem_id))
        if trace is None:
            log.warning("no trace for row (%s, %s); skipped", row.user_id, row.problem_id)
            continue
        record = acr(trace, row.step)
        rational = row.min_dist_from_pareto_frontier < threshold
        if row.problem_id not in acrs:
            acrs[row.problem_id] = {True: [], False: []}
            problems_seen.append(row.problem_id)
        acrs[row.problem_id][rational].append(record.acr)

    catalog_order = {pid: i for i, pid in enumerate(testbed.PROBLEM_IDS)}
    problems_seen.sort(key=lambda p: (catalog_order.get(p, len(catalog_order)), p))

    out: list[Step3Row] = []
    for pid in problems_seen:
        pareto_vals = acrs[pid][True]
        other_vals = acrs[pid][False]
        p_mean, p_sd = _mean_sd(pareto_vals)
        o_mean, o_sd = _mean_sd(other_vals)
        if pareto_vals and other_vals:
            res: MWUResult = mann_whitney_u(pareto_vals, other_vals)
            p_value, method = res.p_value, res.method
        else:
            p_value, method = None, None
        out.append(Step3Row(problem_id=pid, pareto_n=len(pareto_vals),
                            pareto_mean=p_mean, pareto_sd=p_sd,
                            not_pareto_n=len(other_vals), not_pareto_mean=o_mean,
                            not_pareto_sd=o_sd, p_value=p_value, method=method))
    return out


# ---------------------------------------------------------------------------
# formatting and file IO


def format_mean_sd(mean: float | None, sd: float | None) -> str:
    """Render a Table-1 cell, e.g. 157.231 (100.050)."""
    if mean is None:
        return ""
    if sd is None:
        return f"{mean:.3f} (NA)"
    return f"{mean:.3f} ({sd:.3f})"


_MEAN_SD_RE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*\(\s*(-?\d+(?:\.\d+)?|NA)\s*\)\s*$")


def parse_mean_sd(text: str) -> tuple[float, float | None]:
    m = _MEAN_SD_RE.match(text)
    if not m:
        raise InputError(f"cannot parse mean (sd) cell: {text!r}")
    sd = None if m.group(2) == "NA" else float(m.group(2))
    return float(m.group(1)), sd


def write_decision_table(rows: Sequence[DecisionTableRow], path: Path | str) -> None:
    """The step-1 table with exactly the canonical five columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(DECISION_TABLE_COLUMNS)
        for row in rows:
            writer.writerow([row.user_id, row.problem_id, row.step,
                             row.uncertainty_measure,
                             repr(row.min_dist_from_pareto_frontier)])


def write_decision_table_wide(rows: Sequence[DecisionTableRow], path: Path | str) -> None:
    """Wide variant with one distance column per kernel."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kernel_names = [kind.value for kind in ALL_KERNELS]
    if rows:
        kernel_names = [name for name, _ in rows[0].kernel_distances]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(DECISION_TABLE_COLUMNS[:4])
                        + [f"dist_{k}" for k in kernel_names]
                        + [DECISION_TABLE_COLUMNS[4]])
        for row in rows:
            dists = dict(row.kernel_distances)
            writer.writerow([row.user_id, row.problem_id, row.step, row.uncertainty_measure]
                            + [repr(dists[k]) for k in kernel_names]
                            + [repr(row.min_dist_from_pareto_frontier)])


def read_decision_table(path: Path | str) -> list[DecisionTableRow]:
    path = Path(path)
    rows: list[DecisionTableRow] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != DECISION_TABLE_COLUMNS:
            raise InputError(f"unexpected decision-table header {header}")
        for rec in reader:
            rows.append(DecisionTableRow(
                user_id=rec[0], problem_id=rec[1], step=int(rec[2]),
                uncertainty_measure=rec[3],
                min_dist_from_pareto_frontier=float(rec[4]),
            ))
    return rows


def write_table1_csv(report: Sequence[Step3Row], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TABLE1_COLUMNS)
        for row in report:
            p_cell = "NA" if row.p_value is None else f"{row.p_value:.6g}"
            writer.writerow([
                row.problem_id,
                format_mean_sd(row.pareto_mean, row.pareto_sd),
                format_mean_sd(row.not_pareto_mean, row.not_pareto_sd),
                p_cell,
            ])


def write_table1_json(report: Sequence[Step3Row], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [
        {
            "test function": row.problem_id,
            "ACR Pareto mean (sd)": format_mean_sd(row.pareto_mean, row.pareto_sd),
            "ACR not-Pareto mean (sd)": format_mean_sd(row.not_pareto_mean, row.not_pareto_sd),
            "U Mann-Whitney test p-value": row.p_value,
            "n Pareto": row.pareto_n,
            "n not-Pareto": row.not_pareto_n,
            "method": row.method,
        }
        for row in report
    ]
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_counts_csv(groups: dict, path: Path | str, key_name: str) -> None:
    """Rational counts per (player-or-problem, measure)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([key_name, "uncertainty_measure", "rational", "total", "percentage"])
        for (key, measure), stats in groups.items():
            writer.writerow([key, measure, stats.rational, stats.total,
                             f"{stats.percentage:.4f}"])


def write_percentage_histogram(groups: dict, path: Path | str, n_bins: int = 10) -> None:
    """Counts of group members per rational-percentage bucket, per measure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    edges = np.linspace(0.0, 100.0, n_bins + 1)
    measures = sorted({measure for _, measure in groups})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["uncertainty_measure", "bucket_low", "bucket_high", "count"])
        for measure in measures:
            pcts = [stats.percentage for (key, m), stats in groups.items() if m == measure]
            counts, _ = np.histogram(pcts, bins=edges)
            for lo, hi, c in zip(edges[:-1], edges[1:], counts):
                writer.writerow([measure, f"{lo:g}", f"{hi:g}", int(c)])


def write_run_lengths_csv(groups: dict, path: Path | str, key_names: Sequence[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(key_names) + ["run_length"])
        for key, lengths in groups.items():
            key_cols = list(key) if isinstance(key, tuple) else [key]
            for length in lengths:
                writer.writerow(key_cols + [length])


def write_run_length_histogram(groups: dict, path: Path | str) -> None:
    """Counts of runs per length, per measure (measure is the last key part)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    per_measure: dict[str, dict[int, int]] = {}
    for key, lengths in groups.items():
        measure = key[-1]
        hist = per_measure.setdefault(measure, {})
        for length in lengths:
            hist[length] = hist.get(length, 0) + 1
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["uncertainty_measure", "run_length", "count"])
        for measure in sorted(per_measure):
            for length in sorted(per_measure[measure]):
                writer.writerow([measure, length, per_measure[measure][length]])


def write_distance_series(rows: Sequence[DecisionTableRow], path: Path | str) -> None:
    """Per-decision distances, one column per measure (per-player trajectory data)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    measures = [m.value for m in ALL_MEASURES
                if any(r.uncertainty_measure == m.value for r in rows)]
    series: dict[tuple[str, str, int], dict[str, float]] = {}
    for row in rows:
        series.setdefault((row.user_id, row.problem_id, row.step), {})[
            row.uncertainty_measure] = row.min_dist_from_pareto_frontier
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "problem_id", "step"] + [f"dist_{m}" for m in measures])
        for (user, problem, step) in sorted(series):
            dists = series[(user, problem, step)]
            writer.writerow([user, problem, step]
                            + [repr(dists[m]) if m in dists else "" for m in measures])


def write_boxplot_data(rows: Sequence[DecisionTableRow], traces: Sequence[Trace],
                       measure: UQMeasure, path: Path | str,
                       threshold: float = DEFAULT_THRESHOLD) -> None:
    """Per-decision (problem, class, ACR) triples behind the step-3 comparison."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_index = {(t.player_id, t.problem_id): t for t in traces}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["problem_id", "pareto_rational", "acr"])
        for row in rows:
            if row.uncertainty_measure != measure.value:
                continue
            trace = trace_index.get((row.user_id, row.problem_id))
            if trace is None:
                continue
            record = acr(trace, row.step)
            rational = row.min_dist_from_pareto_frontier < threshold
            writer.writerow([row.problem_id, int(rational), repr(record.acr)])
