"""Synthetic decision-making agents that generate traces.

Agents start with ``n_init`` uniform-random decisions, then pick every next
decision by maximizing their policy's criterion over the same lattice the
analyzer uses (refitting the agent's GP at each step). Traces are fully
deterministic given (policy, seed, problem, grid).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .acquisition import acq_ei, acq_pi, acq_ucb, thompson_next
from .errors import FitError, InputError
from .gp import Dataset, FitOptions, fit_gp, posterior_mean
from .kernels import KernelKind
from .pareto import build_grid
from .testbed import TestProblem
from .traces import Trace, TraceStep
from .uncertainty import Incumbent


class PolicyKind(str, enum.Enum):
    EI_MAX = "EIMax"
    PI_MAX = "PIMax"
    UCB_MAX = "UCBMax"
    THOMPSON = "Thompson"
    GREEDY_MEAN = "GreedyMean"
    UNIFORM_RANDOM = "UniformRandom"


@dataclass(frozen=True)
class AgentPolicy:
    """How an agent chooses its next decision."""

    kind: PolicyKind
    beta: float = 3.0
    xi: float = 0.0
    kernel: KernelKind = KernelKind.SQUARED_EXPONENTIAL
    seed: int = 0

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise InputError(f"beta must be nonnegative, got {self.beta}")
        if self.xi < 0:
            raise InputError(f"xi must be nonnegative, got {self.xi}")


def run_agent(problem: TestProblem, policy: AgentPolicy, budget: int = 20,
              n_init: int = 3, seed: int | None = None,
              grid_resolution=30, fit_options: FitOptions | None = None,
              player_id: str | None = None) -> Trace:
    """Play one problem to the full budget and return the trace.

    The first ``n_init`` decisions are uniform in the domain; later ones
    maximize the policy criterion over the evaluation lattice. Timestamps
    are the step indices, keeping traces bit-reproducible.
    """
    if n_init < 1:
        raise InputError(f"n_init must be >= 1, got {n_init}")
    if budget < n_init:
        raise InputError(f"budget {budget} smaller than n_init {n_init}")
    seed = policy.seed if seed is None else seed
    if player_id is None:
        player_id = f"{policy.kind.value}-{seed}"
    if fit_options is None:
        fit_options = FitOptions()

    seq = np.random.SeedSequence(seed)
    rng = np.random.default_rng(seq)
    step_seeds = seq.spawn(budget)
    grid = build_grid(problem.domain, grid_resolution)

    X: list[np.ndarray] = []
    y: list[float] = []
    for i in range(budget):
        if i < n_init or policy.kind is PolicyKind.UNIFORM_RANDOM:
            x_next = rng.uniform(problem.domain.lo, problem.domain.hi)
        else:
            data = Dataset(np.array(X), np.array(y), problem.domain)
            try:
                gp = fit_gp(data, policy.kernel, fit_options)
            except FitError as exc:
                raise FitError(
                    f"agent {player_id} aborted at step {i + 1} on {problem.problem_id}: {exc}"
                ) from exc
            incumbent = Incumbent.from_outcomes(y)
            if policy.kind is PolicyKind.EI_MAX:
                crit = acq_ei(gp, grid, incumbent, policy.xi)
            elif policy.kind is PolicyKind.PI_MAX:
                crit = acq_pi(gp, grid, incumbent, policy.xi)
            elif policy.kind is PolicyKind.UCB_MAX:
                crit = acq_ucb(gp, grid, policy.beta)
            elif policy.kind is PolicyKind.GREEDY_MEAN:
                crit = np.atleast_1d(posterior_mean(gp, grid))
            elif policy.kind is PolicyKind.THOMPSON:
                x_next = thompson_next(gp, grid, int(step_seeds[i].generate_state(1)[0]))
                crit = None
            else:
                raise InputError(f"unknown policy kind {policy.kind!r}")
            if crit is not None:
                x_next = grid[int(np.argmax(crit))]
        X.append(np.asarray(x_next, dtype=float))
        y.append(problem.score(x_next))

    steps = tuple(TraceStep(x=tuple(float(v) for v in xi), y=yi, t=float(i))
                  for i, (xi, yi) in enumerate(zip(X, y)))
    return Trace(player_id=player_id, problem_id=problem.problem_id, mode=1,
                 steps=steps, budget=budget)
