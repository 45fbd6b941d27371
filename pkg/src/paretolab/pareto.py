"""Bi-objective mapping, Pareto frontier, frontier distance, rationality.

Candidate decisions are mapped to (improvement, uncertainty) pairs over a
lattice of grid points; the frontier is the set of pairs not strongly
dominated by any other pair (both objectives maximized). A decision is
Pareto-rational when its pair sits on, or within a squared-distance
threshold of, the grid-approximated frontier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .domain import Box
from .errors import InputError
from .gp import GPPosterior
from .kernels import KernelKind
from .uncertainty import Incumbent, UQMeasure, evaluate_measure, improvement

DEFAULT_THRESHOLD = 1e-4


@dataclass(frozen=True)
class ObjectivePair:
    """The bi-objective image of one candidate decision."""

    zeta: float
    u: float
    x: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.zeta) and np.isfinite(self.u)):
            raise InputError(f"objective pair must be finite, got ({self.zeta}, {self.u})")


class ObjectiveGrid(Sequence):
    """Array-backed sequence of objective pairs, preserving grid order."""

    def __init__(self, zeta: np.ndarray, u: np.ndarray, X: np.ndarray | None = None):
        zeta = np.asarray(zeta, dtype=float).ravel()
        u = np.asarray(u, dtype=float).ravel()
        if zeta.shape != u.shape or zeta.size == 0:
            raise InputError("objective grid needs matching, nonempty zeta/u arrays")
        if not (np.all(np.isfinite(zeta)) and np.all(np.isfinite(u))):
            raise InputError("objective values must be finite")
        self.zeta = zeta
        self.u = u
        self.X = None if X is None else np.atleast_2d(np.asarray(X, dtype=float))

    @property
    def values(self) -> np.ndarray:
        return np.column_stack([self.zeta, self.u])

    def __len__(self) -> int:
        return self.zeta.size

    def __getitem__(self, i) -> ObjectivePair:
        x = None if self.X is None else tuple(self.X[i])
        return ObjectivePair(zeta=float(self.zeta[i]), u=float(self.u[i]), x=x)


@dataclass(frozen=True)
class ParetoFrontier:
    """Non-dominated subset of a pair set, with membership over the full set."""

    values: np.ndarray          # the full set, shape (m, 2)
    mask: np.ndarray            # boolean membership of the frontier, shape (m,)

    @property
    def frontier_values(self) -> np.ndarray:
        return self.values[self.mask]

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


@dataclass(frozen=True)
class RationalityVerdict:
    distance: float
    is_rational: bool
    threshold: float


def build_grid(domain: Box, resolution) -> np.ndarray:
    """Full Cartesian lattice over the box, both endpoints included per axis.

    ``resolution`` is one count shared by every dimension or a per-dimension
    sequence; ordering is row-major (first coordinate varies slowest).
    """
    if isinstance(resolution, (int, np.integer)):
        counts = [int(resolution)] * domain.dim
    else:
        counts = [int(c) for c in resolution]
    if len(counts) != domain.dim:
        raise InputError(f"{len(counts)} resolution counts for a {domain.dim}-dimensional box")
    if any(c < 2 for c in counts):
        raise InputError(f"resolution must be >= 2 per dimension, got {counts}")
    axes = [np.linspace(lo, hi, c) for lo, hi, c in zip(domain.lo, domain.hi, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, domain.dim)


def _pair_values(psi) -> np.ndarray:
    if isinstance(psi, ObjectiveGrid):
        return psi.values
    if isinstance(psi, np.ndarray):
        values = np.atleast_2d(np.asarray(psi, dtype=float))
    else:
        pairs = list(psi)
        if not pairs:
            raise InputError("pair set must be nonempty")
        values = np.array([[p.zeta, p.u] for p in pairs], dtype=float)
    if values.ndim != 2 or values.shape[1] != 2 or values.shape[0] == 0:
        raise InputError(f"expected a nonempty (m, 2) pair set, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InputError("objective values must be finite")
    return values


def nondominated_mask(values: np.ndarray) -> np.ndarray:
    """Boolean mask of pairs not strongly dominated (both objectives maximized).

    Exact duplicates never dominate each other, so every copy of a surviving
    value pair is kept.
    """
    m = values.shape[0]
    order = np.lexsort((-values[:, 1], -values[:, 0]))
    sv = values[order]
    new_group = np.empty(m, dtype=bool)
    new_group[0] = True
    new_group[1:] = sv[1:, 0] != sv[:-1, 0]
    group_id = np.cumsum(new_group) - 1
    u_head = sv[new_group, 1]  # u sorted descending within each equal-zeta group
    prev_best = np.concatenate(([-np.inf], np.maximum.accumulate(u_head)[:-1]))
    group_survives = u_head > prev_best
    survives_sorted = group_survives[group_id] & (sv[:, 1] == u_head[group_id])
    mask = np.empty(m, dtype=bool)
    mask[order] = survives_sorted
    return mask


def evaluate_objectives(gp: GPPosterior, grid: np.ndarray, measure: UQMeasure,
                        incumbent: Incumbent, X_prefix) -> ObjectiveGrid:
    """One (improvement, uncertainty) pair per grid point, in grid order."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.shape[0] == 0:
        raise InputError("grid must be nonempty")
    zeta = improvement(gp, grid, incumbent)
    u = evaluate_measure(measure, gp, X_prefix, grid)
    return ObjectiveGrid(zeta=zeta, u=u, X=grid)


def pareto_frontier(psi) -> ParetoFrontier:
    """Maximal set under strong dominance."""
    values = _pair_values(psi)
    return ParetoFrontier(values=values, mask=nondominated_mask(values))


def frontier_distance(pair: ObjectivePair, psi, normalize: bool = True,
                      threshold: float = DEFAULT_THRESHOLD) -> RationalityVerdict:
    """Squared distance from the pair to the frontier of the augmented set.

    The frontier is recomputed over psi plus the query pair: a non-dominated
    query has distance exactly 0; a dominated one gets the minimum squared
    Euclidean distance to the frontier, after optional per-objective min-max
    scaling over the augmented set.
    """
    values = _pair_values(psi)
    q = np.array([pair.zeta, pair.u], dtype=float)
    aug = np.vstack([values, q])
    mask = nondominated_mask(aug)
    if mask[-1]:
        d = 0.0
    else:
        front = aug[mask]
        if normalize:
            lo = aug.min(axis=0)
            span = aug.max(axis=0) - lo
            span[span == 0.0] = 1.0
            front = (front - lo) / span
            q = (q - lo) / span
        d = float(np.min(np.sum((front - q) ** 2, axis=1)))
    return RationalityVerdict(distance=d, is_rational=d < threshold, threshold=threshold)


@dataclass(frozen=True)
class DecisionClassification:
    """Per-kernel frontier distances for one decision plus their minimum."""

    distances: dict[KernelKind, float]
    min_distance: float
    threshold: float

    @property
    def is_rational(self) -> bool:
        return self.min_distance < self.threshold


def classify_decision(gps: Mapping[KernelKind, GPPosterior], grid: np.ndarray,
                      measure: UQMeasure, incumbent: Incumbent, X_prefix,
                      x_next, normalize: bool = True,
                      threshold: float = DEFAULT_THRESHOLD) -> DecisionClassification:
    """Map x_next through every kernel's GP and collect frontier distances."""
    if not gps:
        raise InputError("need at least one conditioned GP")
    x_next = np.asarray(x_next, dtype=float).ravel()
    distances: dict[KernelKind, float] = {}
    for kind, gp in gps.items():
        psi = evaluate_objectives(gp, grid, measure, incumbent, X_prefix)
        pair = ObjectivePair(
            zeta=float(improvement(gp, x_next, incumbent)),
            u=float(evaluate_measure(measure, gp, X_prefix, x_next)),
            x=tuple(x_next),
        )
        verdict = frontier_distance(pair, psi, normalize=normalize, threshold=threshold)
        distances[kind] = verdict.distance
    return DecisionClassification(
        distances=distances,
        min_distance=min(distances.values()),
        threshold=threshold,
    )
