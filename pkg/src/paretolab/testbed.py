"""The ten 2-D benchmark problems behind the game.

Formulas and evaluation domains follow the standard global-optimization
test-function library (Surjanovic & Bingham's collection); each entry
records its published minimum and at least one minimizer. Players and
agents maximize the score -f(x), so every problem is a maximization task
with optimum score -minimum.

Styblinski-Tang's minimum is stored at full precision (the commonly quoted
-39.16599 per dimension is rounded beyond the tolerance our checks use).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import Box
from .errors import InputError


@dataclass(frozen=True)
class TestProblem:
    """A 2-D minimization benchmark exposed to players as score = -f(x)."""

    problem_id: str
    domain: Box
    fn: Callable[[np.ndarray], np.ndarray]
    minimum: float
    minimizers: tuple[tuple[float, float], ...]

    def score(self, x) -> float:
        """-f(x) for a single in-domain point."""
        x = np.asarray(x, dtype=float).ravel()
        if x.shape != (2,):
            raise InputError(f"expected a 2-D point, got shape {x.shape}")
        if not self.domain.contains(x):
            raise InputError(
                f"point {x.tolist()} outside domain "
                f"[{self.domain.lower}, {self.domain.upper}] of {self.problem_id}"
            )
        return float(-self.fn(x))

    @property
    def best_score(self) -> float:
        return -self.minimum


def _ackley(x: np.ndarray) -> np.ndarray:
    a, b, c = 20.0, 0.2, 2.0 * math.pi
    s1 = (x[..., 0] ** 2 + x[..., 1] ** 2) / 2.0
    s2 = (np.cos(c * x[..., 0]) + np.cos(c * x[..., 1])) / 2.0
    return -a * np.exp(-b * np.sqrt(s1)) - np.exp(s2) + a + math.e


def _beale(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return ((1.5 - x1 + x1 * x2) ** 2
            + (2.25 - x1 + x1 * x2**2) ** 2
            + (2.625 - x1 + x1 * x2**3) ** 2)


def _branin(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    b = 5.1 / (4.0 * math.pi**2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    return (x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * np.cos(x1) + 10.0


def _bukin6(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return 100.0 * np.sqrt(np.abs(x2 - 0.01 * x1**2)) + 0.01 * np.abs(x1 + 10.0)


def _goldpr(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    part1 = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1**2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2**2)
    part2 = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1**2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2**2)
    return part1 * part2


def _griewank(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return (x1**2 + x2**2) / 4000.0 - np.cos(x1) * np.cos(x2 / math.sqrt(2.0)) + 1.0


def _levy(x: np.ndarray) -> np.ndarray:
    w1 = 1.0 + (x[..., 0] - 1.0) / 4.0
    w2 = 1.0 + (x[..., 1] - 1.0) / 4.0
    return (np.sin(math.pi * w1) ** 2
            + (w1 - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * w1 + 1.0) ** 2)
            + (w2 - 1.0) ** 2 * (1.0 + np.sin(2.0 * math.pi * w2) ** 2))


def _rastr(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return 20.0 + (x1**2 - 10.0 * np.cos(2.0 * math.pi * x1)) \
        + (x2**2 - 10.0 * np.cos(2.0 * math.pi * x2))


def _schwef(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return 418.9829 * 2.0 - x1 * np.sin(np.sqrt(np.abs(x1))) - x2 * np.sin(np.sqrt(np.abs(x2)))


def _stytang(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[..., 0], x[..., 1]
    return 0.5 * ((x1**4 - 16.0 * x1**2 + 5.0 * x1) + (x2**4 - 16.0 * x2**2 + 5.0 * x2))


_STYTANG_ARG = -2.903534
_STYTANG_MIN = -78.3323314075428  # f at the published minimizer, both coordinates

_PROBLEMS: tuple[TestProblem, ...] = (
    TestProblem("ackley", Box((-32.768, -32.768), (32.768, 32.768)), _ackley,
                0.0, ((0.0, 0.0),)),
    TestProblem("beale", Box((-4.5, -4.5), (4.5, 4.5)), _beale,
                0.0, ((3.0, 0.5),)),
    TestProblem("branin", Box((-5.0, 0.0), (10.0, 15.0)), _branin,
                0.39788735772973836,
                ((-math.pi, 12.275), (math.pi, 2.275), (9.42478, 2.475))),
    TestProblem("bukin6", Box((-15.0, -3.0), (-5.0, 3.0)), _bukin6,
                0.0, ((-10.0, 1.0),)),
    TestProblem("goldpr", Box((-2.0, -2.0), (2.0, 2.0)), _goldpr,
                3.0, ((0.0, -1.0),)),
    TestProblem("griewank", Box((-600.0, -600.0), (600.0, 600.0)), _griewank,
                0.0, ((0.0, 0.0),)),
    TestProblem("levy", Box((-10.0, -10.0), (10.0, 10.0)), _levy,
                0.0, ((1.0, 1.0),)),
    TestProblem("rastr", Box((-5.12, -5.12), (5.12, 5.12)), _rastr,
                0.0, ((0.0, 0.0),)),
    TestProblem("schwef", Box((-500.0, -500.0), (500.0, 500.0)), _schwef,
                0.0, ((420.9687, 420.9687),)),
    TestProblem("stytang", Box((-5.0, -5.0), (5.0, 5.0)), _stytang,
                _STYTANG_MIN, ((_STYTANG_ARG, _STYTANG_ARG),)),
)

_BY_ID = {p.problem_id: p for p in _PROBLEMS}

PROBLEM_IDS: tuple[str, ...] = tuple(p.problem_id for p in _PROBLEMS)


def list_problems() -> tuple[TestProblem, ...]:
    """All ten problems, in catalog order."""
    return _PROBLEMS


def get_problem(problem_id: str) -> TestProblem:
    try:
        return _BY_ID[problem_id]
    except KeyError:
        raise InputError(f"unknown problem id {problem_id!r}; known: {PROBLEM_IDS}") from None


def evaluate_problem(problem_id: str, x) -> float:
    """Score -f(x) at an in-domain point; deterministic and noiseless."""
    return get_problem(problem_id).score(x)


def problem_catalog() -> list[dict]:
    """Machine-readable descriptors (id, bounds, published optimum)."""
    return [
        {
            "problem_id": p.problem_id,
            "lower": list(p.domain.lower),
            "upper": list(p.domain.upper),
            "minimum": p.minimum,
            "best_score": p.best_score,
            "minimizers": [list(m) for m in p.minimizers],
        }
        for p in _PROBLEMS
    ]
