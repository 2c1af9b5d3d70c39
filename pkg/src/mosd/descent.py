"""Steepest descent for several objectives with Armijo backtracking."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .direction import DirectionResult, steepest_descent_direction
from .errors import InvalidInputError, LinesearchFailedError
from .problems import Problem, as_point, evaluate

__all__ = [
    "REACHED_CRITICAL",
    "MAX_ITERS",
    "LINESEARCH_FAILED",
    "LEFT_DOMAIN",
    "DescentParams",
    "Iterate",
    "DescentTrace",
    "armijo_step",
    "run_descent",
]

REACHED_CRITICAL = "reached-critical"
MAX_ITERS = "max-iters"
LINESEARCH_FAILED = "linesearch-failed"
LEFT_DOMAIN = "left-domain"


@dataclass(frozen=True)
class DescentParams:
    sigma: float = 1e-4
    beta: float = 0.5
    t0: float = 1.0
    max_iters: int = 10000
    eps_crit: float = 1e-6
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0 < self.sigma < 1:
            raise InvalidInputError("sigma must lie in (0, 1)")
        if not 0 < self.beta < 1:
            raise InvalidInputError("beta must lie in (0, 1)")
        if not (self.t0 > 0 and math.isfinite(self.t0)):
            raise InvalidInputError("t0 must be positive")
        if not self.eps_crit > 0:
            raise InvalidInputError("eps_crit must be positive")
        if self.max_iters < 0 or self.max_backtracks < 0:
            raise InvalidInputError("iteration budgets must be non-negative")


@dataclass(frozen=True)
class Iterate:
    x: np.ndarray
    f: np.ndarray
    lambda_norm: float
    theta: float
    step: float  # step taken from this iterate; 0.0 on the last one


@dataclass
class DescentTrace:
    iterates: list[Iterate] = field(default_factory=list)
    status: str = MAX_ITERS

    @property
    def final(self) -> Iterate:
        return self.iterates[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if not self.iterates:
            writer.writerow(["iter", "lambda_norm", "theta", "step"])
            return buf.getvalue()
        n, m = len(self.iterates[0].x), len(self.iterates[0].f)
        writer.writerow(
            ["iter"]
            + [f"x_{j + 1}" for j in range(n)]
            + [f"f_{i + 1}" for i in range(m)]
            + ["lambda_norm", "theta", "step"]
        )
        for k, it in enumerate(self.iterates):
            writer.writerow(
                [k] + [repr(float(v)) for v in (*it.x, *it.f, it.lambda_norm, it.theta, it.step)]
            )
        return buf.getvalue()


def armijo_step(problem: Problem, x, result: DirectionResult, params: DescentParams = DescentParams()) -> float:
    """Largest ``t = t0 * beta**k`` passing the Armijo test for every objective.

    Accepts ``t`` when ``x + t*lam`` is in the domain and
    ``f_i(x + t*lam) <= f_i(x) + sigma * t * <grad f_i(x), lam>`` for all ``i``.
    Leaving the domain counts as a rejection.
    """
    x = as_point(x, problem.n)
    fx = evaluate(problem, x)
    t = params.t0
    for _ in range(params.max_backtracks + 1):
        trial = x + t * result.lam
        if problem.domain.contains(trial):
            ft = evaluate(problem, trial)
            if np.all(ft <= fx + params.sigma * t * result.slopes):
                return t
        t *= params.beta
    raise LinesearchFailedError(
        f"no Armijo step within {params.max_backtracks} backtracks from {x.tolist()}"
    )


def run_descent(problem: Problem, x0, params: DescentParams = DescentParams()) -> DescentTrace:
    """Iterate ``x <- x + t * Lambda f(x)`` until a stopping rule fires.

    The stopping reason is recorded in ``trace.status``; a start outside the
    domain yields an empty trace with status ``left-domain``.
    """
    x = as_point(x0, problem.n)
    trace = DescentTrace()
    if not problem.domain.contains(x):
        trace.status = LEFT_DOMAIN
        return trace

    fx = evaluate(problem, x)
    for _ in range(params.max_iters + 1):
        res = steepest_descent_direction(problem, x)
        if res.norm <= params.eps_crit:
            trace.iterates.append(Iterate(x, fx, res.norm, res.theta, 0.0))
            trace.status = REACHED_CRITICAL
            return trace
        if len(trace.iterates) == params.max_iters:
            trace.iterates.append(Iterate(x, fx, res.norm, res.theta, 0.0))
            trace.status = MAX_ITERS
            return trace
        try:
            t = armijo_step(problem, x, res, params)
        except LinesearchFailedError:
            trace.iterates.append(Iterate(x, fx, res.norm, res.theta, 0.0))
            trace.status = LINESEARCH_FAILED
            return trace
        trace.iterates.append(Iterate(x, fx, res.norm, res.theta, t))
        x = x + t * res.lam
        fx = evaluate(problem, x)
    return trace
