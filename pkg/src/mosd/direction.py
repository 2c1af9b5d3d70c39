"""Multiobjective steepest descent direction and optimal value.

The direction at ``x`` is the minimizer of
``max_i <grad f_i(x), v> + |v|^2 / 2`` over ``v``. It is recovered from the
dual: with ``u`` the min-norm point of the convex hull of the gradients,
the direction is ``-u`` and the optimal value is ``theta = -|u|^2 / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .minnorm import DEFAULT_TOL, _as_matrix, min_norm_point
from .problems import Problem, jacobian

__all__ = [
    "CRITICAL_EPS",
    "KktResiduals",
    "DirectionResult",
    "direction_from_gradients",
    "steepest_descent_direction",
    "phi",
    "primal_value",
    "is_pareto_critical",
]

CRITICAL_EPS = 1e-8


@dataclass(frozen=True)
class KktResiduals:
    """Residuals of the optimality system of the epigraph subproblem

        min tau + |v|^2 / 2   s.t.  <g_i, v> <= tau

    at ``(tau, v) = (-|lam|^2, lam)``; ``alpha`` are the multipliers.
    """

    feasibility: float  # max(max_i <g_i, lam> - tau, 0)
    complementarity: float  # max_i alpha_i |<g_i, lam> - tau|
    stationarity: float  # |lam + sum_i alpha_i g_i|

    def max(self) -> float:
        return max(self.feasibility, self.complementarity, self.stationarity)

    def to_dict(self) -> dict[str, float]:
        return {
            "feasibility": self.feasibility,
            "complementarity": self.complementarity,
            "stationarity": self.stationarity,
        }


@dataclass(frozen=True)
class DirectionResult:
    lam: np.ndarray
    theta: float
    weights: np.ndarray
    slopes: np.ndarray
    kkt: KktResiduals
    converged: bool

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.lam))

    @property
    def tau(self) -> float:
        """Optimal epigraph level, ``max_i <g_i, lam> = -|lam|^2 = 2 theta``."""
        return 2.0 * self.theta

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.tolist(),
            "theta": self.theta,
            "weights": self.weights.tolist(),
            "slopes": self.slopes.tolist(),
            "kkt": self.kkt.to_dict(),
            "converged": self.converged,
        }


def direction_from_gradients(G, tol: float = DEFAULT_TOL) -> DirectionResult:
    """Steepest descent direction for a given stack of gradients."""
    G = _as_matrix(G)
    res = min_norm_point(G, tol)
    lam = -res.point + 0.0  # no negative zeros in output
    theta = -0.5 * res.norm_sq
    slopes = G @ lam
    tau = -res.norm_sq
    kkt = KktResiduals(
        feasibility=max(float(np.max(slopes)) - tau, 0.0),
        complementarity=float(np.max(res.weights * np.abs(slopes - tau))),
        stationarity=float(np.linalg.norm(lam + res.weights @ G)),
    )
    return DirectionResult(lam, theta, res.weights, slopes, kkt, res.converged)


def steepest_descent_direction(problem: Problem, x, tol: float = DEFAULT_TOL) -> DirectionResult:
    """Direction ``Lambda f(x)`` and value ``theta_f(x)`` at ``x``.

    Raises :class:`InvalidInputError` if a gradient at ``x`` is not finite.
    A dual solve that fails its certificate is returned with
    ``converged=False``.
    """
    G = jacobian(problem, x)
    if not np.all(np.isfinite(G)):
        raise InvalidInputError(f"non-finite gradient of {problem.name!r} at {np.asarray(x).tolist()}")
    return direction_from_gradients(G, tol)


def _check_v(G, v):
    G = _as_matrix(G)
    v = np.asarray(v, dtype=float)
    if v.shape != (G.shape[1],):
        raise InvalidInputError(f"vector has shape {v.shape}, expected ({G.shape[1]},)")
    return G, v


def phi(G, v) -> float:
    """Support-type function ``max_i <g_i, v>``."""
    G, v = _check_v(G, v)
    return float(np.max(G @ v))


def primal_value(G, v) -> float:
    """Objective of the direction subproblem, ``phi(G, v) + |v|^2 / 2``."""
    G, v = _check_v(G, v)
    return float(np.max(G @ v)) + 0.5 * float(v @ v)


def is_pareto_critical(result: DirectionResult, eps: float = CRITICAL_EPS) -> bool:
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidInputError("eps must be positive")
    return result.norm <= eps
