"""Empirical Hölder/Lipschitz checks for the steepest descent direction map.

With ``L`` a Lipschitz constant of the gradients and ``M`` a bound on their
norms over a convex bounded region, the direction map satisfies
``|Lambda(y) - Lambda(z)| <= sqrt(2 L M) |y - z|^(1/2)`` and its norm is
``L``-Lipschitz. The pairs from :func:`counterexample_pair` show that the
exponent 1/2 cannot be raised: along them the direction difference is
``sin t`` while the points are ``sin(t)^2`` apart.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .direction import steepest_descent_direction
from .errors import DomainError, InvalidInputError, NotConvergedError
from .problems import Problem, Region, RegionConstants, as_point, estimate_region_constants

__all__ = [
    "PROBE_TOL",
    "MIN_SCALE",
    "HolderSample",
    "ExponentFit",
    "ProbeResult",
    "counterexample_pair",
    "holder_sample",
    "probe_region",
    "fit_exponent",
    "norm_lipschitz_check",
    "samples_to_csv",
]

PROBE_TOL = 1e-12
MIN_SCALE = 1e-8
_MAX_ATTEMPTS_PER_PAIR = 100


@dataclass(frozen=True)
class HolderSample:
    y: np.ndarray
    z: np.ndarray
    dist: float
    dlambda: float
    dnorm: float
    norm_y: float  # |Lambda(y)|
    norm_z: float  # |Lambda(z)|
    label: float = math.nan  # t for the counterexample family, scale for probes

    def quotient(self, eta: float) -> float:
        return self.dlambda / self.dist**eta


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    n_samples: int
    n_excluded: int = 0

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r_squared,
            "n_samples": self.n_samples,
            "n_excluded": self.n_excluded,
        }


@dataclass
class ProbeResult:
    samples: list[HolderSample]
    constants: RegionConstants
    bound: float
    max_q_half: float
    violations: int
    norm_violation: float
    n_zero_dlambda: int
    fit: ExponentFit | None
    seed: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def summary(self, eta: float | None = None) -> dict:
        out = {
            "L": self.constants.L,
            "M": self.constants.M,
            "constants": self.constants.source,
            "bound": self.bound,
            "max_q_half": self.max_q_half,
            "violations": self.violations,
            "passed": self.passed,
            "norm_lipschitz_violation": self.norm_violation,
            "n_samples": len(self.samples),
            "n_zero_dlambda": self.n_zero_dlambda,
            "fit": None
            if self.fit is None
            else {"slope": self.fit.slope, "intercept": self.fit.intercept, "r2": self.fit.r_squared},
            "seed": self.seed,
        }
        if eta is not None:
            out["eta"] = eta
            out["max_q_eta"] = max((s.quotient(eta) for s in self.samples), default=0.0)
        return out


def counterexample_pair(t: float) -> tuple[np.ndarray, np.ndarray]:
    """``y = cos t (cos t, sin t)`` and ``z = (1, cos t sin t)`` for ``0 < t < pi/2``."""
    if not (0.0 < t < math.pi / 2):
        raise InvalidInputError(f"t must lie in (0, pi/2), got {t}")
    c, s = math.cos(t), math.sin(t)
    return np.array([c * c, c * s]), np.array([1.0, c * s])


def holder_sample(problem: Problem, y, z, tol: float = PROBE_TOL, label: float = math.nan) -> HolderSample:
    """Compare the directions at ``y`` and ``z``."""
    y = as_point(y, problem.n)
    z = as_point(z, problem.n)
    dist = float(np.linalg.norm(y - z))
    if dist == 0.0:
        raise InvalidInputError("holder_sample needs two distinct points")
    ry = steepest_descent_direction(problem, y, tol)
    rz = steepest_descent_direction(problem, z, tol)
    if not (ry.converged and rz.converged):
        raise NotConvergedError(f"dual solver not certified at {y.tolist()} / {z.tolist()}")
    return HolderSample(
        y=y,
        z=z,
        dist=dist,
        dlambda=float(np.linalg.norm(ry.lam - rz.lam)),
        dnorm=abs(ry.norm - rz.norm),
        norm_y=ry.norm,
        norm_z=rz.norm,
        label=label,
    )


def _unit_vectors(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    g = rng.standard_normal((k, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def probe_region(
    problem: Problem,
    region: Region,
    n_pairs: int,
    scales,
    seed: int = 42,
    tol: float = PROBE_TOL,
    constants: RegionConstants | None = None,
) -> ProbeResult:
    """Sample direction differences at fixed separations inside ``region``.

    For each scale ``s`` draw ``n_pairs`` base points ``y`` uniformly in the
    region and set ``z = y + s * u`` for a random unit vector ``u``; a ``z``
    outside the region (or the problem's domain) is discarded and the pair
    redrawn. The summary compares the largest ``dlambda / sqrt(dist)`` with
    ``sqrt(2 L M)``, where ``L, M`` come from ``constants``, else from the
    problem's analytic constants, else from :func:`estimate_region_constants`.

    Sample order is fixed by the seed.
    """
    if isinstance(n_pairs, bool) or int(n_pairs) != n_pairs or n_pairs < 1:
        raise InvalidInputError("n_pairs must be a positive integer")
    n_pairs = int(n_pairs)
    scales = [float(s) for s in scales]
    if not scales:
        raise InvalidInputError("at least one scale is required")
    if any(not (math.isfinite(s) and s >= MIN_SCALE) for s in scales):
        raise InvalidInputError(f"scales must be finite and >= {MIN_SCALE:g}")
    if region.dim != problem.n:
        raise InvalidInputError("region dimension does not match the problem")
    if max(scales) >= region.diameter():
        raise InvalidInputError("region is too small for the largest scale")

    if constants is None:
        if problem.constants is not None:
            constants = problem.constants(region)
        else:
            constants = estimate_region_constants(problem, region, k=10000, seed=seed)
    bound = constants.holder_constant()

    streams = np.random.SeedSequence(seed).spawn(len(scales))
    samples: list[HolderSample] = []
    for scale, ss in zip(scales, streams):
        rng = np.random.default_rng(ss)
        accepted, attempts = 0, 0
        while accepted < n_pairs:
            if attempts >= _MAX_ATTEMPTS_PER_PAIR * n_pairs:
                if accepted == 0:
                    raise InvalidInputError(f"could not place any pair at scale {scale:g} in the region")
                break
            attempts += 1
            y = region.sample(rng, 1)[0]
            z = y + scale * _unit_vectors(rng, 1, problem.n)[0]
            if not region.contains(z):
                continue
            try:
                samples.append(holder_sample(problem, y, z, tol, label=scale))
            except DomainError:
                continue
            accepted += 1

    q_half = [s.quotient(0.5) for s in samples]
    usable = [s for s in samples if s.dlambda > 0]
    fit = fit_exponent(usable) if len({s.label for s in usable}) >= 2 else None
    return ProbeResult(
        samples=samples,
        constants=constants,
        bound=bound,
        max_q_half=max(q_half),
        violations=sum(q > bound for q in q_half),
        norm_violation=norm_lipschitz_check(samples, constants.L),
        n_zero_dlambda=len(samples) - len(usable),
        fit=fit,
        seed=seed,
    )


def fit_exponent(samples) -> ExponentFit:
    """Least-squares slope of ``log dlambda`` against ``log dist``.

    Samples with ``dlambda == 0`` are left out and counted in ``n_excluded``.
    """
    usable = [s for s in samples if s.dlambda > 0 and s.dist > 0]
    if len(usable) < 2:
        raise InvalidInputError("need at least two samples with positive dlambda")
    lx = np.log([s.dist for s in usable])
    ly = np.log([s.dlambda for s in usable])
    if np.ptp(lx) == 0:
        raise InvalidInputError("all samples share one distance; slope is undetermined")
    dx, dy = lx - lx.mean(), ly - ly.mean()
    slope = float(dx @ dy) / float(dx @ dx)
    intercept = float(ly.mean() - slope * lx.mean())
    resid = dy - slope * dx
    ss_tot = float(dy @ dy)
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - float(resid @ resid) / ss_tot))
    return ExponentFit(float(slope), float(intercept), r2, len(usable), len(samples) - len(usable))


def norm_lipschitz_check(samples, L: float) -> float:
    """Largest ``dnorm - L * dist``; non-positive means no violation."""
    if not L >= 0:
        raise InvalidInputError("L must be non-negative")
    return max((s.dnorm - L * s.dist for s in samples), default=-math.inf)


def samples_to_csv(samples, eta: float = 0.75) -> str:
    """CSV with columns ``t_or_scale, y_1.., z_1.., dist, dlambda, dnorm, q_half, q_eta``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n = len(samples[0].y) if samples else 0
    writer.writerow(
        ["t_or_scale"]
        + [f"y_{j + 1}" for j in range(n)]
        + [f"z_{j + 1}" for j in range(n)]
        + ["dist", "dlambda", "dnorm", "q_half", "q_eta"]
    )
    for s in samples:
        vals = [s.label, *s.y, *s.z, s.dist, s.dlambda, s.dnorm, s.quotient(0.5), s.quotient(eta)]
        writer.writerow([repr(float(v)) for v in vals])
    return buf.getvalue()
