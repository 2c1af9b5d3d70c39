"""Minimum-norm point of the convex hull of a few vectors.

Given the rows ``g_1, ..., g_m`` of a matrix, find weights ``alpha`` in the
unit simplex minimizing ``|sum_i alpha_i g_i|``; equivalently, project the
origin onto ``conv{g_i}``. The main solver is Wolfe's active-set
minimum-norm-point method. :func:`project_segment` is the closed form for two
rows and :func:`min_norm_bruteforce` is a grid-search oracle for tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import InvalidInputError, UnsupportedError

__all__ = [
    "DEFAULT_TOL",
    "MinNormResult",
    "certificate_gap",
    "min_norm_point",
    "project_segment",
    "project_simplex",
    "min_norm_bruteforce",
]

DEFAULT_TOL = 1e-10
_CLAMP = 1e-14
# Wolfe keeps adding vertices until the scaled gap is at rounding level; the
# caller's tol only decides the converged flag. The gap is quadratic in the
# distance to the true projection, so stopping at tol would leave errors of
# order sqrt(tol) in the point.
_POLISH = 1e-15


@dataclass(frozen=True)
class MinNormResult:
    """Hull point ``point = weights @ G`` with ``norm_sq = |point|^2``."""

    weights: np.ndarray
    point: np.ndarray
    norm_sq: float
    iterations: int
    converged: bool


def _as_matrix(G) -> np.ndarray:
    try:
        G = np.array(G, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("gradient matrix must be numeric") from exc
    if G.ndim == 1 and G.size:
        G = G[None, :]
    if G.ndim != 2 or G.shape[0] == 0 or G.shape[1] == 0:
        raise InvalidInputError(f"expected a nonempty (m, n) matrix, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InvalidInputError("gradient matrix has non-finite entries")
    return G


def _clean_weights(alpha: np.ndarray) -> np.ndarray:
    alpha = np.where(alpha < 0, 0.0, alpha)
    return alpha / alpha.sum()


def certificate_gap(G: np.ndarray, u: np.ndarray) -> float:
    """Smallest scaled projection inequality ``<u, g_i - u> / (1 + |u| |g_i|)``.

    ``u`` in the hull is the projection of the origin iff this is ``>= 0``.
    """
    scale = 1.0 + math.sqrt(float(u @ u)) * np.linalg.norm(G, axis=1)
    return float(np.min((G @ u - u @ u) / scale))


def _finish(G: np.ndarray, alpha: np.ndarray, iterations: int, tol: float) -> MinNormResult:
    alpha = _clean_weights(alpha)
    point = alpha @ G
    return MinNormResult(
        weights=alpha,
        point=point,
        norm_sq=float(point @ point),
        iterations=iterations,
        converged=certificate_gap(G, point) >= -tol,
    )


def _affine_minimizer(P: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the min-norm point of the affine hull of rows of P."""
    if P.shape[0] == 1:
        return np.ones(1)
    D = (P[1:] - P[0]).T
    c, *_ = np.linalg.lstsq(D, -P[0], rcond=None)
    return np.concatenate(([1.0 - c.sum()], c))


def _wolfe(G: np.ndarray, alpha0: np.ndarray, tol: float, max_major: int):
    """Run Wolfe's method from simplex weights ``alpha0``.

    Returns ``(alpha, majors, ok)``; ``ok`` is False when the major-cycle
    budget ran out or no violating vertex outside the corral remained.
    """
    m = G.shape[0]
    norms = np.linalg.norm(G, axis=1)
    S = [int(i) for i in np.flatnonzero(alpha0 > 0)]
    lam = alpha0[S].copy()

    for major in range(1, max_major + 1):
        # minor cycles: move to the affine minimizer of S, dropping vertices
        # whenever the straight path leaves the simplex
        while True:
            mu = _affine_minimizer(G[S])
            if np.all(mu > 0):
                lam = mu
                break
            neg = mu <= 0
            ratios = lam[neg] / (lam[neg] - mu[neg])
            step = float(np.clip(ratios.min(), 0.0, 1.0))
            lam = lam + step * (mu - lam)
            lam[np.flatnonzero(neg)[np.argmin(ratios)]] = 0.0
            keep = lam > _CLAMP
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()

        x = lam @ G[S]
        gaps = (G @ x - x @ x) / (1.0 + math.sqrt(float(x @ x)) * norms)
        if gaps.min() >= -tol:
            alpha = np.zeros(m)
            alpha[S] = lam
            return alpha, major, True
        order = np.argsort(gaps, kind="stable")
        candidates = [int(j) for j in order if gaps[j] < -tol and j not in S]
        if not candidates:
            break
        S.append(candidates[0])
        lam = np.append(lam, 0.0)

    alpha = np.zeros(m)
    alpha[S] = lam
    return alpha, max_major, False


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the unit simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    return np.maximum(v - css[rho - 1] / rho, 0.0)


def _projected_gradient(G: np.ndarray, alpha: np.ndarray, iters: int) -> np.ndarray:
    gram = G @ G.T
    step = 1.0 / max(float(np.linalg.eigvalsh(gram)[-1]), 1e-300)
    for _ in range(iters):
        alpha = project_simplex(alpha - step * (gram @ alpha))
    return alpha


def min_norm_point(G, tol: float = DEFAULT_TOL) -> MinNormResult:
    """Project the origin onto the convex hull of the rows of ``G``.

    Wolfe's minimum-norm-point algorithm, started from the shortest row. The
    answer is accepted when, for every row ``g_i``,
    ``<u, g_i - u> >= -tol * (1 + |u| |g_i|)``; ``converged`` reports whether
    that certificate holds at the returned point.

    If Wolfe's method exhausts ``50 m`` major cycles (a symptom of nearly
    affinely dependent rows) it is restarted from ``10 m`` projected-gradient
    iterations on the simplex.
    """
    G = _as_matrix(G)
    if not (tol > 0 and math.isfinite(tol)):
        raise InvalidInputError("tol must be positive")
    m = G.shape[0]
    start = np.zeros(m)
    start[int(np.argmin(np.einsum("ij,ij->i", G, G)))] = 1.0
    if m == 1:
        return _finish(G, start, 0, tol)

    stop = min(tol, _POLISH)
    alpha, iters, ok = _wolfe(G, start, stop, 50 * m)
    if not ok and certificate_gap(G, _clean_weights(alpha) @ G) < -tol:
        alpha = _projected_gradient(G, _clean_weights(alpha), 10 * m)
        alpha, more, ok = _wolfe(G, alpha, stop, 50 * m)
        iters += more
    return _finish(G, alpha, iters, tol)


def project_segment(g1, g2) -> MinNormResult:
    """Closed-form projection of the origin onto the segment ``[g1, g2]``."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if g1.ndim != 1 or g1.shape != g2.shape or g1.size == 0:
        raise InvalidInputError("segment endpoints must be 1-D vectors of equal length")
    d = g2 - g1
    dd = float(d @ d)
    if dd == 0.0:
        a1 = 1.0
    else:
        a1 = min(max(float(g2 @ d) / dd, 0.0), 1.0)
    point = a1 * g1 + (1.0 - a1) * g2
    return MinNormResult(
        weights=np.array([a1, 1.0 - a1]),
        point=point,
        norm_sq=float(point @ point),
        iterations=0,
        converged=True,
    )


@lru_cache(maxsize=8)
def _compositions(total: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``,
    in lexicographic order (stars and bars over sorted bar positions)."""
    combos = list(combinations(range(total + parts - 1), parts - 1))
    bars = np.array(combos, dtype=np.int64).reshape(len(combos), parts - 1)
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), total + parts - 1)])
    out = np.diff(edges, axis=1) - 1
    out.flags.writeable = False
    return out


def min_norm_bruteforce(G, resolution: int) -> MinNormResult:
    """Best simplex grid point with spacing ``1/resolution`` (test oracle).

    Ties go to the lexicographically smallest weight vector. Limited to
    ``m <= 4`` rows.
    """
    G = _as_matrix(G)
    m = G.shape[0]
    if m > 4:
        raise UnsupportedError("brute force is limited to m <= 4 rows")
    if isinstance(resolution, bool) or int(resolution) != resolution or resolution < 2:
        raise InvalidInputError("resolution must be an integer >= 2")
    resolution = int(resolution)
    weights = _compositions(resolution, m) / resolution
    points = weights @ G
    norms = np.einsum("ij,ij->i", points, points)
    best = int(np.argmin(norms))
    return MinNormResult(
        weights=weights[best],
        point=points[best],
        norm_sq=float(norms[best]),
        iterations=len(weights),
        converged=True,
    )
