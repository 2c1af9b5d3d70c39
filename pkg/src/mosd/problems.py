"""Vector objectives, their domains, and the built-in problem registry.

A :class:`Problem` bundles ``f: R^n -> R^m`` with its analytic Jacobian and a
bounded convex :class:`Region` on which it may be evaluated. Problems read
from JSON are polynomial (sums of monomials); the registry problems are
polynomial too, so every one of them can be exported and re-loaded exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from .errors import DomainError, InvalidInputError

__all__ = [
    "Region",
    "RegionConstants",
    "Problem",
    "Polynomial",
    "evaluate",
    "jacobian",
    "check_gradients",
    "estimate_region_constants",
    "problem_from_descriptor",
    "load_problem",
    "get_problem",
    "list_problems",
    "REGISTRY",
]


def as_point(x, n: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally of length ``n``."""
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a numeric point: {x!r}") from exc
    if arr.ndim != 1:
        raise InvalidInputError(f"point must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InvalidInputError(f"point has dimension {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("point has non-finite coordinates")
    return arr


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Bounded convex set: an axis-aligned box or a Euclidean ball.

    Use :meth:`box` / :meth:`ball` to construct; both validate that the
    interior is nonempty.
    """

    kind: str
    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()
    center: tuple[float, ...] = ()
    radius: float = 0.0

    @classmethod
    def box(cls, lower, upper) -> "Region":
        lo = as_point(lower)
        hi = as_point(upper, lo.shape[0])
        if lo.shape[0] == 0 or not np.all(lo < hi):
            raise InvalidInputError("box bounds need lower < upper in every coordinate")
        return cls("box", lower=tuple(lo.tolist()), upper=tuple(hi.tolist()))

    @classmethod
    def ball(cls, center, radius: float) -> "Region":
        c = as_point(center)
        if c.shape[0] == 0 or not (math.isfinite(radius) and radius > 0):
            raise InvalidInputError("ball needs a nonempty center and a finite radius > 0")
        return cls("ball", center=tuple(c.tolist()), radius=float(radius))

    @property
    def dim(self) -> int:
        return len(self.lower) if self.kind == "box" else len(self.center)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,) or not np.all(np.isfinite(x)):
            return False
        if self.kind == "box":
            return bool(np.all(x >= self.lower) and np.all(x <= self.upper))
        return float(np.linalg.norm(x - np.asarray(self.center))) <= self.radius

    def max_norm(self) -> float:
        """Largest Euclidean norm of a point in the region."""
        if self.kind == "box":
            corner = np.maximum(np.abs(self.lower), np.abs(self.upper))
            return float(np.linalg.norm(corner))
        return float(np.linalg.norm(self.center)) + self.radius

    def diameter(self) -> float:
        if self.kind == "box":
            return float(np.linalg.norm(np.subtract(self.upper, self.lower)))
        return 2.0 * self.radius

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """Draw ``k`` points uniformly from the region, shape ``(k, dim)``.

        Rows are generated in order from a single draw, so a run with a
        larger ``k`` on an identically seeded generator extends the smaller
        run's sample rather than replacing it.
        """
        n = self.dim
        if self.kind == "box":
            lo, hi = np.asarray(self.lower), np.asarray(self.upper)
            return lo + (hi - lo) * rng.random((k, n))
        # first n coordinates of a uniform point on the (n+1)-sphere in
        # R^(n+2) are uniform in the n-ball
        g = rng.standard_normal((k, n + 2))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return np.asarray(self.center) + self.radius * g[:, :n]

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "box":
            return {"kind": "box", "lower": list(self.lower), "upper": list(self.upper)}
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Region":
        kind = d.get("kind")
        try:
            if kind == "box":
                return cls.box(d["lower"], d["upper"])
            if kind == "ball":
                return cls.ball(d["center"], float(d["radius"]))
        except KeyError as exc:
            raise InvalidInputError(f"region of kind {kind!r} is missing {exc}") from exc
        raise InvalidInputError(f"unknown region kind {kind!r}")


@dataclass(frozen=True)
class RegionConstants:
    """Gradient Lipschitz constant ``L`` and gradient-norm bound ``M``."""

    L: float
    M: float
    samples: int
    source: str = "estimated"

    def holder_constant(self) -> float:
        """``sqrt(2 L M)``, the Hölder constant of the direction map."""
        return math.sqrt(2.0 * self.L * self.M)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


def _coeff(value) -> float:
    if isinstance(value, bool):
        raise InvalidInputError("coefficient must be a number")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"bad rational coefficient {value!r}") from exc
    else:
        raise InvalidInputError(f"coefficient must be a number, got {value!r}")
    if not math.isfinite(out):
        raise InvalidInputError("coefficient must be finite")
    return out


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Sum of monomials ``c_k * prod_j x_j ** e_kj`` in ``n`` variables."""

    coeffs: np.ndarray  # (T,)
    exponents: np.ndarray  # (T, n), non-negative ints

    @classmethod
    def from_terms(cls, terms, n: int) -> "Polynomial":
        coeffs, exps = [], []
        for term in terms:
            try:
                c, e = term["coeff"], term["exponents"]
            except (KeyError, TypeError) as exc:
                raise InvalidInputError(f"term needs 'coeff' and 'exponents': {term!r}") from exc
            if len(e) != n or any(isinstance(k, bool) or not isinstance(k, int) or k < 0 for k in e):
                raise InvalidInputError(f"exponents must be {n} non-negative integers: {e!r}")
            coeffs.append(_coeff(c))
            exps.append(list(e))
        return cls(np.asarray(coeffs, dtype=float), np.asarray(exps, dtype=np.int64).reshape(-1, n))

    def __post_init__(self):
        # derivative in x_j: coefficients c_k * e_kj, exponents with e_kj lowered
        n = self.exponents.shape[1]
        d_coeffs = self.coeffs[None, :] * self.exponents.T
        d_exps = np.repeat(self.exponents[None, :, :], n, axis=0)
        for j in range(n):
            d_exps[j, :, j] = np.maximum(d_exps[j, :, j] - 1, 0)
        object.__setattr__(self, "_d_coeffs", d_coeffs)
        object.__setattr__(self, "_d_exps", d_exps)

    def value(self, x: np.ndarray) -> float:
        if self.coeffs.size == 0:
            return 0.0
        return float(self.coeffs @ np.prod(x ** self.exponents, axis=1))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.coeffs.size == 0:
            return np.zeros(x.shape[0])
        return np.einsum("jk,jk->j", self._d_coeffs, np.prod(x ** self._d_exps, axis=2))

    def to_terms(self) -> list[dict[str, Any]]:
        return [
            {"coeff": float(c), "exponents": [int(k) for k in e]}
            for c, e in zip(self.coeffs, self.exponents)
        ]


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Problem:
    """Smooth vector objective with analytic gradients.

    ``fun(x)`` returns the ``m`` objective values and ``jac(x)`` the ``(m, n)``
    matrix whose row ``i`` is the gradient of objective ``i``. Callers should
    go through :func:`evaluate` / :func:`jacobian`, which validate inputs.

    ``constants``, when present, maps a region to analytically known
    ``L``/``M``; ``descriptor`` is the JSON form for polynomial problems.
    """

    name: str
    n: int
    m: int
    fun: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    domain: Region
    constants: Callable[[Region], RegionConstants] | None = None
    descriptor: Mapping[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidInputError("a problem needs n >= 1 and m >= 1")
        if self.domain.dim != self.n:
            raise InvalidInputError("domain dimension does not match n")

    def evaluate(self, x) -> np.ndarray:
        return evaluate(self, x)

    def jacobian(self, x) -> np.ndarray:
        return jacobian(self, x)


def _checked(problem: Problem, x) -> np.ndarray:
    x = as_point(x, problem.n)
    if not problem.domain.contains(x):
        raise DomainError(f"{x.tolist()} is outside the domain of {problem.name!r}")
    return x


def evaluate(problem: Problem, x) -> np.ndarray:
    """Objective vector ``(f_1(x), ..., f_m(x))``."""
    x = _checked(problem, x)
    return np.asarray(problem.fun(x), dtype=float).reshape(problem.m)


def jacobian(problem: Problem, x) -> np.ndarray:
    """Stacked gradients, shape ``(m, n)``; row ``i`` is the gradient of ``f_i``."""
    x = _checked(problem, x)
    return np.asarray(problem.jac(x), dtype=float).reshape(problem.m, problem.n)


def check_gradients(problem: Problem, x, h: float = 1e-6) -> float:
    """Max relative error of the analytic Jacobian against central differences.

    The error of entry ``(i, j)`` is divided by ``max(1, |analytic value|)``.
    Every stencil point ``x +- h e_j`` must lie in the domain.
    """
    if not (h > 0 and math.isfinite(h)):
        raise InvalidInputError("step h must be positive")
    x = _checked(problem, x)
    analytic = jacobian(problem, x)
    numeric = np.empty_like(analytic)
    for j in range(problem.n):
        step = np.zeros(problem.n)
        step[j] = h
        numeric[:, j] = (evaluate(problem, x + step) - evaluate(problem, x - step)) / (2 * h)
    return float(np.max(np.abs(numeric - analytic) / np.maximum(1.0, np.abs(analytic))))


def estimate_region_constants(
    problem: Problem, region: Region, k: int = 10000, seed: int = 42
) -> RegionConstants:
    """Sampled estimates of ``L`` and ``M`` over ``region``.

    ``M`` is the largest gradient norm over ``k`` uniform points; ``L`` the
    largest difference quotient ``|grad f_i(y) - grad f_i(z)| / |y - z|`` over
    ``k`` uniform pairs. Both are maxima over samples, so they under-estimate
    the true constants and grow monotonically with ``k`` for a fixed seed.
    """
    if isinstance(k, bool) or int(k) != k or k < 2:
        raise InvalidInputError("k must be an integer >= 2")
    k = int(k)
    if region.dim != problem.n:
        raise InvalidInputError("region dimension does not match the problem")
    points_rng, y_rng, z_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))

    M = 0.0
    for x in region.sample(points_rng, k):
        M = max(M, float(np.max(np.linalg.norm(jacobian(problem, x), axis=1))))

    L = 0.0
    for y, z in zip(region.sample(y_rng, k), region.sample(z_rng, k)):
        d = float(np.linalg.norm(y - z))
        if d < 1e-12:
            continue
        diff = np.linalg.norm(jacobian(problem, y) - jacobian(problem, z), axis=1)
        L = max(L, float(np.max(diff)) / d)
    return RegionConstants(L=L, M=M, samples=k, source="estimated")


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------


def problem_from_descriptor(
    desc: Mapping[str, Any], constants: Callable[[Region], RegionConstants] | None = None
) -> Problem:
    """Build a polynomial :class:`Problem` from its JSON descriptor."""
    try:
        name = str(desc["name"])
        n = desc["n"]
        objectives = desc["objectives"]
        domain = Region.from_dict(desc["domain"])
    except KeyError as exc:
        raise InvalidInputError(f"problem descriptor is missing {exc}") from exc
    except TypeError as exc:
        raise InvalidInputError("problem descriptor must be a JSON object") from exc
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidInputError("'n' must be a positive integer")
    if not isinstance(objectives, list) or not objectives:
        raise InvalidInputError("'objectives' must be a nonempty list")
    polys = []
    for obj in objectives:
        if not isinstance(obj, Mapping) or not isinstance(obj.get("terms"), list):
            raise InvalidInputError("each objective needs a 'terms' list")
        polys.append(Polynomial.from_terms(obj["terms"], n))
    polys = tuple(polys)

    def fun(x):
        return np.array([p.value(x) for p in polys])

    def jac(x):
        return np.vstack([p.gradient(x) for p in polys])

    canonical = {
        "name": name,
        "n": n,
        "objectives": [{"terms": p.to_terms()} for p in polys],
        "domain": domain.to_dict(),
    }
    return Problem(name, n, len(polys), fun, jac, domain, constants=constants, descriptor=canonical)


def load_problem(path) -> Problem:
    """Read a JSON problem descriptor from ``path``."""
    try:
        desc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
    return problem_from_descriptor(desc)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

# Every registry problem is defined on all of R^n; the domain is a large box
# because regions must be bounded.
_DEFAULT_HALF_WIDTH = 1e3


def _box(n: int) -> dict[str, Any]:
    return {"kind": "box", "lower": [-_DEFAULT_HALF_WIDTH] * n, "upper": [_DEFAULT_HALF_WIDTH] * n}


def _term(coeff, *exponents):
    return {"coeff": coeff, "exponents": list(exponents)}


def _paper_counterexample() -> Problem:
    # f_1(r, s) = (r^2 + s^2) / 2, f_2(r, s) = r
    desc = {
        "name": "paper-counterexample",
        "n": 2,
        "objectives": [
            {"terms": [_term("1/2", 2, 0), _term("1/2", 0, 2)]},
            {"terms": [_term(1, 1, 0)]},
        ],
        "domain": _box(2),
    }

    def constants(region: Region) -> RegionConstants:
        # grad f_1 is the identity map, grad f_2 = (1, 0)
        return RegionConstants(L=1.0, M=max(region.max_norm(), 1.0), samples=0, source="analytic")

    return problem_from_descriptor(desc, constants)


def _scalar_quadratic(n: int = 2) -> Problem:
    desc = {
        "name": "scalar-quadratic",
        "n": n,
        "objectives": [{"terms": [_term("1/2", *[2 * (i == j) for i in range(n)]) for j in range(n)]}],
        "domain": _box(n),
    }

    def constants(region: Region) -> RegionConstants:
        return RegionConstants(L=1.0, M=region.max_norm(), samples=0, source="analytic")

    return problem_from_descriptor(desc, constants)


def _opposed_pair(n: int = 2) -> Problem:
    e1 = [1] + [0] * (n - 1)
    desc = {
        "name": "opposed-pair",
        "n": n,
        "objectives": [{"terms": [_term(1, *e1)]}, {"terms": [_term(-1, *e1)]}],
        "domain": _box(n),
    }

    def constants(region: Region) -> RegionConstants:
        return RegionConstants(L=0.0, M=1.0, samples=0, source="analytic")

    return problem_from_descriptor(desc, constants)


def _rosenbrock_pair() -> Problem:
    # f_a(x, y) = (a - x)^2 + 100 (y - x^2)^2 for a = 1 and a = -1;
    # minimizers (1, 1) and (-1, 1)
    def rosen(a: int):
        return {
            "terms": [
                _term(a * a, 0, 0),
                _term(-2 * a, 1, 0),
                _term(1, 2, 0),
                _term(100, 0, 2),
                _term(-200, 2, 1),
                _term(100, 4, 0),
            ]
        }

    desc = {"name": "rosenbrock-pair", "n": 2, "objectives": [rosen(1), rosen(-1)], "domain": _box(2)}
    return problem_from_descriptor(desc)


REGISTRY: dict[str, Problem] = {
    p.name: p for p in (_paper_counterexample(), _scalar_quadratic(), _opposed_pair(), _rosenbrock_pair())
}


def list_problems() -> list[str]:
    return list(REGISTRY)


def get_problem(name_or_path: str) -> Problem:
    """Registry lookup by name, falling back to a JSON file path."""
    if name_or_path in REGISTRY:
        return REGISTRY[name_or_path]
    path = Path(name_or_path)
    if path.is_file():
        return load_problem(path)
    raise InvalidInputError(
        f"unknown problem {name_or_path!r}; known: {', '.join(REGISTRY)} (or a JSON file path)"
    )
