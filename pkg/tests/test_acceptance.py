"""Acceptance criteria. Each test records one PASS/FAIL line; the lines are
printed in the pytest terminal summary (and by running this file directly)."""
import math
import time

import numpy as np
import pytest

from mosd.continuity import counterexample_pair, fit_exponent, holder_sample, probe_region
from mosd.descent import REACHED_CRITICAL, run_descent
from mosd.direction import direction_from_gradients, steepest_descent_direction
from mosd.minnorm import min_norm_bruteforce, min_norm_point
from mosd.problems import REGISTRY, Region

RESULTS: list[str] = []


def record(number, title, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def cex():
    return REGISTRY["paper-counterexample"]


@pytest.fixture(scope="module")
def ball_probe(cex):
    start = time.perf_counter()
    res = probe_region(cex, Region.ball([0, 0], 2), 2000, [1e-2, 1e-4, 1e-6], seed=42)
    return res, time.perf_counter() - start


def test_1_counterexample_exactness(cex):
    start = time.perf_counter()
    ts = np.geomspace(1e-4, 1, 52)[1:-1]
    samples = [holder_sample(cex, *counterexample_pair(t), label=t) for t in ts]
    fit = fit_exponent(samples)
    elapsed = time.perf_counter() - start
    err_lam = max(abs(s.dlambda - math.sin(t)) for s, t in zip(samples, ts))
    err_dist = max(abs(s.dist - math.sin(t) ** 2) for s, t in zip(samples, ts))
    ok = len(ts) == 50 and err_lam <= 1e-8 and err_dist <= 1e-12 and abs(fit.slope - 0.5) <= 1e-6 and elapsed < 1
    record(1, "counterexample exactness", ok,
           f"max|dlambda-sin t|={err_lam:.2e} (<=1e-8), max|dist-sin^2 t|={err_dist:.2e} (<=1e-12), "
           f"slope={fit.slope:.9f} (0.5+-1e-6), {elapsed:.3f}s (<1s)")


def test_2_sharpness(cex):
    start = time.perf_counter()
    checks = []
    for t, floor in ((1e-4, 50), (1e-6, 500)):
        q = holder_sample(cex, *counterexample_pair(t)).quotient(0.75)
        expected = math.sin(t) ** -0.5
        checks.append((t, q, expected, q > floor and abs(q / expected - 1) <= 0.05))
    elapsed = time.perf_counter() - start
    ok = all(c[3] for c in checks) and elapsed < 1
    detail = ", ".join(f"q_0.75(t={t:g})={q:.3f} vs {e:.3f}" for t, q, e, _ in checks)
    record(2, "sharpness of exponent 1/2", ok, f"{detail}, {elapsed:.3f}s (<1s)")


def test_3_holder_bound(ball_probe):
    res, elapsed = ball_probe
    ok = res.bound == 2.0 and res.max_q_half <= 2.0 and res.violations == 0 and elapsed < 10
    record(3, "Hölder bound sqrt(2LM)", ok,
           f"max q_1/2={res.max_q_half:.6f} <= {res.bound}, violations={res.violations}, "
           f"samples={len(res.samples)}, {elapsed:.2f}s (<10s)")


def test_4_norm_lipschitz(ball_probe):
    res, _ = ball_probe
    ok = res.norm_violation <= 1e-7
    record(4, "norm of direction is L-Lipschitz", ok, f"max(dnorm - dist)={res.norm_violation:.3e} (<=1e-7)")


def test_5_duality_identities():
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    worst = dict(theta=0.0, stationarity=0.0, feasibility=-np.inf, complementarity=0.0)
    ok = True
    for _ in range(500):
        G = rng.uniform(-2, 2, size=(rng.choice([1, 2, 3]), rng.choice([2, 3, 5])))
        res = direction_from_gradients(G)
        gap = abs(res.theta + 0.5 * res.lam @ res.lam)
        stat = float(np.linalg.norm(res.lam + res.weights @ G))
        # feasibility against both theta and the optimal level tau = 2 theta <= theta
        feas = max(float(np.max(G @ res.lam - res.theta)), float(np.max(G @ res.lam - res.tau)))
        comp = res.kkt.complementarity
        ok &= gap <= 1e-9 * (1 + abs(res.theta)) and stat <= 1e-9 and feas <= 1e-8 and comp <= 1e-8
        worst["theta"] = max(worst["theta"], gap)
        worst["stationarity"] = max(worst["stationarity"], stat)
        worst["feasibility"] = max(worst["feasibility"], feas)
        worst["complementarity"] = max(worst["complementarity"], comp)
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < 5
    record(5, "duality identities", ok,
           ", ".join(f"{k}={v:.2e}" for k, v in worst.items()) + f", {elapsed:.2f}s (<5s)")


def test_6_oracle_equivalence():
    rng = np.random.default_rng(6)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        G = rng.uniform(-2, 2, size=(rng.choice([2, 3]), rng.choice([2, 3, 5])))
        worst = max(worst, abs(min_norm_point(G).norm_sq - min_norm_bruteforce(G, 400).norm_sq))
    elapsed = time.perf_counter() - start
    record(6, "oracle equivalence", worst <= 5e-3 and elapsed < 30,
           f"max norm^2 discrepancy={worst:.2e} (<=5e-3), {elapsed:.2f}s (<30s)")


def test_7_descent(cex):
    start = time.perf_counter()
    tr = run_descent(cex, (1.0, 1.0))
    elapsed = time.perf_counter() - start
    r, s = tr.final.x
    monotone = all(np.all(b.f <= a.f) for a, b in zip(tr.iterates, tr.iterates[1:]))
    final_norm = steepest_descent_direction(cex, tr.final.x).norm
    ok = (tr.status == REACHED_CRITICAL and abs(s) <= 1e-3 and r <= 1e-3 and final_norm <= 1e-6
          and monotone and elapsed < 1)
    record(7, "descent reaches the critical half-line", ok,
           f"status={tr.status}, x_final=({r:.6f}, {s:.2e}), |lambda|={final_norm:.2e}, "
           f"monotone={monotone}, iters={len(tr.iterates) - 1}, {elapsed:.3f}s (<1s)")


def test_8_paper_example_points(cex):
    y = (0.75, math.sqrt(3) / 4)
    z = (1.0, math.sqrt(3) / 4)
    err_y = np.max(np.abs(steepest_descent_direction(cex, y).lam - (-0.75, -math.sqrt(3) / 4)))
    err_z = np.max(np.abs(steepest_descent_direction(cex, z).lam - (-1.0, 0.0)))
    record(8, "directions at t = pi/6", err_y <= 1e-9 and err_z <= 1e-9,
           f"|lam(y)-(-3/4,-sqrt3/4)|={err_y:.1e}, |lam(z)-(-1,0)|={err_z:.1e} (<=1e-9)")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
