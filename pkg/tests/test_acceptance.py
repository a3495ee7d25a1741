"""End-to-end acceptance runs at experiment scale.

One test per numbered criterion; each prints a [PASS]/[FAIL] line with
the measured quantities before asserting, so a -s run reads as a
checklist.  Everything is keyed off the shared seed and dedicated
stream ids, so reruns are bit-identical.
"""

import time

import numpy as np
import pytest

from dropout_sgd_infer.dropout_moments import (
    e_dad,
    e_dadbd,
    e_dadbdcd,
    enumerate_expectation,
)
from dropout_sgd_infer.experiments import (
    ExperimentConfig,
    beta_star_equidistant,
    oracle_error_medians,
    run_coverage_cell,
)
from dropout_sgd_infer.gd_dropout import (
    GdProblem,
    asymptotic_cov_xi,
    coupled_gmc_run,
    empirical_contraction_sq,
    exact_contraction_sq,
    lr_bound_gd,
)
from dropout_sgd_infer.linalg import moment_inequality_gap
from dropout_sgd_infer.longrun_cov import BlockSchedule, CovState, offline_nbm
from dropout_sgd_infer.randgen import RngStream, sample_dropout, stream_sample
from dropout_sgd_infer.sgd_dropout import SgdConfig, SgdState, lr_admissible_q2, sgd_step

SEED = 20240801


def _report(number, label, ok, detail):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion-{number:02d} {label}: {detail}")
    assert ok, f"criterion-{number:02d} {label}: {detail}"


def test_criterion_01_coverage_pinned_cell():
    config = ExperimentConfig(d=3, p=0.9, alpha=(0.01,), n=200_000, runs=200,
                              c=1.0, zeta=2.0, seed=SEED)
    t0 = time.time()
    results = run_coverage_cell(config, workers=1)
    elapsed = time.time() - t0
    last = results[-1]
    rate = last["projection"][0]
    ok = abs(rate - 0.945) <= 0.05 and elapsed < 300.0
    _report(1, "projection coverage at the pinned cell", ok,
            f"rate={rate:.3f} target=0.945 tol=0.05 elapsed={elapsed:.0f}s "
            f"(limit 300s single-threaded)")


def test_criterion_02_coverage_additional_cells():
    cells = [
        ("d=3 p=0.5 a=0.1 n=3e5", dict(d=3, p=0.5, alpha=(0.1,), n=300_000), 0.950),
        ("d=20 p=0.5 a=0.05 n=3e5", dict(d=20, p=0.5, alpha=(0.05,), n=300_000), 0.960),
        ("d=3 p=0.9 a=0.1 n=2e5", dict(d=3, p=0.9, alpha=(0.1,), n=200_000), 0.960),
    ]
    in_band = []
    rising = []
    details = []
    for name, kw, target in cells:
        config = ExperimentConfig(runs=200, c=1.0, zeta=2.0, seed=SEED, **kw)
        results = run_coverage_cell(config, workers=4)
        first = results[0]["projection"][0]
        last = results[-1]["projection"][0]
        in_band.append(abs(last - target) <= 0.05)
        rising.append(first < last)
        details.append(f"{name}: first={first:.3f} last={last:.3f} target={target}")
    ok = all(in_band) and sum(rising) >= 2
    _report(2, "projection coverage across three more cells", ok,
            "; ".join(details) + f"; rising={sum(rising)}/3 (need >=2)")


def test_criterion_03_contraction_boundary_table():
    design = RngStream(SEED, stream_id=0).normal(size=(100, 5))
    gram = design.T @ design
    bound = lr_bound_gd(gram)
    below = above = 0
    for r in range(100):
        masks = RngStream(SEED, stream_id=10_000 + r)
        lo = empirical_contraction_sq(gram, 0.9, 0.99 * bound, 500, masks)
        hi = empirical_contraction_sq(gram, 0.9, 1.02 * bound, 500, masks)
        below += lo < 1.0
        above += hi > 1.0
    ok = below >= 95 and above >= 95
    _report(3, "sampled contraction brackets the stability bound", ok,
            f"r2<1 at 0.99x bound in {below}/100, r2>1 at 1.02x bound in "
            f"{above}/100 (need >=95 each, N=500 masks)")


def test_criterion_04_streaming_covariance_equals_batch():
    cases = [(d, z) for d in (1, 3, 5) for z in (1.5, 2.0)]
    worst = 0.0
    n = 1000
    for rep in range(20):
        d, zeta = cases[rep % len(cases)]
        rng = RngStream(SEED, stream_id=4000 + rep)
        drift = beta_star_equidistant(d)
        betas = (0.3 * drift
                 + 0.01 * np.cumsum(rng.normal(size=(n, d)), axis=0)
                 + rng.normal(size=(n, d)))
        floor = 1e-4 * max(1.0, float(np.max(betas ** 2)))
        schedule = BlockSchedule(1.0, zeta)
        state = CovState(d, schedule)
        for k in range(n):
            state.update(betas[k])
            online = state.finalize()
            offline = offline_nbm(betas[: k + 1], schedule)
            denom = max(float(np.max(np.abs(online))),
                        float(np.max(np.abs(offline))), floor)
            rel = float(np.max(np.abs(online - offline))) / denom
            worst = max(worst, rel)
    ok = worst <= 1e-10
    _report(4, "online estimator equals offline recomputation at every prefix",
            ok, f"worst relative gap {worst:.3e} over 20 traces x {n} prefixes "
            "(tol 1e-10)")


def test_criterion_05_mask_moments_match_enumeration():
    ps = (0.3, 0.5, 0.9)
    worst = 0.0
    for i in range(100):
        rng = RngStream(SEED, stream_id=7000 + i)
        d = 1 + i % 8
        p = ps[i % len(ps)]
        a = rng.normal(size=(d, d))
        b = rng.normal(size=(d, d))
        c = rng.normal(size=(d, d))
        pairs = [
            (e_dad(a, p),
             enumerate_expectation(lambda m: np.diag(m) @ a @ np.diag(m), d, p)),
            (e_dadbd(a, b, p),
             enumerate_expectation(
                 lambda m: np.diag(m) @ a @ np.diag(m) @ b @ np.diag(m), d, p)),
            (e_dadbdcd(a, b, c, p),
             enumerate_expectation(
                 lambda m: (np.diag(m) @ a @ np.diag(m) @ b @ np.diag(m)
                            @ c @ np.diag(m)), d, p)),
        ]
        for got, exact in pairs:
            scale = max(1.0, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(got - exact))) / scale)
    ok = worst <= 1e-12
    _report(5, "closed-form mask moments match brute-force enumeration", ok,
            f"worst scaled deviation {worst:.3e} over 100 instances, d<=8, "
            f"p in {ps} (tol 1e-12)")


def test_criterion_06_averaged_iterate_covariance_pieces():
    ps = (0.3, 0.5, 0.9)
    worst_s = worst_resid = 0.0
    for rep in range(10):
        rng = RngStream(SEED, stream_id=5000 + rep)
        x = rng.normal(size=(12, 3))
        beta = rng.normal(size=3)
        p = ps[rep % len(ps)]
        cov = asymptotic_cov_xi(x, beta, p, 0.02)
        gram = x.T @ x
        xbar = gram - np.diag(np.diag(gram))
        gram_p = p * gram + (1.0 - p) * np.diag(np.diag(gram))
        inv = np.linalg.inv(gram_p)
        s0 = inv @ (gram @ np.outer(beta, beta) @ gram + gram) @ inv

        def noise_form(mask):
            h = np.diag(mask) @ xbar @ (p * np.eye(3) - np.diag(mask))
            return h @ s0 @ h.T

        exact_s = enumerate_expectation(noise_form, 3, p)
        scale = max(1.0, float(np.max(np.abs(exact_s))))
        worst_s = max(worst_s, float(np.max(np.abs(cov.S - exact_s))) / scale)
        drift = p * gram_p
        resid = np.linalg.norm(cov.V0 @ drift + drift @ cov.V0 - cov.S)
        worst_resid = max(worst_resid, resid / max(np.linalg.norm(cov.S), 1e-300))

    one_dim = asymptotic_cov_xi(np.array([[2.0], [1.0]]), np.array([0.7]), 0.5, 0.3)
    degenerate_zero = (np.all(one_dim.Xi == 0.0) and np.all(one_dim.V0 == 0.0)
                       and np.all(one_dim.S == 0.0))
    ok = worst_s <= 1e-10 and worst_resid <= 1e-10 and degenerate_zero
    _report(6, "averaged-iterate covariance assembly", ok,
            f"noise term vs enumeration {worst_s:.3e}, Lyapunov residual "
            f"{worst_resid:.3e} (tol 1e-10 each), one-dim pieces exactly zero: "
            f"{degenerate_zero}")


def test_criterion_07_coupled_chains_contract():
    # fixed-design chains: late-window geometric gap ratio vs the exact rate
    excesses = []
    merged = 0
    for r in range(100):
        rng = RngStream(SEED, stream_id=1000 + r)
        raw = rng.normal(size=(40, 2))
        q, _ = np.linalg.qr(raw)
        x = 6.0 * q + 0.05 * rng.normal(size=(40, 2))
        y = rng.normal(size=40)
        gram = x.T @ x
        alpha = 0.99 * lr_bound_gd(gram)
        problem = GdProblem(x, y, 0.9, alpha)
        exact = exact_contraction_sq(gram, 0.9, alpha)
        b0 = rng.normal(size=2)
        b1 = rng.normal(size=2)
        gaps = coupled_gmc_run(problem, b0, b1, 500, rng)
        if gaps[499] == 0.0:
            merged += 1
            ratio = 0.0  # chains coalesced: contraction already complete
        else:
            ratio = (gaps[499] / gaps[249]) ** (1.0 / 250.0)
        excesses.append(ratio - np.sqrt(exact))
    gd_ok = np.mean(excesses) <= 0.05 and max(excesses) <= 0.05

    # streaming chains: shared data and masks pull the gap down by step 500
    beta_star = np.linspace(0.0, 1.0, 3)
    config = SgdConfig(d=3, p=0.9, alpha=0.05, beta_star=beta_star)
    wins = 0
    for r in range(200):
        rng = RngStream(SEED, stream_id=2000 + r)
        a = SgdState(beta=rng.normal(size=3), step=0)
        b = SgdState(beta=rng.normal(size=3), step=0)
        g250 = g500 = None
        for k in range(1, 501):
            sample = stream_sample(beta_star, rng)
            mask = sample_dropout(3, 0.9, rng)
            a = sgd_step(config, a, sample, mask)
            b = sgd_step(config, b, sample, mask)
            if k == 250:
                diff = a.beta - b.beta
                g250 = float(np.sqrt((diff * diff).sum()))
            elif k == 500:
                diff = a.beta - b.beta
                g500 = float(np.sqrt((diff * diff).sum()))
        wins += g500 <= g250
    sgd_ok = wins >= 198
    _report(7, "coupled chains contract on both data models", gd_ok and sgd_ok,
            f"gd max ratio excess {max(excesses):+.4f} over sqrt(exact) "
            f"(allow +0.05, merged={merged}); sgd gap shrank in {wins}/200 "
            "(need >=198)")


def test_criterion_08_estimator_error_decay_rate():
    meds = oracle_error_medians(3, 50, [10_000, 1_000_000], SEED, 1.0, 1.5,
                                workers=4)
    ratio = meds[0] / meds[1]
    target = 10.0 ** (2.0 / 3.0)
    ok = target / 3.0 <= ratio <= target * 3.0
    _report(8, "estimator error decays at the block-schedule rate", ok,
            f"median errors {meds[0]:.4f} -> {meds[1]:.4f}, ratio {ratio:.2f}, "
            f"target {target:.2f} within factor 3")


def test_criterion_09_two_point_moment_inequality():
    rng = RngStream(SEED, stream_id=6000)
    worst_gap = -np.inf
    for _ in range(10_000):
        d = 1 + int(rng.uniform() * 6)
        q = 2.0 + 2.0 * rng.uniform()
        x = rng.normal(size=d)
        y = rng.normal(size=d)
        lhs, rhs_i, _ = moment_inequality_gap(x, y, q)
        slack = 1e-9 * max(rhs_i, 1.0)
        worst_gap = max(worst_gap, lhs - rhs_i - slack)
    holds = worst_gap <= 0.0

    lhs, rhs_i, _ = moment_inequality_gap(
        np.array([1.3, 0.0]), np.array([0.0, -0.8]), 2.0)
    tight = (abs(lhs - rhs_i) <= 1e-12 * max(rhs_i, 1.0)
             and abs(lhs - 0.64) <= 1e-12)
    ok = holds and tight
    _report(9, "two-point moment inequality", ok,
            f"10000 random triples hold (worst slackened gap {worst_gap:.3e}); "
            f"orthogonal q=2 case tight: lhs={lhs:.15f} rhs={rhs_i:.15f}")


def test_criterion_10_scalar_admissibility_threshold():
    draws = RngStream(SEED, stream_id=3000).normal(size=(1_000_000, 1))
    config = SgdConfig(d=1, p=0.9, alpha=0.01, beta_star=np.array([1.0]))
    threshold, _ = lr_admissible_q2(config, draws)
    rel = abs(threshold - 2.0 / 3.0) / (2.0 / 3.0)
    ok = rel <= 0.02
    _report(10, "scalar learning-rate threshold", ok,
            f"threshold {threshold:.5f} vs 2/3, relative error {rel:.4f} "
            "(tol 0.02, 1e6 draws)")
