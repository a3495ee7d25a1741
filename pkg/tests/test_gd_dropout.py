"""Fixed-design dropout GD: steps, minimizer, contraction, covariance."""

import numpy as np
import pytest

from dropout_sgd_infer.dropout_moments import enumerate_expectation
from dropout_sgd_infer.gd_dropout import (
    GdProblem,
    GdState,
    agd_average,
    asymptotic_cov_xi,
    coupled_gmc_run,
    empirical_contraction_sq,
    exact_contraction_sq,
    gd_step,
    l2_minimizer_gd,
    lr_bound_gd,
)
from dropout_sgd_infer.randgen import DropoutMask, RngStream, sample_dropout


def _random_problem(rng, n, d, p, alpha):
    x = rng.normal(size=(n, d))
    y = rng.normal(size=n)
    return GdProblem(x, y, p, alpha)


def test_problem_validation():
    with pytest.raises(ValueError):
        GdProblem(np.eye(3), np.zeros(2), 0.5, 0.1)
    with pytest.raises(ValueError):
        GdProblem(np.eye(2), np.zeros(2), 0.0, 0.1)
    with pytest.raises(ValueError):
        GdProblem(np.eye(2), np.zeros(2), 0.5, 0.0)
    dead_col = np.array([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        GdProblem(dead_col, np.zeros(2), 0.5, 0.1)


def test_gd_step_frozen_value():
    problem = GdProblem(np.eye(2), np.array([1.0, 1.0]), 0.5, 0.5)
    state = GdState(beta=np.zeros(2), step=0)
    mask = DropoutMask(retained=np.array([1, 1], dtype=np.int64), p=0.5)
    out = gd_step(problem, state, mask)
    # residual is y, update is alpha * X^T y = 0.5 * (1, 1)
    assert np.array_equal(out.beta, np.array([0.5, 0.5]))
    assert out.step == 1


def test_gd_step_zero_mask_freezes_iterate():
    problem = GdProblem(np.eye(2), np.array([3.0, -1.0]), 0.5, 0.7)
    state = GdState(beta=np.array([0.2, 0.4]), step=5)
    mask = DropoutMask(retained=np.zeros(2, dtype=np.int64), p=0.5)
    out = gd_step(problem, state, mask)
    assert np.array_equal(out.beta, state.beta)
    assert out.step == 6


def test_gd_step_rejects_mismatched_mask():
    problem = GdProblem(np.eye(2), np.zeros(2), 0.5, 0.1)
    state = GdState(beta=np.zeros(2), step=0)
    mask = DropoutMask(retained=np.ones(3, dtype=np.int64), p=0.5)
    with pytest.raises(ValueError):
        gd_step(problem, state, mask)


def test_minimizer_identity_design():
    y = np.array([2.0, -1.0])
    for p in (0.3, 0.7, 1.0):
        problem = GdProblem(np.eye(2), y, p, 0.1)
        # identity Gram is invariant under the retain-rate rescaling
        assert np.allclose(problem.minimizer, y, rtol=0, atol=1e-14)


def test_minimizer_stationarity():
    rng = np.random.default_rng(307)
    problem = _random_problem(rng, 30, 4, 0.6, 0.01)
    beta = l2_minimizer_gd(problem)
    gram_p = 0.6 * problem.gram + 0.4 * np.diag(np.diag(problem.gram))
    lhs = gram_p @ beta
    rhs = problem.X.T @ problem.y
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


def test_minimizer_full_retention_matches_least_squares():
    rng = np.random.default_rng(311)
    x = rng.normal(size=(25, 3))
    y = rng.normal(size=25)
    problem = GdProblem(x, y, 1.0, 0.01)
    oracle = np.linalg.solve(x.T @ x, x.T @ y)
    assert np.allclose(problem.minimizer, oracle, rtol=1e-10, atol=1e-12)


def test_lr_bound_frozen_values():
    assert lr_bound_gd(np.eye(2)) == pytest.approx(2.0, rel=1e-12)
    assert lr_bound_gd(np.diag([4.0, 1.0])) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        lr_bound_gd(np.zeros((2, 2)))


def test_exact_contraction_frozen_values():
    assert exact_contraction_sq(np.eye(2), 0.5, 1.0) == pytest.approx(0.5, abs=1e-14)
    assert exact_contraction_sq(np.eye(2), 0.5, 2.0) == pytest.approx(1.0, abs=1e-14)
    # diagonal design at the boundary rate: the top eigendirection sits at 1
    for p in (0.3, 0.5, 0.9):
        got = exact_contraction_sq(np.diag([4.0, 1.0]), p, 0.5)
        assert got == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d,p", [(1, 0.5), (2, 0.3), (3, 0.9), (4, 0.6)])
def test_exact_contraction_matches_enumeration(d, p):
    rng = np.random.default_rng(400 + d)
    x = rng.normal(size=(3 * d, d))
    gram = x.T @ x
    alpha = 0.8 * lr_bound_gd(gram)

    def second_moment(mask):
        a = np.eye(d) - alpha * np.diag(mask) @ gram @ np.diag(mask)
        return a.T @ a

    exact_m = enumerate_expectation(second_moment, d, p)
    oracle = float(np.max(np.linalg.eigvalsh(0.5 * (exact_m + exact_m.T))))
    got = exact_contraction_sq(gram, p, alpha)
    assert got == pytest.approx(oracle, rel=1e-12)


def test_exact_contraction_below_one_inside_admissible_range():
    rng = np.random.default_rng(419)
    x = rng.normal(size=(20, 3))
    gram = x.T @ x
    bound = lr_bound_gd(gram)
    for p in (0.3, 0.9):
        for factor in (0.1, 0.5, 0.9, 0.99):
            assert exact_contraction_sq(gram, p, factor * bound) < 1.0


def test_empirical_contraction_full_retention_is_exact():
    rng_design = np.random.default_rng(421)
    x = rng_design.normal(size=(15, 3))
    gram = x.T @ x
    alpha = 0.5 * lr_bound_gd(gram)
    got = empirical_contraction_sq(gram, 1.0, alpha, 50, RngStream(seed=0, stream_id=0))
    assert got == pytest.approx(exact_contraction_sq(gram, 1.0, alpha), rel=1e-12)


def test_empirical_contraction_concentrates_on_exact():
    rng_design = np.random.default_rng(431)
    x = rng_design.normal(size=(30, 4))
    gram = x.T @ x
    alpha = 0.7 * lr_bound_gd(gram)
    exact = exact_contraction_sq(gram, 0.8, alpha)
    got = empirical_contraction_sq(gram, 0.8, alpha, 8000, RngStream(seed=7, stream_id=1))
    assert got == pytest.approx(exact, abs=0.05 * max(1.0, exact))
    with pytest.raises(ValueError):
        empirical_contraction_sq(gram, 0.8, alpha, 0, RngStream(seed=7, stream_id=2))


def test_asymptotic_cov_one_dimension_is_exactly_zero():
    cov = asymptotic_cov_xi(np.array([[2.0], [1.0]]), np.array([0.7]), 0.5, 0.3)
    assert np.all(cov.S == 0.0)
    assert np.all(cov.V0 == 0.0)
    assert np.all(cov.Bp == 0.0)
    assert np.all(cov.Xi == 0.0)


def test_asymptotic_cov_noise_term_matches_enumeration():
    rng = np.random.default_rng(443)
    x = rng.normal(size=(12, 3))
    beta = rng.normal(size=3)
    p = 0.6
    cov = asymptotic_cov_xi(x, beta, p, 0.05)
    gram = x.T @ x
    gram_p = p * gram + (1.0 - p) * np.diag(np.diag(gram))
    inv = np.linalg.inv(gram_p)
    s0 = inv @ (gram @ np.outer(beta, beta) @ gram + gram) @ inv
    assert np.allclose(cov.S0, s0, rtol=1e-10, atol=1e-12)
    xbar = gram - np.diag(np.diag(gram))

    def noise_form(mask):
        h = np.diag(mask) @ xbar @ (p * np.eye(3) - np.diag(mask))
        return h @ s0 @ h.T

    exact_s = enumerate_expectation(noise_form, 3, p)
    scale = max(1.0, float(np.max(np.abs(exact_s))))
    assert np.max(np.abs(cov.S - exact_s)) <= 1e-12 * scale


def test_asymptotic_cov_solves_its_lyapunov_equations():
    rng = np.random.default_rng(449)
    x = rng.normal(size=(20, 4))
    beta = rng.normal(size=4)
    p, alpha = 0.8, 0.02
    cov = asymptotic_cov_xi(x, beta, p, alpha)
    gram = x.T @ x
    gram_p = p * gram + (1.0 - p) * np.diag(np.diag(gram))
    drift = p * gram_p
    s_norm = np.linalg.norm(cov.S)
    assert np.linalg.norm(cov.V0 @ drift + drift @ cov.V0 - cov.S) <= 1e-10 * s_norm
    bp_rhs = p * p * (gram_p @ cov.V0 @ gram_p)
    assert np.linalg.norm(cov.Bp @ drift + drift @ cov.Bp - bp_rhs) <= (
        1e-10 * max(np.linalg.norm(bp_rhs), 1e-12))
    # independent route through numpy's Kronecker solve
    kron_sys = np.kron(np.eye(4), drift) + np.kron(drift, np.eye(4))
    v0_oracle = np.linalg.solve(kron_sys, cov.S.flatten(order="F")).reshape((4, 4), order="F")
    assert np.allclose(cov.V0, 0.5 * (v0_oracle + v0_oracle.T), rtol=1e-9, atol=1e-12)
    assert np.allclose(cov.Xi, cov.V0 + alpha * cov.Bp, rtol=0, atol=1e-15)


def test_asymptotic_cov_validation():
    x = np.ones((1, 65))
    with pytest.raises(ValueError):
        asymptotic_cov_xi(x, np.zeros(65), 0.5, 0.1)
    with pytest.raises(ValueError):
        asymptotic_cov_xi(np.eye(2), np.zeros(3), 0.5, 0.1)
    with pytest.raises(ValueError):
        asymptotic_cov_xi(np.eye(2), np.zeros(2), 0.0, 0.1)
    with pytest.raises(ValueError):
        asymptotic_cov_xi(np.eye(2), np.zeros(2), 0.5, -0.1)


def test_coupled_run_with_equal_starts_stays_merged():
    problem = GdProblem(np.eye(3), np.ones(3), 0.7, 0.4)
    start = np.array([1.0, -2.0, 0.5])
    gaps = coupled_gmc_run(problem, start, start.copy(), 50, RngStream(seed=3, stream_id=0))
    assert len(gaps) == 50
    assert all(g == 0.0 for g in gaps)


def test_coupled_run_contracts_and_replays_deterministically():
    rng = np.random.default_rng(457)
    x = rng.normal(size=(25, 3))
    y = rng.normal(size=25)
    gram = x.T @ x
    problem = GdProblem(x, y, 0.9, 0.3 * lr_bound_gd(gram))
    b0 = np.array([5.0, -5.0, 5.0])
    b1 = np.array([-5.0, 5.0, -5.0])
    gaps = coupled_gmc_run(problem, b0, b1, 120, RngStream(seed=11, stream_id=4))
    assert gaps[-1] < 1e-3 * gaps[0]

    replay = RngStream(seed=11, stream_id=4)
    state_a = GdState(beta=b0.copy(), step=0)
    state_b = GdState(beta=b1.copy(), step=0)
    manual = []
    for _ in range(120):
        mask = sample_dropout(3, 0.9, replay)
        state_a = gd_step(problem, state_a, mask)
        state_b = gd_step(problem, state_b, mask)
        diff = state_a.beta - state_b.beta
        manual.append(float(np.sqrt((diff * diff).sum())))
    assert gaps == manual


def test_agd_average_matches_batch_mean():
    rng = np.random.default_rng(461)
    iterates = [rng.normal(size=4) for _ in range(37)]
    got = agd_average(iterates)
    assert np.allclose(got, np.mean(iterates, axis=0), rtol=0, atol=1e-12)
    with pytest.raises(ValueError):
        agd_average([])


def test_admissibility_flag():
    gram = np.diag([4.0, 1.0])
    x = np.diag([2.0, 1.0])
    assert GdProblem(x, np.zeros(2), 0.5, 0.49).admissible
    assert not GdProblem(x, np.zeros(2), 0.5, 0.51).admissible
    assert lr_bound_gd(gram) == pytest.approx(0.5, rel=1e-12)
