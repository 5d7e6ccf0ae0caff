import numpy as np
import pytest

from dskernel import geometry, kernel, scaling
from dskernel.errors import ConvergenceError, ParameterError
from oracles import newton_symmetric_scaling

SIGMA_SQ = 0.16 * np.pi**2


def circle_affinity(n, epsilon, seed=0, m=None):
    sample = geometry.sample_circle(n, SIGMA_SQ, seed=seed)
    if m is not None:
        sample = geometry.embed_orthogonal(sample, m, seed=seed + 1)
    return kernel.gaussian_kernel(kernel.pairwise_sq_dists(sample.clean_points), epsilon)


def test_scaled_matrix_is_doubly_stochastic():
    aff = circle_affinity(300, 0.1, seed=1)
    sol = scaling.sinkhorn_symmetric(aff, tol=1e-9)
    assert sol.converged
    w = scaling.assemble_W(aff, sol)
    np.testing.assert_allclose(w.w.sum(axis=1), 1.0, rtol=0, atol=5e-9)
    np.testing.assert_allclose(w.w.sum(axis=0), 1.0, rtol=0, atol=5e-9)
    assert np.array_equal(w.w, w.w.T)
    assert np.all(np.diag(w.w) == 0.0)


def test_matches_newton_oracle_on_small_matrices():
    rng = np.random.default_rng(7)
    for n in (3, 4, 6):
        pts = rng.normal(size=(n, 2))
        sq = kernel.pairwise_sq_dists(pts)
        aff = kernel.gaussian_kernel(sq, 1.3)
        sol = scaling.sinkhorn_symmetric(aff, tol=1e-13, max_iter=200_000)
        assert sol.converged
        k_lin = np.exp(aff.masked_log())
        expected = newton_symmetric_scaling(k_lin)
        np.testing.assert_allclose(sol.log_d, expected, rtol=0, atol=1e-8)


def test_distinct_initializations_agree():
    aff = circle_affinity(120, 0.2, seed=3)
    sol_default = scaling.sinkhorn_symmetric(aff, tol=1e-11)
    rng = np.random.default_rng(0)
    sol_random = scaling.sinkhorn_symmetric(aff, tol=1e-11,
                                            log_d0=rng.normal(scale=2.0, size=120))
    assert sol_default.converged and sol_random.converged
    np.testing.assert_allclose(sol_default.log_d, sol_random.log_d, rtol=0, atol=1e-6)


def test_kernel_scale_invariance_of_w():
    # multiplying K by a global constant shifts log d but leaves W unchanged
    aff = circle_affinity(80, 0.15, seed=4)
    shifted = kernel.AffinityMatrix(log_entries=aff.log_entries + 3.7,
                                    epsilon=aff.epsilon)
    w_a = scaling.assemble_W(aff, scaling.sinkhorn_symmetric(aff, tol=1e-12))
    w_b = scaling.assemble_W(shifted, scaling.sinkhorn_symmetric(shifted, tol=1e-12))
    np.testing.assert_allclose(w_a.w, w_b.w, rtol=0, atol=1e-12)


def test_permutation_equivariance():
    aff = circle_affinity(60, 0.2, seed=5)
    perm = np.random.default_rng(1).permutation(60)
    permuted = kernel.AffinityMatrix(
        log_entries=aff.log_entries[np.ix_(perm, perm)], epsilon=aff.epsilon)
    sol = scaling.sinkhorn_symmetric(aff, tol=1e-12)
    sol_p = scaling.sinkhorn_symmetric(permuted, tol=1e-12)
    np.testing.assert_allclose(sol_p.log_d, sol.log_d[perm], rtol=0, atol=1e-9)


def test_underflowing_kernel_is_handled_in_log_domain():
    # tiny epsilon pushes every off-diagonal entry far below linear-domain range
    angles = np.linspace(0.0, 2 * np.pi, 40, endpoint=False)
    pts = np.column_stack([np.cos(angles), np.sin(angles)])
    aff = kernel.gaussian_kernel(kernel.pairwise_sq_dists(pts), 2e-5)
    off_log = aff.masked_log()[~np.eye(40, dtype=bool)]
    assert off_log.max() < -700  # exp() underflows, forcing the log-sum-exp path
    sol = scaling.sinkhorn_symmetric(aff, tol=1e-9, max_iter=50_000)
    assert sol.converged
    w = scaling.assemble_W(aff, sol)
    np.testing.assert_allclose(w.w.sum(axis=1), 1.0, rtol=0, atol=1e-8)


def test_residual_history_reaches_tolerance():
    aff = circle_affinity(100, 0.1, seed=8)
    sol = scaling.sinkhorn_symmetric(aff, tol=1e-9)
    assert sol.residual <= 1e-9
    assert sol.residual_history[-1] == sol.residual
    assert len(sol.residual_history) == sol.iterations


def test_rejects_tiny_matrices_and_bad_entries():
    aff = circle_affinity(10, 0.1)
    bad = kernel.AffinityMatrix(log_entries=np.full((3, 3), np.nan), epsilon=0.1)
    with pytest.raises(ParameterError):
        scaling.sinkhorn_symmetric(bad)
    two = kernel.AffinityMatrix(log_entries=aff.log_entries[:2, :2], epsilon=0.1)
    with pytest.raises(ParameterError):
        scaling.sinkhorn_symmetric(two)


def test_assemble_refuses_unconverged_solution():
    aff = circle_affinity(200, 0.05, seed=9)
    sol = scaling.sinkhorn_symmetric(aff, tol=1e-14, max_iter=2)
    assert not sol.converged
    with pytest.raises(ConvergenceError):
        scaling.assemble_W(aff, sol)


def test_clean_data_diagnostics_are_small():
    # on clean data the implied noise magnitudes are O(epsilon)
    sample = geometry.sample_circle(1000, SIGMA_SQ, seed=10)
    sample = geometry.embed_orthogonal(sample, 1000, seed=11)
    aff = kernel.gaussian_kernel(kernel.pairwise_sq_dists(sample.clean_points), 0.1)
    sol = scaling.sinkhorn_symmetric(aff)
    implied = scaling.scaling_factor_diagnostics(sol, 0.1, 1000, 1,
                                                 sample.density_values)
    assert np.abs(implied).max() < 0.05


def test_diagnostics_reject_nonpositive_density():
    aff = circle_affinity(20, 0.1)
    sol = scaling.sinkhorn_symmetric(aff)
    with pytest.raises(ParameterError):
        scaling.scaling_factor_diagnostics(sol, 0.1, 20, 1, np.zeros(20))
