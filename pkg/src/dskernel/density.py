"""Density estimation from the doubly stochastic affinity matrix, plus the
1-D population scaling solver used to validate its small-bandwidth theory.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ParameterError
from .scaling import ScaledMatrix, _scale_log_matrix

S_LIMIT = "limit"


@dataclass(frozen=True)
class DensityEstimate:
    """Per-point density estimates before and after the global constant.

    ``raw`` is the plain powered-row-sum statistic; ``normalized`` divides by
    the (pi eps)^(d/2)-type constant so it is directly comparable to the true
    density. ``normalized`` is None when the intrinsic dimension was not
    supplied.
    """

    raw: np.ndarray
    normalized: np.ndarray
    s: object
    epsilon: float
    intrinsic_dim: int


def _log_w_of(w):
    if isinstance(w, ScaledMatrix):
        return w.log_w, w.epsilon
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ParameterError("W entries must be nonnegative")
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    np.fill_diagonal(log_w, -np.inf)
    return log_w, None


def normalization_constant(epsilon, dim, s):
    """The Theorem-3 global constant relating the raw estimator to q.

    (pi eps)^(d/2) * s^(d / (2(s-1))) for s != 1, and its s -> 1 limit
    (pi e eps)^(d/2) for the perplexity estimator.
    """
    if epsilon <= 0 or dim < 1:
        raise ParameterError("need epsilon > 0 and dim >= 1")
    if s == S_LIMIT or s is None:
        return (np.pi * np.e * epsilon) ** (dim / 2.0)
    return (np.pi * epsilon) ** (dim / 2.0) * s ** (dim / (2.0 * (s - 1.0)))


def ds_kde(w, s, epsilon=None, dim=None):
    """Doubly stochastic kernel density estimator with exponent ``s``.

    q_hat_i = (sum_j W_ij^s)^(1/(1-s)) / (n-1), computed via log-sum-exp of
    s * log W. Use :func:`ds_kde_entropy` for the s -> 1 limit.
    """
    if s <= 0 or s == 1:
        raise ParameterError("s must be positive and different from 1")
    log_w, eps_from_w = _log_w_of(w)
    epsilon = eps_from_w if epsilon is None else epsilon
    n = log_w.shape[0]
    log_raw = -np.log(n - 1) + logsumexp(s * log_w, axis=1) / (1.0 - s)
    raw = np.exp(log_raw)
    normalized = None
    if dim is not None:
        normalized = raw / normalization_constant(epsilon, dim, s)
    return DensityEstimate(raw=raw, normalized=normalized, s=s,
                           epsilon=epsilon, intrinsic_dim=dim)


def ds_kde_entropy(w, epsilon=None, dim=None):
    """The s -> 1 limit of the DS-KDE: row perplexity over (n - 1)."""
    log_w, eps_from_w = _log_w_of(w)
    epsilon = eps_from_w if epsilon is None else epsilon
    if not isinstance(w, ScaledMatrix):
        w_lin = np.asarray(w, dtype=float)
        off_diag = w_lin[~np.eye(len(w_lin), dtype=bool)]
        if np.any(off_diag <= 0):
            raise ParameterError("entropy limit requires strictly positive off-diagonal W")
    n = log_w.shape[0]
    p = np.exp(log_w)
    entropy = -np.sum(p * np.where(np.isfinite(log_w), log_w, 0.0), axis=1)
    raw = np.exp(entropy) / (n - 1)
    normalized = None
    if dim is not None:
        normalized = raw / normalization_constant(epsilon, dim, S_LIMIT)
    return DensityEstimate(raw=raw, normalized=normalized, s=S_LIMIT,
                           epsilon=epsilon, intrinsic_dim=dim)


@dataclass(frozen=True)
class PopulationScaling:
    """Solution of the continuum scaling equation on a circle grid."""

    grid: np.ndarray
    rho: np.ndarray
    epsilon: float
    residual: float


def solve_population_scaling_1d(density, epsilon, grid_size=4096):
    """Solve the integral scaling equation on the unit circle by quadrature.

    ``density`` maps angles to the arc-length density q. The equation
    (pi eps)^(-1/2) * integral rho(x) K_eps(x, y) rho(y) q(y) dmu(y) = 1 is
    discretized with the trapezoid rule on a uniform angle grid and handed to
    the discrete scaling engine with the quadrature weights folded into the
    matrix (diagonal included: this is the continuum problem, K(x, x) = 1).
    """
    if grid_size < 256:
        raise ParameterError("grid_size must be at least 256")
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    h = 2.0 * np.pi / grid_size
    if np.sqrt(epsilon) / h < 8.0:
        needed = int(np.ceil(8.0 * 2.0 * np.pi / np.sqrt(epsilon)))
        raise ParameterError(
            f"grid under-resolves the kernel at epsilon={epsilon}; "
            f"need grid_size >= {needed}")
    theta = np.arange(grid_size) * h
    q = np.asarray(density(theta), dtype=float)
    if np.any(q <= 0):
        raise ParameterError("density must be strictly positive on the grid")
    # chordal distance on the unit circle
    diff = theta[:, None] - theta[None, :]
    log_k = -(4.0 * np.sin(diff / 2.0) ** 2) / epsilon
    log_w_quad = np.log(q * h)
    log_c = log_k + 0.5 * (log_w_quad[:, None] + log_w_quad[None, :])
    # row targets q_k * h * sqrt(pi eps) make psi = rho * sqrt(q h) the scaled vector
    log_targets = log_w_quad + 0.5 * np.log(np.pi * epsilon)
    sol = _scale_log_matrix(log_c, tol=1e-11, max_iter=100_000,
                            log_targets=log_targets)
    if not sol.converged:
        raise ParameterError("population scaling solve did not converge")
    rho = np.exp(sol.log_d - 0.5 * log_w_quad)
    # back-substitute into the quadrature form of the integral equation
    kernel = np.exp(log_k)
    lhs = rho * (kernel @ (rho * q * h)) / np.sqrt(np.pi * epsilon)
    residual = np.abs(lhs - 1.0).max()
    if residual > 1e-8:
        raise ParameterError(f"population scaling residual {residual:.2e} exceeds 1e-8")
    return PopulationScaling(grid=theta, rho=rho, epsilon=epsilon, residual=residual)
