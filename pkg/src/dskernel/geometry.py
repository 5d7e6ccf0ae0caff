"""Synthetic circle datasets: sampling, embedding, noise models, ground truth.

All generators are pure functions of (parameters, seed) and return immutable
snapshots of the data together with the analytic quantities (density, noise
magnitudes) needed to score the estimators downstream.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

TWO_PI = 2.0 * np.pi

NOISE_MODELS = ("none", "varying_ball", "outlier_gaussian", "outlier_scaled_gaussian")


def _fmt(value):
    """Full-precision decimal text for CSV fields (plain float repr)."""
    return repr(float(value))


@dataclass(frozen=True)
class ManifoldSample:
    """Clean points on one or more circles plus their analytic annotations.

    ``density_values`` is the sampling density per unit arc length, so it
    integrates to 1 against the arc-length measure of the manifold.
    """

    angles: np.ndarray
    clean_points: np.ndarray
    ambient_dim: int
    intrinsic_dim: int
    density_values: np.ndarray
    radius_labels: np.ndarray


@dataclass(frozen=True)
class NoiseRealization:
    noise_vectors: np.ndarray
    noisy_points: np.ndarray
    true_noise_sq: np.ndarray
    model_tag: str


def wrapped_normal_density(theta, sigma_sq):
    """Density of a centered normal with variance ``sigma_sq`` wrapped to [0, 2pi).

    The series over wrap indices is truncated adaptively so the omitted tail
    is below 1e-12.
    """
    if sigma_sq <= 0:
        raise ParameterError("sigma_sq must be positive")
    theta = np.asarray(theta, dtype=float)
    sigma = np.sqrt(sigma_sq)
    # terms at wrap k decay like exp(-(2*pi*k - pi)^2 / (2 sigma^2)); 8 sigma
    # of slack past the principal branch keeps the tail under 1e-12
    k_max = int(np.ceil((8.0 * sigma + np.pi) / TWO_PI)) + 1
    ks = np.arange(-k_max, k_max + 1)
    offsets = theta[..., None] - TWO_PI * ks
    norm = 1.0 / np.sqrt(TWO_PI * sigma_sq)
    return norm * np.exp(-0.5 * offsets**2 / sigma_sq).sum(axis=-1)


def sample_circle(n, sigma_sq, radius=1.0, seed=0):
    """Sample ``n`` angles from a wrapped normal and place them on a circle.

    Returns a 2-D (pre-embedding) sample whose ``density_values`` hold the
    true arc-length density q(x_i) = wrapped_normal_density(theta_i) / radius.
    """
    if n < 3:
        raise ParameterError("n must be at least 3")
    if sigma_sq <= 0 or radius <= 0:
        raise ParameterError("sigma_sq and radius must be positive")
    rng = np.random.default_rng(seed)
    angles = np.mod(rng.normal(0.0, np.sqrt(sigma_sq), size=n), TWO_PI)
    clean = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    density = wrapped_normal_density(angles, sigma_sq) / radius
    return ManifoldSample(
        angles=angles,
        clean_points=clean,
        ambient_dim=2,
        intrinsic_dim=1,
        density_values=density,
        radius_labels=np.full(n, float(radius)),
    )


def sample_two_circles(n_per_circle=500, sigma_sq=0.16 * np.pi**2,
                       radii=(1.0, 0.5), seed=0):
    """Two concentric circles with the same angular density on each.

    Points are concatenated before any embedding so a single joint orthogonal
    transformation can be applied afterwards. The arc-length densities are
    per-circle and each half integrates to 1 over its own circle.
    """
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = seq.spawn(len(radii))
    parts = [sample_circle(n_per_circle, sigma_sq, r, s) for r, s in zip(radii, seeds)]
    return ManifoldSample(
        angles=np.concatenate([p.angles for p in parts]),
        clean_points=np.concatenate([p.clean_points for p in parts]),
        ambient_dim=2,
        intrinsic_dim=1,
        density_values=np.concatenate([p.density_values for p in parts]),
        radius_labels=np.concatenate([p.radius_labels for p in parts]),
    )


def embed_orthogonal(sample, m, seed=0):
    """Embed a low-dimensional sample into R^m by a random orthogonal map.

    The map is the Q factor of a seeded Gaussian matrix, so all pairwise
    Euclidean distances are preserved.
    """
    k = sample.clean_points.shape[1]
    if m < k:
        raise ParameterError(f"ambient dimension {m} below embedding dimension {k}")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(m, k)))
    return ManifoldSample(
        angles=sample.angles,
        clean_points=sample.clean_points @ q.T,
        ambient_dim=m,
        intrinsic_dim=sample.intrinsic_dim,
        density_values=sample.density_values,
        radius_labels=sample.radius_labels,
    )


def varying_ball_radius(angles):
    """Ball radius profile 0.01 + 0.49 (1 + cos(theta)) / 2 of the smooth noise model."""
    return 0.01 + 0.49 * (1.0 + np.cos(angles)) / 2.0


def _uniform_ball(rng, n, m, radii):
    # direction uniform on the sphere, radial law r * U^(1/m)
    directions = rng.normal(size=(n, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    u = rng.uniform(size=n)
    return directions * (radii * u ** (1.0 / m))[:, None]


def apply_noise(sample, model, seed=0):
    """Draw one noise realization for each point of ``sample``.

    Models: "none"; "varying_ball", uniform in a ball whose radius varies
    smoothly with the angle; "outlier_gaussian", zero with probability 0.9
    else N(0, I/(4m)); "outlier_scaled_gaussian", zero with probability 0.9
    else N(0, sigma_i I/m) with sigma_i ~ Uniform(0, 1).
    """
    if model not in NOISE_MODELS:
        raise ParameterError(f"unknown noise model {model!r}")
    n, m = sample.clean_points.shape
    rng = np.random.default_rng(seed)
    if model == "none":
        eta = np.zeros((n, m))
    elif model == "varying_ball":
        eta = _uniform_ball(rng, n, m, varying_ball_radius(sample.angles))
    elif model == "outlier_gaussian":
        eta = rng.normal(0.0, 1.0 / np.sqrt(4.0 * m), size=(n, m))
        eta[rng.uniform(size=n) < 0.9] = 0.0
    else:  # outlier_scaled_gaussian
        sigma = rng.uniform(size=n)
        eta = rng.normal(size=(n, m)) * np.sqrt(sigma / m)[:, None]
        eta[rng.uniform(size=n) < 0.9] = 0.0
    return NoiseRealization(
        noise_vectors=eta,
        noisy_points=sample.clean_points + eta,
        true_noise_sq=np.einsum("ij,ij->i", eta, eta),
        model_tag=model,
    )


def test_function_and_laplacian(angles):
    """The benchmark function f and its Laplace-Beltrami image on the unit circle.

    The Laplacian follows the positive-semidefinite sign convention, i.e. it
    returns -f'' so that it matches the limit of the graph Laplacian
    4(I - W)/epsilon, which is positive semidefinite.
    """
    angles = np.asarray(angles, dtype=float)
    f = (np.cos(angles) + np.sin(2.0 * angles)) / 5.0
    lap_f = (np.cos(angles) + 4.0 * np.sin(2.0 * angles)) / 5.0
    return f, lap_f


def save_dataset_csv(points_path, sidecar_path, sample, noise=None):
    """Write noisy points and a ground-truth sidecar as two CSV files.

    The sidecar has columns (index, angle, radius, true_density,
    true_noise_sq). Without a noise realization the clean points are written
    and true_noise_sq is zero.
    """
    points = sample.clean_points if noise is None else noise.noisy_points
    noise_sq = np.zeros(len(sample.angles)) if noise is None else noise.true_noise_sq
    np.savetxt(points_path, points, delimiter=",")
    with open(sidecar_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "angle", "radius", "true_density", "true_noise_sq"])
        for i in range(len(sample.angles)):
            writer.writerow([i, _fmt(sample.angles[i]), _fmt(sample.radius_labels[i]),
                             _fmt(sample.density_values[i]), _fmt(noise_sq[i])])


def load_points_csv(path):
    points = np.loadtxt(path, delimiter=",", ndmin=2)
    if points.size == 0:
        raise ParameterError(f"no data in {path}")
    return points
