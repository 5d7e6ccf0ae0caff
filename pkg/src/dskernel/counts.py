"""Count-matrix ingestion, total-count normalization, and a synthetic Poisson
generator standing in for real sequencing data.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from .errors import ParameterError, ParseError


@dataclass(frozen=True)
class CountMatrix:
    """Sparse nonnegative integer counts with per-row totals.

    Rows with zero total are rejected at ingestion; ``rejected_rows`` lists
    their original indices for the caller's report.
    """

    entries: sparse.csr_matrix
    totals: np.ndarray
    labels: np.ndarray = None
    rejected_rows: tuple = ()


def _finalize(matrix, labels=None):
    matrix = sparse.csr_matrix(matrix)
    if matrix.nnz and matrix.data.min() < 0:
        raise ParseError("negative count entry")
    totals = np.asarray(matrix.sum(axis=1)).ravel()
    keep = totals > 0
    rejected = tuple(np.nonzero(~keep)[0].tolist())
    if rejected:
        matrix = matrix[keep]
        totals = totals[keep]
        if labels is not None:
            labels = np.asarray(labels)[keep]
    return CountMatrix(entries=matrix, totals=totals,
                       labels=None if labels is None else np.asarray(labels),
                       rejected_rows=rejected)


def _parse_matrix_market(path):
    """Minimal coordinate-format Matrix Market reader with line diagnostics.

    Duplicate (i, j) entries are summed, per the format convention.
    """
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", line=1)
    header = lines[0].strip().lower().split()
    if len(header) < 4 or header[0] != "%%matrixmarket" or header[1] != "matrix":
        raise ParseError("missing %%MatrixMarket header", line=1)
    if header[2] != "coordinate":
        raise ParseError(f"unsupported storage format {header[2]!r}", line=1)
    symmetric = len(header) > 4 and header[4] == "symmetric"
    idx = 1
    while idx < len(lines) and lines[idx].lstrip().startswith("%"):
        idx += 1
    if idx >= len(lines):
        raise ParseError("missing size line", line=idx + 1)
    parts = lines[idx].split()
    if len(parts) != 3:
        raise ParseError("size line must have three fields", line=idx + 1)
    try:
        n_rows, n_cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise ParseError("non-integer size line", line=idx + 1) from None
    rows, cols, vals = [], [], []
    for offset, line in enumerate(lines[idx + 1:], start=idx + 2):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 3:
            raise ParseError("entry must have three fields", line=offset)
        try:
            i, j, v = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(f"malformed entry {line.strip()!r}", line=offset) from None
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise ParseError("entry index out of bounds", line=offset)
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
        if symmetric and i != j:
            rows.append(j - 1)
            cols.append(i - 1)
            vals.append(v)
    if len(vals) < nnz:
        raise ParseError(f"expected {nnz} entries, found {len(vals)}",
                         line=len(lines))
    # coo -> csr sums duplicates
    return sparse.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))


def ingest_counts(path, fmt="matrix-market", labels=None):
    """Read a count matrix from a Matrix Market or dense CSV file."""
    if fmt == "matrix-market":
        matrix = _parse_matrix_market(path)
    elif fmt == "csv":
        try:
            dense = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        if dense.size == 0:
            raise ParseError("empty file", line=1)
        matrix = sparse.csr_matrix(dense)
    else:
        raise ParameterError(f"unknown format {fmt!r}")
    return _finalize(matrix, labels)


def normalize_counts(counts):
    """Total-count normalization plus the Poisson-model noise prediction.

    Returns (y, predicted_noise) where row i of y is counts row i divided by
    its total c_i (a probability vector) and predicted_noise_i = 1/c_i.
    """
    y = counts.entries.toarray().astype(float) / counts.totals[:, None]
    return y, 1.0 / counts.totals


def synth_poisson_counts(n, m, n_clusters=2, depth_range=(500.0, 2500.0),
                         seed=0, cluster_depth_ranges=None):
    """Independent Poisson counts over latent cluster expression profiles.

    Each cluster gets a random positive profile over the m features; each row
    draws a total-rate scalar uniformly from its depth range (a shared
    ``depth_range`` or one range per cluster) and Poisson entries with mean
    profile * rate. Returns a CountMatrix with cluster labels.
    """
    lo, hi = depth_range
    if lo <= 0 or hi < lo:
        raise ParameterError("depth_range must satisfy 0 < min <= max")
    if cluster_depth_ranges is not None:
        for clo, chi in cluster_depth_ranges:
            if clo <= 0 or chi < clo:
                raise ParameterError("cluster depth ranges must satisfy 0 < min <= max")
        if len(cluster_depth_ranges) != n_clusters:
            raise ParameterError("need one depth range per cluster")
    rng = np.random.default_rng(seed)
    profiles = rng.gamma(shape=2.0, size=(n_clusters, m))
    profiles /= profiles.sum(axis=1, keepdims=True)
    labels = np.repeat(np.arange(n_clusters), -(-n // n_clusters))[:n]
    if cluster_depth_ranges is None:
        rates = rng.uniform(lo, hi, size=n)
    else:
        ranges = np.asarray(cluster_depth_ranges, dtype=float)
        rates = rng.uniform(ranges[labels, 0], ranges[labels, 1])
    means = profiles[labels] * rates[:, None]
    counts = rng.poisson(means)
    return _finalize(sparse.csr_matrix(counts), labels)
