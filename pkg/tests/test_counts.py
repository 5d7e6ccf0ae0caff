import numpy as np
import pytest
import scipy.io
import scipy.sparse as sparse

from dskernel import counts
from dskernel.errors import ParameterError, ParseError
from oracles import naive_matrix_market

GENERAL_MM = """%%MatrixMarket matrix coordinate integer general
% a comment line
4 3 6
1 1 5
1 1 2
2 3 7
3 1 1
4 2 4
4 3 9
"""

SYMMETRIC_MM = """%%MatrixMarket matrix coordinate real symmetric
3 3 4
1 1 1.5
2 1 2.0
3 1 3.0
3 3 4.5
"""


def test_matrix_market_matches_naive_oracle(tmp_path):
    for text in (GENERAL_MM, SYMMETRIC_MM):
        path = tmp_path / "m.mtx"
        path.write_text(text)
        cm = counts.ingest_counts(path)
        dense = cm.entries.toarray()
        oracle = naive_matrix_market(path)
        oracle = oracle[oracle.sum(axis=1) > 0]  # ingestion drops zero rows
        np.testing.assert_allclose(dense, oracle)


def test_matrix_market_matches_scipy(tmp_path):
    path = tmp_path / "m.mtx"
    path.write_text(SYMMETRIC_MM)
    cm = counts.ingest_counts(path)
    expected = scipy.io.mmread(path).toarray()
    np.testing.assert_allclose(cm.entries.toarray(), expected)


def test_duplicate_entries_are_summed(tmp_path):
    path = tmp_path / "m.mtx"
    path.write_text(GENERAL_MM)
    cm = counts.ingest_counts(path)
    assert cm.entries[0, 0] == 7  # 5 + 2


def test_parse_errors_carry_line_numbers(tmp_path):
    cases = [
        ("", "empty"),
        ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n", "coordinate"),
        ("not a header\n2 2 1\n1 1 3\n", "header"),
        ("%%MatrixMarket matrix coordinate real general\n2 2\n", "three fields"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n", "entry"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n5 1 3\n", "bounds"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 3\n", "malformed"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 3\n", "expected 3"),
    ]
    for text, _ in cases:
        path = tmp_path / "bad.mtx"
        path.write_text(text)
        with pytest.raises(ParseError):
            counts.ingest_counts(path)
    path = tmp_path / "bad.mtx"
    path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 3\n")
    with pytest.raises(ParseError, match="line 3"):
        counts.ingest_counts(path)


def test_negative_counts_rejected(tmp_path):
    path = tmp_path / "neg.mtx"
    path.write_text("%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 -4\n")
    with pytest.raises(ParseError):
        counts.ingest_counts(path)


def test_zero_total_rows_are_rejected_with_labels(tmp_path):
    path = tmp_path / "z.mtx"
    path.write_text("%%MatrixMarket matrix coordinate integer general\n"
                    "3 2 2\n1 1 4\n3 2 6\n")
    cm = counts.ingest_counts(path, labels=["a", "b", "c"])
    assert cm.rejected_rows == (1,)
    assert cm.entries.shape == (2, 2)
    np.testing.assert_array_equal(cm.labels, ["a", "c"])
    np.testing.assert_array_equal(cm.totals, [4.0, 6.0])


def test_csv_ingestion(tmp_path):
    path = tmp_path / "c.csv"
    np.savetxt(path, np.array([[1, 0, 2], [0, 3, 0]]), delimiter=",", fmt="%d")
    cm = counts.ingest_counts(path, fmt="csv")
    np.testing.assert_array_equal(cm.totals, [3.0, 3.0])
    with pytest.raises(ParameterError):
        counts.ingest_counts(path, fmt="parquet")
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError):
        counts.ingest_counts(bad, fmt="csv")


def test_normalize_counts_rows_sum_to_one():
    cm = counts.synth_poisson_counts(50, 200, seed=1)
    y, predicted = counts.normalize_counts(cm)
    np.testing.assert_allclose(y.sum(axis=1), 1.0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(predicted, 1.0 / cm.totals)


def test_synth_poisson_counts_structure():
    cm = counts.synth_poisson_counts(101, 300, n_clusters=2, seed=3)
    assert cm.entries.shape[0] + len(cm.rejected_rows) == 101
    assert set(np.unique(cm.labels)) <= {0, 1}
    assert sparse.issparse(cm.entries)
    assert cm.entries.data.min() >= 0
    # totals concentrate near the requested depth window
    assert cm.totals.min() > 300 and cm.totals.max() < 3200


def test_synth_poisson_cluster_depth_ranges():
    ranges = ((400.0, 800.0), (2000.0, 4000.0))
    cm = counts.synth_poisson_counts(200, 500, seed=4, cluster_depth_ranges=ranges)
    low = cm.totals[cm.labels == 0]
    high = cm.totals[cm.labels == 1]
    assert low.max() < high.min()


def test_synth_poisson_validates_ranges():
    with pytest.raises(ParameterError):
        counts.synth_poisson_counts(10, 20, depth_range=(0.0, 5.0))
    with pytest.raises(ParameterError):
        counts.synth_poisson_counts(10, 20, cluster_depth_ranges=((5.0, 1.0), (1.0, 2.0)))
    with pytest.raises(ParameterError):
        counts.synth_poisson_counts(10, 20, n_clusters=3,
                                    cluster_depth_ranges=((1.0, 2.0), (1.0, 2.0)))


def test_synth_poisson_is_deterministic():
    a = counts.synth_poisson_counts(40, 100, seed=9)
    b = counts.synth_poisson_counts(40, 100, seed=9)
    assert (a.entries != b.entries).nnz == 0
