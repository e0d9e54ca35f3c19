import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pclp.sparse import (
    IndexOutOfRange,
    NonMonotoneUpdate,
    SparseNonnegMatrix,
    UpdateEvent,
    UpdateKind,
    apply_update,
)


def test_zero_entries_absent_from_both_indexes():
    m = SparseNonnegMatrix.from_dense([[1.0, 0.0], [0.0, 2.0]])
    assert m.nnz == 2
    assert m.get(0, 1) == 0.0
    assert 1 not in m.row_map(0)
    assert 0 not in m.col_map(1)


def test_set_to_zero_removes_entry():
    m = SparseNonnegMatrix.from_dense([[1.0]])
    m.set(0, 0, 0.0)
    assert m.nnz == 0
    assert m.row(0)[0].size == 0
    assert m.col(0)[0].size == 0


def test_restrict_update_applies():
    m = SparseNonnegMatrix.from_dense([[1.0]])
    old = m.apply_update(UpdateEvent(UpdateKind.RESTRICT_COVERING_ENTRY, 0, 0, 0.5))
    assert old == 1.0
    assert m.get(0, 0) == 0.5


def test_restrict_update_rejects_increase():
    m = SparseNonnegMatrix.from_dense([[0.5]])
    with pytest.raises(NonMonotoneUpdate):
        m.apply_update(UpdateEvent(UpdateKind.RESTRICT_COVERING_ENTRY, 0, 0, 0.9))


def test_relax_insertion_lands_in_both_indexes():
    m = SparseNonnegMatrix.from_dense([[1.0, 0.0], [0.0, 1.0]])
    apply_update(m, UpdateEvent(UpdateKind.RELAX_COVERING_ENTRY, 0, 1, 0.3))
    assert m.get(0, 1) == 0.3
    assert 1 in m.row_map(0)
    assert 0 in m.col_map(1)


def test_index_out_of_range():
    m = SparseNonnegMatrix(2, 2)
    with pytest.raises(IndexOutOfRange):
        m.apply_update(UpdateEvent(UpdateKind.RELAX_COVERING_ENTRY, 5, 0, 1.0))


def test_min_size_enforced():
    with pytest.raises(ValueError):
        SparseNonnegMatrix(0, 3)


@st.composite
def small_matrix(draw):
    m = draw(st.integers(1, 6))
    n = draw(st.integers(1, 6))
    entries = draw(st.lists(
        st.tuples(st.integers(0, m - 1), st.integers(0, n - 1),
                  st.floats(0.01, 10.0, allow_nan=False)),
        max_size=18))
    mat = SparseNonnegMatrix(m, n)
    for i, j, v in entries:
        mat.set(i, j, v)
    return mat


@given(small_matrix(), st.integers(0, 2 ** 31))
@settings(max_examples=60, deadline=None)
def test_row_and_column_products_agree(mat, seed):
    x = np.random.default_rng(seed).uniform(0, 3, size=mat.n)
    by_rows = mat.matvec(x)
    by_cols = mat.matvec_by_columns(x)
    assert np.all(np.abs(by_rows - by_cols) <= 1e-12 * (1 + np.abs(by_rows)))


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_matches_dense_reference_multiply(mat):
    x = np.linspace(0.1, 1.7, mat.n)
    dense = mat.to_dense()
    assert np.allclose(mat.matvec(x), dense @ x, atol=1e-12)
    y = np.linspace(0.2, 0.9, mat.m)
    assert np.allclose(mat.rmatvec(y), dense.T @ y, atol=1e-12)


@given(small_matrix())
@settings(max_examples=40, deadline=None)
def test_update_keeps_indexes_identical(mat):
    # restrict every entry by half, then compare both index views entry-by-entry
    for i, j, v in list(mat.entries()):
        mat.apply_update(UpdateEvent(UpdateKind.RESTRICT_COVERING_ENTRY, i, j, v / 2))
    row_view = {(i, j): v for i, rm in enumerate(mat._rows) for j, v in rm.items()}
    col_view = {(i, j): v for j, cm in enumerate(mat._cols) for i, v in cm.items()}
    assert row_view == col_view
