"""Tests for the exact sparse linear algebra layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from propcalc.exactla import (
    CapacityError,
    ChainComplex,
    SparseMatrix,
    in_column_span,
    kernel_basis,
    rank,
    solve_column,
)


def dense_rank_oracle(rows):
    """Plain dense Gaussian elimination, no pivot strategy."""
    rows = [list(map(Fraction, r)) for r in rows]
    rk = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        rk += 1
    return rk


def test_basic_shapes_and_entries():
    m = SparseMatrix.from_rows([[1, 2], [3, 4]])
    assert m.get(0, 1) == 2
    assert m.get(1, 1) == 4
    assert m.transpose().get(1, 0) == 2
    assert m.nnz() == 4
    z = SparseMatrix.zero(3, 2)
    assert z.is_zero()
    assert SparseMatrix.identity(3).matmul(z).is_zero()


def test_zero_entries_dropped():
    m = SparseMatrix(2, 2, {(0, 0): Fraction(0), (1, 1): Fraction(5)})
    assert m.nnz() == 1


def test_out_of_bounds_rejected():
    with pytest.raises(ValueError):
        SparseMatrix(1, 1, {(0, 1): Fraction(1)})


def test_rank_known():
    m = SparseMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(m) == 2
    assert rank(SparseMatrix.identity(5)) == 5
    assert rank(SparseMatrix.zero(4, 7)) == 0


def test_kernel_known():
    m = SparseMatrix.from_rows([[1, 2, 3], [0, 1, 1]])
    ker = kernel_basis(m)
    assert len(ker) == 1
    for vec in ker:
        assert m.apply(vec) == {}


def test_solve_and_span():
    m = SparseMatrix.from_rows([[1, 0], [0, 2], [1, 2]])
    x = solve_column(m, {0: Fraction(3), 1: Fraction(4), 2: Fraction(7)})
    assert m.apply(x) == {0: Fraction(3), 1: Fraction(4), 2: Fraction(7)}
    assert in_column_span(m, {0: Fraction(3), 1: Fraction(4), 2: Fraction(7)})
    assert not in_column_span(m, {0: Fraction(1)})


def test_capacity_cap():
    with pytest.raises(CapacityError):
        SparseMatrix(
            1000, 1000,
            {(i, j): Fraction(1) for i in range(500) for j in range(500)},
        )


def test_chain_complex_square_zero_enforced():
    d1 = SparseMatrix.from_rows([[1, -1]])
    bad = SparseMatrix.from_rows([[1], [0]])
    with pytest.raises(ValueError):
        ChainComplex({0: 1, 1: 2, 2: 1}, {1: d1, 2: bad})


def test_homology_of_interval():
    # simplicial interval: two points, one edge
    d1 = SparseMatrix.from_rows([[-1], [1]])
    cx = ChainComplex({0: 2, 1: 1}, {1: d1})
    assert cx.homology_dims() == {0: 1, 1: 0}


def test_homology_of_circle():
    # triangle boundary: 3 vertices, 3 edges
    d1 = SparseMatrix.from_rows([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    cx = ChainComplex({0: 3, 1: 3}, {1: d1})
    assert cx.homology_dims() == {0: 1, 1: 1}


small_fracs = st.integers(-4, 4).map(Fraction)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6), st.integers(1, 6), st.data()
)
def test_rank_matches_dense_oracle(nr, nc, data):
    rows = [
        [data.draw(small_fracs) for _ in range(nc)] for _ in range(nr)
    ]
    m = SparseMatrix.from_rows(rows)
    assert rank(m) == dense_rank_oracle(rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_kernel_is_in_kernel_and_full(nr, nc, data):
    rows = [
        [data.draw(small_fracs) for _ in range(nc)] for _ in range(nr)
    ]
    m = SparseMatrix.from_rows(rows)
    ker = kernel_basis(m)
    assert len(ker) == nc - rank(m)
    for vec in ker:
        assert m.apply(vec) == {}
    # kernel vectors are linearly independent
    km = SparseMatrix.from_columns(ker, nc)
    assert rank(km) == len(ker)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.data())
def test_matmul_rank_bound(a, b, c, data):
    m1 = SparseMatrix.from_rows(
        [[data.draw(small_fracs) for _ in range(b)] for _ in range(a)]
    )
    m2 = SparseMatrix.from_rows(
        [[data.draw(small_fracs) for _ in range(c)] for _ in range(b)]
    )
    assert rank(m1.matmul(m2)) <= min(rank(m1), rank(m2))
