"""Sparse exact linear algebra over the rationals.

Matrices are stored as dictionaries mapping (row, col) to nonzero
Fraction entries.  Everything is computed exactly; there is no
floating point anywhere in this package.

Elimination picks pivots by a cheap Markowitz-style count (fewest
nonzeros in the pivot row times fewest in the pivot column) to limit
fill-in.  All public functions treat matrices as immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

# Hard safety cap: a single matrix may not hold more nonzeros than this.
MAX_NONZEROS = 200_000


class CapacityError(Exception):
    """Raised when a matrix exceeds the nonzero budget."""


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SparseMatrix:
    """An immutable rows x cols matrix of Fractions, sparsely stored."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) > MAX_NONZEROS:
            raise CapacityError(
                "matrix has %d nonzeros, cap is %d" % (len(self.entries), MAX_NONZEROS)
            )
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError("entry (%d, %d) out of bounds" % (i, j))
            v = _fr(v)
            if v != 0:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    @staticmethod
    def zero(rows: int, cols: int) -> "SparseMatrix":
        return SparseMatrix(rows, cols, {})

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        return SparseMatrix(n, n, {(i, i): Fraction(1) for i in range(n)})

    @staticmethod
    def from_rows(rows_list, cols: int | None = None) -> "SparseMatrix":
        """Build from a list of dense rows (lists) or sparse rows (dicts)."""
        n = len(rows_list)
        if cols is None:
            if n == 0:
                raise ValueError("cannot infer column count from no rows")
            first = rows_list[0]
            cols = len(first) if isinstance(first, (list, tuple)) else (
                1 + max(first.keys(), default=-1)
            )
        entries = {}
        for i, row in enumerate(rows_list):
            items = enumerate(row) if isinstance(row, (list, tuple)) else row.items()
            for j, v in items:
                v = _fr(v)
                if v != 0:
                    entries[(i, j)] = v
        return SparseMatrix(n, cols, entries)

    @staticmethod
    def from_columns(cols_list, rows: int) -> "SparseMatrix":
        """Build from a list of sparse columns (dicts row -> value)."""
        entries = {}
        for j, col in enumerate(cols_list):
            for i, v in col.items():
                v = _fr(v)
                if v != 0:
                    entries[(i, j)] = v
        return SparseMatrix(rows, len(cols_list), entries)

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), Fraction(0))

    def row(self, i: int) -> dict:
        return {j: v for (r, j), v in self.entries.items() if r == i}

    def column(self, j: int) -> dict:
        return {i: v for (i, c), v in self.entries.items() if c == j}

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def scale(self, c) -> "SparseMatrix":
        c = _fr(c)
        return SparseMatrix(
            self.rows, self.cols, {k: c * v for k, v in self.entries.items()}
        )

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, Fraction(0)) + v
        return SparseMatrix(self.rows, self.cols, entries)

    def sub(self, other: "SparseMatrix") -> "SparseMatrix":
        return self.add(other.scale(-1))

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        other_rows: dict = {}
        for (i, j), v in other.entries.items():
            other_rows.setdefault(i, {})[j] = v
        entries: dict = {}
        for (i, k), a in self.entries.items():
            row_k = other_rows.get(k)
            if not row_k:
                continue
            for j, b in row_k.items():
                key = (i, j)
                entries[key] = entries.get(key, Fraction(0)) + a * b
        return SparseMatrix(self.rows, other.cols, entries)

    def apply(self, vec: dict) -> dict:
        """Apply to a sparse column vector {index: Fraction}."""
        out: dict = {}
        for (i, j), a in self.entries.items():
            b = vec.get(j)
            if b:
                out[i] = out.get(i, Fraction(0)) + a * b
        return {i: v for i, v in out.items() if v != 0}

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        entries = dict(self.entries)
        for (i, j), v in other.entries.items():
            entries[(i, j + self.cols)] = v
        return SparseMatrix(self.rows, self.cols + other.cols, entries)

    def to_dense(self):
        return [
            [self.get(i, j) for j in range(self.cols)] for i in range(self.rows)
        ]


def _row_echelon(mat: SparseMatrix):
    """Gaussian elimination with Markowitz-flavoured pivoting.

    Returns (pivots, rows) where rows is a list of sparse rows (dicts)
    in echelon form and pivots is a list of (row_index, col) pairs.
    Rows are fully reduced above their pivots (RREF up to row order).
    """
    rows = []
    for i in range(mat.rows):
        rows.append({})
    for (i, j), v in mat.entries.items():
        rows[i][j] = v
    active = set(range(mat.rows))
    col_count: dict = {}
    for r in active:
        for j in rows[r]:
            col_count[j] = col_count.get(j, 0) + 1
    pivots = []
    while True:
        # pick the pivot minimizing (row nnz - 1) * (col nnz - 1)
        best = None
        for r in active:
            if not rows[r]:
                continue
            rlen = len(rows[r])
            for j, v in rows[r].items():
                score = (rlen - 1) * (col_count.get(j, 1) - 1)
                key = (score, j, r)
                if best is None or key < best[0]:
                    best = (key, r, j)
        if best is None:
            break
        _, pr, pc = best
        active.discard(pr)
        pivot_row = rows[pr]
        inv = Fraction(1) / pivot_row[pc]
        if inv != 1:
            for j in list(pivot_row):
                pivot_row[j] *= inv
        # eliminate pc from every other row (including settled ones, for RREF)
        for r in range(mat.rows):
            if r == pr:
                continue
            c = rows[r].get(pc)
            if not c:
                continue
            target = rows[r]
            for j, v in pivot_row.items():
                nv = target.get(j, Fraction(0)) - c * v
                if nv == 0:
                    if j in target:
                        del target[j]
                        if r in active:
                            col_count[j] -= 1
                else:
                    if j not in target and r in active:
                        col_count[j] = col_count.get(j, 0) + 1
                    target[j] = nv
        for j in pivot_row:
            col_count[j] = col_count.get(j, 1) - 1
        pivots.append((pr, pc))
        total = sum(len(r) for r in rows)
        if total > MAX_NONZEROS:
            raise CapacityError("elimination fill-in exceeded nonzero cap")
    return pivots, rows


def rank(mat: SparseMatrix) -> int:
    pivots, _ = _row_echelon(mat)
    return len(pivots)


def rref(mat: SparseMatrix):
    """Reduced row echelon data: (pivot_cols sorted, rows keyed by pivot col).

    Returns (pivot_cols, reduced) where reduced maps each pivot column
    to its fully reduced sparse row.
    """
    pivots, rows = _row_echelon(mat)
    reduced = {pc: rows[pr] for pr, pc in pivots}
    return sorted(reduced), reduced


def kernel_basis(mat: SparseMatrix):
    """Basis of the right kernel, as sparse column vectors {index: Fraction}."""
    pivot_cols, reduced = rref(mat)
    pivot_set = set(pivot_cols)
    free_cols = [j for j in range(mat.cols) if j not in pivot_set]
    basis = []
    for f in free_cols:
        vec = {f: Fraction(1)}
        for pc in pivot_cols:
            v = reduced[pc].get(f)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def in_column_span(mat: SparseMatrix, vec: dict) -> bool:
    """Is the sparse column vector in the column span of mat?"""
    col = SparseMatrix(mat.rows, 1, {(i, 0): v for i, v in vec.items()})
    return rank(mat.hstack(col)) == rank(mat)


def solve_column(mat: SparseMatrix, vec: dict):
    """Solve mat @ x = vec; return sparse x or None if inconsistent."""
    col = SparseMatrix(mat.rows, 1, {(i, 0): v for i, v in vec.items()})
    aug = mat.hstack(col)
    pivot_cols, reduced = rref(aug)
    if mat.cols in pivot_cols:
        return None
    x = {}
    for pc in pivot_cols:
        v = reduced[pc].get(mat.cols)
        if v:
            x[pc] = v
    return x


@dataclass(frozen=True)
class ChainComplex:
    """A bounded chain complex of finite dimensional rational spaces.

    dims maps degree -> dimension; diffs maps degree d to the matrix of
    the differential dims[d] -> dims[d-1].  The square-zero identity is
    checked on construction.
    """

    dims: dict
    diffs: dict

    def __post_init__(self):
        for d, mat in self.diffs.items():
            if mat.cols != self.dims.get(d, 0):
                raise ValueError("differential at %d has %d cols, dim is %d"
                                 % (d, mat.cols, self.dims.get(d, 0)))
            if mat.rows != self.dims.get(d - 1, 0):
                raise ValueError("differential at %d has %d rows, dim below is %d"
                                 % (d, mat.rows, self.dims.get(d - 1, 0)))
        for d, mat in self.diffs.items():
            below = self.diffs.get(d - 1)
            if below is not None and not below.matmul(mat).is_zero():
                raise ValueError("differential does not square to zero at %d" % d)

    def homology_dims(self) -> dict:
        out = {}
        for d in sorted(self.dims):
            dim = self.dims[d]
            if dim == 0:
                out[d] = 0
                continue
            d_out = self.diffs.get(d)
            rk_out = rank(d_out) if d_out is not None else 0
            d_in = self.diffs.get(d + 1)
            rk_in = rank(d_in) if d_in is not None else 0
            out[d] = dim - rk_out - rk_in
        return out
