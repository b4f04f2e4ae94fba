"""Graded bimodules over pairs of symmetric groups.

A cell is indexed by (m, n, d): m output labels, n input labels,
homological degree d.  The symmetric groups acting on the two label
sets are encoded through their adjacent transpositions: for each cell
the module provides one matrix per adjacent transposition on each
side, and arbitrary permutation actions are assembled from those.

Arities are capped at 6 on both sides; everything here is meant for
small exact computations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactla import SparseMatrix, kernel_basis

ARITY_CAP = 6


class ArityCapError(Exception):
    pass


def check_arity(m: int, n: int):
    if m > ARITY_CAP or n > ARITY_CAP:
        raise ArityCapError("arity (%d, %d) exceeds the cap of %d" % (m, n, ARITY_CAP))


def adjacent_transposition_word(perm):
    """Decompose a permutation (tuple of images, perm[i] = where slot i
    goes) into adjacent transpositions s_i = (i, i+1), returned as a
    list of indices i applied left to right."""
    perm = list(perm)
    word = []
    # bubble sort back to identity; record swaps in reverse
    changed = True
    arr = list(perm)
    while changed:
        changed = False
        for i in range(len(arr) - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                word.append(i)
                changed = True
    word.reverse()
    return word


@dataclass
class GradedSBimodule:
    """cells: (m, n, d) -> dimension.
    action_provider(cell, side, i) -> SparseMatrix of the adjacent
    transposition s_i, side in {"out", "in"}.  Defaults to identity
    matrices (trivial actions).  differential, when present, maps cell
    (m, n, d) -> matrix into (m, n, d-1)."""

    cells: dict
    action_provider: object = None
    differential: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def dim(self, cell) -> int:
        return self.cells.get(cell, 0)

    def transposition_action(self, cell, side, i) -> SparseMatrix:
        key = (cell, side, i)
        if key not in self._cache:
            if self.action_provider is None:
                mat = SparseMatrix.identity(self.dim(cell))
            else:
                mat = self.action_provider(cell, side, i)
            self._cache[key] = mat
        return self._cache[key]

    def permutation_action(self, cell, side, perm) -> SparseMatrix:
        """Matrix of the permutation acting on the cell.  perm[i] is the
        image of label i."""
        # perm factors as s_{w0} . s_{w1} . ... , so its matrix is the
        # product of the transposition matrices in word order
        mat = SparseMatrix.identity(self.dim(cell))
        for i in adjacent_transposition_word(perm):
            mat = mat.matmul(self.transposition_action(cell, side, i))
        return mat


def suspension_shift(module: GradedSBimodule, k: int, signature_twist=False) -> GradedSBimodule:
    """Shift every cell degree by k.  With signature_twist the action of
    each adjacent transposition picks up a factor of -1 on both sides."""
    cells = {(m, n, d + k): dim for (m, n, d), dim in module.cells.items()}

    def provider(cell, side, i):
        m, n, d = cell
        base = module.transposition_action((m, n, d - k), side, i)
        return base.scale(-1) if signature_twist else base

    diff = {
        (m, n, d + k): mat for (m, n, d), mat in module.differential.items()
    }
    return GradedSBimodule(cells, provider, diff)


def suspension_sign(degrees) -> int:
    """Sign (-1)**e with e = (n-1)|p_1| + (n-2)|p_2| + ... + |p_{n-1}|,
    the Koszul cost of distributing one shift to each of n symbols."""
    n = len(degrees)
    e = sum((n - 1 - i) * degrees[i] for i in range(n))
    return -1 if e % 2 else 1


def _defect_operator(src: GradedSBimodule, dst: GradedSBimodule, src_cell, dst_cell):
    """Matrix of f -> (t.f - f.t) stacked over all adjacent
    transpositions t, acting on Hom(src_cell, dst_cell) flattened
    row-major: entry (i, j) of f sits at index i*ds + j."""
    m, n, _ = src_cell
    ds = src.dim(src_cell)
    dd = dst.dim(dst_cell)
    size = dd * ds
    transpositions = [("out", i) for i in range(m - 1)] + [
        ("in", i) for i in range(n - 1)
    ]
    blocks = []
    for side, i in transpositions:
        a = dst.transposition_action(dst_cell, side, i)  # dd x dd
        b = src.transposition_action(src_cell, side, i)  # ds x ds
        # (a.f - f.b) flattened: rows indexed by (p, q)
        entries = {}
        for (p, k), v in a.entries.items():
            for q in range(ds):
                entries[(p * ds + q, k * ds + q)] = (
                    entries.get((p * ds + q, k * ds + q), Fraction(0)) + v
                )
        for (k, q), v in b.entries.items():
            for p in range(dd):
                key = (p * ds + q, p * ds + k)
                entries[key] = entries.get(key, Fraction(0)) - v
        blocks.append(SparseMatrix(size, size, entries))
    if not blocks:
        return SparseMatrix.zero(0, size)
    stacked = {}
    for bi, blk in enumerate(blocks):
        for (r, c), v in blk.entries.items():
            stacked[(bi * size + r, c)] = v
    return SparseMatrix(len(blocks) * size, size, stacked)


def hom_equivariant_basis(src: GradedSBimodule, dst: GradedSBimodule, src_cell, dst_cell):
    """Basis of equivariant linear maps src_cell -> dst_cell, as
    matrices.  Computed as the kernel of the conjugation-defect
    operator over all adjacent transpositions."""
    m, n, _ = src_cell
    m2, n2, _ = dst_cell
    if (m, n) != (m2, n2):
        raise ValueError("equivariant maps need matching biarities")
    check_arity(m, n)
    ds = src.dim(src_cell)
    dd = dst.dim(dst_cell)
    if ds == 0 or dd == 0:
        return []
    defect = _defect_operator(src, dst, src_cell, dst_cell)
    basis = []
    for vec in kernel_basis(defect):
        entries = {}
        for idx, v in vec.items():
            entries[(idx // ds, idx % ds)] = v
        basis.append(SparseMatrix(dd, ds, entries))
    return basis


def average_over_group(src: GradedSBimodule, dst: GradedSBimodule, src_cell, dst_cell, f: SparseMatrix) -> SparseMatrix:
    """Group-averaging projector onto equivariant maps; used as an
    independent cross-check of hom_equivariant_basis."""
    m, n, _ = src_cell
    check_arity(m, n)
    total = SparseMatrix.zero(dst.dim(dst_cell), src.dim(src_cell))
    count = 0
    for pm in itertools.permutations(range(m)):
        am = dst.permutation_action(dst_cell, "out", pm)
        bm_inv = src.permutation_action(
            src_cell, "out", tuple(pm.index(i) for i in range(m))
        )
        for pn in itertools.permutations(range(n)):
            an = dst.permutation_action(dst_cell, "in", pn)
            bn_inv = src.permutation_action(
                src_cell, "in", tuple(pn.index(i) for i in range(n))
            )
            g = am.matmul(an).matmul(f).matmul(bn_inv).matmul(bm_inv)
            total = total.add(g)
            count += 1
    return total.scale(Fraction(1, count))
