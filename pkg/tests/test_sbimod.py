"""Tests for graded bimodule cells and equivariant maps."""

import itertools
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from propcalc.exactla import SparseMatrix, rank
from propcalc.sbimod import (
    GradedSBimodule,
    adjacent_transposition_word,
    average_over_group,
    hom_equivariant_basis,
    suspension_shift,
    suspension_sign,
)


def compose(p, q):
    """(p . q)(x) = p(q(x))"""
    return tuple(p[q[i]] for i in range(len(q)))


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(5))))
def test_transposition_word_recomposes(perm):
    perm = tuple(perm)
    word = adjacent_transposition_word(perm)
    acc = tuple(range(len(perm)))
    for i in word:
        s = list(range(len(perm)))
        s[i], s[i + 1] = s[i + 1], s[i]
        acc = compose(acc, tuple(s))
    assert acc == perm


def regular_module(n, d=0, sign=False):
    """The regular representation of S_n on one side (inputs), spanned
    by the group elements themselves; transpositions act by left
    multiplication (times -1 in the signed variant)."""
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    dim = len(perms)

    def provider(cell, side, i):
        if side == "out":
            return SparseMatrix.identity(dim)
        s = list(range(n))
        s[i], s[i + 1] = s[i + 1], s[i]
        s = tuple(s)
        c = Fraction(-1 if sign else 1)
        return SparseMatrix(
            dim, dim, {(index[compose(s, p)], index[p]): c for p in perms}
        )

    return GradedSBimodule({(1, n, d): dim}, provider)


def trivial_module(m, n, d=0, dim=1):
    return GradedSBimodule({(m, n, d): dim})


def test_permutation_action_is_homomorphism():
    mod = regular_module(3)
    cell = (1, 3, 0)
    for p in itertools.permutations(range(3)):
        for q in itertools.permutations(range(3)):
            lhs = mod.permutation_action(cell, "in", compose(p, q))
            rhs = mod.permutation_action(cell, "in", p).matmul(
                mod.permutation_action(cell, "in", q)
            )
            assert lhs.entries == rhs.entries


def test_equivariant_maps_regular_to_trivial():
    # Hom_S3(regular, trivial) is one dimensional
    src = regular_module(3)
    dst = trivial_module(1, 3)
    basis = hom_equivariant_basis(src, dst, (1, 3, 0), (1, 3, 0))
    assert len(basis) == 1


def test_equivariant_maps_regular_to_regular():
    # Hom_Sn(regular, regular) has dimension n! (right multiplications)
    src = regular_module(3)
    basis = hom_equivariant_basis(src, src, (1, 3, 0), (1, 3, 0))
    assert len(basis) == 6


def test_equivariant_maps_trivial_to_sign():
    # no nonzero maps from trivial to sign for n >= 2
    n = 3
    perms = sorted(itertools.permutations(range(n)))

    def sgn_provider(cell, side, i):
        if side == "out":
            return SparseMatrix.identity(1)
        return SparseMatrix(1, 1, {(0, 0): Fraction(-1)})

    sign_mod = GradedSBimodule({(1, n, 0): 1}, sgn_provider)
    triv = trivial_module(1, n)
    assert hom_equivariant_basis(triv, sign_mod, (1, n, 0), (1, n, 0)) == []
    # sign to sign is one dimensional
    assert len(hom_equivariant_basis(sign_mod, sign_mod, (1, n, 0), (1, n, 0))) == 1


def test_averaging_oracle_matches_kernel_method():
    src = regular_module(3)
    dst = regular_module(3)
    cell = (1, 3, 0)
    basis = hom_equivariant_basis(src, dst, cell, cell)
    # averaging any elementary matrix lands in the span of the basis,
    # and the averaged images of all elementary matrices span it fully
    dim = 6
    averaged = []
    for i in range(dim):
        for j in range(dim):
            f = SparseMatrix(dim, dim, {(i, j): Fraction(1)})
            averaged.append(average_over_group(src, dst, cell, cell, f))
    flat = SparseMatrix.from_columns(
        [{r * dim + c: v for (r, c), v in g.entries.items()} for g in averaged],
        dim * dim,
    )
    flat_basis = SparseMatrix.from_columns(
        [{r * dim + c: v for (r, c), v in g.entries.items()} for g in basis],
        dim * dim,
    )
    assert rank(flat) == rank(flat_basis) == len(basis)
    assert rank(flat.hstack(flat_basis)) == len(basis)


def test_suspension_shift_moves_degrees():
    mod = regular_module(3, d=2)
    up = suspension_shift(mod, 1)
    assert up.cells == {(1, 3, 3): 6}
    # actions carried over unchanged
    a = mod.transposition_action((1, 3, 2), "in", 0)
    b = up.transposition_action((1, 3, 3), "in", 0)
    assert a.entries == b.entries
    tw = suspension_shift(mod, 1, signature_twist=True)
    c = tw.transposition_action((1, 3, 3), "in", 0)
    assert c.entries == a.scale(-1).entries


def test_suspension_sign_formula():
    # e = (n-1)|p1| + ... + |p_{n-1}|
    assert suspension_sign([0, 0, 0]) == 1
    assert suspension_sign([1]) == 1          # single symbol: e = 0
    assert suspension_sign([1, 0]) == -1      # e = 1
    assert suspension_sign([1, 1]) == -1      # e = 1*1 + 0*1 = 1
    assert suspension_sign([1, 1, 0]) == -1   # e = 2*1 + 1*1 + 0*0 = 3
