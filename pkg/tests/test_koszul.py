"""Tests for bar complexes, quadratic duality, and coproperad data."""

import math
from fractions import Fraction

import pytest

from propcalc.exactla import rank
from propcalc.freeprop import (
    FreeElement,
    Generator,
    GeneratorSet,
    Presentation,
    corolla,
    partial_compose,
    quotient_basis,
    relabel_element_legs,
)
from propcalc.koszul import (
    CoproperadData,
    PairingTable,
    VertexType,
    bar_complex,
    bar_homology,
    check_square_zero,
    cobar_of_dual,
    dual_generators,
    koszul_criterion,
    koszul_dual,
    syzygy_dims,
)


def assoc_presentation(mode, symmetry="regular"):
    g = GeneratorSet((Generator("m", 1, 2, 0, symmetry),), mode)
    mu = FreeElement.from_graph(g, corolla(g, "m"))
    left = partial_compose(g, mu, mu, [(0, 0)])
    right = relabel_element_legs(
        g, partial_compose(g, mu, mu, [(0, 1)]), in_perm=(2, 0, 1)
    )
    return Presentation(g, (left.sub(right),))


def jacobi_presentation():
    g = GeneratorSet((Generator("b", 1, 2, 0, "sign"),), "properad")
    b = FreeElement.from_graph(g, corolla(g, "b"))
    t = partial_compose(g, b, b, [(0, 0)])
    jac = (
        t.add(relabel_element_legs(g, t, in_perm=(2, 0, 1)))
        .add(relabel_element_legs(g, t, in_perm=(1, 2, 0)))
    )
    return Presentation(g, (jac,))


def quotient_dims(pres, rows):
    return [quotient_basis(pres, m, n, w)[0] for (m, n, w) in rows]


# --- bar complexes -------------------------------------------------------

def test_bar_complex_squares_to_zero():
    pres = assoc_presentation("properad")
    cx, _spaces = bar_complex(pres, 1, 4, 3)
    # ChainComplex validates d. d = 0 on construction; re-check one product
    d3 = cx.diffs[3]
    d2 = cx.diffs[2]
    assert d2.matmul(d3).is_zero()


def test_ns_associative_bar_homology_is_top_concentrated():
    pres = assoc_presentation("ns-properad")
    for w in range(2, 5):
        hom = bar_homology(pres, 1, w + 1, w)
        assert hom == {k: (1 if k == w else 0) for k in range(1, w + 1)}


def test_symmetric_associative_bar_homology():
    pres = assoc_presentation("properad")
    for w in (2, 3):
        hom = bar_homology(pres, 1, w + 1, w)
        want = {k: 0 for k in range(1, w + 1)}
        want[w] = math.factorial(w + 1)
        assert hom == want


def test_koszul_criterion_verdicts():
    ok, report = koszul_criterion(
        assoc_presentation("ns-properad"), [(1, 3, 2), (1, 4, 3)]
    )
    assert ok
    assert all(entry["concentrated"] for entry in report.values())


def test_syzygy_dims_match_dual_quotient():
    # ns associative: dual codata is one-dimensional in every cell
    pres = assoc_presentation("ns-properad")
    assert [syzygy_dims(pres, 1, w + 1, w) for w in range(1, 5)] == [1, 1, 1, 1]
    # commutative: dual codata has the dimensions of the Lie quotient
    com = assoc_presentation("properad", symmetry="trivial")
    assert [syzygy_dims(com, 1, w + 1, w) for w in range(1, 4)] == [1, 2, 6]


def test_cobar_of_dual_is_transpose():
    pres = assoc_presentation("ns-properad")
    bar, _s1 = bar_complex(pres, 1, 4, 3)
    cobar, _s2 = cobar_of_dual(pres, 1, 4, 3)
    for k, mat in bar.diffs.items():
        assert cobar.diffs[3 - k + 1].entries == mat.transpose().entries


# --- quadratic duality ---------------------------------------------------

def test_dual_generators_twist_symmetry():
    g = GeneratorSet(
        (Generator("a", 1, 2, 0, "trivial"), Generator("b", 1, 2, 0, "sign"),
         Generator("c", 1, 2, 0, "regular")),
        "properad",
    )
    d = dual_generators(g)
    assert [x.symmetry for x in d.generators] == ["sign", "trivial", "regular"]


def test_pairing_table_is_invertible():
    g = GeneratorSet((Generator("m", 1, 2, 0, "regular"),), "properad")
    table = PairingTable(g, 1, 3)
    assert len(table.basis) == len(table.dual_basis) == 12
    assert rank(table.matrix) == 12


def test_ns_associative_self_dual():
    pres = assoc_presentation("ns-properad")
    dual = koszul_dual(pres)
    assert quotient_dims(dual, [(1, w + 1, w) for w in range(1, 4)]) == [1, 1, 1]
    double = koszul_dual(dual)
    assert quotient_dims(double, [(1, w + 1, w) for w in range(1, 4)]) == [1, 1, 1]


def test_symmetric_associative_dual_dims():
    pres = assoc_presentation("properad")
    dual = koszul_dual(pres)
    assert quotient_dims(dual, [(1, w + 1, w) for w in range(1, 4)]) == [2, 6, 24]
    double = koszul_dual(dual)
    assert quotient_dims(double, [(1, w + 1, w) for w in range(1, 4)]) == [2, 6, 24]


def test_commutative_dual_is_jacobi_shaped():
    com = assoc_presentation("properad", symmetry="trivial")
    dual = koszul_dual(com)
    assert dual.gens.generators[0].symmetry == "sign"
    assert quotient_dims(dual, [(1, w + 1, w) for w in range(1, 4)]) == [1, 2, 6]
    double = koszul_dual(dual)
    assert quotient_dims(double, [(1, w + 1, w) for w in range(1, 4)]) == [1, 1, 1]


def test_jacobi_dual_is_commutative_shaped():
    lie = jacobi_presentation()
    dual = koszul_dual(lie)
    assert dual.gens.generators[0].symmetry == "trivial"
    assert quotient_dims(dual, [(1, w + 1, w) for w in range(1, 4)]) == [1, 1, 1]
    double = koszul_dual(dual)
    assert quotient_dims(double, [(1, w + 1, w) for w in range(1, 4)]) == [1, 2, 6]


def test_dual_relation_count_complements_relations():
    # dim(relations) + dim(dual relations) = dim of the weight-two cell
    pres = assoc_presentation("properad")
    dual = koszul_dual(pres)
    from propcalc.freeprop import enumerate_basis, expanded_relations, element_coordinates
    from propcalc.exactla import SparseMatrix

    basis = enumerate_basis(pres.gens, 1, 3, 2)
    index = {dg: i for i, dg in enumerate(basis)}
    rows = [element_coordinates(index, r) for r in expanded_relations(pres)]
    rdim = rank(SparseMatrix.from_rows(rows, cols=len(basis)))
    dbasis = enumerate_basis(dual.gens, 1, 3, 2)
    dindex = {dg: i for i, dg in enumerate(dbasis)}
    drows = [element_coordinates(dindex, r) for r in expanded_relations(dual)]
    ddim = rank(SparseMatrix.from_rows(drows, cols=len(dbasis)))
    assert rdim + ddim == len(basis) == 12


# --- homotopy coproperad data -------------------------------------------

def _corolla_codual(nmax, flip=False):
    """Cogenerators c_n of biarity (1, n) in shifted degree n - 2 whose
    decomposition grafts c_s into c_{n-s+1} at slot i with the sign
    (-1)**((s + 1) * i + s); flip negates one term to break the squares."""
    gens = GeneratorSet(
        tuple(Generator("c%d" % n, 1, n, n - 2, "regular") for n in range(2, nmax + 1)),
        "ns-properad",
    )
    cor = {
        n: FreeElement.from_graph(gens, corolla(gens, "c%d" % n))
        for n in range(2, nmax + 1)
    }
    cells = [VertexType("c%d" % n, 1, n, n - 2, n - 1, 1) for n in range(2, nmax + 1)]

    def graft(a, s, i):
        e = partial_compose(gens, cor[s], cor[a], [(0, i)])
        n = a + s - 1
        p = tuple(
            list(range(s, s + i)) + list(range(0, s)) + list(range(s + i, n))
        )
        return relabel_element_legs(gens, e, in_perm=p)

    def delta(tid, idx):
        n = int(tid[1:])
        out = []
        for s in range(2, n):
            a = n - s + 1
            for i in range(a):
                sign = -1 if ((s + 1) * i + s) % 2 else 1
                if flip and (n, s, i) == (4, 2, 1):
                    sign = -sign
                for dg, v in graft(a, s, i).terms.items():
                    out.append((dg, (0, 0), Fraction(sign) * v))
        return out

    return CoproperadData(cells, delta, strict=True, mode="ns-properad")


def test_square_zero_detects_good_and_bad_signs():
    ok, failures = check_square_zero(_corolla_codual(5))
    assert ok and not failures
    bad, failures = check_square_zero(_corolla_codual(5, flip=True))
    assert not bad and failures
