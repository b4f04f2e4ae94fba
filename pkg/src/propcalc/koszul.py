"""Bar complexes, quadratic duals, and homotopy coproperad data.

The workhorse is CompositeSpace: the span of decorated graphs whose
vertices carry basis elements of prescribed cells, presented as a
quotient of "rigid atoms" (canonical graph shape + one basis index per
vertex) by slot-relabelling relations.  Working with the quotient keeps
arbitrary symmetric group actions on the cells exact without choosing
equivariant bases.

The bar complex of a quadratic quotient lives on composite spaces whose
vertex cells are the quotient cells; its differential composes one
admissible adjacent pair of vertices at a time.  The cobar complex of
the Koszul dual codata is the transpose of the bar complex of the dual
presentation, which makes its square-zero property inherited rather
than re-derived.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exactla import ChainComplex, SparseMatrix, rank, rref
from .graphkit import (
    DecoratedGraph,
    FlowGraph,
    GraphError,
    adjacent_pairs,
    canonical_form_with_map,
    contract_subgraph,
    extract_subgraph,
    relabel_legs,
)
from .freeprop import (
    ARITY_CAP,
    CapError,
    FreeElement,
    GENUS_CAP,
    Generator,
    GeneratorSet,
    Presentation,
    QuotientCell,
    check_caps,
    enumerate_basis,
)


@dataclass(frozen=True)
class VertexType:
    """A cell usable as a vertex decoration in composite graphs."""

    tid: str
    outputs: int
    inputs: int
    degree: int
    weight: int
    dim: int
    # action(side, i) -> SparseMatrix of the adjacent transposition
    # s_i on the cell basis, or None when the cell has no symmetries
    action: object = None


def _swap_slots(dg: DecoratedGraph, v, side, i) -> DecoratedGraph:
    """The graph with slots i and i+1 of vertex v on the given side
    exchanged (edges and legs re-attached accordingly)."""
    g = dg.graph

    def fix(att, want_side):
        w, s = att
        if w == v and want_side == side and s in (i, i + 1):
            return (w, i if s == i + 1 else i + 1)
        return att

    edges = tuple(
        (fix(a, "out"), fix(b, "in")) for a, b in g.edges
    )
    inputs = tuple(fix(a, "in") for a in g.inputs)
    outputs = tuple(fix(a, "out") for a in g.outputs)
    return DecoratedGraph(
        FlowGraph(g.vertices, edges, inputs, outputs), dg.decorations, dg.degrees
    )


class CompositeSpace:
    """Decorated graphs with k vertices typed by the given cells, in
    the cell (m outputs, n inputs), of total vertex weight
    total_weight (when given), presented as atoms modulo relations."""

    def __init__(self, types, m, n, k, total_weight=None, genus_cap=GENUS_CAP,
                 mode="properad"):
        check_caps(m=m, n=n, genus=genus_cap)
        self.types = {t.tid: t for t in types}
        self.mode = mode
        shape_gens = GeneratorSet(
            tuple(
                Generator(t.tid, t.outputs, t.inputs, t.degree, "regular")
                for t in types
            ),
            mode,
        )
        weights = {t.tid: t.weight for t in types}
        shapes = enumerate_basis(
            shape_gens, m, n, k, genus_cap,
            vertex_weights=weights if total_weight is not None else None,
            total_weight=total_weight,
        )
        self.shapes = shapes
        self.shape_index = {s: i for i, s in enumerate(shapes)}
        self.atoms = []
        for s in shapes:
            dims = [self.types[t].dim for t in s.decorations]
            for dec in itertools.product(*[range(d) for d in dims]):
                self.atoms.append((s, dec))
        self.atom_index = {a: i for i, a in enumerate(self.atoms)}
        self._build_relations()

    def _build_relations(self):
        rows = []
        if self.mode != "ns-properad":
            for s in self.shapes:
                for v, tid in enumerate(s.decorations):
                    t = self.types[tid]
                    if t.action is None:
                        continue
                    for side, count in (("out", t.outputs), ("in", t.inputs)):
                        for i in range(count - 1):
                            act = t.action(side, i)
                            swapped = _swap_slots(s, v, side, i)
                            can, sign, vperm = canonical_form_with_map(swapped)
                            dims = [self.types[x].dim for x in s.decorations]
                            for dec in itertools.product(*[range(d) for d in dims]):
                                row = {}
                                idx = self.atom_index[(s, dec)]
                                row[idx] = row.get(idx, Fraction(0)) + 1
                                if sign != 0:
                                    col = act.column(dec[v])
                                    for kk, coef in col.items():
                                        nd = list(dec)
                                        nd[v] = kk
                                        # transport decorations along the
                                        # canonical vertex permutation
                                        nd2 = [0] * len(nd)
                                        for old, newpos in enumerate(vperm):
                                            nd2[newpos] = nd[old]
                                        jdx = self.atom_index[(can, tuple(nd2))]
                                        row[jdx] = row.get(jdx, Fraction(0)) - sign * coef
                                row = {kk: vv for kk, vv in row.items() if vv != 0}
                                if row:
                                    rows.append(row)
        mat = SparseMatrix.from_rows(rows, cols=len(self.atoms)) if rows else \
            SparseMatrix.zero(0, len(self.atoms))
        pivot_cols, reduced = rref(mat)
        self.pivots = pivot_cols
        self.reduced_rows = reduced
        pivot_set = set(pivot_cols)
        self.rep_indices = [i for i in range(len(self.atoms)) if i not in pivot_set]
        self.rep_pos = {b: kk for kk, b in enumerate(self.rep_indices)}
        self.dim = len(self.rep_indices)

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        for p in self.pivots:
            c = vec.get(p)
            if not c:
                continue
            for j, v in self.reduced_rows[p].items():
                nv = vec.get(j, Fraction(0)) - c * v
                if nv == 0:
                    vec.pop(j, None)
                else:
                    vec[j] = nv
        return {kk: vv for kk, vv in vec.items() if vv != 0}

    def atom_terms(self, dg: DecoratedGraph, dec, coef=Fraction(1)) -> dict:
        """Raw atom vector of a (possibly non-canonical) typed graph."""
        can, sign, vperm = canonical_form_with_map(dg)
        if sign == 0:
            return {}
        nd = [0] * len(dec)
        for old, newpos in enumerate(vperm):
            nd[newpos] = dec[old]
        key = (can, tuple(nd))
        if key not in self.atom_index:
            raise GraphError("typed graph outside the composite space")
        return {self.atom_index[key]: Fraction(coef) * sign}

    def coordinates(self, raw_terms) -> dict:
        """Coordinates over the representative atoms.  raw_terms is
        either an atom vector {atom_index: coef} or a list of
        (graph, dec, coef) triples."""
        if isinstance(raw_terms, dict):
            vec = raw_terms
        else:
            vec = {}
            for dg, dec, coef in raw_terms:
                for idx, c in self.atom_terms(dg, dec, coef).items():
                    vec[idx] = vec.get(idx, Fraction(0)) + c
        vec = self.reduce(vec)
        out = {}
        for idx, c in vec.items():
            out[self.rep_pos[idx]] = c
        return out


class QuotientCalculator:
    """Caches quotient cells of a presentation and exposes them as
    vertex types for composite spaces."""

    def __init__(self, pres: Presentation, genus_cap=GENUS_CAP):
        self.pres = pres
        self.genus_cap = min(genus_cap, pres.gens.genus_cap(genus_cap))
        self._cells = {}
        self._actions = {}

    def cell(self, m, n, w) -> QuotientCell:
        key = (m, n, w)
        if key not in self._cells:
            self._cells[key] = QuotientCell(self.pres, m, n, w, self.genus_cap)
        return self._cells[key]

    def action_matrix(self, m, n, w, side, i) -> SparseMatrix:
        key = (m, n, w, side, i)
        if key in self._actions:
            return self._actions[key]
        cell = self.cell(m, n, w)
        cols = []
        for g in cell.representatives():
            if side == "in":
                perm = list(range(n))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                moved = relabel_legs(g, in_perm=tuple(perm))
            else:
                perm = list(range(m))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                moved = relabel_legs(g, out_perm=tuple(perm))
            elem = FreeElement.from_graph(self.pres.gens, moved)
            cols.append(cell.coordinates(elem))
        mat = SparseMatrix.from_columns(cols, cell.dim)
        self._actions[key] = mat
        return mat

    def vertex_type(self, m, n, w, degree) -> VertexType:
        cell = self.cell(m, n, w)
        calc = self

        def action(side, i):
            return calc.action_matrix(m, n, w, side, i)

        return VertexType(
            "q:%d:%d:%d" % (m, n, w), m, n, degree, w, cell.dim,
            action if self.pres.gens.mode != "ns-properad" else None,
        )

    def possible_biarities(self, max_weight):
        """Biarities of potentially nonzero quotient cells per weight,
        derived from the generator biarities by pairwise gluing."""
        by_weight = {1: set()}
        for g in self.pres.gens.generators:
            by_weight[1].add((g.outputs, g.inputs))
        for w in range(2, max_weight + 1):
            acc = set()
            for w1 in range(1, w):
                w2 = w - w1
                if w2 not in by_weight:
                    continue
                for (m1, n1) in by_weight[w1]:
                    for (m2, n2) in by_weight[w2]:
                        max_e = min(m1, n2)
                        if self.pres.gens.mode == "dioperad":
                            max_e = min(max_e, 1)
                        else:
                            max_e = min(max_e, 1 + self.genus_cap)
                        for e in range(1, max_e + 1):
                            mm, nn = m1 + m2 - e, n1 + n2 - e
                            if mm <= ARITY_CAP and nn <= ARITY_CAP:
                                acc.add((mm, nn))
            by_weight[w] = acc
        return by_weight


def _parse_tid(tid):
    _, m, n, w = tid.split(":")
    return int(m), int(n), int(w)


def bar_complex(pres: Presentation, m, n, weight, genus_cap=GENUS_CAP,
                shape_genus_cap=None, shape_mode=None, single_edge=False):
    """The weight-graded piece of the bar construction in the cell with
    m outputs and n inputs: spaces X_k of k-vertex graphs decorated by
    quotient cells of total weight `weight`, with the differential that
    composes one admissible adjacent pair.

    shape_genus_cap / shape_mode let the ambient graphs live in a wider
    world than the decorating cells (e.g. properadic graphs decorated by
    dioperadic quotient cells); single_edge restricts the differential
    to pairs joined by exactly one edge (dioperadic composition).

    Returns (ChainComplex keyed by vertex count, {k: CompositeSpace}).
    """
    check_caps(m=m, n=n, weight=weight, genus=genus_cap)
    calc = QuotientCalculator(pres, genus_cap)
    return _bar_data(calc, m, n, weight, shape_genus_cap=shape_genus_cap,
                     shape_mode=shape_mode, single_edge=single_edge)


def _bar_data(calc: QuotientCalculator, m, n, weight, shape_genus_cap=None,
              shape_mode=None, single_edge=False):
    pres = calc.pres
    mode = shape_mode or pres.gens.mode
    scap = calc.genus_cap if shape_genus_cap is None else shape_genus_cap
    by_weight = calc.possible_biarities(weight)
    # probe pass: find which (biarity, weight) cells can actually sit in
    # a shape of the requested cell before paying for their quotients
    probe_gens = GeneratorSet(
        tuple(
            Generator("q:%d:%d:%d" % (mm, nn, w), mm, nn, 1, "regular")
            for w in range(1, weight + 1)
            for (mm, nn) in sorted(by_weight.get(w, ()))
        ),
        mode,
    )
    probe_weights = {g.gid: _parse_tid(g.gid)[2] for g in probe_gens.generators}
    used = set()
    for k in range(1, weight + 1):
        for s in enumerate_basis(probe_gens, m, n, k, scap,
                                 vertex_weights=probe_weights,
                                 total_weight=weight):
            used.update(s.decorations)
    types = []
    for tid in sorted(used):
        mm, nn, w = _parse_tid(tid)
        t = calc.vertex_type(mm, nn, w, degree=1)
        if t.dim > 0:
            types.append(t)
    spaces = {}
    for k in range(1, weight + 1):
        spaces[k] = CompositeSpace(
            types, m, n, k, total_weight=weight,
            genus_cap=scap, mode=mode,
        )
    diffs = {}
    for k in range(2, weight + 1):
        src = spaces[k]
        dst = spaces[k - 1]
        cols = []
        for rep_idx in src.rep_indices:
            shape, dec = src.atoms[rep_idx]
            out = {}
            boundary = _bar_boundary(calc, dst, shape, dec, single_edge)
            for idx, c in boundary.items():
                out[idx] = out.get(idx, Fraction(0)) + c
            cols.append(dst.coordinates(out) if out else {})
        diffs[k] = SparseMatrix.from_columns(cols, dst.dim)
    dims = {k: spaces[k].dim for k in spaces}
    return ChainComplex(dims, diffs), spaces


def _reslot_vertex(dg: DecoratedGraph, v, in_map=None, out_map=None) -> DecoratedGraph:
    """Rewire vertex v so that whatever sat on input slot s now sits on
    slot in_map[s] (same for outputs)."""
    g = dg.graph

    def fix(att, side, table):
        w, s = att
        if w == v and table is not None:
            return (w, table[s])
        return att

    edges = tuple(
        (fix(aa, "out", out_map), fix(bb, "in", in_map)) for aa, bb in g.edges
    )
    inputs = tuple(fix(aa, "in", in_map) for aa in g.inputs)
    outputs = tuple(fix(aa, "out", out_map) for aa in g.outputs)
    return DecoratedGraph(
        FlowGraph(g.vertices, edges, inputs, outputs), dg.decorations, dg.degrees
    )


def _planar_align(sub: DecoratedGraph, contracted: DecoratedGraph, new_vertex: int):
    """For planar (ns) composition: find leg permutations making the
    extracted scaffold planar-ordered and rewire the contracted graph's
    new vertex to match.  Returns (in_perm, out_perm, contracted')
    where new scaffold leg k is old leg in_perm[k]."""
    from .graphkit import is_planar_ordered
    mm, nn = sub.biarity()
    for pin in itertools.permutations(range(nn)):
        for pout in itertools.permutations(range(mm)):
            moved = relabel_legs(sub, in_perm=pin, out_perm=pout)
            if not is_planar_ordered(moved.graph):
                continue
            in_map = [0] * nn
            for j, s in enumerate(pin):
                in_map[s] = j
            out_map = [0] * mm
            for j, s in enumerate(pout):
                out_map[s] = j
            fixed = _reslot_vertex(contracted, new_vertex, in_map, out_map)
            if is_planar_ordered(fixed.graph):
                return pin, pout, fixed
    raise GraphError("no planar alignment for extracted subgraph")


def _bar_boundary(calc: QuotientCalculator, dst: CompositeSpace, shape, dec,
                  single_edge=False) -> dict:
    """Raw atom vector (in dst) of the bar differential of one atom."""
    out = {}
    for (i, j) in adjacent_pairs(shape.graph):
        a, b = min(i, j), max(i, j)
        if single_edge:
            between = sum(
                1 for (sv, _), (tv, _) in shape.graph.edges
                if {sv, tv} == {a, b}
            )
            if between != 1:
                continue
        sub = extract_subgraph(shape, (a, b))
        # compose the two decorated vertices inside the quotient
        ma, na = shape.graph.vertices[a]
        mb, nb = shape.graph.vertices[b]
        wa = _parse_tid(shape.decorations[a])[2]
        wb = _parse_tid(shape.decorations[b])[2]
        mm, nn = sub.biarity()
        target = calc.cell(mm, nn, wa + wb)
        if target.dim == 0:
            continue
        ra = calc.cell(ma, na, wa).representatives()[dec[a]]
        rb = calc.cell(mb, nb, wb).representatives()[dec[b]]
        # splice the two representatives into the extracted scaffold;
        # vertex a is sub-vertex 0 since a < b, and after the first
        # splice vertex b sits just past ra's vertices
        from .freeprop import _splice, relabel_element_legs
        new_tid = "q:%d:%d:%d" % (mm, nn, wa + wb)
        contracted, csign = contract_subgraph(shape, (a, b), new_tid, 1)
        once = _splice(sub, 0, ra)
        spliced = _splice(once, len(ra.graph.vertices), rb)
        composed = FreeElement.from_graph(calc.pres.gens, spliced)
        if calc.pres.gens.mode == "ns-properad":
            # re-express the scaffold legs in planar order
            # the contracted vertex lands at index a (all smaller
            # indices are outside the pair)
            pin, pout, contracted = _planar_align(sub, contracted, a)
            composed = relabel_element_legs(calc.pres.gens, composed, pin, pout)
        coords = target.coordinates(composed)
        if not coords:
            continue
        prefix = a  # vertices before the anchor, all of degree 1
        sign = csign * (-1 if prefix % 2 else 1)
        if i > j:
            # the edge runs from the higher-indexed vertex: the first
            # tensor factor is the downstream cell, so grafting swaps
            # the two degree-one factors
            sign = -sign
        for pos, coef in coords.items():
            nd = list(dec)
            nd[b:b + 1] = []
            nd[a] = pos
            for idx, c in dst.atom_terms(contracted, tuple(nd), coef * sign).items():
                out[idx] = out.get(idx, Fraction(0)) + c
    return {k: v for k, v in out.items() if v != 0}


def bar_homology(pres: Presentation, m, n, weight, genus_cap=GENUS_CAP):
    cx, _spaces = bar_complex(pres, m, n, weight, genus_cap)
    return cx.homology_dims()


def koszul_criterion(pres: Presentation, cells, genus_cap=GENUS_CAP):
    """For each (m, n, weight) in cells, check that the bar homology is
    concentrated in the top vertex count (= weight).  Returns a report
    dict and an overall verdict."""
    report = {}
    ok = True
    for (m, n, weight) in cells:
        hom = bar_homology(pres, m, n, weight, genus_cap)
        concentrated = all(
            d == 0 for k, d in hom.items() if k != weight
        )
        report[(m, n, weight)] = {"homology": hom, "concentrated": concentrated}
        ok = ok and concentrated
    return ok, report


def syzygy_dims(pres: Presentation, m, n, weight, genus_cap=GENUS_CAP):
    """Dimension of the Koszul-dual codata in the given cell and
    weight: the kernel of the top bar differential (all-generator
    graphs mapping to graphs with one weight-2 vertex)."""
    from .exactla import kernel_basis
    if weight == 1:
        gens = pres.gens
        return len(enumerate_basis(gens, m, n, 1, genus_cap))
    cx, spaces = bar_complex(pres, m, n, weight, genus_cap)
    top = cx.diffs.get(weight)
    if top is None:
        return spaces[weight].dim
    return len(kernel_basis(top))


def cobar_of_dual(pres_dual: Presentation, m, n, weight, genus_cap=GENUS_CAP):
    """The cobar complex on the Koszul-dual codata of the properad
    presented by pres_dual, realized as the transpose of its bar
    complex: spaces Y_k = X_k with the differential X_{k}^T going
    Y_k -> Y_{k+1}.

    Returned as (ChainComplex, spaces) regraded homologically by
    d := weight - k, so the top (all-cogenerator) stage sits in
    degree 0 and the transpose differential lowers it.
    """
    cx, spaces = bar_complex(pres_dual, m, n, weight, genus_cap)
    dims = {weight - k: dim for k, dim in cx.dims.items()}
    diffs = {}
    for k, mat in cx.diffs.items():
        # mat : X_k -> X_{k-1}; transpose : Y at degree weight-k+1
        #   -> Y at degree weight-k
        diffs[weight - k + 1] = mat.transpose()
    return ChainComplex(dims, diffs), spaces


# --- quadratic duality ---------------------------------------------------

def _dual_symmetry(sym):
    return {"regular": "regular", "trivial": "sign", "sign": "trivial"}[sym]


def dual_generators(gens: GeneratorSet) -> GeneratorSet:
    return GeneratorSet(
        tuple(
            Generator(g.gid, g.outputs, g.inputs, g.degree, _dual_symmetry(g.symmetry))
            for g in gens.generators
        ),
        gens.mode,
    )


def _grafting_sign(dg: DecoratedGraph) -> int:
    """Pairing sign of a single-edge two-vertex graph: (-1)**t where t
    is the input slot of the upper vertex receiving the edge."""
    ((sv, ss), (tv, ts)), = dg.graph.edges
    return -1 if ts % 2 else 1


def _leg_reading_sign(dg: DecoratedGraph) -> int:
    """Sign of the permutation obtained by reading the external leg
    labels off the graph in (vertex, slot) order, inputs and outputs
    separately."""
    from .graphkit import perm_sign
    sign = 1
    for legs in (dg.graph.inputs, dg.graph.outputs):
        order = sorted(range(len(legs)), key=lambda i: legs[i])
        sign *= perm_sign(tuple(order))
    return sign


class PairingTable:
    """The weight-two pairing between a free properad cell and the
    corresponding cell on the dual generators.

    Canonical basis graphs on the two sides share underlying shapes
    (the signature twist preserves canonical slot orderings), and pair
    diagonally with sign (leg-reading sign) * (-1)**t, t the input slot
    receiving the edge.  The leg-reading factor is the Koszul sign of
    matching the external half-edges of the two copies; it is what
    makes the commutative/Lie duality come out right."""

    def __init__(self, gens: GeneratorSet, m, n):
        self.gens = gens
        self.dual_gens = dual_generators(gens)
        self.basis = enumerate_basis(gens, m, n, 2, genus_cap=0)
        self.dual_basis = enumerate_basis(self.dual_gens, m, n, 2, genus_cap=0)
        self.index = {g: i for i, g in enumerate(self.basis)}
        self.dual_index = {g: i for i, g in enumerate(self.dual_basis)}
        shape = {(g.graph, g.decorations): j for j, g in enumerate(self.basis)}
        entries = {}
        for i, dg in enumerate(self.dual_basis):
            j = shape.get((dg.graph, dg.decorations))
            if j is None:
                raise GraphError("dual basis shape missing on the primal side")
            entries[(i, j)] = Fraction(_leg_reading_sign(dg) * _grafting_sign(dg))
        self.matrix = SparseMatrix(len(self.dual_basis), len(self.basis), entries)


def koszul_dual(pres: Presentation) -> Presentation:
    """The quadratic dual presentation: same biarities on signature-
    twisted generators, relations the annihilator of the original
    relations under the weight-two pairing (single-edge graphs only)."""
    gens = pres.gens
    dual_gens_ = dual_generators(gens)
    cells = set()
    for a in gens.generators:
        for b in gens.generators:
            mm, nn = a.outputs + b.outputs - 1, a.inputs + b.inputs - 1
            if 0 < mm <= ARITY_CAP and 0 < nn <= ARITY_CAP and min(a.outputs, b.inputs) >= 1:
                cells.add((mm, nn))
    from .freeprop import expanded_relations, element_coordinates
    rels_by_cell = {}
    for r in expanded_relations(pres):
        for dg in r.terms:
            if dg.graph.genus() != 0:
                raise GraphError("koszul_dual needs genus-zero relations")
        rels_by_cell.setdefault(r.biarity(), []).append(r)
    dual_rels = []
    from .exactla import kernel_basis
    for (mm, nn) in sorted(cells):
        table = PairingTable(gens, mm, nn)
        rel_rows = []
        for r in rels_by_cell.get((mm, nn), []):
            rel_rows.append(element_coordinates(table.index, r))
        if rel_rows:
            rmat = SparseMatrix.from_rows(rel_rows, cols=len(table.basis))
            # <x_dual, r> = 0 for all r:  (R . P^T) x = 0 with P the
            # pairing matrix
            system = rmat.matmul(table.matrix.transpose())
            kernel = kernel_basis(system)
        else:
            kernel = [
                {i: Fraction(1)} for i in range(len(table.dual_basis))
            ]
        for vec in kernel:
            elem = FreeElement(dual_gens_, {
                table.dual_basis[i]: c for i, c in vec.items()
            })
            dual_rels.append(elem)
    return Presentation(dual_gens_, tuple(dual_rels))


# --- homotopy coproperad data -------------------------------------------

@dataclass
class CoproperadData:
    """Cogenerator cells with decomposition maps.

    cells: list of VertexType (tid, biarity, degree, weight, dim).
    delta: function (tid, basis_index) -> list of
        (typed DecoratedGraph, dec tuple, Fraction) giving the image in
        composite graphs typed by the same cells; the n-vertex part is
        the n-th structure map.  strict means only 2-vertex terms.
    """

    cells: list
    delta: object
    strict: bool = True
    mode: str = "properad"

    def by_tid(self, tid):
        for t in self.cells:
            if t.tid == tid:
                return t
        raise KeyError(tid)


def coderivation_square(data: CoproperadData, tid, genus_cap=GENUS_CAP):
    """Apply the decomposition-extension twice to one cogenerator and
    return a map (k_vertices -> raw term list) for inspection; used by
    check_square_zero."""
    t = data.by_tid(tid)
    results = {}
    for b in range(t.dim):
        first = data.delta(tid, b)
        # expand each term once more at every vertex, with the prefix
        # Koszul sign of an odd derivation
        acc = {}
        for (dg, dec, coef) in first:
            for v in range(len(dg.graph.vertices)):
                inner = data.delta(dg.decorations[v], dec[v])
                before = sum(dg.degrees[:v])
                psign = -1 if before % 2 else 1
                for (hg, hdec, hcoef) in inner:
                    from .freeprop import _splice
                    spliced = _splice(dg, v, hg)
                    ndec = dec[:v] + tuple(hdec) + dec[v + 1:]
                    key = len(spliced.graph.vertices)
                    acc.setdefault(key, []).append(
                        (spliced, ndec, coef * hcoef * psign)
                    )
        results[b] = acc
    return results


def check_square_zero(data: CoproperadData, genus_cap=GENUS_CAP):
    """Does the (co)derivation extending the decomposition maps square
    to zero on every cogenerator?  Verified cell by cell inside the
    appropriate composite spaces."""
    failures = []
    for t in data.cells:
        squares = coderivation_square(data, t.tid, genus_cap)
        for b, acc in squares.items():
            for k, terms in acc.items():
                space = CompositeSpace(
                    data.cells, t.outputs, t.inputs, k,
                    total_weight=None, genus_cap=genus_cap, mode=data.mode,
                )
                coords = space.coordinates(terms)
                if coords:
                    failures.append((t.tid, b, k, coords))
    return (len(failures) == 0), failures
