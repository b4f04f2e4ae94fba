"""Free properads on a set of generators, with quadratic quotients.

A generator has a biarity (outputs, inputs), a homological degree, and
a slot symmetry:

  "regular"  rigid slots; the full set of slot labelings is kept,
  "trivial"  slots are interchangeable,
  "sign"     slots are interchangeable up to the sign of the shuffle.

Three composition modes are supported:

  "properad"     symmetric, graphs of arbitrary genus up to the cap,
  "dioperad"     symmetric, genus 0 only, compositions along one edge,
  "ns-properad"  planar: the basis keeps only graphs that embed in a
                 disk with legs in label order (no slot symmetries).

Basis elements of the free properad are canonical decorated graphs.
Elements are finite rational combinations of basis graphs.  Quadratic
quotients are handled by row reducing the span of all one-relation
substitutions inside a fixed weight cell.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .exactla import SparseMatrix, rref
from .graphkit import (
    DecoratedGraph,
    FlowGraph,
    GraphError,
    canonical_form,
    from_json as graph_from_json,
    is_planar_ordered,
    to_json as graph_to_json,
)

WEIGHT_CAP = 6
GENUS_CAP = 2
ARITY_CAP = 6

MODES = ("properad", "dioperad", "ns-properad")
SYMMETRIES = ("regular", "trivial", "sign")


class CapError(Exception):
    pass


def check_caps(m=0, n=0, weight=0, genus=0):
    if m > ARITY_CAP or n > ARITY_CAP:
        raise CapError("arity (%d, %d) exceeds cap %d" % (m, n, ARITY_CAP))
    if weight > WEIGHT_CAP:
        raise CapError("weight %d exceeds cap %d" % (weight, WEIGHT_CAP))
    if genus > GENUS_CAP:
        raise CapError("genus %d exceeds cap %d" % (genus, GENUS_CAP))


@dataclass(frozen=True)
class Generator:
    gid: str
    outputs: int
    inputs: int
    degree: int = 0
    symmetry: str = "regular"

    def __post_init__(self):
        if self.symmetry not in SYMMETRIES:
            raise ValueError("unknown symmetry %r" % self.symmetry)
        check_caps(m=self.outputs, n=self.inputs)


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple
    mode: str = "properad"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("unknown mode %r" % self.mode)
        seen = set()
        for g in self.generators:
            if g.gid in seen:
                raise ValueError("duplicate generator id %r" % g.gid)
            seen.add(g.gid)

    def by_id(self, gid) -> Generator:
        for g in self.generators:
            if g.gid == gid:
                return g
        raise KeyError(gid)

    def symmetry_map(self) -> dict:
        if self.mode == "ns-properad":
            return {g.gid: "regular" for g in self.generators}
        return {g.gid: g.symmetry for g in self.generators}

    def genus_cap(self, requested=GENUS_CAP) -> int:
        if self.mode == "dioperad":
            return 0
        return min(requested, GENUS_CAP)


def canonical(gens: GeneratorSet, dg: DecoratedGraph):
    return canonical_form(dg, gens.symmetry_map())


def corolla(gens: GeneratorSet, gid, in_labels=None, out_labels=None) -> DecoratedGraph:
    """The one-vertex graph on a generator.  in_labels[k] = slot that
    carries input leg k (defaults to the identity labelling)."""
    g = gens.by_id(gid)
    ins = tuple(in_labels) if in_labels is not None else tuple(range(g.inputs))
    outs = tuple(out_labels) if out_labels is not None else tuple(range(g.outputs))
    fg = FlowGraph(
        vertices=((g.outputs, g.inputs),),
        edges=(),
        inputs=tuple((0, s) for s in ins),
        outputs=tuple((0, s) for s in outs),
    )
    return DecoratedGraph(fg, (gid,), (g.degree,))


class FreeElement:
    """A rational combination of canonical decorated graphs."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms=None):
        self.gens = gens
        self.terms = {}
        if terms:
            for dg, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[dg] = self.terms.get(dg, Fraction(0)) + c
            self.terms = {k: v for k, v in self.terms.items() if v != 0}

    @staticmethod
    def from_graph(gens, dg, coef=1) -> "FreeElement":
        can, sign = canonical(gens, dg)
        if sign == 0:
            return FreeElement(gens)
        return FreeElement(gens, {can: Fraction(coef) * sign})

    def add(self, other) -> "FreeElement":
        out = dict(self.terms)
        for dg, c in other.terms.items():
            out[dg] = out.get(dg, Fraction(0)) + c
        return FreeElement(self.gens, out)

    def sub(self, other) -> "FreeElement":
        return self.add(other.scale(-1))

    def scale(self, c) -> "FreeElement":
        c = Fraction(c)
        return FreeElement(self.gens, {dg: c * v for dg, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, FreeElement) and self.terms == other.terms

    def __repr__(self):
        return "FreeElement(%d terms)" % len(self.terms)

    def total_degree(self):
        for dg in self.terms:
            return dg.total_degree()
        return None

    def biarity(self):
        for dg in self.terms:
            return dg.biarity()
        return None


def _open_slots(vertices, edges):
    """Unconnected input and output slots of a partial graph, sorted."""
    used_in = {(tv, ts) for _, (tv, ts) in edges}
    used_out = {(sv, ss) for (sv, ss), _ in edges}
    open_in = []
    open_out = []
    for v, (m, n, _gid, _deg) in enumerate(vertices):
        for s in range(n):
            if (v, s) not in used_in:
                open_in.append((v, s))
        for s in range(m):
            if (v, s) not in used_out:
                open_out.append((v, s))
    return open_in, open_out


def enumerate_basis(gens: GeneratorSet, m, n, weight, genus_cap=GENUS_CAP,
                    vertex_weights=None, total_weight=None):
    """All canonical basis graphs of the free properad in the cell with
    m outputs, n inputs and the given number of vertices, of genus at
    most genus_cap.  Returned sorted by encoding.

    When vertex_weights (gid -> weight) and total_weight are given,
    only graphs whose vertex weights sum to total_weight are produced;
    partial states that cannot reach the total are pruned early."""
    check_caps(m=m, n=n, weight=weight, genus=genus_cap)
    genus_cap = gens.genus_cap(genus_cap)
    if weight < 1:
        return []
    max_ar = max(
        [max(g.inputs, g.outputs) for g in gens.generators] or [0]
    )
    if vertex_weights is not None and total_weight is not None:
        min_w = min(vertex_weights.values())
        max_w = max(vertex_weights.values())

        def weight_ok(vertices, slots_left):
            have = sum(vertex_weights[v[2]] for v in vertices)
            return (have + slots_left * min_w <= total_weight
                    <= have + slots_left * max_w)
    else:
        def weight_ok(vertices, slots_left):
            return True

    start_states = []
    for g in gens.generators:
        state = (((g.outputs, g.inputs, g.gid, g.degree),), ())
        if weight_ok(state[0], weight - 1):
            start_states.append(state)

    states = start_states
    for _step in range(weight - 1):
        next_states = []
        seen = set()
        for vertices, edges in states:
            open_in, open_out = _open_slots(vertices, edges)
            remaining = weight - len(vertices) - 1
            for g in gens.generators:
                vnew = len(vertices)
                # choose edges existing-open-out -> new inputs (k of
                # them) and new outputs -> existing-open-in (l of them)
                for k in range(0, min(len(open_out), g.inputs) + 1):
                    for l in range(0, min(len(open_in), g.outputs) + 1):
                        if k + l == 0:
                            continue
                        extra_genus = k + l - 1
                        cur_genus = len(edges) - len(vertices) + 1
                        if cur_genus + extra_genus > genus_cap:
                            continue
                        new_open_in = len(open_in) - l + g.inputs - k
                        new_open_out = len(open_out) - k + g.outputs - l
                        if abs(new_open_in - n) > remaining * max_ar:
                            continue
                        if abs(new_open_out - m) > remaining * max_ar:
                            continue
                        for outs in itertools.combinations(open_out, k):
                            for in_slots in itertools.permutations(range(g.inputs), k):
                                for ins in itertools.combinations(open_in, l):
                                    for out_slots in itertools.permutations(range(g.outputs), l):
                                        new_edges = list(edges)
                                        for att, s in zip(outs, in_slots):
                                            new_edges.append((att, (vnew, s)))
                                        for att, s in zip(ins, out_slots):
                                            new_edges.append(((vnew, s), att))
                                        new_vertices = vertices + (
                                            (g.outputs, g.inputs, g.gid, g.degree),
                                        )
                                        if not weight_ok(new_vertices, remaining):
                                            continue
                                        if not _partial_acyclic(new_vertices, new_edges):
                                            continue
                                        key = _state_key(gens, new_vertices, new_edges)
                                        if key in seen:
                                            continue
                                        seen.add(key)
                                        next_states.append(
                                            (new_vertices, tuple(new_edges))
                                        )
        states = next_states

    out = {}
    for vertices, edges in states:
        open_in, open_out = _open_slots(vertices, edges)
        if len(open_in) != n or len(open_out) != m:
            continue
        fg_vertices = tuple((v[0], v[1]) for v in vertices)
        decorations = tuple(v[2] for v in vertices)
        degrees = tuple(v[3] for v in vertices)
        for pin in itertools.permutations(range(n)):
            for pout in itertools.permutations(range(m)):
                fg = FlowGraph(
                    vertices=fg_vertices,
                    edges=edges,
                    inputs=tuple(open_in[pin[kk]] for kk in range(n)),
                    outputs=tuple(open_out[pout[kk]] for kk in range(m)),
                )
                dg = DecoratedGraph(fg, decorations, degrees)
                if gens.mode == "ns-properad" and not is_planar_ordered(fg):
                    continue
                can, sign = canonical(gens, dg)
                if sign == 0:
                    continue
                out[can] = True
    return sorted(out, key=lambda d: d.encoding())


def _partial_acyclic(vertices, edges) -> bool:
    nv = len(vertices)
    succ = {v: [] for v in range(nv)}
    indeg = {v: 0 for v in range(nv)}
    for (sv, _), (tv, _) in edges:
        succ[sv].append(tv)
        indeg[tv] += 1
    queue = [v for v in range(nv) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == nv


def _state_key(gens, vertices, edges):
    """Cheap dedup key for partial states: canonical form with the open
    slots read as legs in a fixed order."""
    open_in, open_out = _open_slots(vertices, edges)
    fg = FlowGraph(
        vertices=tuple((v[0], v[1]) for v in vertices),
        edges=tuple(edges),
        inputs=tuple(open_in),
        outputs=tuple(open_out),
    )
    dg = DecoratedGraph(
        fg, tuple(v[2] for v in vertices), tuple(v[3] for v in vertices)
    )
    can, _sign = canonical(gens, dg)
    return can.encoding()


def substitute(gens: GeneratorSet, dg: DecoratedGraph, v: int, element: FreeElement) -> FreeElement:
    """Replace vertex v of dg by an element of matching biarity.  Leg k
    of the element is identified with slot k of the vertex.  The
    element's vertices take the place of v in the vertex order; no
    extra Koszul sign beyond canonicalization (the caller accounts for
    degree bookkeeping of the map being applied)."""
    mv, nv_ = dg.graph.vertices[v]
    out = FreeElement(gens)
    for h, coef in element.terms.items():
        if h.biarity() != (mv, nv_):
            raise GraphError("substitute: biarity mismatch")
        spliced = _splice(dg, v, h)
        out = out.add(FreeElement.from_graph(gens, spliced, coef))
    return out


def _splice(dg: DecoratedGraph, v: int, h: DecoratedGraph) -> DecoratedGraph:
    g = dg.graph
    hg = h.graph
    nh = len(hg.vertices)

    def vmap(w):
        if w < v:
            return w
        return w + nh - 1

    def hmap(w):
        return v + w

    new_vertices = (
        tuple(g.vertices[:v])
        + tuple(hg.vertices)
        + tuple(g.vertices[v + 1:])
    )
    # edges internal to h
    new_edges = [
        ((hmap(sv), ss), (hmap(tv), ts)) for (sv, ss), (tv, ts) in hg.edges
    ]

    def map_in(att):
        """An attachment that fed (v, s) now feeds h's input leg s."""
        w, s = att
        if w == v:
            hv, hs = hg.inputs[s]
            return (hmap(hv), hs)
        return (vmap(w), s)

    def map_out(att):
        w, s = att
        if w == v:
            hv, hs = hg.outputs[s]
            return (hmap(hv), hs)
        return (vmap(w), s)

    for (sv, ss), (tv, ts) in g.edges:
        new_edges.append((map_out((sv, ss)), map_in((tv, ts))))
    new_g = FlowGraph(
        vertices=new_vertices,
        edges=tuple(new_edges),
        inputs=tuple(map_in(att) for att in g.inputs),
        outputs=tuple(map_out(att) for att in g.outputs),
    )
    new_dec = dg.decorations[:v] + h.decorations + dg.decorations[v + 1:]
    new_deg = dg.degrees[:v] + h.degrees + dg.degrees[v + 1:]
    return DecoratedGraph(new_g, new_dec, new_deg)


def partial_compose(gens: GeneratorSet, bottom: FreeElement, top: FreeElement,
                    connections, genus_cap=GENUS_CAP) -> FreeElement:
    """Graft top onto bottom along connections, a nonempty list of
    pairs (bottom_output_leg, top_input_leg).

    Result legs: inputs are bottom's inputs in order followed by top's
    unused inputs in order; outputs are top's outputs in order followed
    by bottom's unused outputs in order.  The bottom element's vertices
    come first in the vertex order.  In dioperad mode exactly one
    connection is allowed."""
    if not connections:
        raise GraphError("partial_compose needs at least one connection")
    if gens.mode == "dioperad" and len(connections) != 1:
        raise GraphError("dioperad composition glues along exactly one edge")
    mb, nb = bottom.biarity()
    mt, nt = top.biarity()
    used_b = [c[0] for c in connections]
    used_t = [c[1] for c in connections]
    if len(set(used_b)) != len(used_b) or len(set(used_t)) != len(used_t):
        raise GraphError("repeated leg in connections")
    free_b_out = [s for s in range(mb) if s not in set(used_b)]
    free_t_in = [s for s in range(nt) if s not in set(used_t)]
    # placeholder two-vertex graph: vertex 0 = bottom, vertex 1 = top
    edges = tuple(((0, b), (1, t)) for b, t in connections)
    fg = FlowGraph(
        vertices=((mb, nb), (mt, nt)),
        edges=edges,
        inputs=tuple((0, s) for s in range(nb)) + tuple((1, s) for s in free_t_in),
        outputs=tuple((1, s) for s in range(mt)) + tuple((0, s) for s in free_b_out),
    )
    if fg.genus() > gens.genus_cap(genus_cap):
        raise CapError("composition exceeds genus cap")
    db = bottom.total_degree()
    dt = top.total_degree()
    scaffold = DecoratedGraph(fg, ("_bottom", "_top"), (db or 0, dt or 0))
    out = FreeElement(gens)
    for hb, cb in bottom.terms.items():
        once = _splice(scaffold, 0, hb)
        for ht, ct in top.terms.items():
            full = _splice(once, len(hb.graph.vertices), ht)
            out = out.add(FreeElement.from_graph(gens, full, cb * ct))
    return out


def derivation_extend(gens: GeneratorSet, theta: dict, theta_degree: int,
                      element: FreeElement) -> FreeElement:
    """Extend a map on generators to a derivation:

        d(G(v_1, ..., v_k)) =
            sum_i (-1)^(|theta| (|v_1| + ... + |v_{i-1}|))
                  G(v_1, ..., theta(v_i), ..., v_k)

    theta maps generator id -> FreeElement (its image); generators not
    present are sent to zero."""
    out = FreeElement(gens)
    for dg, coef in element.terms.items():
        for v, gid in enumerate(dg.decorations):
            image = theta.get(gid)
            if image is None or image.is_zero():
                continue
            before = sum(dg.degrees[:v])
            sign = -1 if (theta_degree * before) % 2 else 1
            out = out.add(substitute(gens, dg, v, image).scale(coef * sign))
    return out


def relabel_element_legs(gens: GeneratorSet, element: FreeElement,
                         in_perm=None, out_perm=None) -> FreeElement:
    from .graphkit import relabel_legs
    out = FreeElement(gens)
    for dg, coef in element.terms.items():
        out = out.add(
            FreeElement.from_graph(gens, relabel_legs(dg, in_perm, out_perm), coef)
        )
    return out


@dataclass(frozen=True)
class Presentation:
    """A properad presented by generators and weight-two relations."""

    gens: GeneratorSet
    relations: tuple  # of FreeElement

    def __post_init__(self):
        for r in self.relations:
            for dg in r.terms:
                if len(dg.graph.vertices) != 2:
                    raise ValueError("relations must be quadratic (weight 2)")


def expanded_relations(pres: Presentation):
    """Relations closed under leg relabelling (symmetric modes only)."""
    out = []
    seen = set()
    for r in pres.relations:
        if r.is_zero():
            continue
        m, n = r.biarity()
        if pres.gens.mode == "ns-properad":
            perms = [(tuple(range(n)), tuple(range(m)))]
        else:
            perms = [
                (pin, pout)
                for pin in itertools.permutations(range(n))
                for pout in itertools.permutations(range(m))
            ]
        for pin, pout in perms:
            rr = relabel_element_legs(pres.gens, r, pin, pout)
            if rr.is_zero():
                continue
            key = tuple(sorted(
                ((dg.encoding(), c) for dg, c in rr.terms.items()),
            ))
            if key in seen:
                continue
            seen.add(key)
            out.append(rr)
    return out


def element_coordinates(basis_index: dict, element: FreeElement) -> dict:
    """Sparse coordinate vector of an element in a listed basis."""
    vec = {}
    for dg, c in element.terms.items():
        if dg not in basis_index:
            raise GraphError("element has a term outside the basis")
        vec[basis_index[dg]] = vec.get(basis_index[dg], Fraction(0)) + c
    return {k: v for k, v in vec.items() if v != 0}


def ideal_component(pres: Presentation, m, n, weight, genus_cap=GENUS_CAP):
    """(basis, matrix): basis of the free cell and a matrix whose
    columns span the weight-graded component of the ideal generated by
    the relations."""
    check_caps(m=m, n=n, weight=weight, genus=genus_cap)
    gens = pres.gens
    basis = enumerate_basis(gens, m, n, weight, genus_cap)
    index = {dg: i for i, dg in enumerate(basis)}
    rels = expanded_relations(pres)
    cols = []
    if weight >= 2 and rels:
        host_gens = _gens_with_placeholders(gens, rels)
        for host in enumerate_basis(host_gens, m, n, weight - 1, genus_cap):
            slots = [
                (v, dec) for v, dec in enumerate(host.decorations)
                if dec.startswith("_rel")
            ]
            if len(slots) != 1:
                continue
            v, dec = slots[0]
            r = rels[int(dec[4:])]
            sub = substitute(gens, host, v, r)
            # genus may have grown past the cap inside the substitution
            sub = FreeElement(gens, {
                dg: c for dg, c in sub.terms.items()
                if dg.graph.genus() <= gens.genus_cap(genus_cap)
            })
            if sub.is_zero():
                continue
            cols.append(element_coordinates(index, sub))
    mat = SparseMatrix.from_columns(cols, len(basis))
    return basis, mat


def _gens_with_placeholders(gens: GeneratorSet, rels):
    extra = []
    for i, r in enumerate(rels):
        mr, nr = r.biarity()
        extra.append(Generator("_rel%d" % i, mr, nr, r.total_degree(), "regular"))
    return GeneratorSet(gens.generators + tuple(extra), gens.mode)


class QuotientCell:
    """One weight-graded cell of a quadratic quotient: a basis of the
    free cell, a row reduction of the ideal, and representatives."""

    def __init__(self, pres: Presentation, m, n, weight, genus_cap=GENUS_CAP):
        self.pres = pres
        self.cell = (m, n, weight)
        basis, ideal = ideal_component(pres, m, n, weight, genus_cap)
        self.basis = basis
        self.index = {dg: i for i, dg in enumerate(basis)}
        pivot_cols, reduced = rref(ideal.transpose())
        self.pivots = pivot_cols
        self.reduced_rows = reduced
        pivot_set = set(pivot_cols)
        self.rep_indices = [i for i in range(len(basis)) if i not in pivot_set]
        self.rep_pos = {b: k for k, b in enumerate(self.rep_indices)}
        self.dim = len(self.rep_indices)

    def representatives(self):
        return [self.basis[i] for i in self.rep_indices]

    def reduce(self, vec: dict) -> dict:
        """Reduce a free-cell coordinate vector modulo the ideal; the
        result is supported on representative indices."""
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
        return {k: v for k, v in vec.items() if v != 0}

    def coordinates(self, element: FreeElement) -> dict:
        """Coordinates of the class of an element in the representative
        basis."""
        vec = self.reduce(element_coordinates(self.index, element))
        return {self.rep_pos[i]: v for i, v in vec.items()}


def quotient_basis(pres: Presentation, m, n, weight, genus_cap=GENUS_CAP):
    """(dimension, representative graphs) of the quotient cell."""
    cell = QuotientCell(pres, m, n, weight, genus_cap)
    return cell.dim, cell.representatives()


# --- JSON serialization -------------------------------------------------

def presentation_to_json(pres: Presentation) -> str:
    doc = {
        "mode": pres.gens.mode,
        "generators": [
            {
                "id": g.gid, "out": g.outputs, "in": g.inputs,
                "degree": g.degree, "symmetry": g.symmetry,
            }
            for g in pres.gens.generators
        ],
        "relations": [
            [
                {"coef": "%d/%d" % (c.numerator, c.denominator),
                 "graph": json.loads(graph_to_json(dg))}
                for dg, c in sorted(r.terms.items(), key=lambda t: t[0].encoding())
            ]
            for r in pres.relations
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def presentation_from_json(text: str) -> Presentation:
    doc = json.loads(text)
    gens = GeneratorSet(
        tuple(
            Generator(g["id"], g["out"], g["in"], g.get("degree", 0),
                      g.get("symmetry", "regular"))
            for g in doc["generators"]
        ),
        doc.get("mode", "properad"),
    )
    rels = []
    for r in doc["relations"]:
        elem = FreeElement(gens)
        for t in r:
            dg = graph_from_json(json.dumps(t["graph"]))
            num, _, den = t["coef"].partition("/")
            elem = elem.add(
                FreeElement.from_graph(gens, dg, Fraction(int(num), int(den or 1)))
            )
        rels.append(elem)
    return Presentation(gens, tuple(rels))
