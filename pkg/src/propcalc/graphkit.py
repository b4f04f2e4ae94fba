"""Directed flow graphs with decorated vertices.

A flow graph is a connected directed acyclic graph whose vertices have
numbered input and output slots.  Every slot is attached to exactly one
thing: either an internal edge or a labelled external leg.  The genus
of a connected graph is  #edges - #vertices + 1.

A decorated graph additionally names a generator at each vertex and
records a degree per vertex.  The order of the vertex tuple is part of
the data: permuting vertices multiplies the element by the Koszul sign
of the permutation acting on the degree sequence.

Canonical forms quotient by vertex renumbering and, for generators
whose slots are interchangeable ("trivial" or "sign" symmetry), by slot
relabelling.  canonical_form returns the canonical representative and
the sign relating the input to it; the sign is 0 when the graph has an
automorphism acting by -1 (such elements vanish).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass


class GraphError(Exception):
    pass


def koszul_sign_of_permutation(perm, degrees) -> int:
    """Sign of permuting graded symbols: perm[i] = new position of item i.

    Computed as (-1)**(number of inversions weighted by odd-degree pairs).
    """
    n = len(perm)
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j] and degrees[i] % 2 == 1 and degrees[j] % 2 == 1:
                sign = -sign
    return sign


def perm_sign(perm) -> int:
    sign = 1
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class FlowGraph:
    """vertices[i] = (n_outputs, n_inputs).  Edges run output -> input:
    ((src_vertex, src_out_slot), (dst_vertex, dst_in_slot)).
    inputs[k] = (vertex, in_slot) carrying global input leg k; likewise
    outputs[k] for global output legs."""

    vertices: tuple
    edges: tuple
    inputs: tuple
    outputs: tuple

    def validate(self):
        nv = len(self.vertices)
        if nv == 0:
            raise GraphError("empty graph")
        used_in = set()
        used_out = set()
        for (sv, ss), (tv, ts) in self.edges:
            if not (0 <= sv < nv and 0 <= tv < nv):
                raise GraphError("edge endpoint out of range")
            if not (0 <= ss < self.vertices[sv][0]):
                raise GraphError("bad output slot")
            if not (0 <= ts < self.vertices[tv][1]):
                raise GraphError("bad input slot")
            if (sv, ss) in used_out or (tv, ts) in used_in:
                raise GraphError("slot used twice")
            used_out.add((sv, ss))
            used_in.add((tv, ts))
        for v, s in self.inputs:
            if not (0 <= v < nv and 0 <= s < self.vertices[v][1]):
                raise GraphError("bad input leg")
            if (v, s) in used_in:
                raise GraphError("input slot used twice")
            used_in.add((v, s))
        for v, s in self.outputs:
            if not (0 <= v < nv and 0 <= s < self.vertices[v][0]):
                raise GraphError("bad output leg")
            if (v, s) in used_out:
                raise GraphError("output slot used twice")
            used_out.add((v, s))
        for v, (m, n) in enumerate(self.vertices):
            for s in range(n):
                if (v, s) not in used_in:
                    raise GraphError("unattached input slot (%d, %d)" % (v, s))
            for s in range(m):
                if (v, s) not in used_out:
                    raise GraphError("unattached output slot (%d, %d)" % (v, s))
        if not self.is_connected():
            raise GraphError("graph not connected")
        if not self.is_acyclic():
            raise GraphError("graph has an oriented cycle")

    def n_vertices(self) -> int:
        return len(self.vertices)

    def genus(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def is_connected(self) -> bool:
        nv = len(self.vertices)
        if nv <= 1:
            return True
        adj = {v: set() for v in range(nv)}
        for (sv, _), (tv, _) in self.edges:
            adj[sv].add(tv)
            adj[tv].add(sv)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == nv

    def is_acyclic(self) -> bool:
        nv = len(self.vertices)
        succ = {v: [] for v in range(nv)}
        indeg = {v: 0 for v in range(nv)}
        for (sv, _), (tv, _) in self.edges:
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

    def successors(self):
        succ = {v: set() for v in range(len(self.vertices))}
        for (sv, _), (tv, _) in self.edges:
            succ[sv].add(tv)
        return succ


@dataclass(frozen=True)
class DecoratedGraph:
    """A flow graph with a generator id and degree at each vertex."""

    graph: FlowGraph
    decorations: tuple  # generator ids, one per vertex
    degrees: tuple      # integers, one per vertex

    def validate(self):
        self.graph.validate()
        if len(self.decorations) != len(self.graph.vertices):
            raise GraphError("decoration count mismatch")
        if len(self.degrees) != len(self.graph.vertices):
            raise GraphError("degree count mismatch")

    def total_degree(self) -> int:
        return sum(self.degrees)

    def biarity(self):
        return (len(self.graph.outputs), len(self.graph.inputs))

    def encoding(self):
        g = self.graph
        return (
            self.decorations,
            g.vertices,
            tuple(sorted(g.edges)),
            g.inputs,
            g.outputs,
        )


def adjacent_pairs(g: FlowGraph):
    """Pairs (i, j) joined by at least one edge i -> j whose fusion is
    admissible: contracting {i, j} creates no oriented loop, i.e. every
    directed path from i to j is a single edge."""
    succ = g.successors()
    direct = {(sv, tv) for (sv, _), (tv, _) in g.edges}
    out = []
    for (i, j) in sorted(direct):
        # look for a path i -> ... -> j through a third vertex
        stack = [w for w in succ[i] if w != j]
        seen = set(stack)
        long_path = False
        while stack:
            v = stack.pop()
            if j in succ[v]:
                long_path = True
                break
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if not long_path:
            out.append((i, j))
    return out


def is_admissible_subset(g: FlowGraph, subset) -> bool:
    """A vertex subset is admissible when it induces a connected
    subgraph and no directed path leaves the subset and comes back."""
    sub = set(subset)
    if not sub:
        return False
    # connectivity of the induced subgraph
    adj = {v: set() for v in sub}
    for (sv, _), (tv, _) in g.edges:
        if sv in sub and tv in sub:
            adj[sv].add(tv)
            adj[tv].add(sv)
    start = next(iter(sub))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != sub:
        return False
    # convexity: no exit-and-return path
    succ = g.successors()
    outside = [w for v in sub for w in succ[v] if w not in sub]
    seen2 = set(outside)
    stack = list(outside)
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w in sub:
                return False
            if w not in seen2:
                seen2.add(w)
                stack.append(w)
    return True


def admissible_subgraphs(g: FlowGraph, min_size=1, max_size=None):
    """All admissible vertex subsets, as sorted tuples."""
    nv = len(g.vertices)
    if max_size is None:
        max_size = nv
    out = []
    for size in range(min_size, max_size + 1):
        for subset in itertools.combinations(range(nv), size):
            if is_admissible_subset(g, subset):
                out.append(subset)
    return out


def _external_attachments(g: FlowGraph, subset):
    """External input / output attachments of the induced subgraph,
    in a deterministic order: by (position of the vertex within the
    sorted subset, slot index).

    Inputs of the subgraph are input slots of its vertices fed from
    outside (by an edge from a vertex not in the subset, or by a global
    leg); outputs likewise.
    """
    sub = sorted(subset)
    pos = {v: k for k, v in enumerate(sub)}
    fed_internally_in = set()
    fed_internally_out = set()
    for (sv, ss), (tv, ts) in g.edges:
        if sv in pos and tv in pos:
            fed_internally_in.add((tv, ts))
            fed_internally_out.add((sv, ss))
    ins = []
    outs = []
    for v in sub:
        m, n = g.vertices[v]
        for s in range(n):
            if (v, s) not in fed_internally_in:
                ins.append((v, s))
        for s in range(m):
            if (v, s) not in fed_internally_out:
                outs.append((v, s))
    return ins, outs


def extract_subgraph(dg: DecoratedGraph, subset) -> DecoratedGraph:
    """The induced decorated subgraph, with legs labelled in the
    deterministic attachment order and vertices in increasing order."""
    g = dg.graph
    sub = sorted(subset)
    pos = {v: k for k, v in enumerate(sub)}
    edges = tuple(
        ((pos[sv], ss), (pos[tv], ts))
        for (sv, ss), (tv, ts) in g.edges
        if sv in pos and tv in pos
    )
    ins, outs = _external_attachments(g, subset)
    sub_g = FlowGraph(
        vertices=tuple(g.vertices[v] for v in sub),
        edges=edges,
        inputs=tuple((pos[v], s) for v, s in ins),
        outputs=tuple((pos[v], s) for v, s in outs),
    )
    return DecoratedGraph(
        sub_g,
        tuple(dg.decorations[v] for v in sub),
        tuple(dg.degrees[v] for v in sub),
    )


def contract_subgraph(dg: DecoratedGraph, subset, new_id, new_degree):
    """Contract an admissible subgraph to a single vertex.

    The new vertex sits at the position of the smallest vertex of the
    subset; the remaining vertices keep their relative order.  Its
    input slot i receives whatever fed the i-th external input of the
    subgraph (same order as extract_subgraph's legs), and likewise for
    outputs.

    Returns (contracted DecoratedGraph, koszul_sign) where the sign is
    that of the vertex permutation pulling the subset together (to the
    position of its smallest member, preserving relative order), acting
    on the degree sequence.
    """
    g = dg.graph
    sub = sorted(subset)
    if not is_admissible_subset(g, sub):
        raise GraphError("subset is not admissible")
    nv = len(g.vertices)
    others = [v for v in range(nv) if v not in set(sub)]
    anchor = sub[0]
    # order after pulling subset together: others before anchor, the
    # whole subset block, then the remaining others
    pulled = [v for v in others if v < anchor] + sub + [v for v in others if v > anchor]
    perm = [0] * nv
    for newpos, v in enumerate(pulled):
        perm[v] = newpos
    sign = koszul_sign_of_permutation(perm, dg.degrees)

    ins, outs = _external_attachments(g, sub)
    in_slot = {att: i for i, att in enumerate(ins)}
    out_slot = {att: i for i, att in enumerate(outs)}
    new_order = [v for v in others if v < anchor] + ["new"] + [
        v for v in others if v > anchor
    ]
    vmap = {v: i for i, v in enumerate(new_order) if v != "new"}
    new_index = new_order.index("new")

    def map_out(att):
        v, s = att
        if v in vmap:
            return (vmap[v], s)
        return (new_index, out_slot[att])

    def map_in(att):
        v, s = att
        if v in vmap:
            return (vmap[v], s)
        return (new_index, in_slot[att])

    subset_set = set(sub)
    new_edges = []
    for (sv, ss), (tv, ts) in g.edges:
        if sv in subset_set and tv in subset_set:
            continue
        new_edges.append((map_out((sv, ss)), map_in((tv, ts))))
    new_vertices = []
    for v in new_order:
        if v == "new":
            new_vertices.append((len(outs), len(ins)))
        else:
            new_vertices.append(g.vertices[v])
    new_g = FlowGraph(
        vertices=tuple(new_vertices),
        edges=tuple(new_edges),
        inputs=tuple(map_in(att) for att in g.inputs),
        outputs=tuple(map_out(att) for att in g.outputs),
    )
    new_dec = []
    new_deg = []
    for v in new_order:
        if v == "new":
            new_dec.append(new_id)
            new_deg.append(new_degree)
        else:
            new_dec.append(dg.decorations[v])
            new_deg.append(dg.degrees[v])
    out = DecoratedGraph(new_g, tuple(new_dec), tuple(new_deg))
    return out, sign


def _depth_levels(g: FlowGraph):
    """Longest-path depth of every vertex measured from the inputs."""
    succ = g.successors()
    nv = len(g.vertices)
    indeg = {v: 0 for v in range(nv)}
    for (sv, _), (tv, _) in g.edges:
        indeg[tv] += 1
    depth = {v: 0 for v in range(nv)}
    queue = [v for v in range(nv) if indeg[v] == 0]
    order = []
    indeg2 = dict(indeg)
    while queue:
        v = queue.pop()
        order.append(v)
        for w in succ[v]:
            indeg2[w] -= 1
            if indeg2[w] == 0:
                queue.append(w)
    for v in order:
        for w in succ[v]:
            depth[w] = max(depth[w], depth[v] + 1)
    return depth


def _vertex_classes(dg: DecoratedGraph):
    """Partition vertices by an iterated neighbourhood invariant and
    return, per vertex, its class rank (smaller = earlier)."""
    g = dg.graph
    nv = len(g.vertices)
    depth = _depth_levels(g)
    leg_in = {v: [] for v in range(nv)}
    leg_out = {v: [] for v in range(nv)}
    for k, (v, _s) in enumerate(g.inputs):
        leg_in[v].append(k)
    for k, (v, _s) in enumerate(g.outputs):
        leg_out[v].append(k)
    color = {
        v: (
            depth[v],
            dg.decorations[v],
            g.vertices[v],
            tuple(sorted(leg_in[v])),
            tuple(sorted(leg_out[v])),
        )
        for v in range(nv)
    }
    # make colors comparable: replace by ranks, then refine with the
    # multiset of neighbour colors until the partition stabilizes
    ranks = sorted(set(color.values()))
    rank_of = {c: i for i, c in enumerate(ranks)}
    color = {v: rank_of[color[v]] for v in range(nv)}
    while True:
        nbr = {v: [] for v in range(nv)}
        for (sv, _), (tv, _) in g.edges:
            nbr[sv].append(("d", color[tv]))
            nbr[tv].append(("u", color[sv]))
        combined = {v: (color[v], tuple(sorted(nbr[v]))) for v in range(nv)}
        ranks = sorted(set(combined.values()))
        rank_of = {c: i for i, c in enumerate(ranks)}
        new_color = {v: rank_of[combined[v]] for v in range(nv)}
        if len(set(new_color.values())) == len(set(color.values())):
            return new_color
        color = new_color


_CANDIDATE_CAP = 200_000


def _apply_relabeling(dg: DecoratedGraph, vperm, in_perms, out_perms):
    """vperm[i] = new index of vertex i.  in_perms[v][s] = new slot of
    input slot s of (old) vertex v; likewise out_perms.  Returns the
    relabelled DecoratedGraph."""
    g = dg.graph
    nv = len(g.vertices)
    inv = [0] * nv
    for v in range(nv):
        inv[vperm[v]] = v

    def mo(att):
        v, s = att
        return (vperm[v], out_perms[v][s])

    def mi(att):
        v, s = att
        return (vperm[v], in_perms[v][s])

    new_g = FlowGraph(
        vertices=tuple(g.vertices[inv[i]] for i in range(nv)),
        edges=tuple(sorted((mo(a), mi(b)) for a, b in g.edges)),
        inputs=tuple(mi(att) for att in g.inputs),
        outputs=tuple(mo(att) for att in g.outputs),
    )
    return DecoratedGraph(
        new_g,
        tuple(dg.decorations[inv[i]] for i in range(nv)),
        tuple(dg.degrees[inv[i]] for i in range(nv)),
    )


def canonical_form(dg: DecoratedGraph, symmetry=None):
    """Canonical representative of dg under vertex renumbering and slot
    relabelling at symmetric vertices.

    symmetry maps generator id -> "trivial" | "sign" | "regular"
    (default "regular": rigid slots, no relabelling allowed).

    Returns (canonical DecoratedGraph, sign) with dg == sign * canonical.
    Sign 0 means the graph is annihilated by an odd automorphism.
    """
    canonical, sign, _vperm = canonical_form_with_map(dg, symmetry)
    return canonical, sign


def canonical_form_with_map(dg: DecoratedGraph, symmetry=None):
    """Like canonical_form but also returns the vertex permutation of a
    winning relabelling: vperm[i] = position of old vertex i in the
    canonical graph."""
    if symmetry is None:
        symmetry = {}
    g = dg.graph
    nv = len(g.vertices)
    class_rank = _vertex_classes(dg)
    groups = {}
    for v in range(nv):
        groups.setdefault(class_rank[v], []).append(v)
    group_list = [groups[r] for r in sorted(groups)]

    count = 1
    for grp in group_list:
        for k in range(2, len(grp) + 1):
            count *= k
    for v in range(nv):
        if symmetry.get(dg.decorations[v], "regular") in ("trivial", "sign"):
            m, n = g.vertices[v]
            for k in range(2, m + 1):
                count *= k
            for k in range(2, n + 1):
                count *= k
    if count > _CANDIDATE_CAP:
        raise GraphError("canonicalization search too large (%d candidates)" % count)

    best = None          # (encoding, dg, vperm)
    best_signs = set()

    def slot_perm_options(v):
        sym = symmetry.get(dg.decorations[v], "regular")
        m, n = g.vertices[v]
        if sym == "regular":
            return [(tuple(range(n)), tuple(range(m)), 1)]
        opts = []
        for pin in itertools.permutations(range(n)):
            for pout in itertools.permutations(range(m)):
                s = 1
                if sym == "sign":
                    s = perm_sign(pin) * perm_sign(pout)
                opts.append((pin, pout, s))
        return opts

    slot_opts = [slot_perm_options(v) for v in range(nv)]

    for ordering in itertools.product(*[itertools.permutations(grp) for grp in group_list]):
        flat = [v for grp in ordering for v in grp]
        vperm = [0] * nv
        for newpos, v in enumerate(flat):
            vperm[v] = newpos
        vsign = koszul_sign_of_permutation(vperm, dg.degrees)
        for combo in itertools.product(*slot_opts):
            in_perms = [c[0] for c in combo]
            out_perms = [c[1] for c in combo]
            ssign = 1
            for c in combo:
                ssign *= c[2]
            cand = _apply_relabeling(dg, vperm, in_perms, out_perms)
            enc = cand.encoding()
            total_sign = vsign * ssign
            if best is None or enc < best[0]:
                best = (enc, cand, tuple(vperm))
                best_signs = {total_sign}
            elif enc == best[0]:
                best_signs.add(total_sign)

    canonical = best[1]
    if len(best_signs) == 2:
        return canonical, 0, best[2]
    sign = next(iter(best_signs))
    # dg == sign * canonical  (sign is the sign of dg -> canonical; its
    # inverse equals itself)
    return canonical, sign, best[2]


def relabel_legs(dg: DecoratedGraph, in_perm=None, out_perm=None) -> DecoratedGraph:
    """Permute global leg labels: new input leg k is the old input leg
    in_perm[k] (so in_perm is the new-from-old index list)."""
    g = dg.graph
    ins = g.inputs if in_perm is None else tuple(g.inputs[i] for i in in_perm)
    outs = g.outputs if out_perm is None else tuple(g.outputs[i] for i in out_perm)
    return DecoratedGraph(
        FlowGraph(g.vertices, g.edges, ins, outs), dg.decorations, dg.degrees
    )


def is_planar_ordered(g: FlowGraph) -> bool:
    """Can the graph be drawn in a disk with its input legs along the
    bottom in label order, output legs along the top in label order,
    and every vertex's slots in left-to-right order, without crossings?

    Computed by closing the legs onto a boundary vertex and counting
    faces of the resulting ribbon graph; the embedding is planar
    exactly when the Euler characteristic comes out to 2.
    """
    nv = len(g.vertices)
    # edge list: internal edges, then input-leg edges, then output-leg
    # edges.  Each edge has two ends; an end is (vertex_or_ghost, key)
    edges = []
    for (sv, ss), (tv, ts) in g.edges:
        edges.append(((sv, "out", ss), (tv, "in", ts)))
    for k, (v, s) in enumerate(g.inputs):
        edges.append(((v, "in", s), ("ghost", "in", k)))
    for k, (v, s) in enumerate(g.outputs):
        edges.append(((v, "out", s), ("ghost", "out", k)))

    at_slot = {}
    for ei, (a, b) in enumerate(edges):
        at_slot[a] = (ei, 0)
        at_slot[b] = (ei, 1)

    # counterclockwise rotations: at a vertex the slots read
    # out_m .. out_1 then in_1 .. in_n; around the boundary the legs
    # read in_1 .. in_n then out_m .. out_1
    rotations = []
    for v, (m, n) in enumerate(g.vertices):
        rot = [at_slot[(v, "out", s)] for s in range(m - 1, -1, -1)]
        rot += [at_slot[(v, "in", s)] for s in range(n)]
        rotations.append(rot)
    # seen from outside the disk the boundary runs the other way round:
    # out_1 .. out_m then in_n .. in_1
    ghost = [at_slot[("ghost", "out", k)] for k in range(len(g.outputs))]
    ghost += [
        at_slot[("ghost", "in", k)]
        for k in range(len(g.inputs) - 1, -1, -1)
    ]
    rotations.append(ghost)

    nxt = {}
    for rot in rotations:
        for i, dart in enumerate(rot):
            nxt[dart] = rot[(i + 1) % len(rot)]

    def alpha(dart):
        e, end = dart
        return (e, 1 - end)

    darts = list(nxt)
    seen = set()
    faces = 0
    for d in darts:
        if d in seen:
            continue
        faces += 1
        cur = d
        while cur not in seen:
            seen.add(cur)
            cur = nxt[alpha(cur)]
    n_vertices = nv + 1
    n_edges = len(edges)
    euler = n_vertices - n_edges + faces
    return euler == 2


def to_json(dg: DecoratedGraph) -> str:
    g = dg.graph
    doc = {
        "vertices": [
            {"out": m, "in": n, "gen": dg.decorations[v], "deg": dg.degrees[v]}
            for v, (m, n) in enumerate(g.vertices)
        ],
        "edges": [[[sv, ss], [tv, ts]] for (sv, ss), (tv, ts) in g.edges],
        "inputs": [[v, s] for v, s in g.inputs],
        "outputs": [[v, s] for v, s in g.outputs],
        "order": list(range(len(g.vertices))),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> DecoratedGraph:
    doc = json.loads(text)
    vertices = tuple((v["out"], v["in"]) for v in doc["vertices"])
    order = doc.get("order", list(range(len(vertices))))
    if sorted(order) != list(range(len(vertices))):
        raise GraphError("order field is not a permutation")
    edges = tuple(
        ((sv, ss), (tv, ts)) for (sv, ss), (tv, ts) in doc["edges"]
    )
    g = FlowGraph(
        vertices=vertices,
        edges=edges,
        inputs=tuple((v, s) for v, s in doc["inputs"]),
        outputs=tuple((v, s) for v, s in doc["outputs"]),
    )
    dg = DecoratedGraph(
        g,
        tuple(v["gen"] for v in doc["vertices"]),
        tuple(v.get("deg", 0) for v in doc["vertices"]),
    )
    dg.validate()
    return dg
