"""(A, n)-graphs, their collapsed graphs, and marked metric points.

Oriented edges are ``(edge_id, +1)`` / ``(edge_id, -1)``; the reversal
involution flips the sign.  In JSON a reversed edge is written ``"-id"``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import DomainError, StructuralError
from .scalars import FormalReal, fsum
from .words import Endomap, FreeFactorSystem, Word, is_free_basis, is_relative_automorphism

SignedEdge = tuple  # (edge id, +1 | -1)


def parse_signed(token: str) -> SignedEdge:
    token = str(token)
    return (token[1:], -1) if token.startswith("-") else (token, 1)


def format_signed(se: SignedEdge) -> str:
    return se[0] if se[1] == 1 else f"-{se[0]}"


def reverse_path(path: Sequence[SignedEdge]) -> list:
    return [(e, -s) for e, s in reversed(path)]


def reduce_path(path: Sequence[SignedEdge]) -> list:
    out: list = []
    for e, s in path:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return out


class CWGraph:
    """A finite 1-dimensional CW complex: vertices and edges with endpoints."""

    def __init__(self, vertices: Sequence[str], edges: Mapping[str, tuple]):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise StructuralError("duplicate vertex ids")
        vs = set(self.vertices)
        self.edges = {}
        for eid, (a, b) in edges.items():
            eid = str(eid)
            if not eid or eid.startswith("-"):
                raise StructuralError(f"illegal edge id {eid!r}")
            if a not in vs or b not in vs:
                raise StructuralError(f"edge {eid} has an unknown endpoint")
            self.edges[eid] = (str(a), str(b))

    def origin(self, se: SignedEdge) -> str:
        a, b = self.edges[se[0]]
        return a if se[1] == 1 else b

    def terminus(self, se: SignedEdge) -> str:
        a, b = self.edges[se[0]]
        return b if se[1] == 1 else a

    def outgoing(self, v: str) -> list:
        """Oriented edges with origin ``v`` (a loop contributes both orientations)."""
        out = []
        for eid, (a, b) in self.edges.items():
            if a == v:
                out.append((eid, 1))
            if b == v:
                out.append((eid, -1))
        return out

    def valence(self, v: str) -> int:
        return len(self.outgoing(v))

    def neighbors(self, v: str) -> list:
        return [self.terminus(se) for se in self.outgoing(v)]

    def components(self, vertices=None, edges=None) -> list:
        vertices = list(self.vertices if vertices is None else vertices)
        edges = self.edges if edges is None else {e: self.edges[e] for e in edges}
        parent = {v: v for v in vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in edges.values():
            parent[find(a)] = find(b)
        comps: dict = {}
        for v in vertices:
            comps.setdefault(find(v), []).append(v)
        return list(comps.values())

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + len(self.components())

    def spanning_tree(self, root: str, avoid: frozenset = frozenset()) -> dict:
        """BFS tree: vertex -> oriented edge arriving from its parent (root -> None)."""
        parent = {root: None}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for se in self.outgoing(v):
                if se[0] in avoid:
                    continue
                w = self.terminus(se)
                if w not in parent:
                    parent[w] = se
                    queue.append(w)
        return parent

    def tree_path(self, tree: dict, target: str) -> list:
        """Path from the tree root to ``target``."""
        path = []
        v = target
        while tree[v] is not None:
            se = tree[v]
            path.append(se)
            v = self.origin(se)
        return path[::-1]

    def path_is_closed_at(self, path: Sequence[SignedEdge], v: str) -> bool:
        cur = v
        for se in path:
            if se[0] not in self.edges or self.origin(se) != cur:
                return False
            cur = self.terminus(se)
        return cur == v

    def diameter(self) -> int:
        best = 0
        for v in self.vertices:
            dist = {v: 0}
            queue = deque([v])
            while queue:
                x = queue.popleft()
                for w in self.neighbors(x):
                    if w not in dist:
                        dist[w] = dist[x] + 1
                        queue.append(w)
            best = max(best, max(dist.values()))
        return best

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [{"id": e, "from": a, "to": b} for e, (a, b) in self.edges.items()]}

    def __repr__(self):
        return f"CWGraph(V={len(self.vertices)}, E={len(self.edges)})"


@dataclass(frozen=True)
class WedgeCycle:
    """Embedded wedge of circles for one factor; circles are closed paths at ``hub``."""

    factor: int
    hub: str
    circles: tuple

    def edge_ids(self) -> set:
        return {e for c in self.circles for e, _ in c}


@dataclass
class AGraph:
    graph: CWGraph
    wedges: tuple = ()

    def wedge_edges(self) -> set:
        return {e for w in self.wedges for e in w.edge_ids()}

    def wedge_for(self, factor: int) -> WedgeCycle:
        for w in self.wedges:
            if w.factor == factor:
                return w
        raise KeyError(factor)


@dataclass
class ValidationReport:
    ok: bool
    clause: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "clause": self.clause, "detail": self.detail}


def _fail(clause, detail=""):
    return ValidationReport(False, clause, detail)


def _circle_vertices(graph: CWGraph, hub: str, circle) -> list:
    if not circle:
        raise StructuralError("empty circle")
    cur, seen = hub, [hub]
    for se in circle:
        if se[0] not in graph.edges:
            raise StructuralError(f"unknown edge {se[0]} in wedge cycle")
        if graph.origin(se) != cur:
            raise StructuralError(f"wedge circle is not a path at {cur}")
        cur = graph.terminus(se)
        seen.append(cur)
    if cur != hub:
        raise StructuralError("wedge circle does not close at its hub")
    return seen[:-1]


def validate_agraph(g: AGraph, system: FreeFactorSystem) -> ValidationReport:
    """Check the (A, n)-graph axioms; report the first violated clause.

    Clause order: connectivity, rank, valence, embedding, pairwise
    intersection, dual-forest.
    """
    graph = g.graph
    if not graph.is_connected():
        return _fail("connectivity")
    if graph.rank != system.n:
        return _fail("rank", f"rank {graph.rank} != n = {system.n}")
    for v in graph.vertices:
        if graph.valence(v) < 3:
            return _fail("valence", f"vertex {v} has valence {graph.valence(v)}")
    if sorted(w.factor for w in g.wedges) != list(range(system.k)):
        return _fail("embedding", "need exactly one wedge cycle per factor")
    vsets = {}
    for w in g.wedges:
        if len(w.circles) != system.s[w.factor]:
            return _fail("embedding", f"factor {w.factor + 1} needs {system.s[w.factor]} circles")
        vs, es = {w.hub}, set()
        for c in w.circles:
            cv = _circle_vertices(graph, w.hub, c)
            ce = [e for e, _ in c]
            if len(set(cv)) != len(cv) or len(set(ce)) != len(ce):
                return _fail("embedding", f"circle of factor {w.factor + 1} is not simple")
            if (set(cv) - {w.hub}) & vs or set(ce) & es:
                return _fail("embedding", f"circles of factor {w.factor + 1} overlap")
            vs |= set(cv)
            es |= set(ce)
        vsets[w.factor] = (vs, es)
    facs = sorted(vsets)
    meets = []
    for i, a in enumerate(facs):
        for b in facs[i + 1:]:
            (va, ea), (vb, eb) = vsets[a], vsets[b]
            if ea & eb or len(va & vb) > 1:
                return _fail("pairwise intersection", f"factors {a + 1} and {b + 1}")
            if va & vb:
                meets.append((a, b, next(iter(va & vb))))
    # dual graph: wedge nodes plus one node per meeting point
    parent = {("w", f): ("w", f) for f in facs}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    links = set()
    for a, b, p in meets:
        parent.setdefault(("p", p), ("p", p))
        links.add((("w", a), ("p", p)))
        links.add((("w", b), ("p", p)))
    for x, y in sorted(links):
        rx, ry = find(x), find(y)
        if rx == ry:
            return _fail("dual-forest", "dual graph of the wedge cycles has a cycle")
        parent[rx] = ry
    return ValidationReport(True)


@dataclass
class CollapsedGraph:
    """The graph obtained by collapsing every wedge cycle to a special point."""

    graph: CWGraph
    special: dict  # factor index -> vertex
    vertex_map: dict = field(default_factory=dict)

    @property
    def special_vertices(self) -> set:
        return set(self.special.values())

    def factor_at(self, v: str) -> Optional[int]:
        for j, u in self.special.items():
            if u == v:
                return j
        return None


def collapse_wedge_cycles(g: AGraph) -> CollapsedGraph:
    graph = g.graph
    wedge_edges = g.wedge_edges()
    parent = {v: v for v in graph.vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for e in wedge_edges:
        a, b = graph.edges[e]
        parent[find(a)] = find(b)
    rep = {}
    for w in sorted(g.wedges, key=lambda w: w.factor):
        rep.setdefault(find(w.hub), w.hub)
    vmap = {v: rep.get(find(v), v) for v in graph.vertices}
    vertices = list(dict.fromkeys(vmap[v] for v in graph.vertices))
    edges = {e: (vmap[a], vmap[b]) for e, (a, b) in graph.edges.items() if e not in wedge_edges}
    special = {w.factor: vmap[w.hub] for w in g.wedges}
    return CollapsedGraph(CWGraph(vertices, edges), special, vmap)


def validate_collapsed(c: CollapsedGraph, system: FreeFactorSystem) -> ValidationReport:
    """Shape conditions on a collapsed graph: connected, rank, valences."""
    graph = c.graph
    if not graph.is_connected():
        return _fail("connectivity")
    if graph.rank != system.free_rank:
        return _fail("rank", f"rank {graph.rank} != {system.free_rank}")
    if len(set(c.special.values())) != len(c.special):
        return _fail("embedding", "special points must be distinct")
    for v in graph.vertices:
        val = graph.valence(v)
        if v in c.special_vertices:
            if val < 1 and len(graph.vertices) > 1:
                return _fail("valence", f"special point {v} is isolated")
        elif val < 3:
            return _fail("valence", f"vertex {v} has valence {val}")
    return ValidationReport(True)


def circle_edge_name(factor: int, t: int) -> str:
    return f"c{factor + 1}_{t + 1}"


def expand(c: CollapsedGraph, system: FreeFactorSystem) -> AGraph:
    """Re-insert a rose of ``s(j)`` loops at each special point."""
    edges = dict(c.graph.edges)
    wedges = []
    for j in sorted(c.special):
        hub = c.special[j]
        circles = []
        for t in range(system.s[j]):
            name = circle_edge_name(j, t)
            if name in edges:
                raise StructuralError(f"edge id {name} is reserved for wedge circles")
            edges[name] = (hub, hub)
            circles.append(((name, 1),))
        wedges.append(WedgeCycle(j, hub, tuple(circles)))
    return AGraph(CWGraph(c.graph.vertices, edges), tuple(wedges))


@dataclass(frozen=True)
class DimensionReport:
    n: int
    k: int
    sum_s: int
    V_max: int
    E_max: int
    dim_spine: int
    dim_cv: int
    s_param: int

    def to_json(self) -> dict:
        return {"V": self.V_max, "E": self.E_max, "dim_cv": self.dim_cv,
                "dim_spine": self.dim_spine, "s": self.s_param}


def dimension_report(system: FreeFactorSystem) -> DimensionReport:
    n, k, ss = system.n, system.k, system.sum_s
    V = 2 * n + 2 * k - 2 - 2 * ss
    E = 3 * n + 2 * k - 3 - 3 * ss
    s_param = max(k, 1)
    return DimensionReport(n, k, ss, V, E, V - s_param, E - 1, s_param)


# --- marked metric points ---------------------------------------------------


@dataclass
class MarkedMetricAGraph:
    """A point ``(Gamma, phi, l)``: an (A, n)-graph, lengths, and a marking.

    ``lengths`` covers exactly the non-wedge edges (wedge edges have length
    0); ``marking`` sends each generator to a closed edge path at ``base``.
    """

    system: FreeFactorSystem
    agraph: AGraph
    lengths: dict
    marking: dict
    base: str

    @property
    def collapsed(self) -> CollapsedGraph:
        return collapse_wedge_cycles(self.agraph)

    def volume(self) -> FormalReal:
        return fsum(self.lengths.values())


def _loop_words(graph: CWGraph, base: str, loops: Sequence) -> tuple:
    """Express based loops as words in the non-tree edges of a BFS tree."""
    tree = graph.spanning_tree(base)
    tree_edges = {se[0] for se in tree.values() if se is not None}
    words = []
    for loop in loops:
        words.append(Word((e, s) for e, s in loop if e not in tree_edges))
    return words, sorted(set(graph.edges) - tree_edges)


def validate_point(X: MarkedMetricAGraph) -> ValidationReport:
    rep = validate_agraph(X.agraph, X.system)
    if not rep:
        return rep
    if _wedges_meet(X.agraph):
        return _fail("embedding", "wedge cycles of a point must be disjoint")
    graph = X.agraph.graph
    wedge_edges = X.agraph.wedge_edges()
    expected = set(graph.edges) - wedge_edges
    if set(X.lengths) != expected:
        return _fail("lengths", "lengths must cover exactly the non-wedge edges")
    for e, l in X.lengths.items():
        if l.is_zero:
            return _fail("lengths", f"edge {e} has length 0")
        try:
            if not l.is_positive():
                return _fail("lengths", f"edge {e} has negative length")
        except ValueError:
            pass
    if X.base not in graph.vertices:
        return _fail("marking", "unknown base vertex")
    for g in X.system.generators:
        loop = X.marking.get(g)
        if loop is None or not graph.path_is_closed_at(loop, X.base):
            return _fail("marking", f"generator {g} is not a closed path at the base")
        j = X.system.factor_of(g)
        if j is not None:
            circle = list(X.agraph.wedge_for(j).circles[X.system.factors[j].index(g)])
            m, rem = divmod(len(loop) - len(circle), 2)
            if rem or m < 0 or list(loop[m:m + len(circle)]) != circle \
                    or reverse_path(loop[:m]) != list(loop[m + len(circle):]):
                return _fail("marking", f"{g} is not sent to its wedge circle")
    words, alphabet = _loop_words(graph, X.base, [X.marking[g] for g in X.system.generators])
    if not is_free_basis(words, alphabet):
        return _fail("marking", "marking loops do not form a basis of pi_1")
    return ValidationReport(True)


def _wedges_meet(g: AGraph) -> bool:
    seen = set()
    for w in g.wedges:
        vs = {w.hub}
        for c in w.circles:
            vs |= set(_circle_vertices(g.graph, w.hub, c))
        if vs & seen:
            return True
        seen |= vs
    return False


def normalize_volume(X: MarkedMetricAGraph) -> MarkedMetricAGraph:
    """Scale lengths to relative volume 1.

    Symbolic lengths stand for a projective class whose unit volume is
    declared rather than imposed; they are returned unchanged.
    """
    for e, l in X.lengths.items():
        if l.is_zero:
            raise DomainError(f"edge {e} has length 0 (open simplex condition)")
    vol = X.volume()
    if not vol.is_rational:
        return X
    total = vol.as_fraction()
    if total <= 0:
        raise DomainError("volume must be positive")
    lengths = {e: l / total for e, l in X.lengths.items()}
    return MarkedMetricAGraph(X.system, X.agraph, lengths, dict(X.marking), X.base)


def point_simplex_dim(X: MarkedMetricAGraph) -> int:
    return len(X.lengths) - 1


def act_on_point(X: MarkedMetricAGraph, psi: Endomap) -> MarkedMetricAGraph:
    """Right action ``(Gamma, phi, l) . Psi = (Gamma, phi o psi, l)``."""
    cert = is_relative_automorphism(psi, X.system)
    if not cert:
        raise DomainError(f"not a relative automorphism: {cert.reason}")
    marking = {}
    for g in X.system.generators:
        path = []
        for name, e in psi.images[g]:
            loop = X.marking[name]
            path.extend(loop if e == 1 else reverse_path(loop))
        marking[g] = reduce_path(path)
    return MarkedMetricAGraph(X.system, X.agraph, dict(X.lengths), marking, X.base)


def canonical_marking(system: FreeFactorSystem, agraph: AGraph, base: str) -> dict:
    """Generator loops from a BFS tree of the non-wedge edges.

    Free generators go around the non-tree edges in edge order; ``y^j_t``
    goes out to the hub of wedge ``j``, around circle ``t``, and back.
    """
    graph = agraph.graph
    wedge_edges = frozenset(agraph.wedge_edges())
    tree = graph.spanning_tree(base, avoid=wedge_edges)
    if set(tree) != set(graph.vertices):
        raise StructuralError("non-wedge edges do not span the graph")
    tree_edges = {se[0] for se in tree.values() if se is not None}
    extra = [e for e in graph.edges if e not in tree_edges and e not in wedge_edges]
    if len(extra) != system.free_rank:
        raise StructuralError("graph rank does not match the free complement")
    marking = {}
    for x, e in zip(system.free, extra):
        a, b = graph.edges[e]
        marking[x] = reduce_path(graph.tree_path(tree, a) + [(e, 1)]
                                 + reverse_path(graph.tree_path(tree, b)))
    for j, factor in enumerate(system.factors):
        w = agraph.wedge_for(j)
        to_hub = graph.tree_path(tree, w.hub)
        for t, y in enumerate(factor):
            marking[y] = to_hub + list(w.circles[t]) + reverse_path(to_hub)
    return marking


def point_from_collapsed(system: FreeFactorSystem, collapsed: CollapsedGraph, lengths=None,
                         base: Optional[str] = None, symbol_prefix: str = "λ") -> MarkedMetricAGraph:
    """Build a marked metric point with the canonical marking.

    ``lengths`` is a mapping edge -> value, ``"symbolic"`` (default; edge
    ``i`` gets the independent symbol ``λi``) or ``"barycenter"``.
    """
    agraph = expand(collapsed, system)
    edges = list(collapsed.graph.edges)
    if lengths is None or lengths == "symbolic":
        lengths = {e: FormalReal.symbol(f"{symbol_prefix}{i + 1}") for i, e in enumerate(edges)}
    elif lengths == "barycenter":
        lengths = {e: FormalReal.rational(Fraction(1, len(edges))) for e in edges}
    else:
        lengths = {e: FormalReal.coerce(v) for e, v in lengths.items()}
    if base is None:
        base = collapsed.special[0] if collapsed.special else collapsed.graph.vertices[0]
    marking = canonical_marking(system, agraph, base)
    return MarkedMetricAGraph(system, agraph, lengths, marking, base)


__all__ = [
    "CWGraph", "WedgeCycle", "AGraph", "ValidationReport", "CollapsedGraph", "DimensionReport",
    "MarkedMetricAGraph", "validate_agraph", "collapse_wedge_cycles", "validate_collapsed",
    "expand", "dimension_report", "validate_point", "normalize_volume", "point_simplex_dim",
    "act_on_point", "canonical_marking", "point_from_collapsed", "parse_signed",
    "format_signed", "reverse_path", "reduce_path",
]
