"""Simplicial (A*B)-trees presented as finite metric graphs of groups.

Edge groups are trivial; a vertex group is trivial, a special factor
``A_j``, or an infinite cyclic group ``<w>``.  Vertex-group elements are
stored as words of ``F_n`` (the marking identifies them), so the group law
inside a vertex group is free reduction.

A vertex of the Bass-Serre tree is the reduced path
``(g0, e1, g1, e2, ..., e_m)`` from the root; the final vertex element is
absorbed into the coset and dropped.  With trivial edge groups this normal
form is unique, which makes distances and the action exactly computable.
"""

from __future__ import annotations

from collections import deque
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DomainError, StructuralError, UnsupportedTree
from .graphs import CWGraph, MarkedMetricAGraph, reverse_path
from .scalars import FormalReal, fsum
from .words import IDENTITY, FreeFactorSystem, Word, cyclic_reduce, power_of


@dataclass(frozen=True)
class VertexLabel:
    kind: str = "trivial"  # trivial | special | cyclic
    factor: Optional[int] = None
    word: Optional[Word] = None

    @classmethod
    def special(cls, j: int) -> "VertexLabel":
        return cls("special", factor=j)

    @classmethod
    def cyclic(cls, w: Word) -> "VertexLabel":
        if w.is_identity:
            raise StructuralError("cyclic vertex group needs a nontrivial generator")
        return cls("cyclic", word=w)

    @property
    def is_trivial(self) -> bool:
        return self.kind == "trivial"

    def contains(self, g: Word, system: FreeFactorSystem) -> bool:
        if g.is_identity:
            return True
        if self.kind == "trivial":
            return False
        if self.kind == "special":
            return all(system.factor_of(n) == self.factor for n in g.names())
        return power_of(g, self.word) is not None

    def generators(self, system: FreeFactorSystem) -> list:
        if self.kind == "special":
            return [Word.gen(y) for y in system.factors[self.factor]]
        if self.kind == "cyclic":
            return [self.word]
        return []

    def to_json(self):
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "special":
            return {"special": self.factor + 1}
        return {"cyclic": str(self.word)}


TRIVIAL = VertexLabel()


@dataclass(frozen=True)
class GoGPath:
    """A reduced graph-of-groups path ``g0 e1 g1 ... e_m g_m`` from the root."""

    edges: tuple
    elems: tuple

    def items(self) -> list:
        out = [self.elems[0]]
        for e, g in zip(self.edges, self.elems[1:]):
            out.extend([e, g])
        return out

    def inverse(self) -> "GoGPath":
        return GoGPath(tuple(reverse_path(self.edges)),
                       tuple(g.inverse() for g in reversed(self.elems)))


class _Builder:
    def __init__(self):
        self.edges: list = []
        self.elems: list = [IDENTITY]

    def elem(self, g: Word):
        self.elems[-1] = self.elems[-1] * g

    def edge(self, se):
        if self.edges and self.elems[-1].is_identity and self.edges[-1] == (se[0], -se[1]):
            self.edges.pop()
            self.elems.pop()
        else:
            self.edges.append(se)
            self.elems.append(IDENTITY)

    def extend(self, path: GoGPath):
        self.elem(path.elems[0])
        for e, g in zip(path.edges, path.elems[1:]):
            self.edge(e)
            self.elem(g)

    def path(self) -> GoGPath:
        return GoGPath(tuple(self.edges), tuple(self.elems))


@dataclass
class CyclicCore:
    """Cyclically reduced loop: edges, and the vertex elements between them."""

    edges: tuple
    between: tuple
    elliptic_element: Optional[Word] = None


class GraphOfGroupsTree:
    """A metric graph of groups with a marking ``F_n -> pi_1`` based at ``root``."""

    def __init__(self, system: FreeFactorSystem, graph: CWGraph, lengths: Mapping,
                 vertex_labels: Mapping, marking: Mapping, root: str,
                 edge_labels: Optional[Mapping] = None, name: str = ""):
        self.system = system
        self.graph = graph
        self.lengths = {e: FormalReal.coerce(l) for e, l in lengths.items()}
        self.vertex_labels = {v: vertex_labels.get(v, TRIVIAL) for v in graph.vertices}
        self.edge_labels = {e: (edge_labels or {}).get(e) for e in graph.edges}
        self.root = root
        self.name = name
        if root not in graph.vertices:
            raise StructuralError(f"unknown root {root}")
        if set(self.lengths) != set(graph.edges):
            raise StructuralError("every quotient edge needs a length")
        missing = [g for g in system.generators if g not in marking]
        if missing and self.has_trivial_edge_groups:
            raise StructuralError(f"marking misses generators {missing}")
        # trees with nontrivial edge groups are synthetic: the marking may be partial
        self.marking = {g: self._as_path(g, marking[g]) for g in system.generators
                        if g in marking}
        self._length_cache: dict = {}

    # -- presentation ------------------------------------------------------

    def _as_path(self, gen, items) -> GoGPath:
        if isinstance(items, GoGPath):
            return items
        b = _Builder()
        cur = self.root
        for item in items:
            if isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], int):
                if item[0] not in self.graph.edges or self.graph.origin(item) != cur:
                    raise StructuralError(f"marking of {gen}: edge {item} does not start at {cur}")
                b.edge(item)
                cur = self.graph.terminus(item)
            elif isinstance(item, Word):
                if not self.vertex_labels[cur].contains(item, self.system):
                    raise StructuralError(f"marking of {gen}: {item} is not in the group at {cur}")
                b.elem(item)
            else:
                v, g = item
                if v != cur:
                    raise StructuralError(f"marking of {gen}: element at {v}, path is at {cur}")
                if not self.vertex_labels[v].contains(g, self.system):
                    raise StructuralError(f"marking of {gen}: {g} is not in the group at {v}")
                b.elem(g)
        if cur != self.root:
            raise StructuralError(f"marking of {gen} is not a closed loop")
        return b.path()

    @property
    def has_trivial_edge_groups(self) -> bool:
        return all(lbl is None for lbl in self.edge_labels.values())

    def require_trivial_edge_groups(self):
        if not self.has_trivial_edge_groups:
            raise UnsupportedTree("nontrivial edge stabilizers are outside the supported class")

    def vertex_at(self, path_end_index: int, path: GoGPath) -> str:
        if path_end_index == 0:
            return self.root
        return self.graph.terminus(path.edges[path_end_index - 1])

    def loop(self, w: Word) -> GoGPath:
        """Reduced graph-of-groups loop representing ``w``."""
        b = _Builder()
        for name, e in w:
            p = self.marking[name]
            b.extend(p if e == 1 else p.inverse())
        return b.path()

    def cyclic_core(self, w: Word) -> CyclicCore:
        return self.cyclic_core_of_path(self.loop(w))

    def cyclic_core_of_path(self, p: GoGPath) -> CyclicCore:
        self.require_trivial_edge_groups()
        edges = deque(p.edges)
        if not edges:
            return CyclicCore((), (), p.elems[0])
        between = deque(p.elems[1:-1])
        wrap = p.elems[-1] * p.elems[0]
        between.append(wrap)
        while len(edges) >= 2 and between[-1].is_identity and edges[-1] == (edges[0][0], -edges[0][1]):
            if len(edges) == 2:
                return CyclicCore((), (), between[0])
            edges.pop()
            edges.popleft()
            between.pop()
            last = between.pop()
            first = between.popleft()
            between.append(last * first)
        return CyclicCore(tuple(edges), tuple(between))

    def translation_length(self, w: Word) -> FormalReal:
        """Exact translation length of ``w``; zero iff ``w`` is elliptic."""
        cached = self._length_cache.get(w)
        if cached is None:
            core = self.cyclic_core(w)
            cached = fsum(self.lengths[e] for e, _ in core.edges)
            self._length_cache[w] = cached
        return cached

    def path_length(self, p: GoGPath) -> FormalReal:
        """Translation length of the element represented by a based loop."""
        return fsum(self.lengths[e] for e, _ in self.cyclic_core_of_path(p).edges)

    def is_elliptic(self, w: Word) -> bool:
        return not self.cyclic_core(w).edges

    # -- Bass-Serre tree -------------------------------------------------------

    def act(self, w: Word, x: tuple) -> tuple:
        """Image of the tree vertex ``x`` under ``w``."""
        b = _Builder()
        b.extend(self.loop(w))
        _extend_vertex(b, x)
        return _vertex_of(b)

    def act_path(self, p: GoGPath, x: tuple) -> tuple:
        b = _Builder()
        b.extend(p)
        _extend_vertex(b, x)
        return _vertex_of(b)

    def quotient_vertex(self, x: tuple) -> str:
        return self.root if not x else self.graph.terminus(x[-1])

    def distance(self, x: tuple, y: tuple) -> FormalReal:
        p = 0
        while p < len(x) and p < len(y) and x[p] == y[p]:
            p += 1
        counts = Counter(it[0] for it in x[p:] + y[p:] if isinstance(it, tuple))
        acc: dict = {}
        for e, m in counts.items():
            for s, q in self.lengths[e].terms:
                acc[s] = acc.get(s, 0) + m * q
        return FormalReal(acc)

    def is_branch_vertex(self, v: str) -> bool:
        val = self.graph.valence(v)
        if not self.vertex_labels[v].is_trivial:
            return val >= 1
        return val >= 3

    def element_choices(self, v: str) -> list:
        gens = self.vertex_labels[v].generators(self.system)
        return [IDENTITY] + [g for h in gens for g in (h, h.inverse())]

    def neighbors(self, x: tuple, elements: Optional[Sequence] = None) -> list:
        """Adjacent tree vertices reachable with the given vertex elements."""
        v = self.quotient_vertex(x)
        out = []
        last = x[-1] if x else None
        for g in (elements if elements is not None else self.element_choices(v)):
            for se in self.graph.outgoing(v):
                if g.is_identity and last is not None and se == (last[0], -last[1]):
                    continue
                out.append(x + (g, se))
        return out

    def ball(self, radius: int) -> list:
        """Tree vertices within ``radius`` edges of the root, unit vertex elements."""
        seen = [()]
        frontier = [()]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                nxt.extend(self.neighbors(x))
            seen.extend(nxt)
            frontier = nxt
        return seen

    def geodesic_vertices(self, x: tuple) -> list:
        """Vertices on the segment from the root to ``x``."""
        return [x[:i] for i in range(0, len(x) + 1, 2)]

    def fixed_vertex_of_factor(self, j: int) -> tuple:
        """The tree vertex fixed by ``A_j`` (end of the marking's conjugating path)."""
        y = self.system.factors[j][0]
        p = self.marking[y]
        core = self.cyclic_core(Word.gen(y))
        if core.edges:
            raise DomainError(f"factor {j + 1} is not elliptic")
        # the conjugating path is the first half of the reduced loop
        half = len(p.edges) // 2
        return tuple(p.items()[:2 * half])

    # -- serialization helpers -----------------------------------------------

    def diameter(self) -> int:
        return self.graph.diameter()

    def __repr__(self):
        return f"GraphOfGroupsTree({self.name or '?'}, V={len(self.graph.vertices)}, E={len(self.graph.edges)})"


def _extend_vertex(b: _Builder, x: tuple):
    for it in x:
        if isinstance(it, Word):
            b.elem(it)
        else:
            b.edge(it)


def _vertex_of(b: _Builder) -> tuple:
    p = b.path()
    return tuple(p.items()[:-1]) if p.edges else ()


def ball_oracle_length(T: GraphOfGroupsTree, w: Word, radius: int = 2) -> FormalReal:
    """``min d(x, w x)`` over the segment ``[root, w root]`` and a small ball.

    Independent of cyclic reduction: uses only normal forms and distances.
    """
    loop = T.loop(w)
    candidates = set(T.geodesic_vertices(T.act_path(loop, ())))
    cache = T.__dict__.setdefault("_ball_cache", {})
    if radius not in cache:
        cache[radius] = T.ball(radius)
    candidates.update(cache[radius])
    values = [T.distance(x, T.act_path(loop, x)) for x in candidates]
    best = values[0]
    for d in values[1:]:
        if _coefficientwise_le(d, best):
            best = d
    # points off the axis exceed the minimum by 2 d(x, axis), a nonnegative combination
    if not all(_coefficientwise_le(best, d) for d in values):
        raise DomainError("ball oracle: displacements are not comparable")
    return best


def _coefficientwise_le(a: FormalReal, b: FormalReal) -> bool:
    diff = dict(b.terms)
    for s, q in a.terms:
        diff[s] = diff.get(s, 0) - q
    return all(c >= 0 for c in diff.values())


def tree_from_point(X: MarkedMetricAGraph) -> GraphOfGroupsTree:
    """The (A*B)-tree of a point: quotient is the collapsed graph, special vertices carry ``A_j``."""
    system = X.system
    col = X.collapsed
    wedge_letter = {}
    for w in X.agraph.wedges:
        for t, circle in enumerate(w.circles):
            e, s = circle[-1]
            wedge_letter[e] = (system.factors[w.factor][t], s)
    wedge_edges = X.agraph.wedge_edges()
    labels = {v: VertexLabel.special(j) for j, v in col.special.items()}
    root = col.vertex_map[X.base]
    marking = {}
    for g in system.generators:
        items = []
        cur = root
        for e, s in X.marking[g]:
            if e in wedge_edges:
                if e in wedge_letter:
                    y, sign = wedge_letter[e]
                    items.append((cur, Word.gen(y, s * sign)))
            else:
                items.append((e, s))
                cur = col.graph.terminus((e, s))
        marking[g] = items
    return GraphOfGroupsTree(system, col.graph, dict(X.lengths), labels, marking, root,
                             name="tree_from_point")


def minimalize(T: GraphOfGroupsTree) -> GraphOfGroupsTree:
    """Delete valence-1 trivial vertices and absorb valence-2 trivial vertices."""
    T.require_trivial_edge_groups()
    vertices = list(T.graph.vertices)
    edges = dict(T.graph.edges)
    lengths = dict(T.lengths)
    labels = dict(T.vertex_labels)
    marking = {g: list(p.items()) for g, p in T.marking.items()}
    root = T.root
    counter = 0

    def graph():
        return CWGraph(vertices, edges)

    changed = True
    while changed:
        changed = False
        G = graph()
        for v in vertices:
            if not labels[v].is_trivial or len(vertices) == 1:
                continue
            out = G.outgoing(v)
            if len(out) == 1:
                (se,) = out
                nb = G.terminus(se)
                if v == root:
                    marking = {g: _reroot(items, se) for g, items in marking.items()}
                    root = nb
                for g, items in marking.items():
                    marking[g] = _reduce_items(items)
                    if any(isinstance(it, tuple) and len(it) == 2 and isinstance(it[1], int)
                           and it[0] == se[0] for it in marking[g]):
                        raise DomainError("marking crosses a removable hair")
                vertices.remove(v)
                del edges[se[0]], lengths[se[0]]
                changed = True
                break
            if len(out) == 2 and out[0][0] != out[1][0]:
                (s1, s2) = out
                a, c = G.terminus(s1), G.terminus(s2)
                if v == root:
                    marking = {g: _reroot(items, s1) for g, items in marking.items()}
                    root = a
                counter += 1
                new = f"{s1[0]}+{s2[0]}"
                while new in edges:
                    new += "'"
                # new edge runs a -> c, i.e. reverse(s1) then s2
                path_fwd = [(s1[0], -s1[1]), s2]
                lengths[new] = lengths.pop(s1[0]) + lengths.pop(s2[0])
                del edges[s1[0]], edges[s2[0]]
                edges[new] = (a, c)
                vertices.remove(v)
                marking = {g: _replace_pair(_reduce_items(items), path_fwd, new)
                           for g, items in marking.items()}
                changed = True
                break
    out_tree = GraphOfGroupsTree(T.system, graph(), lengths, labels, marking, root,
                                 name=T.name)
    return out_tree


def _is_edge(it) -> bool:
    return isinstance(it, tuple) and len(it) == 2 and isinstance(it[1], int)


def _reduce_items(items: list) -> list:
    """Canonical item list: alternate edges and vertex elements (identity included)."""
    b = _Builder()
    for it in items:
        if isinstance(it, Word):
            b.elem(it)
        elif _is_edge(it):
            b.edge(it)
        else:
            b.elem(it[1])
    return b.path().items()


def _reroot(items: list, se) -> list:
    """Conjugate a loop at ``origin(se)`` to a loop at ``terminus(se)``."""
    return [(se[0], -se[1])] + list(items) + [se]


def _replace_pair(items: list, path_fwd: list, new: str) -> list:
    out = []
    i = 0
    rev = reverse_path(path_fwd)
    while i < len(items):
        it = items[i]
        if _is_edge(it) and i + 2 < len(items) and items[i + 1] == IDENTITY:
            pair = [it, items[i + 2]]
            if pair == path_fwd:
                out.append((new, 1))
                i += 3
                continue
            if pair == rev:
                out.append((new, -1))
                i += 3
                continue
        out.append(it)
        i += 1
    return out


def items_with_vertices(T: GraphOfGroupsTree, path: GoGPath) -> list:
    """Marking items in the JSON-friendly form: edges and ``(vertex, element)`` pairs."""
    out = []
    cur = T.root
    for i, it in enumerate(path.items()):
        if isinstance(it, Word):
            if not it.is_identity:
                out.append((cur, it))
        else:
            out.append(it)
            cur = T.graph.terminus(it)
    return out


__all__ = [
    "VertexLabel", "TRIVIAL", "GoGPath", "CyclicCore", "GraphOfGroupsTree",
    "ball_oracle_length", "tree_from_point", "minimalize", "items_with_vertices",
]
