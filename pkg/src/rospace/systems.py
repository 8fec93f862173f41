"""Systems of partial isometries ``(K, {phi_i, phi^j})`` of a finite tree.

``K`` is a finite subtree of the Bass-Serre tree of a graph of groups.
Each free generator ``x_i`` restricts to ``P_i = K ∩ x_i^-1 K``.  A factor
``A_j`` fixes its special point ``s_j``; away from ``s_j`` it is recorded
by finitely many moves ``p -> a p`` (``a`` in ``A_j``) joining the
K-branches at ``s_j`` that lie in one ``A_j``-orbit of directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InvariantFailure, ResourceError, StructuralError
from .gog import GraphOfGroupsTree, tree_from_point
from .graphs import MarkedMetricAGraph
from .invariants import index_of_orbit
from .scalars import FormalReal, fsum
from .words import IDENTITY, Word, reduced_words


@dataclass
class Move:
    """A partial isometry ``p -> element . p`` of K."""

    label: str
    element: Word
    kind: str  # "free" | "factor"
    factor: Optional[int]
    mapping: dict  # K index -> K index
    domain: frozenset = frozenset()  # subtree used for valences (contains the mapped points)
    fixed: Optional[int] = None  # the special point, fixed by factor moves

    def image(self, i: int) -> Optional[int]:
        return i if i == self.fixed else self.mapping.get(i)


@dataclass
class SystemK:
    tree: GraphOfGroupsTree
    points: list  # K index -> tree vertex (normal form)
    parent: list  # K index -> parent index (None for the root)
    lengths: list  # K index -> length of the edge to the parent
    moves: list
    special: dict  # factor -> K index
    forest: dict = field(default_factory=dict)  # factor -> [(direction, direction)] joined at s_j

    def __post_init__(self):
        self.index = {x: i for i, x in enumerate(self.points)}
        self.adj = {i: set() for i in range(len(self.points))}
        for i, p in enumerate(self.parent):
            if p is not None:
                self.adj[i].add(p)
                self.adj[p].add(i)

    @property
    def system(self):
        return self.tree.system

    def edges(self) -> list:
        return [(p, i, self.lengths[i]) for i, p in enumerate(self.parent) if p is not None]

    def edge_length(self, i: int, j: int) -> FormalReal:
        if self.parent[i] == j:
            return self.lengths[i]
        if self.parent[j] == i:
            return self.lengths[j]
        raise KeyError((i, j))

    def valence(self, i: int, within=None) -> int:
        if within is None:
            return len(self.adj[i])
        return sum(1 for j in self.adj[i] if j in within)

    def distance(self, i: int, j: int) -> FormalReal:
        """Path metric of K."""
        path = self.path(i, j)
        return fsum(self.edge_length(a, b) for a, b in zip(path, path[1:]))

    def path(self, i: int, j: int) -> list:
        def up(v):
            out = [v]
            while self.parent[v] is not None:
                v = self.parent[v]
                out.append(v)
            return out
        a, b = up(i), up(j)
        sb = set(b)
        meet = next(v for v in a if v in sb)
        return a[:a.index(meet) + 1] + b[:b.index(meet)][::-1]

    def total_length(self) -> FormalReal:
        return fsum(self.lengths[i] for i, p in enumerate(self.parent) if p is not None)

    def name(self, i: int) -> str:
        return f"p{i}"

    def to_json(self) -> dict:
        return {
            "tree": {
                "vertices": [self.name(i) for i in range(len(self.points))],
                "edges": [{"id": f"k{i}", "from": self.name(p), "to": self.name(i)}
                          for i, p in enumerate(self.parent) if p is not None],
                "lengths": {f"k{i}": self.lengths[i].to_json()
                            for i, p in enumerate(self.parent) if p is not None},
            },
            "domains": {m.label: {"vertices": [self.name(i) for i in sorted(m.domain)]}
                        for m in self.moves},
            "maps": {m.label: {self.name(a): self.name(b) for a, b in sorted(m.mapping.items())}
                     for m in self.moves},
            "special": {str(j + 1): self.name(i) for j, i in sorted(self.special.items())},
        }


def _hull(tree: GraphOfGroupsTree, targets) -> list:
    verts = {()}
    for x in targets:
        verts.update(tree.geodesic_vertices(x))
    return sorted(verts, key=lambda x: (len(x), str(x)))


def _branch(sysK: SystemK, centre: int, first: int) -> set:
    """K vertices on the ``first`` side of ``centre`` (``first`` adjacent to it)."""
    seen = {centre, first}
    stack = [first]
    while stack:
        v = stack.pop()
        for w in sysK.adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    seen.discard(centre)
    return seen


def _local_direction(tree: GraphOfGroupsTree, s: tuple, q: tuple):
    """Direction from ``s`` towards the adjacent vertex ``q`` as (element, edge)."""
    if len(q) > len(s):
        return q[len(s)], q[len(s) + 1]
    last = s[-1]
    return IDENTITY, (last[0], -last[1])


def _minimal_targets(tree: GraphOfGroupsTree) -> set:
    system = tree.system
    targets = {()}
    targets.update(tree.act(Word.gen(x), ()) for x in system.free)
    targets.update(tree.fixed_vertex_of_factor(j) for j in range(system.k))
    return targets


def _initial_targets(tree: GraphOfGroupsTree) -> set:
    system = tree.system
    targets = _minimal_targets(tree)
    targets.update(tree.act(Word.gen(x, -1), ()) for x in system.free)
    specials = [tree.fixed_vertex_of_factor(j) for j in range(system.k)]
    hull = set(_hull(tree, targets))
    for j, s in enumerate(specials):
        near = [q for q in hull if q[:-2] == s or (s and q == s[:-2])]
        for y in system.factors[j]:
            for e in (1, -1):
                targets.update(tree.act(Word.gen(y, e), q) for q in near)
    return targets


def _assemble(tree: GraphOfGroupsTree, targets) -> SystemK:
    system = tree.system
    points = _hull(tree, targets)
    index = {x: i for i, x in enumerate(points)}
    parent = [None if not x else index[x[:-2]] for x in points]
    lengths = [FormalReal() if not x else tree.lengths[x[-1][0]] for x in points]
    specials = {j: index[tree.fixed_vertex_of_factor(j)] for j in range(system.k)}
    sysK = SystemK(tree, points, parent, lengths, [], specials)
    kset = set(points)
    moves = []
    for x in system.free:
        w = Word.gen(x)
        mapping = {}
        for i, p in enumerate(points):
            q = tree.act(w, p)
            if q in kset:
                mapping[i] = index[q]
        if not mapping:
            raise StructuralError(f"K and {x} K are disjoint")
        moves.append(Move(x, w, "free", None, mapping, frozenset(mapping)))
    for j, s in sysK.special.items():
        by_edge: dict = {}
        for q in sorted(sysK.adj[s]):
            g, se = _local_direction(tree, points[s], points[q])
            by_edge.setdefault(se, []).append((q, g))
        forest = []
        for se, dirs in sorted(by_edge.items()):
            (q1, g1), rest = dirs[0], dirs[1:]
            br = _branch(sysK, s, q1)
            for q2, g2 in rest:
                a = g2 * g1.inverse()
                mapping = {}
                for i in sorted(br):
                    img = tree.act(a, points[i])
                    if img in kset:
                        mapping[i] = index[img]
                forest.append((q1, q2))
                moves.append(Move(f"{a}@{sysK.name(q1)}", a, "factor", j, mapping,
                                  frozenset(mapping) | {s}, fixed=s))
        sysK.forest[j] = forest
    sysK.moves = moves
    return sysK


def orbits_connected(sysK: SystemK) -> bool:
    """Every set of K points over one quotient vertex is joined by the moves."""
    T = sysK.tree
    over: dict = {}
    for i, x in enumerate(sysK.points):
        over.setdefault(T.quotient_vertex(x), set()).add(i)
    return all(set(_orbit_closure(sysK, min(pts), 10 * len(sysK.points) + 10)) == pts
               for pts in over.values())


def system_from_tree(tree: GraphOfGroupsTree, max_rounds: int = 2) -> SystemK:
    """A system whose K-orbits are connected by the moves.

    K starts as the hull of the root, its ``x_i``-translates and the
    special points.  While some orbit is disconnected it grows: first by
    the ``x_i^-1``-translates and the factor-translates of the neighbours
    of special points, then by generator translates of all of K.
    """
    tree.require_trivial_edge_groups()
    sysK = _assemble(tree, _minimal_targets(tree))
    if not orbits_connected(sysK):
        sysK = _assemble(tree, _initial_targets(tree))
    rounds = 0
    while not orbits_connected(sysK) and rounds < max_rounds:
        rounds += 1
        gens = [Word.gen(g, e) for g in tree.system.generators for e in (1, -1)]
        targets = set(sysK.points) | {tree.act(w, p) for w in gens for p in sysK.points}
        sysK = _assemble(tree, targets)
    return sysK


def resolve_point(X: MarkedMetricAGraph) -> SystemK:
    """System of the tree of a point: K spans the root, the ``x_i``-translates and the special points."""
    return system_from_tree(tree_from_point(X))


# -- T_K balls -------------------------------------------------------------------------


@dataclass
class TKBall:
    depth: int
    classes: list  # class id -> list of (K index, word)
    edges: dict  # (class, class) -> length
    images: dict  # class -> tree vertex
    is_tree: bool
    well_defined: bool
    injective: bool
    lengths_ok: bool
    K_embedded: bool
    final: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.final and self.is_tree and self.well_defined and self.injective \
            and self.lengths_ok and self.K_embedded

    def branch_points(self) -> int:
        val: dict = {}
        for a, b in self.edges:
            val[a] = val.get(a, 0) + 1
            val[b] = val.get(b, 0) + 1
        return sum(1 for c in range(len(self.classes)) if val.get(c, 0) >= 3)

    def to_json(self) -> dict:
        return {"depth": self.depth, "vertices": len(self.classes), "edges": len(self.edges),
                "is_tree": self.is_tree, "well_defined": self.well_defined,
                "injective": self.injective, "lengths_ok": self.lengths_ok,
                "K_embedded": self.K_embedded, "final": self.final, "ok": self.ok,
                "detail": self.detail}


def build_tk_ball(sysK: SystemK, depth: int, slack: int = 2, max_nodes: int = 400_000) -> TKBall:
    """Glue ``K x {words of length <= depth}`` along the moves.

    Gluing runs on words up to ``depth + slack`` so that identifications
    whose move chains pass through longer words are found; a pair of
    points of the ball that still disagrees with the tree is reported as
    non-final rather than guessed.
    """
    T = sysK.tree
    system = sysK.system
    outer = depth + slack
    words = list(reduced_words(system.generators, outer))
    if len(words) * len(sysK.points) > max_nodes:
        raise ResourceError("T_K ball exceeds the node budget")
    wset = set(words)
    parent: dict = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            parent[ry] = rx

    def key(i, w):
        return (i, w.letters)

    for w in words:
        for m in sysK.moves:
            w2 = w * m.element.inverse()
            if w2 in wset:
                for i, j in m.mapping.items():
                    union(key(i, w), key(j, w2))
        for j, s in sysK.special.items():
            for y in system.factors[j]:
                w2 = w * Word.gen(y, -1)
                if w2 in wset:
                    union(key(s, w), key(s, w2))
    inner = [w for w in words if len(w) <= depth]
    # class representatives and images
    members: dict = {}
    for w in words:
        for i in range(len(sysK.points)):
            members.setdefault(find(key(i, w)), []).append((i, w))
    inner_roots = sorted({find(key(i, w)) for w in inner for i in range(len(sysK.points))})
    cid = {r: c for c, r in enumerate(inner_roots)}
    classes = [members[r] for r in inner_roots]
    images = {}
    well_defined = True
    detail = ""
    for c, mem in enumerate(classes):
        imgs = {T.act(w, sysK.points[i]) for i, w in mem}
        if len(imgs) != 1:
            well_defined = False
            detail = f"class {c} maps to {len(imgs)} tree vertices"
        images[c] = min(imgs, key=str)
    injective = len(set(images.values())) == len(images)
    if not injective and not detail:
        detail = "distinct classes map to one tree vertex (depth insufficient)"
    edges: dict = {}
    lengths_ok = True
    for w in inner:
        for a, b, l in sysK.edges():
            ca, cb = cid[find(key(a, w))], cid[find(key(b, w))]
            e = (min(ca, cb), max(ca, cb))
            if e in edges and edges[e] != l:
                lengths_ok = False
            edges[e] = l
    for (ca, cb), l in edges.items():
        if T.distance(images[ca], images[cb]) != l:
            lengths_ok = False
    V = len(classes)
    comps = _components(V, edges)
    is_tree = comps == 1 and len(edges) == V - 1 and all(a != b for a, b in edges)
    K_embedded = True
    base = [cid[find(key(i, IDENTITY))] for i in range(len(sysK.points))]
    if len(set(base)) != len(base):
        K_embedded = False
    elif is_tree:
        dist = _tree_distances(V, edges, base)
        for i in range(len(sysK.points)):
            for j in range(i + 1, len(sysK.points)):
                if dist[base[i]][base[j]] != sysK.distance(i, j):
                    K_embedded = False
    final = well_defined and injective
    return TKBall(depth, classes, edges, images, is_tree, well_defined, injective, lengths_ok,
                  K_embedded, final, detail)


def _components(V: int, edges) -> int:
    parent = list(range(V))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(V)})


def _tree_distances(V: int, edges: dict, sources) -> dict:
    adj = {v: [] for v in range(V)}
    for (a, b), l in edges.items():
        adj[a].append((b, l))
        adj[b].append((a, l))
    out = {}
    for s in set(sources):
        dist = {s: FormalReal()}
        stack = [s]
        while stack:
            v = stack.pop()
            for w, l in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + l
                    stack.append(w)
        out[s] = dist
    return out


def ball_matches_tree(ball: TKBall, sysK: SystemK) -> bool:
    """The image of the glued ball is exactly ``{w . p : |w| <= depth, p in K}``."""
    T = sysK.tree
    expected = {T.act(w, p) for w in reduced_words(sysK.system.generators, ball.depth)
                for p in sysK.points}
    return ball.ok and set(ball.images.values()) == expected


# -- orbit graphs -------------------------------------------------------------------------


@dataclass
class OrbitGraph:
    """Vertices are K points of one orbit; edges come from the moves and the loops ``gamma_j``."""

    vertices: list
    edges: list  # (source, target, label, weight)
    gammas: list  # special K indices carrying a loop gamma_j

    @property
    def rank(self) -> int:
        E = len(self.edges) + len(self.gammas)
        return E - len(self.vertices) + _components_generic(self.vertices, [(a, b) for a, b, _, _ in self.edges])

    def to_json(self) -> dict:
        return {"vertices": [f"p{v}" for v in self.vertices],
                "edges": [{"from": f"p{a}", "to": f"p{b}", "label": l, "weight": w}
                          for a, b, l, w in self.edges],
                "gamma": [f"p{v}" for v in self.gammas], "rank": self.rank}


@dataclass
class DirectionGraph:
    vertices: list  # (K index, neighbour K index)
    edges: list
    gamma_components: int

    def components(self) -> list:
        """(vertex count, edge count) per component, gamma components excluded."""
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        comps: dict = {}
        for v in self.vertices:
            comps.setdefault(find(v), [0, 0])[0] += 1
        for a, b in self.edges:
            comps[find(a)][1] += 1
        return [tuple(c) for c in comps.values()]

    def projection_ok(self, orbit: OrbitGraph) -> bool:
        vs = set(orbit.vertices)
        return all(d[0] in vs for d in self.vertices)


def _components_generic(vertices, edges) -> int:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in vertices})


def _orbit_closure(sysK: SystemK, p: int, budget: int) -> list:
    seen = {p}
    stack = [p]
    inverse = [{b: a for a, b in m.mapping.items()} for m in sysK.moves]
    while stack:
        v = stack.pop()
        for m, inv in zip(sysK.moves, inverse):
            for w in (m.mapping.get(v), inv.get(v)):
                if w is not None and w not in seen:
                    seen.add(w)
                    stack.append(w)
                    if len(seen) > budget:
                        raise ResourceError("orbit closure exceeds its budget")
    return sorted(seen)


def orbit_graph(sysK: SystemK, p: int, budget: int = 10_000) -> OrbitGraph:
    verts = _orbit_closure(sysK, p, budget)
    vs = set(verts)
    edges = []
    for m in sysK.moves:
        for a in verts:
            b = m.mapping.get(a)
            if b is not None:
                dom = m.domain
                edges.append((a, b, m.label, sysK.valence(a, within=dom)))
    gammas = [s for j, s in sorted(sysK.special.items()) if s in vs]
    return OrbitGraph(verts, edges, gammas)


def direction_graph(sysK: SystemK, O: OrbitGraph) -> DirectionGraph:
    T = sysK.tree
    vertices = [(v, q) for v in O.vertices for q in sorted(sysK.adj[v])]
    vset = set(vertices)
    edges = []
    by_label = {m.label: m for m in sysK.moves}
    for a, b, label, _ in O.edges:
        m = by_label[label]
        for q in sorted(sysK.adj[a]):
            if q in m.domain and m.image(q) is not None:
                d2 = (b, m.image(q))
                if d2 in vset:
                    edges.append(((a, q), d2))
    for j, s in sysK.special.items():
        if s in O.vertices:
            for q1, q2 in sysK.forest.get(j, []):
                edges.append(((s, q1), (s, q2)))
    return DirectionGraph(vertices, edges, len(O.gammas))


def index_via_orbit_graph(sysK: SystemK, p: int, check: bool = True) -> int:
    """``2 rk pi_1(O) - 2 + sum over components C of (1 - rk pi_1(C))``; gamma components excluded."""
    O = orbit_graph(sysK, p)
    D = direction_graph(sysK, O)
    value = 2 * O.rank - 2 + sum(1 - (e - v + 1) for v, e in D.components())
    if check:
        T = sysK.tree
        v = T.quotient_vertex(sysK.points[p])
        direct = index_of_orbit(T, v)
        if direct != value:
            raise InvariantFailure(f"orbit graph index {value} != direct index {direct} at {v}")
    return value


def orbit_representatives(sysK: SystemK) -> dict:
    """Quotient branch vertex -> first K point lying over it."""
    T = sysK.tree
    out = {}
    for i, x in enumerate(sysK.points):
        v = T.quotient_vertex(x)
        if T.is_branch_vertex(v) and v not in out:
            out[v] = i
    return out


@dataclass
class OrbitIndexRow:
    vertex: str
    point: int
    orbit_size: int
    rank: int
    index_orbit_graph: int
    index_direct: int

    @property
    def agrees(self) -> bool:
        return self.index_orbit_graph == self.index_direct

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "point": f"p{self.point}", "orbit_size": self.orbit_size,
                "rank": self.rank, "index_orbit_graph": self.index_orbit_graph,
                "index_direct": self.index_direct, "agrees": self.agrees}


def orbit_index_table(sysK: SystemK) -> list:
    T = sysK.tree
    rows = []
    for v, p in sorted(orbit_representatives(sysK).items()):
        O = orbit_graph(sysK, p)
        closure = set(O.vertices)
        over = {i for i, x in enumerate(sysK.points) if T.quotient_vertex(x) == v}
        if closure != over:
            raise InvariantFailure(f"orbit of {v} in K is not connected by the moves")
        rows.append(OrbitIndexRow(v, p, len(O.vertices), O.rank,
                                  index_via_orbit_graph(sysK, p, check=False), index_of_orbit(T, v)))
    return rows


# -- finite tree bookkeeping ---------------------------------------------------------------


def valence_defect(vertices, edges) -> int:
    """``sum (v(p) - 2)`` over a finite tree; equals -2."""
    val = {v: 0 for v in vertices}
    for a, b in edges:
        val[a] += 1
        val[b] += 1
    return sum(d - 2 for d in val.values())


def random_tree(rng, max_vertices: int = 12) -> tuple:
    """Random labelled tree from a Pruefer sequence."""
    n = rng.randint(2, max_vertices)
    if n == 2:
        return [0, 1], [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return list(range(n)), edges


__all__ = [
    "Move", "SystemK", "system_from_tree", "resolve_point", "TKBall", "build_tk_ball",
    "ball_matches_tree", "OrbitGraph", "DirectionGraph", "orbit_graph", "direction_graph",
    "index_via_orbit_graph", "orbit_representatives", "OrbitIndexRow", "orbit_index_table",
    "valence_defect", "random_tree",
]
