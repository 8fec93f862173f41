"""Branch orbits, index, the lattices L and Lambda, and the Q-rank bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import AuditError, InvariantFailure
from .gog import GraphOfGroupsTree, GoGPath, _Builder
from .graphs import CWGraph, dimension_report, reverse_path
from .scalars import LatticeZ, generates_modulo, q_rank, two_torsion_rank
from .words import Word, canonical_words, cyclic_reduce, root, word_ball


# -- very small ----------------------------------------------------------------


@dataclass
class VerySmallReport:
    ok: bool
    clause: Optional[str] = None
    detail: str = ""
    factors_elliptic: bool = True
    extra_elliptic: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    @property
    def in_cv(self) -> bool:
        """Very small, factors elliptic, and nothing else elliptic."""
        return self.ok and self.factors_elliptic and not self.extra_elliptic

    def to_json(self) -> dict:
        return {"ok": self.ok, "clause": self.clause, "detail": self.detail,
                "factors_elliptic": self.factors_elliptic,
                "extra_elliptic": [str(w) for w in self.extra_elliptic],
                "in_cv": self.in_cv, "notes": list(self.notes)}


INTERPRETATION_NOTE = ("closure condition read as: g not conjugate into any factor A_i")


def conjugate_into_factor(w: Word, system) -> Optional[int]:
    """Index of a factor containing a conjugate of ``w``, if any."""
    core, _ = cyclic_reduce(w)
    if core.is_identity:
        return None
    js = {system.factor_of(n) for n in core.names()}
    if len(js) == 1 and None not in js:
        return js.pop()
    return None


def _label_rank(label, system) -> int:
    if label.kind == "special":
        return len(system.factors[label.factor])
    return 1 if label.kind == "cyclic" else 0


def validate_very_small(T: GraphOfGroupsTree) -> VerySmallReport:
    """Checks on the quotient presentation; reports the first violated clause."""
    system = T.system
    G = T.graph
    notes = [INTERPRETATION_NOTE]

    def fail(clause, detail):
        return VerySmallReport(False, clause, detail, notes=notes)

    specials = [lbl.factor for lbl in T.vertex_labels.values() if lbl.kind == "special"]
    if sorted(specials) != list(range(system.k)):
        return fail("factors", "each factor must label exactly one special vertex")
    for v, lbl in T.vertex_labels.items():
        if lbl.kind == "cyclic":
            core, _ = cyclic_reduce(lbl.word)
            if root(core) != core:
                return fail("no obtrusive powers", f"vertex {v} is generated by a proper power {lbl.word}")
    # edge stabilizers: trivial or cyclic
    ends: dict = {v: [] for v in G.vertices}
    for e, lbl in T.edge_labels.items():
        if lbl is None:
            continue
        if not isinstance(lbl, Word) or lbl.is_identity:
            return fail("cyclic edge stabilizers", f"edge {e} has a non-cyclic label")
        a, b = G.edges[e]
        ends[a].append((e, lbl))
        ends[b].append((e, lbl))
    for v, lst in ends.items():
        by_root: dict = {}
        for e, lbl in lst:
            core, _ = cyclic_reduce(lbl)
            r = root(core)
            key = min((r, r.inverse()), key=Word.sort_key)
            by_root.setdefault(key, []).append(e)
            if r != core and T.vertex_labels[v].contains(r, system):
                return fail("no obtrusive powers", f"edge {e} is fixed by {lbl} but not by its root")
        for key, es in by_root.items():
            if len(es) >= 3:
                return fail("no fixed tripods", f"{key} fixes three directions at {v}")
    if T.has_trivial_edge_groups:
        rank = G.rank + sum(_label_rank(l, system) for l in T.vertex_labels.values())
        if rank != system.n:
            return fail("rank", f"vertex groups and graph give rank {rank}, expected {system.n}")
    else:
        notes.append("nontrivial edge groups: marking and rank bookkeeping not checked")
    for v in G.vertices:
        if T.vertex_labels[v].is_trivial and len(G.vertices) > 1:
            out = G.outgoing(v)
            if len(out) == 1 or (len(out) == 2 and out[0][0] != out[1][0]):
                return fail("minimal", f"trivial vertex {v} has valence {len(out)}")
    rep = VerySmallReport(True, notes=notes)
    if T.has_trivial_edge_groups:
        rep.factors_elliptic = all(T.is_elliptic(Word.gen(y))
                                   for f in system.factors for y in f)
    rep.extra_elliptic = [lbl.word for lbl in T.vertex_labels.values()
                          if lbl.kind == "cyclic" and conjugate_into_factor(lbl.word, system) is None]
    return rep


# -- branch orbits and index ------------------------------------------------------


@dataclass(frozen=True)
class BranchOrbit:
    vertex: str
    label: object
    v1: int
    rk_st: int

    @property
    def index(self) -> int:
        return 2 * self.rk_st + self.v1 - 2

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "stabilizer": self.label.to_json(),
                "v1": self.v1, "rk_st": self.rk_st, "index": self.index}


def rank_of_stabilizer(T: GraphOfGroupsTree, v: str) -> int:
    """Rank of the stabilizer modulo the factors, plus one at special points."""
    lbl = T.vertex_labels[v]
    if lbl.kind == "special":
        return 1
    if lbl.kind == "cyclic":
        return 0 if conjugate_into_factor(lbl.word, T.system) is not None else 1
    return 0


def branch_orbits(T: GraphOfGroupsTree) -> list:
    out = []
    for v in T.graph.vertices:
        if not T.is_branch_vertex(v):
            continue
        v1 = sum(1 for se in T.graph.outgoing(v) if T.edge_labels[se[0]] is None)
        orbit = BranchOrbit(v, T.vertex_labels[v], v1, rank_of_stabilizer(T, v))
        if orbit.index < 0:
            raise InvariantFailure(f"negative index at {v}")
        out.append(orbit)
    return out


def index_of_orbit(T: GraphOfGroupsTree, v: str) -> int:
    for o in branch_orbits(T):
        if o.vertex == v:
            return o.index
    raise KeyError(f"{v} is not a branch vertex")


def expected_total_index(system) -> int:
    return 2 * system.n + 2 * system.k - 2 - 2 * system.sum_s


@dataclass
class IndexReport:
    orbits: list
    total: int
    expected: int

    @property
    def equality(self) -> bool:
        return self.total == self.expected

    @property
    def orbit_bound_ok(self) -> bool:
        return len(self.orbits) <= self.expected

    def to_json(self) -> dict:
        return {"orbits": [o.to_json() for o in self.orbits], "total": self.total,
                "expected": self.expected, "equality": self.equality,
                "orbit_count": len(self.orbits), "orbit_bound_ok": self.orbit_bound_ok}


def total_index(T: GraphOfGroupsTree) -> IndexReport:
    orbits = branch_orbits(T)
    return IndexReport(orbits, sum(o.index for o in orbits), expected_total_index(T.system))


# -- lattices --------------------------------------------------------------------


def _lasso(T: GraphOfGroupsTree, start: str, side: set, banned: str) -> Optional[GoGPath]:
    """A reduced nontrivial loop at ``start`` staying in ``side`` and avoiding ``banned``."""
    G = T.graph
    sub_edges = {e: ab for e, ab in G.edges.items() if e != banned and set(ab) <= side}
    sub = CWGraph([v for v in G.vertices if v in side], sub_edges)
    tree = sub.spanning_tree(start)
    tree_edges = {se[0] for se in tree.values() if se is not None}
    b = _Builder()
    for e in sub_edges:
        if e not in tree_edges:
            p, q = sub.edges[e]
            for se in sub.tree_path(tree, p) + [(e, 1)] + reverse_path(sub.tree_path(tree, q)):
                b.edge(se)
            return b.path()
    for v in sub.vertices:
        gens = T.vertex_labels[v].generators(T.system)
        if gens:
            to = sub.tree_path(tree, v)
            for se in to:
                b.edge(se)
            b.elem(gens[0])
            for se in reverse_path(to):
                b.edge(se)
            return b.path()
    return None


def edge_loops(T: GraphOfGroupsTree) -> list:
    """One based loop whose axis crosses each quotient edge (barbells for separating edges)."""
    G = T.graph
    tree = G.spanning_tree(T.root)
    loops = []
    for e, (a, c) in G.edges.items():
        rest = CWGraph(G.vertices, {f: ab for f, ab in G.edges.items() if f != e})
        comps = rest.components()
        b = _Builder()
        for se in G.tree_path(tree, a):
            b.edge(se)
        if len(comps) == 1:
            b.edge((e, 1))
            for se in rest.tree_path(rest.spanning_tree(c), a):
                b.edge(se)
        else:
            side_a = next(set(cc) for cc in comps if a in cc)
            side_c = next(set(cc) for cc in comps if c in cc)
            la, lc = _lasso(T, a, side_a, e), _lasso(T, c, side_c, e)
            if la is None or lc is None:
                continue  # a hair; minimal trees have none
            b.edge((e, 1))
            b.extend(lc)
            b.edge((e, -1))
            b.extend(la)
        for se in reverse_path(G.tree_path(tree, a)):
            b.edge(se)
        loops.append(b.path())
    return loops


@dataclass
class LatticeResult:
    lattice: LatticeZ
    family_size: int
    audit_radius: int
    audit_passed: bool

    def to_json(self) -> dict:
        return {"lattice": self.lattice.to_json(), "family_size": self.family_size,
                "audit_radius": self.audit_radius, "audit_passed": self.audit_passed}


def _word_lengths(T: GraphOfGroupsTree, radius: int) -> list:
    return [T.translation_length(w) for w in canonical_words(word_ball(T.system, radius))]


def lattice_L_report(T: GraphOfGroupsTree, radius: int = 3, audit_margin: int = 2) -> LatticeResult:
    """L from translation lengths of a word ball plus edge loops; audited on a larger ball."""
    T.require_trivial_edge_groups()
    values = _word_lengths(T, radius) + [T.path_length(p) for p in edge_loops(T)]
    L = LatticeZ(v for v in values if not v.is_zero)
    extra = [v for v in _word_lengths(T, radius + audit_margin) if not v.is_zero]
    bigger = LatticeZ(list(L.generators) + extra)
    if bigger != L:
        raise AuditError(f"L grew from {L} to {bigger} at word radius {radius + audit_margin}")
    return LatticeResult(L, len(values), radius + audit_margin, True)


def lattice_L(T: GraphOfGroupsTree, radius: int = 3, audit_margin: int = 2) -> LatticeZ:
    return lattice_L_report(T, radius, audit_margin).lattice


def branch_points_in_ball(T: GraphOfGroupsTree, radius: int) -> list:
    return [x for x in T.ball(radius) if T.is_branch_vertex(T.quotient_vertex(x))]


def _distance_lattice(T: GraphOfGroupsTree, radius: int) -> LatticeZ:
    pts = branch_points_in_ball(T, radius)
    values = set()
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            values.add(T.distance(x, y))
    return LatticeZ(sorted((v for v in values if not v.is_zero), key=str))


def default_lambda_radius(T: GraphOfGroupsTree) -> int:
    return T.diameter() + 1


def lattice_Lambda_report(T: GraphOfGroupsTree, radius: Optional[int] = None,
                          audit_margin: int = 1) -> LatticeResult:
    T.require_trivial_edge_groups()
    R = default_lambda_radius(T) if radius is None else radius
    Lam = _distance_lattice(T, R)
    bigger = _distance_lattice(T, R + audit_margin)
    if bigger != Lam:
        raise AuditError(f"Lambda grew from {Lam} to {bigger} at radius {R + audit_margin}")
    return LatticeResult(Lam, len(Lam.generators), R + audit_margin, True)


def lattice_Lambda(T: GraphOfGroupsTree, radius: Optional[int] = None, audit_margin: int = 1) -> LatticeZ:
    return lattice_Lambda_report(T, radius, audit_margin).lattice


# -- generation checks for L and Λ, and the rank report -----------------------------


@dataclass
class Prop41Report:
    L_mod_2Lambda: bool
    Lambda_mod_L: bool
    Lambda_two_rank: bool
    two_rank: int
    bound: int
    L: LatticeZ
    Lambda: LatticeZ

    @property
    def ok(self) -> bool:
        return self.L_mod_2Lambda and self.Lambda_mod_L and self.Lambda_two_rank

    def to_json(self) -> dict:
        return {"i": self.L_mod_2Lambda, "ii": self.Lambda_mod_L, "iii": self.Lambda_two_rank,
                "two_torsion_rank": self.two_rank, "bound": self.bound,
                "L": self.L.to_json(), "Lambda": self.Lambda.to_json()}


def base_orbit_lifts(T: GraphOfGroupsTree) -> dict:
    """Lift of each branch quotient vertex along a spanning tree from the root."""
    tree = T.graph.spanning_tree(T.root)
    out = {}
    for o in branch_orbits(T):
        x = ()
        for se in T.graph.tree_path(tree, o.vertex):
            x = x + (Word(), se)
        out[o.vertex] = x
    return out


def verify_prop41(T: GraphOfGroupsTree, L: Optional[LatticeZ] = None,
                  Lam: Optional[LatticeZ] = None) -> Prop41Report:
    system = T.system
    L = lattice_L(T) if L is None else L
    Lam = lattice_Lambda(T) if Lam is None else Lam
    free_lengths = [T.translation_length(Word.gen(x)) for x in system.free]
    i_ok = generates_modulo(free_lengths, L, Lam.scaled(2))
    lifts = base_orbit_lifts(T)
    base = lifts.get(T.root, next(iter(lifts.values()), ()))
    dists = [T.distance(base, x) for x in lifts.values()]
    ii_ok = generates_modulo(dists, Lam, L)
    b = len(lifts)
    bound = system.free_rank + b - 1
    r2 = two_torsion_rank(Lam)
    return Prop41Report(i_ok, ii_ok, r2 <= bound, r2, bound, L, Lam)


@dataclass
class RankReport:
    L: LatticeZ
    Lambda: LatticeZ
    r_q: int
    b: int
    cor43: int
    theorem: int
    only_factors_elliptic: bool

    @property
    def equals_theorem(self) -> bool:
        return self.r_q == self.theorem

    @property
    def equals_cor43(self) -> bool:
        return self.r_q == self.cor43

    def to_json(self) -> dict:
        return {"L": self.L.to_json(), "Lambda": self.Lambda.to_json(), "r_q": self.r_q,
                "b": self.b, "bounds": {"cor43": self.cor43, "theorem": self.theorem},
                "equality": {"theorem": self.equals_theorem, "cor43": self.equals_cor43},
                "only_factors_elliptic": self.only_factors_elliptic}


def q_rank_report(T: GraphOfGroupsTree, L: Optional[LatticeZ] = None,
                  Lam: Optional[LatticeZ] = None) -> RankReport:
    system = T.system
    L = lattice_L(T) if L is None else L
    Lam = lattice_Lambda(T) if Lam is None else Lam
    b = len(branch_orbits(T))
    r = q_rank(L.generators)
    only = all(lbl.kind != "cyclic" or conjugate_into_factor(lbl.word, system) is not None
               for lbl in T.vertex_labels.values())
    rep = RankReport(L, Lam, r, b, system.free_rank + b - 1, dimension_report(system).E_max, only)
    if r > rep.theorem:
        raise InvariantFailure(f"r_Q = {r} exceeds {rep.theorem}")
    if r > rep.cor43:
        raise InvariantFailure(f"r_Q = {r} exceeds n - sum s + b - 1 = {rep.cor43}")
    if rep.equals_theorem and not only:
        raise InvariantFailure("r_Q attains the bound although extra elements are elliptic")
    return rep


__all__ = [
    "VerySmallReport", "validate_very_small", "conjugate_into_factor", "BranchOrbit",
    "branch_orbits", "index_of_orbit", "rank_of_stabilizer", "IndexReport", "total_index",
    "expected_total_index", "edge_loops", "LatticeResult", "lattice_L", "lattice_L_report",
    "lattice_Lambda", "lattice_Lambda_report", "default_lambda_radius", "branch_points_in_ball",
    "Prop41Report", "verify_prop41", "base_orbit_lifts", "RankReport", "q_rank_report",
]
