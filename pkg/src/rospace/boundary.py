"""Boundary simplices and projective comparison of length functions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .enumeration import Budget, enumerate_maximal_agraphs
from .errors import DegenerateSystemError, DomainError
from .gog import GraphOfGroupsTree, VertexLabel, items_with_vertices, tree_from_point
from .graphs import act_on_point, dimension_report, point_from_collapsed
from .invariants import validate_very_small
from .words import Endomap, FreeFactorSystem, Word, word_ball


def augmented_system(system: FreeFactorSystem) -> FreeFactorSystem:
    """Promote the last free generator ``c`` to an extra factor ``<c>``."""
    if system.free_rank < 1:
        raise DegenerateSystemError("a boundary simplex needs a free generator outside the factors")
    c = system.free[-1]
    return FreeFactorSystem(system.n, system.factors + ((c,),), system.free[:-1])


def _relabel(system: FreeFactorSystem, T: GraphOfGroupsTree, name: str) -> GraphOfGroupsTree:
    k = system.k
    c = Word.gen(system.free[-1])
    labels = {}
    for v, lbl in T.vertex_labels.items():
        labels[v] = VertexLabel.cyclic(c) if lbl.kind == "special" and lbl.factor == k else lbl
    marking = {g: items_with_vertices(T, p) for g, p in T.marking.items()}
    return GraphOfGroupsTree(system, T.graph, T.lengths, labels, marking, T.root, name=name)


@dataclass
class BoundaryMember:
    tree: GraphOfGroupsTree
    very_small: bool
    factors_elliptic: bool
    extra_elliptic: list

    @property
    def in_cv(self) -> bool:
        return self.very_small and self.factors_elliptic and not self.extra_elliptic

    @property
    def valid(self) -> bool:
        return self.very_small and self.factors_elliptic and not self.in_cv


@dataclass
class BoundaryFamily:
    system: FreeFactorSystem
    members: list
    edges: int

    @property
    def dimension(self) -> int:
        return self.edges - 1

    @property
    def valid(self) -> bool:
        return bool(self.members) and all(m.valid for m in self.members)

    def to_json(self) -> dict:
        return {
            "system": self.system.to_json(),
            "edges": self.edges,
            "dimension": self.dimension,
            "dim_cv": dimension_report(self.system).dim_cv,
            "members": [{
                "quotient": m.tree.graph.to_json(),
                "vertex_labels": {v: l.to_json() for v, l in m.tree.vertex_labels.items()},
                "lengths": {e: l.to_json() for e, l in m.tree.lengths.items()},
                "very_small": m.very_small, "factors_elliptic": m.factors_elliptic,
                "extra_elliptic": [str(w) for w in m.extra_elliptic], "in_cv": m.in_cv,
            } for m in self.members],
            "valid": self.valid,
        }


def boundary_simplex(system: FreeFactorSystem, lengths="symbolic", all_classes: bool = False,
                     budget: Optional[Budget] = None) -> BoundaryFamily:
    """Open simplex of very small trees in which a free generator ``c`` is elliptic.

    Built from a maximal graph of the augmented system with ``<c>`` as an
    extra factor, whose special point is relabelled by the cyclic group
    ``<c>``.  The quotient has ``3n + 2k - 4 - 3 sum s`` edges.
    """
    aug = augmented_system(system)
    shapes = enumerate_maximal_agraphs(aug, budget).maximal
    if not all_classes:
        shapes = shapes[:1]
    members = []
    for i, shape in enumerate(shapes):
        X = point_from_collapsed(aug, shape, lengths)
        T = _relabel(system, tree_from_point(X), f"boundary-{i + 1}")
        rep = validate_very_small(T)
        members.append(BoundaryMember(T, rep.ok, rep.factors_elliptic, rep.extra_elliptic))
    edges = len(members[0].tree.graph.edges)
    if edges != dimension_report(aug).E_max:
        raise DomainError("boundary construction produced the wrong number of edges")
    return BoundaryFamily(system, members, edges)


# -- projective comparison ----------------------------------------------------------


def _rational(x) -> Fraction:
    if not x.is_rational:
        raise DomainError(f"projective comparison needs rational lengths, got {x}")
    return x.as_fraction()


def compare_projective(Ta: GraphOfGroupsTree, Tb: GraphOfGroupsTree, ball_radius: int = 4) -> Fraction:
    """Max of ``|l_a(w)/l_a(w0) - l_b(w)/l_b(w0)|`` over the word ball."""
    if Ta.system.generators != Tb.system.generators:
        raise DomainError("trees act over different systems")
    w0 = None
    for g in Ta.system.generators:
        w = Word.gen(g)
        if not Ta.translation_length(w).is_zero and not Tb.translation_length(w).is_zero:
            w0 = w
            break
    if w0 is None:
        raise DegenerateSystemError("no generator is hyperbolic in both trees")
    na, nb = _rational(Ta.translation_length(w0)), _rational(Tb.translation_length(w0))
    worst = Fraction(0)
    for w in word_ball(Ta.system, ball_radius):
        d = abs(_rational(Ta.translation_length(w)) / na - _rational(Tb.translation_length(w)) / nb)
        worst = max(worst, d)
    return worst


def twist_map(system: FreeFactorSystem, N: int) -> Endomap:
    """``a -> a``, ``b -> a^N b`` with its declared inverse."""
    a, b = system.generators[0], system.generators[1]
    return Endomap(system, {b: Word.gen(a, N) * Word.gen(b)},
                   {b: Word.gen(a, -N) * Word.gen(b)})


def convergence_table(X_start, X_limit, Ns, ball_radius: int = 4) -> list:
    """Deviation of ``X_start . (b -> a^N b)`` from ``X_limit`` for each ``N``."""
    T_lim = tree_from_point(X_limit)
    rows = []
    for N in Ns:
        T_N = tree_from_point(act_on_point(X_start, twist_map(X_start.system, N)))
        rows.append((N, compare_projective(T_N, T_lim, ball_radius)))
    return rows


__all__ = ["augmented_system", "BoundaryMember", "BoundaryFamily", "boundary_simplex",
           "compare_projective", "twist_map", "convergence_table"]
