"""Collapsed (A, n)-graph shapes up to isomorphism.

A shape is a connected multigraph (loops allowed) of rank ``n - sum s``
with one coloured special vertex per factor (valence >= 1) and plain
vertices of valence >= 3.  Maximal shapes have special valence 1 and
plain valence 3.  Isomorphism classes are separated by a canonical form:
colour refinement, then brute force over permutations inside each cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Optional

from .errors import ResourceError
from .graphs import CollapsedGraph, CWGraph, dimension_report
from .words import FreeFactorSystem


@dataclass
class Budget:
    max_vertices: int = 8
    max_nodes: int = 2_000_000
    nodes: int = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise ResourceError(f"enumeration exceeded {self.max_nodes} search nodes")


@dataclass
class EnumerationResult:
    system: FreeFactorSystem
    maximal: list
    V: int
    E: int
    all_shapes: Optional[list] = None
    shapes_by_vertices: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"system": self.system.to_json(), "V": self.V, "E": self.E,
               "maximal_classes": len(self.maximal),
               "classes": [shape_to_json(c) for c in self.maximal]}
        if self.all_shapes is not None:
            out["all_shapes"] = len(self.all_shapes)
            out["shapes_by_vertices"] = {str(k): v for k, v in sorted(self.shapes_by_vertices.items())}
        return out


def shape_to_json(c: CollapsedGraph) -> dict:
    doc = c.graph.to_json()
    doc["special"] = {str(j + 1): v for j, v in sorted(c.special.items())}
    return doc


def _degree_sequences(k: int, p: int, total: int, maximal: bool):
    """Degrees of the k specials (each) and the p plain vertices (non-increasing)."""
    if maximal:
        seq = (1,) * k + (3,) * p
        if sum(seq) == total:
            yield seq
        return
    for spec in product(range(1, total + 1), repeat=k):
        rest = total - sum(spec)
        if rest < 3 * p:
            continue
        for plain in _partitions(rest, p, 3, rest):
            yield tuple(spec) + plain


def _partitions(total, parts, lo, hi):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(hi, total - lo * (parts - 1)), lo - 1, -1):
        for tail in _partitions(total - first, parts - 1, lo, first):
            yield (first,) + tail


def _graphs_with_degrees(deg: tuple, budget: Budget):
    """All symmetric multiplicity matrices (loops count twice) with these degrees."""
    V = len(deg)
    pairs = [(i, j) for i in range(V) for j in range(i, V)]
    rem = list(deg)
    M = [[0] * V for _ in range(V)]

    def rec(t):
        budget.tick()
        if t == len(pairs):
            if not any(rem):
                yield [row[:] for row in M]
            return
        i, j = pairs[t]
        cap = rem[i] // 2 if i == j else min(rem[i], rem[j])
        for m in range(cap, -1, -1):
            use_i = 2 * m if i == j else m
            rem[i] -= use_i
            if i != j:
                rem[j] -= m
            M[i][j] = M[j][i] = m
            # the last pair of row i must exhaust the degree of i
            if j < V - 1 or rem[i] == 0:
                yield from rec(t + 1)
            rem[i] += use_i
            if i != j:
                rem[j] += m
            M[i][j] = M[j][i] = 0

    yield from rec(0)


def _connected(M) -> bool:
    V = len(M)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(V):
            if M[i][j] and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == V


def _refine(M, colors: list) -> list:
    V = len(M)
    while True:
        sig = [(colors[i], M[i][i], tuple(sorted((colors[j], M[i][j]) for j in range(V) if j != i and M[i][j])))
               for i in range(V)]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(M, k: int) -> tuple:
    """Lexicographically least relabelled matrix over colour-preserving orders."""
    V = len(M)
    colors = [i if i < k else k for i in range(V)]
    colors = _refine(M, colors)
    cells: dict = {}
    for i in range(V):
        cells.setdefault(colors[i], []).append(i)
    keys = sorted(cells)
    best = None
    for choice in product(*(permutations(cells[c]) for c in keys)):
        order = [i for part in choice for i in part]
        code = (tuple(colors[i] for i in order),
                tuple(M[order[a]][order[b]] for a in range(V) for b in range(a, V)))
        if best is None or code < best[0]:
            best = (code, order)
    return best[0]


def _to_collapsed(code, k: int, V: int) -> CollapsedGraph:
    _, upper = code
    names = [f"u{i + 1}" if i < k else f"v{i - k + 1}" for i in range(V)]
    edges = {}
    t = 0
    count = 0
    for a in range(V):
        for b in range(a, V):
            for _ in range(upper[t]):
                count += 1
                edges[f"e{count}"] = (names[a], names[b])
            t += 1
    return CollapsedGraph(CWGraph(names, edges), {j: names[j] for j in range(k)})


def enumerate_shapes(system: FreeFactorSystem, V: int, maximal: bool = False,
                     budget: Optional[Budget] = None) -> list:
    """Isomorphism classes of valid collapsed shapes with exactly ``V`` vertices."""
    budget = budget or Budget()
    k, r = system.k, system.free_rank
    if V > budget.max_vertices + 1:
        raise ResourceError(f"{V} vertices exceeds the budget of {budget.max_vertices}")
    p = V - k
    if p < 0:
        return []
    E = V + r - 1
    if E < 0:
        return []
    if V == 1 and E == 0:
        seqs = [(0,)]
    else:
        seqs = list(_degree_sequences(k, p, 2 * E, maximal))
    codes = set()
    for deg in seqs:
        for M in _graphs_with_degrees(deg, budget):
            if _connected(M):
                codes.add(canonical_form(M, k))
    return [_to_collapsed(c, k, V) for c in sorted(codes)]


def enumerate_maximal_agraphs(system: FreeFactorSystem, budget: Optional[Budget] = None,
                              count_all: bool = False) -> EnumerationResult:
    budget = budget or Budget()
    rep = dimension_report(system)
    if rep.V_max > budget.max_vertices:
        raise ResourceError(f"V_max = {rep.V_max} exceeds the budget of {budget.max_vertices}")
    if rep.V_max < 1:
        maximal = enumerate_shapes(system, 1, maximal=False, budget=budget)
        res = EnumerationResult(system, maximal, 1, max(system.free_rank, 0))
    else:
        res = EnumerationResult(system, enumerate_shapes(system, rep.V_max, True, budget),
                                rep.V_max, rep.E_max)
    if count_all:
        shapes = []
        for V in range(1, max(rep.V_max, 1) + 2):
            found = enumerate_shapes(system, V, budget=budget)
            res.shapes_by_vertices[V] = len(found)
            shapes.extend(found)
        res.all_shapes = shapes
    return res


__all__ = ["Budget", "EnumerationResult", "enumerate_shapes", "enumerate_maximal_agraphs",
           "canonical_form", "shape_to_json"]
