"""JSON documents: systems, marked points, trees and systems of isometries.

Every document carries ``"rospace_format": 1`` and a ``"kind"`` field
(``system`` | ``point`` | ``tree`` | ``systemK``).  Factor indices are
1-based in JSON and 0-based in memory.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .errors import AlphabetError, RospaceError, SchemaError, StructuralError
from .gog import TRIVIAL, GraphOfGroupsTree, VertexLabel, items_with_vertices
from .graphs import AGraph, CWGraph, MarkedMetricAGraph, WedgeCycle, format_signed, parse_signed
from .scalars import FormalReal
from .words import FreeFactorSystem, Word

FORMAT_VERSION = 1


def _need(doc, key, path):
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path)
    if key not in doc:
        raise SchemaError(f"missing key {key!r}", path)
    return doc[key]


def _typed(value, kind, path, what):
    if not isinstance(value, kind):
        raise SchemaError(f"{what} must be a {kind.__name__}", path)
    return value


def _word(text, path, system=None) -> Word:
    if not isinstance(text, str):
        raise SchemaError("word must be a string", path)
    try:
        return Word.parse(text, system)
    except AlphabetError as exc:
        raise SchemaError(str(exc), path) from None


def _real(value, path) -> FormalReal:
    try:
        return FormalReal.from_json(value)
    except (TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise SchemaError(f"bad length: {exc}", path) from None


def _header(kind: str) -> dict:
    return {"rospace_format": FORMAT_VERSION, "kind": kind}


def _check_version(doc, path=()):
    v = doc.get("rospace_format", FORMAT_VERSION)
    if v != FORMAT_VERSION:
        raise SchemaError(f"unsupported rospace_format {v!r}", path + ("rospace_format",))


# -- systems -------------------------------------------------------------------


def system_to_json(system: FreeFactorSystem) -> dict:
    return {**_header("system"), **system.to_json()}


def system_from_json(doc, path=("system",)) -> FreeFactorSystem:
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path)
    _need(doc, "n", path)
    try:
        return FreeFactorSystem.from_json(doc)
    except SchemaError:
        raise
    except RospaceError as exc:
        raise SchemaError(str(exc), path) from None


# -- graphs ---------------------------------------------------------------------


def _graph_from_json(doc, path) -> CWGraph:
    verts = _typed(_need(doc, "vertices", path), list, path + ("vertices",), "vertices")
    edges = {}
    for i, e in enumerate(_typed(_need(doc, "edges", path), list, path + ("edges",), "edges")):
        p = path + ("edges", i)
        edges[str(_need(e, "id", p))] = (str(_need(e, "from", p)), str(_need(e, "to", p)))
    try:
        return CWGraph([str(v) for v in verts], edges)
    except StructuralError as exc:
        raise SchemaError(str(exc), path) from None


def _signed_path(items, graph: CWGraph, path) -> list:
    out = []
    for i, tok in enumerate(_typed(items, list, path, "edge path")):
        se = parse_signed(tok)
        if se[0] not in graph.edges:
            raise SchemaError(f"unknown edge {se[0]!r}", path + (i,))
        out.append(se)
    return out


def point_to_json(X: MarkedMetricAGraph) -> dict:
    doc = _header("point")
    doc["system"] = X.system.to_json()
    doc.update(X.agraph.graph.to_json())
    doc["wedge_cycles"] = [{"factor": w.factor + 1, "hub": w.hub,
                            "circles": [[format_signed(se) for se in c] for c in w.circles]}
                           for w in X.agraph.wedges]
    doc["lengths"] = {e: l.to_json() for e, l in X.lengths.items()}
    doc["marking"] = {g: [format_signed(se) for se in X.marking[g]] for g in X.system.generators}
    doc["base"] = X.base
    return doc


def point_from_json(doc, system: Optional[FreeFactorSystem] = None) -> MarkedMetricAGraph:
    _check_version(doc)
    if system is None:
        system = system_from_json(_need(doc, "system", ()))
    graph = _graph_from_json(doc, ())
    wedges = []
    for i, w in enumerate(_typed(doc.get("wedge_cycles", []), list, ("wedge_cycles",), "wedge_cycles")):
        p = ("wedge_cycles", i)
        j = _need(w, "factor", p)
        if not isinstance(j, int) or not 1 <= j <= system.k:
            raise SchemaError(f"factor must be in 1..{system.k}", p + ("factor",))
        circles = tuple(tuple(_signed_path(c, graph, p + ("circles", t)))
                        for t, c in enumerate(_need(w, "circles", p)))
        wedges.append(WedgeCycle(j - 1, str(_need(w, "hub", p)), circles))
    lengths = {str(e): _real(v, ("lengths", e))
               for e, v in _typed(_need(doc, "lengths", ()), dict, ("lengths",), "lengths").items()}
    marking = {g: _signed_path(items, graph, ("marking", g))
               for g, items in _typed(_need(doc, "marking", ()), dict, ("marking",), "marking").items()}
    base = str(doc.get("base", graph.vertices[0] if graph.vertices else ""))
    return MarkedMetricAGraph(system, AGraph(graph, tuple(wedges)), lengths, marking, base)


# -- trees --------------------------------------------------------------------


def _label_from_json(doc, system, path) -> VertexLabel:
    if doc == "trivial":
        return TRIVIAL
    if isinstance(doc, dict) and len(doc) == 1:
        if "special" in doc:
            j = doc["special"]
            if not isinstance(j, int) or not 1 <= j <= system.k:
                raise SchemaError(f"special factor must be in 1..{system.k}", path)
            return VertexLabel.special(j - 1)
        if "cyclic" in doc:
            w = _word(doc["cyclic"], path, system)
            if w.is_identity:
                raise SchemaError("cyclic label needs a nontrivial word", path)
            return VertexLabel.cyclic(w)
    raise SchemaError('vertex label must be "trivial", {"special": j} or {"cyclic": word}', path)


def _item_from_json(item, graph, system, path):
    if isinstance(item, str):
        se = parse_signed(item)
        if se[0] not in graph.edges:
            raise SchemaError(f"unknown edge {se[0]!r}", path)
        return se
    if isinstance(item, dict) and set(item) == {"v", "g"}:
        return (str(item["v"]), _word(item["g"], path + ("g",), system))
    raise SchemaError('path item must be an edge id or {"v": id, "g": word}', path)


def tree_to_json(T: GraphOfGroupsTree) -> dict:
    doc = _header("tree")
    doc["system"] = T.system.to_json()
    doc["graph"] = T.graph.to_json()
    doc["lengths"] = {e: l.to_json() for e, l in T.lengths.items()}
    doc["vertex_labels"] = {v: l.to_json() for v, l in T.vertex_labels.items()}
    if not T.has_trivial_edge_groups:
        doc["edge_labels"] = {e: str(w) for e, w in T.edge_labels.items() if w is not None}
    marking = {}
    for g, p in T.marking.items():
        items = []
        for it in items_with_vertices(T, p):
            if isinstance(it, tuple) and isinstance(it[1], int):
                items.append(format_signed(it))
            else:
                items.append({"v": it[0], "g": str(it[1])})
        marking[g] = items
    doc["marking"] = marking
    doc["root"] = T.root
    if T.name:
        doc["name"] = T.name
    return doc


def tree_from_json(doc, system: Optional[FreeFactorSystem] = None) -> GraphOfGroupsTree:
    _check_version(doc)
    if system is None:
        system = system_from_json(_need(doc, "system", ()))
    graph = _graph_from_json(_need(doc, "graph", ()), ("graph",))
    lengths = {str(e): _real(v, ("lengths", e))
               for e, v in _typed(_need(doc, "lengths", ()), dict, ("lengths",), "lengths").items()}
    labels = {str(v): _label_from_json(l, system, ("vertex_labels", v))
              for v, l in _typed(doc.get("vertex_labels", {}), dict, ("vertex_labels",),
                                 "vertex_labels").items()}
    for v in labels:
        if v not in graph.vertices:
            raise SchemaError(f"unknown vertex {v!r}", ("vertex_labels", v))
    edge_labels = {}
    for e, w in _typed(doc.get("edge_labels", {}), dict, ("edge_labels",), "edge_labels").items():
        if e not in graph.edges:
            raise SchemaError(f"unknown edge {e!r}", ("edge_labels", e))
        edge_labels[str(e)] = _word(w, ("edge_labels", e), system)
    marking = {}
    for g, items in _typed(doc.get("marking", {}), dict, ("marking",), "marking").items():
        if g not in system.generators:
            raise SchemaError(f"unknown generator {g!r}", ("marking", g))
        marking[g] = [_item_from_json(it, graph, system, ("marking", g, i))
                      for i, it in enumerate(_typed(items, list, ("marking", g), "marking path"))]
    root = str(doc.get("root", graph.vertices[0] if graph.vertices else ""))
    try:
        return GraphOfGroupsTree(system, graph, lengths, labels, marking, root,
                                 edge_labels=edge_labels or None, name=str(doc.get("name", "")))
    except StructuralError as exc:
        raise SchemaError(str(exc), ("marking",)) from None


# -- systems of isometries ---------------------------------------------------------


def systemK_to_json(sysK) -> dict:
    return {**_header("systemK"), "system": sysK.system.to_json(), **sysK.to_json()}


def check_systemK_json(doc) -> list:
    """Structural problems of a systemK document: maps must be partial isometries of K."""
    _check_version(doc)
    t = _need(doc, "tree", ())
    graph = _graph_from_json(t, ("tree",))
    lengths = {str(e): _real(v, ("tree", "lengths", e)) for e, v in _need(t, "lengths", ("tree",)).items()}
    problems = []
    if graph.rank != 0 or not graph.is_connected():
        problems.append("K is not a tree")
        return problems
    if set(lengths) != set(graph.edges):
        problems.append("every edge of K needs a length")
        return problems

    def dist(a, b):
        tree = graph.spanning_tree(a)
        return sum((lengths[se[0]] for se in graph.tree_path(tree, b)), FormalReal())

    for g, m in _typed(_need(doc, "maps", ()), dict, ("maps",), "maps").items():
        pairs = list(m.items())
        for a, b in pairs:
            if a not in graph.vertices or b not in graph.vertices:
                raise SchemaError("unknown vertex", ("maps", g, a))
        for i, (a, b) in enumerate(pairs):
            for c, d in pairs[i + 1:]:
                if dist(a, c) != dist(b, d):
                    problems.append(f"map {g} is not an isometry on {a}, {c}")
    for j, v in doc.get("special", {}).items():
        if v not in graph.vertices:
            problems.append(f"special point of factor {j} is not in K")
    return problems


# -- files -----------------------------------------------------------------------


def detect_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object", ())
    kind = doc.get("kind")
    if kind in ("system", "point", "tree", "systemK"):
        return kind
    if kind is not None:
        raise SchemaError(f"unknown kind {kind!r}", ("kind",))
    if "vertex_labels" in doc or "graph" in doc:
        return "tree"
    if "domains" in doc or "maps" in doc:
        return "systemK"
    if "wedge_cycles" in doc or "marking" in doc:
        return "point"
    if "n" in doc:
        return "system"
    raise SchemaError("cannot tell what kind of document this is", ())


def read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}", ()) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}", ()) from None


def load(path, system: Optional[FreeFactorSystem] = None):
    """Load a document and return ``(kind, object)``; systemK documents stay as dicts."""
    doc = read_json(path)
    kind = detect_kind(doc)
    if kind == "system":
        return kind, system_from_json(doc, ())
    if kind == "point":
        return kind, point_from_json(doc, system)
    if kind == "tree":
        return kind, tree_from_json(doc, system)
    return kind, doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


__all__ = [
    "FORMAT_VERSION", "system_to_json", "system_from_json", "point_to_json", "point_from_json",
    "tree_to_json", "tree_from_json", "systemK_to_json", "check_systemK_json", "detect_kind",
    "read_json", "load", "dumps",
]
