"""Built-in fixtures.

The JSON files under ``fixtures/`` are generated by :func:`build` and
shipped with the package; :func:`load_fixture` reads them back.
"""

from __future__ import annotations

from pathlib import Path

from .boundary import boundary_simplex
from .gog import GraphOfGroupsTree, VertexLabel, tree_from_point
from .graphs import CollapsedGraph, CWGraph, point_from_collapsed
from .io import dumps, load, point_to_json, tree_to_json
from .words import FreeFactorSystem, Word

FIXTURE_DIR = Path(__file__).with_name("fixtures")

POINTS = ("t1", "x2-middle", "x2-middle-symbolic", "theta", "dumbbell")
TREES = ("boundary-2-1", "boundary-3-1", "cyclic-trivalent", "tripod-violation")
NAMES = POINTS + TREES


def _t1():
    S = FreeFactorSystem.standard(2, [1])
    shape = CollapsedGraph(CWGraph(["u"], {"e": ("u", "u")}), {0: "u"})
    return point_from_collapsed(S, shape, {"e": 1})


def _x2(lengths):
    S = FreeFactorSystem.standard(2, [1])
    shape = CollapsedGraph(CWGraph(["u", "v"], {"f": ("u", "v"), "e": ("v", "v")}), {0: "u"})
    return point_from_collapsed(S, shape, lengths)


def _theta():
    S = FreeFactorSystem.standard(2, [])
    shape = CollapsedGraph(CWGraph(["v1", "v2"], {"e1": ("v1", "v2"), "e2": ("v1", "v2"),
                                                  "e3": ("v1", "v2")}), {})
    return point_from_collapsed(S, shape, "symbolic")


def _dumbbell():
    # the bar is a separating edge
    S = FreeFactorSystem.standard(2, [])
    shape = CollapsedGraph(CWGraph(["v1", "v2"], {"e1": ("v1", "v1"), "e2": ("v1", "v2"),
                                                  "e3": ("v2", "v2")}), {})
    return point_from_collapsed(S, shape, "symbolic")


def _boundary(n, s):
    T = boundary_simplex(FreeFactorSystem.standard(n, s)).members[0].tree
    T.name = f"boundary-{n}-{len(s)}"
    return T


def _cyclic_trivalent():
    S = FreeFactorSystem.standard(3, [])
    G = CWGraph(["w", "x"], {"e": ("w", "w"), "f": ("w", "x"), "g": ("x", "x")})
    c = Word.gen("c")
    marking = {"a": [("e", 1)], "b": [("f", 1), ("g", 1), ("f", -1)], "c": [("w", c)]}
    return GraphOfGroupsTree(S, G, {"e": 1, "f": 1, "g": 1}, {"w": VertexLabel.cyclic(c)},
                             marking, "w", name="cyclic-trivalent")


def _tripod_violation():
    S = FreeFactorSystem.standard(1, [])
    a = Word.gen("a")
    G = CWGraph(["v", "x1", "x2", "x3"], {f"e{i}": ("v", f"x{i}") for i in (1, 2, 3)})
    labels = {v: VertexLabel.cyclic(a) for v in G.vertices}
    return GraphOfGroupsTree(S, G, {e: 1 for e in G.edges}, labels, {}, "v",
                             edge_labels={e: a for e in G.edges}, name="tripod-violation")


BUILDERS = {
    "t1": _t1,
    "x2-middle": lambda: _x2("barycenter"),
    "x2-middle-symbolic": lambda: _x2("symbolic"),
    "theta": _theta,
    "dumbbell": _dumbbell,
    "boundary-2-1": lambda: _boundary(2, [1]),
    "boundary-3-1": lambda: _boundary(3, [1]),
    "cyclic-trivalent": _cyclic_trivalent,
    "tripod-violation": _tripod_violation,
}


def build(name: str):
    """Construct a fixture in memory (a point or a tree)."""
    return BUILDERS[name]()


def to_document(name: str) -> dict:
    obj = build(name)
    doc = point_to_json(obj) if name in POINTS else tree_to_json(obj)
    doc["name"] = name
    return doc


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.json"


def load_fixture(name: str):
    """The shipped fixture as ``(kind, object)``."""
    if name not in BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return load(fixture_path(name))


def fixture_tree(name: str) -> GraphOfGroupsTree:
    kind, obj = load_fixture(name)
    return tree_from_point(obj) if kind == "point" else obj


def write_all(directory: Path = FIXTURE_DIR):
    directory.mkdir(exist_ok=True)
    for name in NAMES:
        (directory / f"{name}.json").write_text(dumps(to_document(name)))


__all__ = ["POINTS", "TREES", "NAMES", "build", "to_document", "fixture_path", "load_fixture",
           "fixture_tree", "write_all"]
