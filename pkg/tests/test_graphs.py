import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F2A, W
from rospace.enumeration import enumerate_maximal_agraphs
from rospace.errors import DomainError, StructuralError
from rospace.gog import tree_from_point
from rospace.graphs import (AGraph, CollapsedGraph, CWGraph, WedgeCycle, act_on_point,
                            collapse_wedge_cycles, dimension_report, expand, normalize_volume,
                            point_from_collapsed, point_simplex_dim, validate_agraph,
                            validate_collapsed, validate_point)
from rospace.words import Endomap, FreeFactorSystem, word_ball


def wedge(j, hub, *edges):
    return WedgeCycle(j, hub, tuple(((e, 1),) for e in edges))


def stem_and_loop():
    G = CWGraph(["u", "v"], {"c": ("u", "u"), "f": ("u", "v"), "e": ("v", "v")})
    return AGraph(G, (wedge(0, "u", "c"),))


def twist(N):
    return Endomap(F2A, {"b": W("a") ** N * W("b")}, {"b": W("a") ** -N * W("b")})


class TestValidate:
    def test_stem_and_loop_passes(self):
        assert validate_agraph(stem_and_loop(), F2A).ok

    def test_shared_edge(self):
        S = FreeFactorSystem.standard(2, [1, 1])
        G = CWGraph(["u"], {"c": ("u", "u"), "d": ("u", "u")})
        rep = validate_agraph(AGraph(G, (wedge(0, "u", "c"), wedge(1, "u", "c"))), S)
        assert rep.clause == "pairwise intersection"

    def test_valence_two(self):
        G = CWGraph(["u", "v", "w"], {"c": ("u", "u"), "f": ("u", "v"), "g": ("v", "w"),
                                      "e": ("w", "w")})
        assert validate_agraph(AGraph(G, (wedge(0, "u", "c"),)), F2A).clause == "valence"

    def test_dual_graph_cycle(self):
        S = FreeFactorSystem.standard(4, [1, 1, 1])
        G = CWGraph(["p", "q", "r"], {"x1": ("p", "q"), "x2": ("q", "p"), "y1": ("q", "r"),
                                      "y2": ("r", "q"), "z1": ("r", "p"), "z2": ("p", "r")})

        def two(j, hub, a, b):
            return WedgeCycle(j, hub, (((a, 1), (b, 1)),))

        g = AGraph(G, (two(0, "p", "x1", "x2"), two(1, "q", "y1", "y2"), two(2, "r", "z1", "z2")))
        assert validate_agraph(g, S).clause == "dual-forest"

    def test_rank_and_connectivity(self):
        G = CWGraph(["u"], {"c": ("u", "u"), "d": ("u", "u"), "e": ("u", "u")})
        assert validate_agraph(AGraph(G, (wedge(0, "u", "c"),)), F2A).clause == "rank"
        G = CWGraph(["u", "v"], {"c": ("u", "u"), "e": ("v", "v")})
        assert validate_agraph(AGraph(G, (wedge(0, "u", "c"),)), F2A).clause == "connectivity"

    def test_malformed_edge(self):
        with pytest.raises(StructuralError):
            CWGraph(["u"], {"e": ("u", "x")})


class TestCollapse:
    def test_stem_and_loop(self):
        c = collapse_wedge_cycles(stem_and_loop())
        assert (len(c.graph.vertices), len(c.graph.edges)) == (2, 2)
        assert c.special == {0: "u"} and c.graph.rank == 1

    def test_k0_unchanged(self):
        G = CWGraph(["v"], {"e1": ("v", "v"), "e2": ("v", "v")})
        c = collapse_wedge_cycles(AGraph(G))
        assert c.graph.edges == G.edges and c.special == {}

    def test_relative_rose(self):
        G = CWGraph(["u"], {"c": ("u", "u"), "e": ("u", "u")})
        c = collapse_wedge_cycles(AGraph(G, (wedge(0, "u", "c"),)))
        assert c.graph.vertices == ("u",) and c.special == {0: "u"} and c.graph.rank == 1

    @pytest.mark.parametrize("n, s", [(2, [1]), (3, [1]), (3, [1, 1]), (3, [2])])
    def test_round_trip_on_maximal_shapes(self, n, s):
        S = FreeFactorSystem.standard(n, s)
        for shape in enumerate_maximal_agraphs(S).maximal:
            g = expand(shape, S)
            assert validate_agraph(g, S).ok
            back = collapse_wedge_cycles(g)
            assert back.graph.edges == shape.graph.edges
            assert validate_collapsed(back, S).ok
            V, E = len(back.graph.vertices), len(back.graph.edges)
            assert V - E == 1 - (n - sum(s))


class TestDimensions:
    @pytest.mark.parametrize("n, s, V, E, dim_cv, dim_spine", [
        (2, [1], 2, 2, 1, 1),
        (2, [], 2, 3, 2, 1),
        (3, [1], 4, 5, 4, 3),
        (3, [2], 2, 2, 1, 1),
        (3, [1, 1], 4, 4, 3, 2),
    ])
    def test_formulas(self, n, s, V, E, dim_cv, dim_spine):
        rep = dimension_report(FreeFactorSystem.standard(n, s))
        assert (rep.V_max, rep.E_max, rep.dim_cv, rep.dim_spine) == (V, E, dim_cv, dim_spine)

    def test_classical(self):
        for n in range(2, 6):
            assert dimension_report(FreeFactorSystem.standard(n)).dim_cv == 3 * n - 4


class TestPoints:
    def test_fixtures_valid(self, X2sym):
        assert validate_point(X2sym).ok

    def test_normalize(self):
        S = F2A
        shape = CollapsedGraph(CWGraph(["u", "v"], {"f": ("u", "v"), "e": ("v", "v")}), {0: "u"})
        X = normalize_volume(point_from_collapsed(S, shape, {"f": 1, "e": 1}))
        assert {e: str(l) for e, l in X.lengths.items()} == {"f": "1/2", "e": "1/2"}
        assert point_simplex_dim(X) == 1

    def test_normalize_single_loop(self):
        shape = CollapsedGraph(CWGraph(["u"], {"e": ("u", "u")}), {0: "u"})
        X = normalize_volume(point_from_collapsed(F2A, shape, {"e": 3}))
        assert str(X.lengths["e"]) == "1" and point_simplex_dim(X) == 0

    def test_zero_length_rejected(self):
        shape = CollapsedGraph(CWGraph(["u"], {"e": ("u", "u")}), {0: "u"})
        with pytest.raises(DomainError):
            normalize_volume(point_from_collapsed(F2A, shape, {"e": 0}))

    def test_maximal_simplex_dim(self):
        S = FreeFactorSystem.standard(3, [1])
        shape = enumerate_maximal_agraphs(S).maximal[0]
        assert point_simplex_dim(point_from_collapsed(S, shape)) == 4

    def test_wrong_marking_detected(self, X2sym):
        X = point_from_collapsed(X2sym.system, X2sym.collapsed)
        X.marking["b"] = X.marking["a"]
        assert validate_point(X).clause == "marking"


class TestAction:
    def test_identity(self, X2sym):
        Y = act_on_point(X2sym, Endomap.identity(F2A))
        assert Y.marking == X2sym.marking and Y.lengths == X2sym.lengths

    def test_lengths_transform(self, X2sym):
        psi = twist(1)
        T, TY = tree_from_point(X2sym), tree_from_point(act_on_point(X2sym, psi))
        for w in word_ball(F2A, 3):
            assert TY.translation_length(w) == T.translation_length(psi(w))

    def test_right_action(self, X2sym):
        psi = twist(1)
        phi = Endomap.parse(F2A, {"a": "b*a*b^-1"}, {"a": "b^-1*a*b"})
        left = tree_from_point(act_on_point(act_on_point(X2sym, psi), phi))
        right = tree_from_point(act_on_point(X2sym, psi.compose(phi)))
        for w in word_ball(F2A, 3):
            assert left.translation_length(w) == right.translation_length(w)

    def test_non_relative_rejected(self, X2sym):
        swap = Endomap(F2A, {"a": W("b"), "b": W("a")}, {"a": W("b"), "b": W("a")})
        with pytest.raises(DomainError):
            act_on_point(X2sym, swap)

    @given(st.integers(-4, 4))
    def test_twists_stay_in_the_open_simplex(self, N):
        shape = CollapsedGraph(CWGraph(["u", "v"], {"f": ("u", "v"), "e": ("v", "v")}), {0: "u"})
        X = act_on_point(point_from_collapsed(F2A, shape), twist(N))
        assert point_simplex_dim(X) == 1
        assert sorted(map(str, X.lengths.values())) == ["λ1", "λ2"]
        assert validate_point(X).ok
