from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2A, W, words
from rospace.acceptance import TREE_FIXTURES
from rospace.boundary import boundary_simplex, compare_projective, convergence_table, twist_map
from rospace.enumeration import enumerate_maximal_agraphs
from rospace.errors import DegenerateSystemError, DomainError, UnsupportedTree
from rospace.fixtures import build, fixture_tree
from rospace.gog import GraphOfGroupsTree, VertexLabel, ball_oracle_length, minimalize, tree_from_point
from rospace.graphs import CWGraph, dimension_report, point_from_collapsed
from rospace.invariants import (expected_total_index, lattice_L, lattice_Lambda, q_rank_report,
                                total_index, validate_very_small, verify_prop41)
from rospace.scalars import FormalReal, LatticeZ
from rospace.words import FreeFactorSystem, Word, word_ball

lam1, lam2, lam3 = (FormalReal.symbol(f"λ{i}") for i in (1, 2, 3))

TREES = {name: fixture_tree(name) for name in TREE_FIXTURES}


def subdivided_t1():
    G = CWGraph(["u", "m"], {"e1": ("u", "m"), "e2": ("m", "u")})
    marking = {"a": [("u", W("a"))], "b": [("e1", 1), ("e2", 1)]}
    return GraphOfGroupsTree(F2A, G, {"e1": Fraction(1, 3), "e2": Fraction(2, 3)},
                             {"u": VertexLabel.special(0)}, marking, "u")


class TestTranslationLength:
    @pytest.mark.parametrize("w, length", [("a", 0), ("b", 1), ("a*b", 1), ("b^2*a^-1", 2),
                                           ("b*a*b^-1", 0), ("a*b*a^-1*b^-1", 2)])
    def test_t1(self, T1, w, length):
        assert T1.translation_length(W(w)) == length

    @pytest.mark.parametrize("w, length", [
        ("a", FormalReal()), ("b", lam2), ("a*b", lam2 + lam1 * 2), ("a*b^2", lam2 * 2 + lam1 * 2),
        ("a*b*a*b^-1", lam2 * 2 + lam1 * 4), ("b^3", lam2 * 3),
    ])
    def test_x2_symbolic(self, T2sym, w, length):
        assert T2sym.translation_length(W(w)) == length

    def test_barycenter(self, T2):
        assert T2.translation_length(W("a*b")) == Fraction(3, 2)

    def test_cyclic_vertex(self):
        T = TREES["cyclic-trivalent"]
        assert T.is_elliptic(W("c")) and T.is_elliptic(W("b*c*b^-1"))
        assert T.translation_length(W("a")) == 1 and T.translation_length(W("b")) == 1
        assert T.translation_length(W("c*a")) == 1

    def test_theta_cycles(self):
        T = TREES["theta"]
        values = {T.translation_length(W(w)) for w in ("a", "b", "a*b^-1")}
        assert values == {lam1 + lam2, lam1 + lam3, lam2 + lam3}

    @pytest.mark.parametrize("name", TREE_FIXTURES)
    def test_agrees_with_ball_oracle(self, name):
        T = TREES[name]
        for w in ("a*b", "b^-1*a^2", "a*b*a^-1*b^-1"):
            assert T.translation_length(W(w)) == ball_oracle_length(T, W(w))

    def test_subdivision_does_not_change_lengths(self, T1):
        T = subdivided_t1()
        for w in ("b", "a*b^2", "a*b*a^-1*b^-1"):
            assert T.translation_length(W(w)) == T1.translation_length(W(w))

    @settings(max_examples=40)
    @given(st.sampled_from(TREE_FIXTURES), words(max_size=6), words(max_size=4))
    def test_conjugation_invariant(self, name, w, g):
        T = TREES[name]
        w, g = Word(w), Word(g)
        if T.system.generators != ("a", "b"):
            w, g = w * Word.gen("c"), g * Word.gen("c", -1)
        assert T.translation_length(g * w * g.inverse()) == T.translation_length(w)

    @settings(max_examples=40)
    @given(st.sampled_from(TREE_FIXTURES), words(max_size=5), st.integers(1, 4))
    def test_power_law(self, name, w, m):
        T = TREES[name]
        assert T.translation_length(w ** m) == T.translation_length(w) * m

    @settings(max_examples=25)
    @given(st.sampled_from(["t1", "x2-middle-symbolic", "theta", "dumbbell"]), words(max_size=4))
    def test_oracle_property(self, name, w):
        T = TREES[name]
        if w.is_identity:
            return
        assert T.translation_length(w) == ball_oracle_length(T, w)

    def test_nonnegative(self):
        for T in TREES.values():
            for w in ("a", "b", "a*b^-1", "a^2*b"):
                assert T.translation_length(W(w)).is_positive or T.translation_length(W(w)).is_zero


class TestMinimalize:
    def test_absorbs_valence_two(self, T1):
        M = minimalize(subdivided_t1())
        assert len(M.graph.vertices) == 1 and len(M.graph.edges) == 1
        for w in ("b", "a*b", "b*a*b"):
            assert M.translation_length(W(w)) == T1.translation_length(W(w))

    def test_minimal_tree_unchanged(self, T2sym):
        M = minimalize(T2sym)
        assert len(M.graph.edges) == len(T2sym.graph.edges)

    def test_nontrivial_edge_groups_refused(self):
        with pytest.raises(UnsupportedTree):
            minimalize(fixture_tree("tripod-violation"))


class TestVerySmall:
    @pytest.mark.parametrize("name", TREE_FIXTURES)
    def test_fixtures(self, name):
        assert validate_very_small(TREES[name]).ok

    def test_tripod(self):
        rep = validate_very_small(fixture_tree("tripod-violation"))
        assert not rep.ok and rep.clause == "no fixed tripods"

    def test_obtrusive_power(self):
        T = TREES["cyclic-trivalent"]
        bad = GraphOfGroupsTree(T.system, T.graph, T.lengths,
                                {"w": VertexLabel.cyclic(W("c^2"))},
                                {"a": [("e", 1)], "b": [("f", 1), ("g", 1), ("f", -1)],
                                 "c": [("w", W("c^2"))]}, "w")
        assert validate_very_small(bad).clause == "no obtrusive powers"

    def test_cv_versus_boundary(self):
        assert validate_very_small(TREES["t1"]).in_cv
        rep = validate_very_small(TREES["cyclic-trivalent"])
        assert rep.ok and not rep.in_cv and rep.extra_elliptic == [W("c")]


class TestIndex:
    @pytest.mark.parametrize("name, orbits, total", [
        ("t1", [(1, 2, 2)], 2),
        ("x2-middle", [(1, 1, 1), (0, 3, 1)], 2),
        ("theta", [(0, 3, 1), (0, 3, 1)], 2),
        ("boundary-3-1", [(1, 1, 1), (1, 1, 1), (0, 3, 1), (0, 3, 1)], 4),
        ("cyclic-trivalent", [(1, 3, 3), (0, 3, 1)], 4),
    ])
    def test_examples(self, name, orbits, total):
        rep = total_index(TREES[name])
        assert [(o.rk_st, o.v1, o.index) for o in rep.orbits] == orbits
        assert rep.total == total == rep.expected

    @pytest.mark.parametrize("n, s, want", [(2, [], 2), (2, [1], 2), (3, [1], 4), (3, [2], 2),
                                            (3, [1, 1], 4), (4, [], 6)])
    def test_expected(self, n, s, want):
        assert expected_total_index(FreeFactorSystem.standard(n, s)) == want

    @pytest.mark.parametrize("n, s", [(2, []), (2, [1]), (3, [1]), (3, [2]), (3, [1, 1])])
    def test_maximal_points(self, n, s):
        S = FreeFactorSystem.standard(n, s)
        for shape in enumerate_maximal_agraphs(S).maximal:
            rep = total_index(tree_from_point(point_from_collapsed(S, shape)))
            assert rep.equality and rep.orbit_bound_ok
            assert all(o.index >= 1 for o in rep.orbits)


class TestLattices:
    def test_t1(self):
        assert lattice_L(TREES["t1"]) == LatticeZ([1]) == lattice_Lambda(TREES["t1"])

    def test_x2_symbolic(self, T2sym):
        assert lattice_L(T2sym) == LatticeZ([lam1 * 2, lam2])
        assert lattice_Lambda(T2sym) == LatticeZ([lam1, lam2])

    def test_theta(self):
        T = TREES["theta"]
        assert lattice_L(T) == LatticeZ([lam1 + lam3, lam2 + lam3, lam3 * 2])
        assert lattice_Lambda(T) == LatticeZ([lam1, lam2, lam3])

    @pytest.mark.parametrize("name", TREE_FIXTURES)
    def test_sandwich(self, name):
        L, Lam = lattice_L(TREES[name]), lattice_Lambda(TREES[name])
        assert L <= Lam and Lam.scaled(2) <= L

    @pytest.mark.parametrize("name", TREE_FIXTURES)
    def test_prop41(self, name):
        rep = verify_prop41(TREES[name])
        assert rep.ok and rep.two_rank <= rep.bound


class TestQRank:
    @pytest.mark.parametrize("name, r_q, cor, thm", [
        ("t1", 1, 1, 2), ("x2-middle", 1, 2, 2), ("x2-middle-symbolic", 2, 2, 2),
        ("theta", 3, 3, 3), ("boundary-3-1", 4, 5, 5), ("cyclic-trivalent", 1, 4, 6),
    ])
    def test_values(self, name, r_q, cor, thm):
        rep = q_rank_report(TREES[name])
        assert (rep.r_q, rep.cor43, rep.theorem) == (r_q, cor, thm)

    @pytest.mark.parametrize("n, s", [(2, [1]), (3, [1]), (3, [1, 1])])
    def test_attained_on_symbolic_maximal_points(self, n, s):
        S = FreeFactorSystem.standard(n, s)
        E = dimension_report(S).E_max
        for shape in enumerate_maximal_agraphs(S).maximal:
            rep = q_rank_report(tree_from_point(point_from_collapsed(S, shape)))
            assert rep.r_q == rep.theorem == E


class TestBoundary:
    @pytest.mark.parametrize("n, s, dim, members", [
        (2, [], 1, 1), (2, [1], 0, 1), (3, [1], 3, 2), (3, [2], 0, 1), (3, [1, 1], 2, 1),
    ])
    def test_dimension(self, n, s, dim, members):
        S = FreeFactorSystem.standard(n, s)
        fam = boundary_simplex(S, all_classes=True)
        assert fam.dimension == dim == dimension_report(S).dim_cv - 1
        assert len(fam.members) == members and fam.valid

    def test_extra_generator_elliptic(self):
        fam = boundary_simplex(FreeFactorSystem.standard(3, [1]))
        (m,) = fam.members
        assert m.extra_elliptic == [W("c")] and m.tree.is_elliptic(W("a"))
        assert not m.tree.is_elliptic(W("b"))


class TestProjective:
    def test_self(self, T1, T2):
        assert compare_projective(T1, T1) == 0 == compare_projective(T2, T2)

    def test_scaling_invisible(self, T1):
        X = point_from_collapsed(T1.system, build("t1").collapsed, {"e": 5})
        assert compare_projective(tree_from_point(X), T1) == 0

    def test_symbolic_refused(self, T2sym, T2):
        with pytest.raises(DomainError):
            compare_projective(T2sym, T2)

    def test_degenerate(self):
        T = fixture_tree("cyclic-trivalent")
        with pytest.raises(DegenerateSystemError):
            compare_projective(one_vertex_tree(T), one_vertex_tree(T))

    def test_convergence_table(self):
        rows = convergence_table(build("x2-middle"), build("t1"), range(1, 7))
        assert rows == [(1, Fraction(4, 3)), (2, Fraction(2, 3)), (3, Fraction(2, 3)),
                        (4, 0), (5, 0), (6, 0)]

    @pytest.mark.parametrize("N", [1, 2, 4])
    def test_deviation_against_oracle(self, N):
        # l_{X.phi}(w) = l_X(phi(w)), with lengths from the ball oracle
        X, T_lim = build("x2-middle"), fixture_tree("t1")
        T_X = tree_from_point(X)
        phi = twist_map(X.system, N)
        ball = list(word_ball(X.system, 3))
        w0 = W("b")
        na = ball_oracle_length(T_X, phi(w0)).as_fraction()
        nb = T_lim.translation_length(w0).as_fraction()
        worst = max(abs(ball_oracle_length(T_X, phi(w)).as_fraction() / na
                        - T_lim.translation_length(w).as_fraction() / nb)
                    for w in ball if not w.is_identity)
        assert convergence_table(X, build("t1"), [N], ball_radius=3) == [(N, worst)]


def one_vertex_tree(T):
    """A one-vertex tree where every generator fixes the vertex."""
    S = FreeFactorSystem.standard(1)
    G = CWGraph(["v"], {})
    return GraphOfGroupsTree(S, G, {}, {"v": VertexLabel.cyclic(W("a"))}, {"a": [("v", W("a"))]}, "v")
