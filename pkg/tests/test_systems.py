import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rospace.errors import ResourceError
from rospace.fixtures import POINTS, build, fixture_tree
from rospace.scalars import FormalReal
from rospace.systems import (ball_matches_tree, build_tk_ball, index_via_orbit_graph, orbit_graph,
                             orbit_index_table, random_tree, resolve_point, system_from_tree,
                             valence_defect)

SYSTEMS = {name: resolve_point(build(name)) for name in POINTS}


class TestResolve:
    def test_t1_is_a_unit_segment(self):
        K = SYSTEMS["t1"]
        assert len(K.points) == 2 and K.total_length() == 1
        assert [(m.label, m.kind) for m in K.moves] == [("b", "free")]
        assert K.special == {0: 0}

    def test_x2_symbolic(self):
        K = SYSTEMS["x2-middle-symbolic"]
        lam1, lam2 = FormalReal.symbol("λ1"), FormalReal.symbol("λ2")
        assert K.total_length() == lam1 * 2 + lam2

    @pytest.mark.parametrize("name", POINTS)
    def test_moves_are_isometries(self, name):
        K = SYSTEMS[name]
        for m in K.moves:
            for i, j in m.mapping.items():
                assert K.tree.act(m.element, K.points[i]) == K.points[j]
            pairs = list(m.mapping.items())
            for (i, j), (p, q) in zip(pairs, pairs[1:]):
                assert K.distance(i, p) == K.distance(j, q)

    @pytest.mark.parametrize("name", POINTS)
    def test_k_is_a_subtree(self, name):
        K = SYSTEMS[name]
        edges = K.edges()
        assert len(edges) == len(K.points) - 1
        for a, b, length in edges:
            assert K.tree.distance(K.points[a], K.points[b]) == length

    def test_from_boundary_tree(self):
        K = system_from_tree(fixture_tree("boundary-2-1"))
        assert build_tk_ball(K, 2).ok


class TestTKBall:
    @pytest.mark.parametrize("name", POINTS)
    def test_depth_zero_is_k(self, name):
        K = SYSTEMS[name]
        ball = build_tk_ball(K, 0)
        assert len(ball.classes) == len(K.points) and ball.ok

    def test_t1_sizes(self):
        K = SYSTEMS["t1"]
        sizes = [(len(b.classes), b.branch_points()) for b in (build_tk_ball(K, d) for d in range(4))]
        assert sizes == [(2, 0), (6, 1), (18, 3), (54, 9)]

    @pytest.mark.parametrize("name", POINTS)
    @pytest.mark.parametrize("depth", [1, 2])
    def test_matches_tree(self, name, depth):
        K = SYSTEMS[name]
        ball = build_tk_ball(K, depth)
        assert ball.ok and ball_matches_tree(ball, K)

    def test_edges_have_tree_lengths(self):
        K = SYSTEMS["x2-middle"]
        ball = build_tk_ball(K, 2)
        for (a, b), length in ball.edges.items():
            assert K.tree.distance(ball.images[a], ball.images[b]) == length

    def test_budget(self):
        with pytest.raises(ResourceError):
            build_tk_ball(SYSTEMS["theta"], 6, max_nodes=1000)


class TestOrbitGraph:
    @pytest.mark.parametrize("name", POINTS)
    def test_agrees_with_direct_index(self, name):
        assert all(r.agrees for r in orbit_index_table(SYSTEMS[name]))

    def test_t1(self):
        (row,) = orbit_index_table(SYSTEMS["t1"])
        assert (row.orbit_size, row.rank, row.index_direct) == (2, 1, 2)

    def test_x2(self):
        rows = orbit_index_table(SYSTEMS["x2-middle"])
        assert [(r.vertex, r.rank, r.index_orbit_graph) for r in rows] == [("u", 1, 1), ("v", 0, 1)]

    def test_theta_orbit_sizes(self):
        rows = orbit_index_table(SYSTEMS["theta"])
        assert [(r.orbit_size, r.index_direct) for r in rows] == [(5, 1), (3, 1)]

    def test_single_orbit_rank(self):
        K = SYSTEMS["t1"]
        assert orbit_graph(K, 0).rank == 1 and index_via_orbit_graph(K, 0) == 2

    @pytest.mark.parametrize("name", ["boundary-2-1", "boundary-3-1", "cyclic-trivalent"])
    def test_trees(self, name):
        assert all(r.agrees for r in orbit_index_table(system_from_tree(fixture_tree(name))))


class TestValence:
    def test_path(self):
        assert valence_defect([0, 1, 2], [(0, 1), (1, 2)]) == -2

    def test_star(self):
        assert valence_defect(range(5), [(0, i) for i in range(1, 5)]) == -2

    @given(st.integers(0, 2**32))
    def test_random_trees(self, seed):
        vertices, edges = random_tree(random.Random(seed), 15)
        assert len(edges) == len(vertices) - 1
        assert valence_defect(vertices, edges) == -2

    def test_k_subtrees(self):
        for K in SYSTEMS.values():
            assert valence_defect(range(len(K.points)), [(a, b) for a, b, _ in K.edges()]) == -2
