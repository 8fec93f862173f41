from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F2, F2A, W, words
from rospace.errors import AlphabetError, VerificationIncomplete
from rospace.words import (Endomap, FreeFactorSystem, Word, apply, are_conjugate,
                           common_conjugator, cyclic_reduce, is_free_basis,
                           is_relative_automorphism, reduce, reduced_words, rotations)


def brute_conjugators(u, v, max_len):
    """Every g of length <= max_len with v = g u g^-1."""
    return [g for g in reduced_words(["a", "b"], max_len) if g * u * g.inverse() == v]


class TestReduce:
    def test_cancellation(self):
        assert reduce([("a", 1), ("a", -1), ("b", 1)]) == W("b")

    def test_empty(self):
        assert reduce([]).is_identity
        assert str(reduce([])) == "1"

    def test_full_collapse(self):
        raw = [("b", 1), ("a", 1), ("b", -1), ("b", 1), ("a", -1), ("b", -1)]
        assert reduce(raw).is_identity

    def test_unknown_generator(self):
        with pytest.raises(AlphabetError):
            reduce([("z", 1)], F2)

    def test_parse_round_trip(self):
        w = W("a*b^-1*a^2")
        assert str(w) == "a*b^-1*a*a"
        assert Word.parse(str(w)) == w

    @given(words(), words())
    def test_idempotent_and_subadditive(self, u, v):
        assert Word(u.letters) == u
        assert len(u * v) <= len(u) + len(v)


class TestCyclicReduce:
    @pytest.mark.parametrize("w, core, conj", [
        ("b*a*b^-1", "a", "b"),
        ("a*b", "a*b", "1"),
        ("b^-1*a*b*b", "a*b", "b^-1"),
    ])
    def test_examples(self, w, core, conj):
        assert cyclic_reduce(W(w)) == (W(core), W(conj))

    @given(words())
    def test_decomposition(self, w):
        core, c = cyclic_reduce(w)
        assert c * core * c.inverse() == w
        assert core.is_identity == w.is_identity
        if len(core) > 1:
            assert core.letters[0] != (core.letters[-1][0], -core.letters[-1][1])

    @given(words(), words())
    def test_conjugation_rotates_core(self, w, g):
        core, _ = cyclic_reduce(w)
        other, _ = cyclic_reduce(g * w * g.inverse())
        assert any(r == other for _, r in rotations(core))


class TestCommonConjugator:
    def test_examples(self):
        assert common_conjugator([(W("a"), W("b*a*b^-1"))]) == W("b")
        assert common_conjugator([(W("a"), W("a"))]) == W("1")
        assert common_conjugator([(W("a"), W("b*a^-1*b^-1"))]) is None

    def test_none_agrees_with_exhaustive_search(self):
        u, v = W("a"), W("b*a^-1*b^-1")
        assert brute_conjugators(u, v, len(u) + len(v)) == []

    @given(words(max_size=4), words(max_size=3))
    def test_result_conjugates(self, u, g):
        if u.is_identity:
            return
        v = g * u * g.inverse()
        h = common_conjugator([(u, v)])
        assert h is not None and h * u * h.inverse() == v

    @pytest.mark.parametrize("u, g", [("a", "b"), ("a*b", "a*a"), ("a^2", "b*a"), ("a*b^-1", "b^-1")])
    def test_shortest_matches_brute_force(self, u, g):
        u, g = W(u), W(g)
        v = g * u * g.inverse()
        found = brute_conjugators(u, v, len(u) + len(v))
        best = min(found, key=Word.sort_key)
        assert common_conjugator([(u, v)]) == best

    def test_simultaneous(self):
        g = W("b*a")
        pairs = [(W("a"), g * W("a") * g.inverse()), (W("b"), g * W("b") * g.inverse())]
        assert common_conjugator(pairs) == g
        assert common_conjugator([(W("a"), W("a")), (W("b"), W("a*b*a^-1"))]) == W("a")
        assert common_conjugator([(W("a"), W("a")), (W("b"), W("b*a*b^-1"))]) is None

    @given(words(max_size=4), words(max_size=4))
    def test_conjugacy_test_agrees(self, u, v):
        if u.is_identity or v.is_identity:
            return
        assert are_conjugate(u, v) == (common_conjugator([(u, v)]) is not None)


class TestEndomaps:
    def twist(self, N):
        return Endomap(F2A, {"b": Word.gen("a", N) * W("b")}, {"b": Word.gen("a", -N) * W("b")})

    def test_twist_is_relative(self):
        cert = is_relative_automorphism(self.twist(3))
        assert cert and cert.conjugators == {0: W("1")}

    def test_swap_is_not_relative(self):
        f = Endomap(F2A, {"a": W("b"), "b": W("a")}, {"a": W("b"), "b": W("a")})
        assert not is_relative_automorphism(f)

    def test_inner_on_factor(self):
        f = Endomap.parse(F2A, {"a": "b*a*b^-1"}, {"a": "b^-1*a*b"})
        cert = is_relative_automorphism(f)
        assert cert and cert.conjugators[0] == W("b")

    def test_missing_inverse(self):
        with pytest.raises(VerificationIncomplete):
            is_relative_automorphism(Endomap(F2A, {"b": W("a*b")}))

    def test_apply_examples(self):
        assert apply(Endomap(F2A, {"b": W("a*b")}), W("b*b")) == W("a*b*a*b")
        assert apply(Endomap.identity(F2A), W("a*b^-1")) == W("a*b^-1")
        assert apply(Endomap(F2A, {"b": W("a^2*b")}), W("b^-1")) == W("b^-1*a^-2")

    @given(words(), words())
    def test_apply_is_homomorphic(self, u, v):
        f = self.twist(2)
        assert apply(f, u * v) == apply(f, u) * apply(f, v)

    @given(st.integers(-3, 3), st.integers(-3, 3))
    def test_composition_closed(self, M, N):
        f = self.twist(M)
        h = Endomap.parse(F2A, {"a": "b*a*b^-1"}, {"a": "b^-1*a*b"})
        assert is_relative_automorphism(f.compose(h))
        assert is_relative_automorphism(h.compose(f))


class TestSystems:
    def test_standard_names(self):
        S = FreeFactorSystem.standard(3, [1, 1])
        assert S.factors == (("a",), ("b",)) and S.free == ("c",)
        assert (S.k, S.sum_s, S.free_rank) == (2, 2, 1)

    def test_json_round_trip(self):
        S = FreeFactorSystem.standard(4, [2, 1])
        assert FreeFactorSystem.from_json(S.to_json()) == S

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            FreeFactorSystem(2, (("a",),), ())


class TestFreeBasis:
    def test_examples(self):
        assert is_free_basis([W("a"), W("a*b")], ["a", "b"])
        assert not is_free_basis([W("a^2"), W("b")], ["a", "b"])
        assert not is_free_basis([W("a*b"), W("b*a")], ["a", "b"])

    def test_agrees_with_small_nielsen_orbit(self):
        # everything reachable from the standard basis by elementary moves is a basis
        seen = {(W("a"), W("b"))}
        frontier = list(seen)
        for _ in range(2):
            nxt = []
            for u, v in frontier:
                for pair in ((u * v, v), (u, v * u), (u.inverse(), v), (v, u)):
                    if pair not in seen:
                        seen.add(pair)
                        nxt.append(pair)
            frontier = nxt
        assert all(is_free_basis(list(p), ["a", "b"]) for p in seen)


def test_reduced_words_count():
    # 4 * 3^(k-1) reduced words of length k over two letters
    counts = [sum(1 for w in reduced_words(["a", "b"], k, k)) for k in range(5)]
    assert counts == [1, 4, 12, 36, 108]
    brute = sum(1 for t in product([("a", 1), ("a", -1), ("b", 1), ("b", -1)], repeat=3)
                if len(Word(t)) == 3)
    assert brute == 36
