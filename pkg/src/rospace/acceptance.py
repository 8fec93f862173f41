"""The nine acceptance checks, runnable from the CLI (``rospace verify``) and pytest."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

from .boundary import boundary_simplex, convergence_table
from .enumeration import enumerate_maximal_agraphs
from .errors import RospaceError
from .fixtures import NAMES, POINTS, build, fixture_tree
from .gog import ball_oracle_length, tree_from_point
from .graphs import dimension_report, point_from_collapsed
from .invariants import (lattice_L_report, lattice_Lambda_report, q_rank_report, total_index,
                         verify_prop41)
from .scalars import FormalReal, LatticeZ, lattice_contains, q_rank
from .systems import (build_tk_ball, ball_matches_tree, orbit_index_table, random_tree,
                      resolve_point, system_from_tree, valence_defect)
from .words import FreeFactorSystem, reduced_words

# (n, factor ranks)
SYSTEMS = ((2, ()), (2, (1,)), (3, (1,)), (3, (2,)), (3, (1, 1)))

# trees with trivial edge groups; the tripod fixture is a negative example only
TREE_FIXTURES = tuple(n for n in NAMES if n != "tripod-violation")
BOUNDARY_FIXTURES = ("boundary-2-1", "boundary-3-1", "cyclic-trivalent")
RATIONAL_FIXTURES = ("t1", "x2-middle")
SYMBOLIC_POINTS = ("x2-middle-symbolic", "theta", "dumbbell")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title}: {self.detail}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "detail": self.detail}


def system_of(n: int, s) -> FreeFactorSystem:
    return FreeFactorSystem.standard(n, list(s))


def _label(n, s) -> str:
    return f"({n},{len(s)},({','.join(map(str, s))}))" if s else f"({n},0)"


def _maximal_points(lengths="symbolic"):
    for n, s in SYSTEMS:
        S = system_of(n, s)
        for shape in enumerate_maximal_agraphs(S).maximal:
            yield (n, s), point_from_collapsed(S, shape, lengths)


# -- 1 ------------------------------------------------------------------------


def criterion_dimensions(seed: int = 0) -> tuple:
    start = time.perf_counter()
    parts, ok = [], True
    for n, s in SYSTEMS:
        S = system_of(n, s)
        rep = dimension_report(S)
        k, ss = S.k, S.sum_s
        V, E = 2 * n + 2 * k - 2 - 2 * ss, 3 * n + 2 * k - 3 - 3 * ss
        formulas = (rep.V_max, rep.E_max, rep.dim_cv, rep.dim_spine) == (V, E, E - 1, V - max(k, 1))
        res = enumerate_maximal_agraphs(S, count_all=True)
        shapes_ok = bool(res.maximal) and all(
            len(c.graph.vertices) == V and len(c.graph.edges) == E for c in res.maximal)
        too_big = res.shapes_by_vertices.get(V + 1, 0)
        largest = max(len(c.graph.edges) for c in res.all_shapes)
        good = formulas and shapes_ok and too_big == 0 and largest == E
        ok &= good
        parts.append(f"{_label(n, s)} V={V} E={E} classes={len(res.maximal)}"
                     + ("" if good else " MISMATCH"))
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        ok = False
        parts.append("over the 60 s budget")
    return ok, "; ".join(parts)


# -- 2 ------------------------------------------------------------------------


def criterion_index(seed: int = 0) -> tuple:
    ok, count = True, 0
    for (n, s), X in _maximal_points():
        rep = total_index(tree_from_point(X))
        count += 1
        ok &= rep.equality and rep.orbit_bound_ok
    T1 = fixture_tree("t1")
    rep = total_index(T1)
    (orbit,) = rep.orbits
    t1_ok = rep.total == 2 and orbit.rk_st == 1 and orbit.v1 == 2
    return ok and t1_ok, (f"{count} maximal classes at the expected total; "
                          f"i(T1)={rep.total} (rk={orbit.rk_st}, v1={orbit.v1})")


# -- 3 ------------------------------------------------------------------------


def criterion_orbit_graph(seed: int = 0) -> tuple:
    ok, rows = True, 0
    for name in TREE_FIXTURES:
        table = orbit_index_table(system_from_tree(fixture_tree(name)))
        rows += len(table)
        ok &= all(r.agrees for r in table)
    rng = random.Random(seed)
    defects = [valence_defect(*random_tree(rng, 12)) for _ in range(100)]
    trees_ok = all(d == -2 for d in defects)
    return ok and trees_ok, (f"{rows} branch orbits agree across {len(TREE_FIXTURES)} fixtures; "
                             f"valence defect -2 on {sum(d == -2 for d in defects)}/100 random trees")


# -- 4 ------------------------------------------------------------------------


def _brute_contains(gens, x, bound=6) -> bool:
    for c in product(range(-bound, bound + 1), repeat=len(gens)):
        total = FormalReal()
        for ci, g in zip(c, gens):
            total = total + g * ci
        if total == x:
            return True
    return False


def random_lattice_case(rng: random.Random):
    """Independent generators and a target with half-integer coordinates in them."""
    syms = ["1", "λ1", "λ2"][:rng.randint(1, 3)]
    m = rng.randint(1, len(syms))
    while True:
        gens = [FormalReal({s: Fraction(rng.randint(-3, 3), rng.choice((1, 2))) for s in syms})
                for _ in range(m)]
        if q_rank(gens) == m:
            break
    coeffs = [Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2))) for _ in range(m)]
    target = FormalReal()
    for c, g in zip(coeffs, gens):
        target = target + g * c
    return gens, target


def criterion_lattices(seed: int = 0) -> tuple:
    ok, props = True, 0
    for name in TREE_FIXTURES:
        T = fixture_tree(name)
        audits = lattice_L_report(T).audit_passed and lattice_Lambda_report(T).audit_passed
        ok &= audits and verify_prop41(T).ok
        props += 1
    rng = random.Random(seed)
    agree = 0
    for _ in range(200):
        gens, x = random_lattice_case(rng)
        agree += lattice_contains(LatticeZ(gens), x) == _brute_contains(gens, x)
    return ok and agree == 200, (f"prop41 all-true with audits on {props} fixtures; "
                                 f"membership agrees with brute force on {agree}/200 lattices")


# -- 5 ------------------------------------------------------------------------


def criterion_q_rank(seed: int = 0) -> tuple:
    eq_ok, count = True, 0
    for (n, s), X in _maximal_points():
        rep = q_rank_report(tree_from_point(X))
        eq_ok &= rep.equals_theorem and rep.only_factors_elliptic
        count += 1
    for name in SYMBOLIC_POINTS:
        eq_ok &= q_rank_report(fixture_tree(name)).equals_theorem
    strict = {}
    for name in BOUNDARY_FIXTURES + RATIONAL_FIXTURES:
        rep = q_rank_report(fixture_tree(name))
        strict[name] = rep.r_q < rep.theorem
    # q_rank_report raises InvariantFailure if a bound is exceeded
    never_exceeds = all(q_rank_report(fixture_tree(n)).r_q >= 0 for n in TREE_FIXTURES)
    ok = eq_ok and all(strict.values()) and never_exceeds
    return ok, (f"r_Q attains 3n+2k-3-3Σs on {count} symbolic maximal classes; strictly below on "
                f"{sum(strict.values())}/{len(strict)} boundary and rational fixtures")


# -- 6 ------------------------------------------------------------------------


def criterion_boundary(seed: int = 0) -> tuple:
    ok, parts = True, []
    for (n, s), want in (((2, (1,)), 0), ((3, (1,)), 3)):
        S = system_of(n, s)
        fam = boundary_simplex(S, all_classes=True)
        dim_cv = dimension_report(S).dim_cv
        members_ok = all(m.very_small and m.factors_elliptic and m.extra_elliptic and not m.in_cv
                         for m in fam.members)
        good = fam.dimension == want == dim_cv - 1 and members_ok
        ok &= good
        parts.append(f"{_label(n, s)} dimension {fam.dimension}, {len(fam.members)} members")
    return ok, "; ".join(parts)


# -- 7 ------------------------------------------------------------------------


def criterion_convergence(seed: int = 0) -> tuple:
    rows = convergence_table(build("x2-middle"), build("t1"), range(1, 9), ball_radius=4)
    dev = dict(rows)
    ok = dev[1] > 0 and all(dev[N] == 0 for N in range(5, 9))
    return ok, "deviation " + ", ".join(f"N={N}: {d}" for N, d in rows)


# -- 8 ------------------------------------------------------------------------


def criterion_tk_ball(seed: int = 0) -> tuple:
    ok, parts = True, []
    for name in POINTS:
        X = build(name)
        sysK = resolve_point(X)
        ball = build_tk_ball(sysK, 3)
        good = ball.ok and ball.K_embedded and ball_matches_tree(ball, sysK)
        ok &= good
        parts.append(f"{name}: {len(ball.classes)} vertices" + ("" if good else " MISMATCH"))
    return ok, "; ".join(parts)


# -- 9 ------------------------------------------------------------------------


def criterion_translation_length(seed: int = 0) -> tuple:
    ok, words = True, 0
    rng = random.Random(seed)
    for name in TREE_FIXTURES:
        T = fixture_tree(name)
        sample = list(reduced_words(T.system.generators, 5, 1))
        for w in sample:
            words += 1
            ok &= T.translation_length(w) == ball_oracle_length(T, w)
        conj = rng.sample(sample, min(40, len(sample)))
        for w in conj:
            g = rng.choice(sample)
            lw = T.translation_length(w)
            ok &= T.translation_length(g * w * g.inverse()) == lw
            ok &= all(T.translation_length(w ** m) == lw * m for m in (2, 3))
    return ok, f"{words} words agree with the ball oracle; conjugacy and power laws hold"


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("dimension formulas", criterion_dimensions),
    2: ("index theorem", criterion_index),
    3: ("orbit-graph index and valence bookkeeping", criterion_orbit_graph),
    4: ("lattice propositions", criterion_lattices),
    5: ("Q-rank bound", criterion_q_rank),
    6: ("boundary simplices", criterion_boundary),
    7: ("convergence example", criterion_convergence),
    8: ("T_K faithfulness", criterion_tk_ball),
    9: ("translation-length oracle", criterion_translation_length),
}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, detail = fn(seed)
    except RospaceError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - start)


def run_acceptance(seed: int = 0, only=None) -> list:
    return [run_criterion(i, seed) for i in sorted(only or CRITERIA)]


__all__ = ["CriterionResult", "CRITERIA", "SYSTEMS", "TREE_FIXTURES", "run_criterion",
           "run_acceptance", "random_lattice_case"]
