"""Free group words over the alphabet of a free factor system.

A free factor system of ``F_n`` is given by ``k`` factors ``A_1, ..., A_k``
(factor ``j`` generated by ``s(j)`` letters) and a complement ``B`` on the
remaining ``n - sum(s)`` free letters.  Words are immutable, always freely
reduced, and compare structurally.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import AlphabetError, SchemaError, VerificationIncomplete

Letter = tuple  # (name, +1 | -1)


@dataclass(frozen=True)
class FreeFactorSystem:
    """The data ``(n, k, s(1..k))`` together with generator names."""

    n: int
    factors: tuple = ()
    free: tuple = ()
    _symbols: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        factors = tuple(tuple(f) for f in self.factors)
        free = tuple(self.free)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "free", free)
        if self.n < 1:
            raise ValueError("n must be positive")
        if any(len(f) < 1 for f in factors):
            raise ValueError("every factor needs at least one generator")
        if sum(len(f) for f in factors) + len(free) != self.n:
            raise ValueError("generator count does not match n")
        names = [g for f in factors for g in f] + list(free)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        for g in names:
            if not g or g == "1" or g.startswith("-") or any(c in g for c in "*^ "):
                raise ValueError(f"illegal generator name {g!r}")
        table = {}
        for j, f in enumerate(factors):
            for t, g in enumerate(f):
                table[g] = ("wedge", j, t)
        for i, g in enumerate(free):
            table[g] = ("free", None, i)
        object.__setattr__(self, "_symbols", table)

    @classmethod
    def standard(cls, n: int, s: Sequence[int] = ()) -> "FreeFactorSystem":
        """Name generators a, b, c, ... with the factor letters first.

        ``standard(2, [1])`` is ``F_2 = <a, b>`` with ``A = <a>``.
        """
        s = list(s)
        if n > 26:
            names = [f"g{i}" for i in range(1, n + 1)]
        else:
            names = list(string.ascii_lowercase[:n])
        if sum(s) > n:
            raise ValueError("sum of factor ranks exceeds n")
        factors, pos = [], 0
        for size in s:
            factors.append(tuple(names[pos:pos + size]))
            pos += size
        return cls(n, tuple(factors), tuple(names[pos:]))

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def s(self) -> tuple:
        return tuple(len(f) for f in self.factors)

    @property
    def sum_s(self) -> int:
        return sum(self.s)

    @property
    def free_rank(self) -> int:
        """Rank ``n - sum(s)`` of the complement ``B``."""
        return self.n - self.sum_s

    @property
    def generators(self) -> tuple:
        return tuple(g for f in self.factors for g in f) + self.free

    def kind(self, name: str):
        try:
            return self._symbols[name]
        except KeyError:
            raise AlphabetError(f"unknown generator {name!r}") from None

    def factor_of(self, name: str) -> Optional[int]:
        kind, j, _ = self.kind(name)
        return j if kind == "wedge" else None

    def to_json(self) -> dict:
        return {"n": self.n, "factors": [list(f) for f in self.factors], "free": list(self.free)}

    @classmethod
    def from_json(cls, doc) -> "FreeFactorSystem":
        try:
            return cls(int(doc["n"]), tuple(tuple(f) for f in doc.get("factors", [])),
                       tuple(doc.get("free", [])))
        except KeyError as exc:
            raise SchemaError(f"missing key {exc.args[0]!r}", ("system",)) from None
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), ("system",)) from None


def _free_reduce(letters: Iterable[Letter]) -> tuple:
    out: list = []
    for name, e in letters:
        if e not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {e!r}")
        if out and out[-1][0] == name and out[-1][1] == -e:
            out.pop()
        else:
            out.append((name, e))
    return tuple(out)


class Word:
    """A reduced word; the empty word is the identity."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters = _free_reduce(letters)
        self._hash = hash(self.letters)

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "Word":
        e = 1 if power > 0 else -1
        return cls([(name, e)] * abs(power))

    @classmethod
    def parse(cls, text: str, system: Optional[FreeFactorSystem] = None) -> "Word":
        """Parse ``a*b^-1*c^2``; ``""`` and ``"1"`` are the identity."""
        text = text.strip()
        if text in ("", "1"):
            return cls()
        letters = []
        for token in text.split("*"):
            m = re.fullmatch(r"\s*([^\s^*]+)\s*(?:\^\s*(-?\d+))?\s*", token)
            if not m:
                raise AlphabetError(f"cannot parse word token {token!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            if system is not None:
                system.kind(name)
            letters.extend([(name, 1 if power > 0 else -1)] * abs(power))
        return cls(letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return "*".join(n if e == 1 else f"{n}^-1" for n, e in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, m: int) -> "Word":
        base = self if m >= 0 else self.inverse()
        return Word(base.letters * abs(m))

    def inverse(self) -> "Word":
        return Word((n, -e) for n, e in reversed(self.letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def names(self) -> set:
        return {n for n, _ in self.letters}

    def sort_key(self):
        """Shortest first, then lexicographic with ``x`` before ``x^-1``."""
        return (len(self.letters), tuple((n, -e) for n, e in self.letters))


IDENTITY = Word()


def reduce(raw: Iterable[Letter], system: Optional[FreeFactorSystem] = None) -> Word:
    """Freely reduce a sequence of ``(name, +-1)`` letters."""
    raw = list(raw)
    if system is not None:
        for name, _ in raw:
            system.kind(name)
    return Word(raw)


def cyclic_reduce(w: Word) -> tuple:
    """Return ``(core, conjugator)`` with ``w = conjugator * core * conjugator^-1``."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i][0] == letters[j][0] and letters[i][1] == -letters[j][1]:
        i += 1
        j -= 1
    return Word(letters[i:j + 1]), Word(letters[:i])


def rotations(core: Word) -> Iterator[tuple]:
    """Yield ``(i, rotated)`` with ``rotated = letters[i:] + letters[:i]``."""
    letters = core.letters
    for i in range(max(len(letters), 1)):
        yield i, Word(letters[i:] + letters[:i])


def root(core: Word) -> Word:
    """Primitive root of a cyclically reduced word."""
    letters = core.letters
    m = len(letters)
    for d in range(1, m + 1):
        if m % d == 0 and letters[:d] * (m // d) == letters:
            return Word(letters[:d])
    return core


def centralizer_generator(w: Word) -> Word:
    """Generator of the (cyclic) centralizer of a nontrivial ``w``."""
    core, c = cyclic_reduce(w)
    return c * root(core) * c.inverse()


def power_of(x: Word, rho: Word) -> Optional[int]:
    """Return ``m`` with ``x = rho^m`` or None; ``rho`` must be nontrivial."""
    core, c = cyclic_reduce(rho)
    y = c.inverse() * x * c
    if y.is_identity:
        return 0
    if len(y) % len(core):
        return None
    m = len(y) // len(core)
    if y == core ** m:
        return m
    if y == core ** -m:
        return -m
    return None


def are_conjugate(u: Word, v: Word) -> bool:
    cu, _ = cyclic_reduce(u)
    cv, _ = cyclic_reduce(v)
    if len(cu) != len(cv):
        return False
    return any(r == cv for _, r in rotations(cu))


def _pair_coset(u: Word, v: Word):
    """All g with v = g u g^-1 form ``g0 * <rho>``; return (g0, rho) or None."""
    cu, c = cyclic_reduce(u)
    cv, d = cyclic_reduce(v)
    if len(cu) != len(cv):
        return None
    for i, rot in rotations(cu):
        if rot == cv:
            p = Word(cu.letters[:i])
            g0 = d * p.inverse() * c.inverse()
            return g0, c * root(cu) * c.inverse()
    return None


def _shortest_in_coset(g: Word, rho: Word) -> Word:
    bound = len(g) + 2 * len(rho) + 2
    return min((g * rho ** m for m in range(-bound, bound + 1)), key=Word.sort_key)


def common_conjugator(pairs: Sequence[tuple]) -> Optional[Word]:
    """Find g with ``v = g u g^-1`` for every ``(u, v)``; None when none exists.

    Each pair contributes a coset ``g_i <rho_i>`` of the centralizer of
    ``u_i``; the cosets are intersected exactly and the canonical
    (shortest, then lexicographically least) element is returned.
    """
    coset = None  # (g, rho) with rho None meaning a single element
    for u, v in pairs:
        if u.is_identity or v.is_identity:
            raise ValueError("common_conjugator needs nontrivial words")
        pc = _pair_coset(u, v)
        if pc is None:
            return None
        if coset is None:
            coset = pc
            continue
        g, rho = coset
        g2, rho2 = pc
        if rho is None:
            if power_of(g2.inverse() * g, rho2) is None:
                return None
            continue
        if power_of(rho2, rho) in (1, -1):
            if power_of(g2.inverse() * g, rho) is None:
                return None
            continue
        h = g2.inverse() * g
        bound = len(h) + 2 * (len(rho) + len(rho2)) + 2
        hit = None
        for m in sorted(range(-bound, bound + 1), key=abs):
            if power_of(h * rho ** m, rho2) is not None:
                hit = g * rho ** m
                break
        if hit is None:
            return None
        coset = (hit, None)
    if coset is None:
        return IDENTITY
    g, rho = coset
    return g if rho is None else _shortest_in_coset(g, rho)


def reduced_words(alphabet: Sequence[str], max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All reduced words of length in ``[min_len, max_len]``, shortest first."""
    letters = [(a, e) for a in alphabet for e in (1, -1)]
    level = [()]
    for length in range(max_len + 1):
        if length >= min_len:
            for t in level:
                yield Word(t)
        level = [t + (l,) for t in level for l in letters
                 if not t or not (t[-1][0] == l[0] and t[-1][1] == -l[1])]


class Endomap:
    """An endomorphism of ``F_n`` given by generator images.

    ``inverse`` is the caller-declared inverse assignment; it is required to
    certify bijectivity and is never computed.
    """

    def __init__(self, system: FreeFactorSystem, images: Mapping[str, Word],
                 inverse: Optional[Mapping[str, Word]] = None):
        self.system = system
        self.images = {g: images.get(g, Word.gen(g)) for g in system.generators}
        for g in images:
            system.kind(g)
        for w in self.images.values():
            for name in w.names():
                system.kind(name)
        self.inverse = None
        if inverse is not None:
            self.inverse = {g: inverse.get(g, Word.gen(g)) for g in system.generators}

    @classmethod
    def identity(cls, system: FreeFactorSystem) -> "Endomap":
        ident = {g: Word.gen(g) for g in system.generators}
        return cls(system, ident, ident)

    @classmethod
    def parse(cls, system, images: Mapping[str, str], inverse=None) -> "Endomap":
        imgs = {g: Word.parse(w, system) for g, w in images.items()}
        inv = None if inverse is None else {g: Word.parse(w, system) for g, w in inverse.items()}
        return cls(system, imgs, inv)

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def compose(self, other: "Endomap") -> "Endomap":
        """``self o other``: first ``other``, then ``self``."""
        images = {g: apply(self, other.images[g]) for g in self.system.generators}
        inverse = None
        if self.inverse is not None and other.inverse is not None:
            inverse = {g: _apply_images(other.inverse, self.inverse[g])
                       for g in self.system.generators}
        return Endomap(self.system, images, inverse)

    def inverse_map(self) -> "Endomap":
        if self.inverse is None:
            raise VerificationIncomplete("no declared inverse")
        return Endomap(self.system, self.inverse, self.images)

    def __repr__(self):
        body = ", ".join(f"{g}->{w}" for g, w in self.images.items())
        return f"Endomap({body})"


def _apply_images(images: Mapping[str, Word], w: Word) -> Word:
    out = []
    for name, e in w:
        img = images[name]
        out.extend(img.letters if e == 1 else img.inverse().letters)
    return Word(out)


def apply(f: Endomap, w: Word) -> Word:
    """Homomorphic image of ``w`` under ``f``."""
    return _apply_images(f.images, w)


@dataclass
class RelativeCertificate:
    ok: bool
    conjugators: dict
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_relative_automorphism(f: Endomap, system: Optional[FreeFactorSystem] = None) -> RelativeCertificate:
    """Certify that ``f`` is an automorphism restricting to conjugations on each factor.

    Raises VerificationIncomplete when ``f`` carries no declared inverse.
    """
    system = system or f.system
    if f.inverse is None:
        raise VerificationIncomplete("bijectivity needs a declared inverse")
    for g in system.generators:
        x = Word.gen(g)
        if _apply_images(f.images, _apply_images(f.inverse, x)) != x:
            return RelativeCertificate(False, {}, f"f o f^-1 moves {g}")
        if _apply_images(f.inverse, _apply_images(f.images, x)) != x:
            return RelativeCertificate(False, {}, f"f^-1 o f moves {g}")
    conj = {}
    for j, factor in enumerate(system.factors):
        pairs = [(Word.gen(y), f.images[y]) for y in factor]
        if any(v.is_identity for _, v in pairs):
            return RelativeCertificate(False, conj, f"factor {j + 1} has a trivial image")
        g = common_conjugator(pairs)
        if g is None:
            return RelativeCertificate(False, conj, f"factor {j + 1} is not conjugated")
        conj[j] = g
    return RelativeCertificate(True, conj)


def is_free_basis(words: Sequence[Word], alphabet: Sequence[str]) -> bool:
    """Decide whether ``words`` form a basis of the free group on ``alphabet``.

    Stallings folding of the bouquet of the words: they generate the whole
    group iff the folded core is a single vertex carrying every letter, and
    a generating set of size equal to the rank is a basis (Hopfian).
    """
    if len(words) != len(alphabet):
        return False
    # graph as list of (src, name, dst) positive-letter edges
    edges = set()
    n_vertices = 1
    for w in words:
        if w.is_identity:
            return False
        cur = 0
        for idx, (name, e) in enumerate(w):
            nxt = 0 if idx == len(w) - 1 else n_vertices
            if nxt:
                n_vertices += 1
            edges.add((cur, name, nxt) if e == 1 else (nxt, name, cur))
            cur = nxt
    parent = list(range(n_vertices))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    changed = True
    while changed:
        changed = False
        edges = {(find(a), n, find(b)) for a, n, b in edges}
        out, inc = {}, {}
        for a, n, b in sorted(edges):
            for table, key, val in ((out, (a, n), b), (inc, (b, n), a)):
                other = table.setdefault(key, val)
                if find(other) != find(val):
                    parent[find(val)] = find(other)
                    changed = True
    edges = {(find(a), n, find(b)) for a, n, b in edges}
    vertices = {find(v) for v in range(n_vertices)}
    # prune hairs: vertices of valence 1 other than the base
    while True:
        val = {v: 0 for v in vertices}
        for a, _, b in edges:
            val[a] += 1
            val[b] += 1
        leaves = {v for v in vertices if val[v] == 1 and v != find(0)}
        if not leaves:
            break
        edges = {e for e in edges if e[0] not in leaves and e[2] not in leaves}
        vertices -= leaves
    return len(vertices) == 1 and {n for _, n, _ in edges} == set(alphabet) and len(edges) == len(alphabet)


def word_ball(system: FreeFactorSystem, radius: int, nontrivial: bool = True) -> list:
    return list(reduced_words(system.generators, radius, 1 if nontrivial else 0))


def canonical_words(words: Iterable[Word]) -> list:
    """Deduplicate up to cyclic rotation and inversion (translation length classes)."""
    seen, out = set(), []
    for w in words:
        core, _ = cyclic_reduce(w)
        if core.is_identity:
            key = ()
        else:
            key = min(min(r.letters for _, r in rotations(c)) for c in (core, core.inverse()))
        if key not in seen:
            seen.add(key)
            out.append(w)
    return out


__all__ = [
    "FreeFactorSystem", "Word", "IDENTITY", "Endomap", "RelativeCertificate",
    "reduce", "cyclic_reduce", "common_conjugator", "is_relative_automorphism", "apply",
    "are_conjugate", "power_of", "root", "centralizer_generator", "reduced_words",
    "is_free_basis", "word_ball", "canonical_words", "rotations",
]

