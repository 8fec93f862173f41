"""Exact scalars as rational combinations of formal symbols, and Z-lattices of them.

Symbols other than ``"1"`` stand for Q-linearly independent reals, so the
Q-rank of a set of lengths is the ordinary matrix rank of its coefficient
vectors.  Everything is exact: :class:`fractions.Fraction` and Python ints.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce as _fold
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

UNIT = "1"


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _symbol_key(name: str):
    return (name != UNIT, len(name), name)


class FormalReal:
    """A finite sum ``sum_c q_c * c`` over symbols ``c`` with rational ``q_c``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, coefficients: Mapping[str, object] | None = None):
        items = {}
        for sym, q in (coefficients or {}).items():
            q = _frac(q)
            if q:
                items[str(sym)] = q
        self.terms = tuple(sorted(items.items(), key=lambda kv: _symbol_key(kv[0])))
        self._hash = hash(self.terms)

    @classmethod
    def symbol(cls, name: str, coefficient=1) -> "FormalReal":
        return cls({name: coefficient})

    @classmethod
    def rational(cls, q) -> "FormalReal":
        return cls({UNIT: q})

    @classmethod
    def coerce(cls, x) -> "FormalReal":
        if isinstance(x, FormalReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.rational(x)
        if isinstance(x, str):
            return cls.rational(Fraction(x))
        if isinstance(x, Mapping):
            return cls({k: Fraction(v) for k, v in x.items()})
        raise TypeError(f"cannot interpret {x!r} as a FormalReal")

    @property
    def coefficients(self) -> dict:
        return dict(self.terms)

    def symbols(self) -> set:
        return {s for s, _ in self.terms}

    def coefficient(self, sym: str) -> Fraction:
        return self.coefficients.get(sym, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return all(s == UNIT for s, _ in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coefficient(UNIT)

    def is_positive(self) -> bool:
        """Positivity when all symbols are read as positive independent reals.

        Decidable only for rationals and for combinations with all
        coefficients of one sign; anything else raises ValueError.
        """
        if self.is_zero:
            return False
        signs = {q > 0 for _, q in self.terms}
        if len(signs) == 1:
            return signs.pop()
        raise ValueError(f"sign of {self} is undetermined")

    def __add__(self, other):
        other = FormalReal.coerce(other)
        c = self.coefficients
        for s, q in other.terms:
            c[s] = c.get(s, 0) + q
        return FormalReal(c)

    __radd__ = __add__

    def __neg__(self):
        return FormalReal({s: -q for s, q in self.terms})

    def __sub__(self, other):
        return self + (-FormalReal.coerce(other))

    def __rsub__(self, other):
        return FormalReal.coerce(other) - self

    def __mul__(self, scalar):
        if isinstance(scalar, FormalReal):
            if scalar.is_rational:
                scalar = scalar.as_fraction()
            elif self.is_rational:
                return scalar * self.as_fraction()
            else:
                raise TypeError("product of two symbolic reals is not linear")
        scalar = _frac(scalar)
        return FormalReal({s: q * scalar for s, q in self.terms})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, FormalReal):
            scalar = scalar.as_fraction()
        return self * (1 / _frac(scalar))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FormalReal.rational(other)
        return isinstance(other, FormalReal) and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.as_fraction() < FormalReal.coerce(other).as_fraction()

    def __le__(self, other):
        return self.as_fraction() <= FormalReal.coerce(other).as_fraction()

    def __abs__(self):
        return FormalReal.rational(abs(self.as_fraction()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for s, q in self.terms:
            if s == UNIT:
                body = str(q)
            elif q == 1:
                body = s
            elif q == -1:
                body = f"-{s}"
            else:
                body = f"{q}*{s}"
            parts.append(body)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"FormalReal({str(self)!r})"

    def to_json(self) -> dict:
        return {s: str(q) for s, q in self.terms}

    @classmethod
    def from_json(cls, doc) -> "FormalReal":
        if isinstance(doc, (int, str)):
            return cls.rational(Fraction(doc))
        return cls({k: Fraction(str(v)) for k, v in doc.items()})


def fsum(values: Iterable) -> FormalReal:
    acc: dict = {}
    for v in values:
        for s, q in FormalReal.coerce(v).terms:
            acc[s] = acc.get(s, 0) + q
    return FormalReal(acc)


def _coordinates(elements: Sequence[FormalReal]):
    symbols = sorted({s for x in elements for s in x.symbols()}, key=_symbol_key)
    return symbols, [[x.coefficient(s) for s in symbols] for x in elements]


def q_rank(elements: Iterable) -> int:
    """Dimension of the Q-span (Gaussian elimination over Fraction)."""
    elements = [FormalReal.coerce(x) for x in elements]
    _, rows = _coordinates(elements)
    rows = [r[:] for r in rows if any(r)]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


# --- integer normal forms -------------------------------------------------


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list:
    """Row-style HNF: nonzero rows only, positive pivots, entries above a pivot in [0, pivot)."""
    a = [list(map(int, r)) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if any(a[i][c] for i in range(r, len(a))):
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r] if any(row)]


def left_kernel(rows: Sequence[Sequence[int]]) -> list:
    """Integer basis of ``{u : u M = 0}`` via unimodular row reduction."""
    m = len(rows)
    if m == 0:
        return []
    ncols = len(rows[0])
    aug = [list(map(int, rows[i])) + [int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, m) if aug[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(aug[i][c]))
            aug[r], aug[piv] = aug[piv], aug[r]
            clean = True
            for i in range(r + 1, m):
                if aug[i][c]:
                    q = aug[i][c] // aug[r][c]
                    aug[i] = [x - q * y for x, y in zip(aug[i], aug[r])]
                    clean = clean and not aug[i][c]
            if clean:
                r += 1
                break
    return [row[ncols:] for row in aug[r:]]


def smith_invariants(rows: Sequence[Sequence[int]]) -> list:
    """Nonzero invariant factors ``d_1 | d_2 | ...`` of an integer matrix."""
    a = [list(map(int, r)) for r in rows]
    if not a or not a[0]:
        return []
    m, n = len(a), len(a[0])
    out = []
    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            changed = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        changed = True
                        break
            if changed:
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        changed = True
                        break
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        out.append(abs(a[t][t]))
        t += 1
    return out


class LatticeZ:
    """The additive group of integer combinations of finitely many FormalReals."""

    def __init__(self, generators: Iterable = ()):
        self.generators = tuple(FormalReal.coerce(g) for g in generators)
        self.symbols, coords = _coordinates(self.generators)
        dens = [q.denominator for row in coords for q in row]
        self.denominator = lcm(*dens) if dens else 1
        self._int_rows = [[int(q * self.denominator) for q in row] for row in coords]
        self._hnf = hermite_normal_form(self._int_rows)

    def basis(self) -> list:
        """Canonical Z-basis (HNF rows scaled back)."""
        return [FormalReal({s: Fraction(v, self.denominator) for s, v in zip(self.symbols, row)})
                for row in self._hnf]

    @property
    def rank(self) -> int:
        return len(self._hnf)

    def __contains__(self, x) -> bool:
        return lattice_contains(self, x)

    def __eq__(self, other):
        return isinstance(other, LatticeZ) and self.basis() == other.basis()

    def __hash__(self):
        return hash(tuple(self.basis()))

    def __le__(self, other: "LatticeZ") -> bool:
        return all(g in other for g in self.generators)

    def join(self, other: "LatticeZ") -> "LatticeZ":
        return LatticeZ(self.generators + other.generators)

    def scaled(self, m) -> "LatticeZ":
        return LatticeZ(g * m for g in self.generators)

    def __repr__(self):
        return "<" + ", ".join(str(b) for b in self.basis()) + ">"

    def to_json(self) -> list:
        return [b.to_json() for b in self.basis()]


def lattice_contains(lat: LatticeZ, x) -> bool:
    """Membership of ``x`` in ``lat`` by reduction against the HNF basis."""
    x = FormalReal.coerce(x)
    if not x.symbols() <= set(lat.symbols):
        return x.is_zero
    vec = []
    for s in lat.symbols:
        v = x.coefficient(s) * lat.denominator
        if v.denominator != 1:
            return False
        vec.append(int(v))
    col = 0
    for row in lat._hnf:
        while not row[col]:
            if vec[col]:
                return False
            col += 1
        q, r = divmod(vec[col], row[col])
        if r:
            return False
        vec = [a - q * b for a, b in zip(vec, row)]
        col += 1
    return not any(vec)


def generates_modulo(candidates: Iterable, target: LatticeZ, modulus: LatticeZ) -> bool:
    """True iff ``target`` is contained in ``<candidates> + modulus``."""
    joined = LatticeZ(list(candidates) + list(modulus.generators))
    return all(lattice_contains(joined, t) for t in target.generators)


def two_torsion_rank(lat: LatticeZ) -> int:
    """The 2-rank of ``lat / 2 lat``.

    The lattice is presented as ``Z^g / R`` with ``R`` the relation module
    of its ``g`` generators; ``Z^g / (R + 2 Z^g)`` has 2-rank ``g`` minus the
    number of odd Smith invariants of ``R``.
    """
    g = len(lat.generators)
    if g == 0:
        return 0
    rel = left_kernel(lat._int_rows)
    odd = sum(1 for d in smith_invariants(rel) if d % 2)
    return g - odd


def content(values: Iterable[int]) -> int:
    return _fold(gcd, values, 0)


__all__ = [
    "UNIT", "FormalReal", "LatticeZ", "fsum", "q_rank", "lattice_contains",
    "generates_modulo", "two_torsion_rank", "hermite_normal_form", "smith_invariants",
    "left_kernel",
]
