"""Free beta-graded operator algebra with exponential-polynomial coefficients.

Words are built from the odd generator ``O`` (weight 1) and the even
generators ``E`` and ``F`` (weight 2).  The grading operator ``b`` obeys
``b*b = 1``, ``O*b = -b*O`` and ``E*b = b*E``, so every word can be written
with at most one ``b`` standing on the far left.  That is the canonical form
kept by :class:`OperatorExpr`.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .expoly import ExpPoly, NonConvergent, as_fraction

__all__ = [
    "Generator",
    "Word",
    "OperatorExpr",
    "ParityMismatch",
    "NonConvergent",
    "normalize",
    "mul",
    "commutator",
    "anticommutator",
    "dagger",
    "parity_split",
    "kappa_slice",
    "integrate_s",
    "convolve_decay4",
    "limit_s_infinity",
    "substitute_generator",
    "beta",
    "gen",
    "one",
    "zero",
]


class ParityMismatch(ValueError):
    pass


class Generator(str, enum.Enum):
    O = "O"
    E = "E"
    F = "F"

    @property
    def odd(self) -> bool:
        return self is Generator.O

    @property
    def weight(self) -> int:
        return 1 if self is Generator.O else 2


TAG_ORDER = {"O": 0, "E": 1, "F": 2}
WEIGHT = {"O": 1, "E": 2, "F": 2}


class Word(NamedTuple):
    beta: int
    factors: tuple[str, ...]

    @property
    def odd_count(self) -> int:
        return self.factors.count("O")

    @property
    def is_odd(self) -> bool:
        return self.odd_count % 2 == 1

    @property
    def weight(self) -> int:
        return sum(WEIGHT[f] for f in self.factors)

    def sort_key(self):
        return (self.beta, len(self.factors), tuple(TAG_ORDER[f] for f in self.factors))


UNIT = Word(0, ())
_word_cache: dict[tuple, tuple[int, Word]] = {}


def _word_product(a: Word, b: Word) -> tuple[int, Word]:
    """Return ``(sign, word)`` with ``a*b = sign*word`` in canonical form."""
    key = (a, b)
    hit = _word_cache.get(key)
    if hit is not None:
        return hit
    sign = 1
    if b.beta and a.is_odd:
        sign = -1
    res = (sign, Word(a.beta ^ b.beta, a.factors + b.factors))
    if len(_word_cache) < 200_000:
        _word_cache[key] = res
    return res


def _canonical_word(symbols: Iterable[str]) -> tuple[int, Word]:
    """Reduce a raw symbol sequence (``b`` anywhere) to ``(sign, Word)``."""
    sign = 1
    beta_bit = 0
    factors: list[str] = []
    # scan right to left; a pending b must still cross every factor to its left
    for sym in reversed(list(symbols)):
        if sym == "b":
            beta_bit ^= 1
            continue
        if sym not in WEIGHT:
            raise ValueError(f"unknown symbol {sym!r}")
        if sym == "O" and beta_bit:
            sign = -sign
        factors.append(sym)
    factors.reverse()
    return sign, Word(beta_bit, tuple(factors))


class OperatorExpr:
    """Immutable finite sum ``sum coeff(s) * word`` in canonical form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, ExpPoly] | None = None):
        clean = {w: c for w, c in (terms or {}).items() if not c.is_zero()}
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict) -> "OperatorExpr":
        return cls(terms)

    @classmethod
    def from_word(cls, word: Word, coeff=1) -> "OperatorExpr":
        if not isinstance(coeff, ExpPoly):
            coeff = ExpPoly.const(coeff)
        return cls({word: coeff})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Word, ExpPoly]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, word: Word) -> ExpPoly:
        return self._terms.get(word, ExpPoly.zero())

    def weights(self) -> set[int]:
        return {w.weight for w in self._terms}

    def generators(self) -> set[str]:
        return {f for w in self._terms for f in w.factors}

    def is_even(self) -> bool:
        return all(not w.is_odd for w in self._terms)

    def is_odd(self) -> bool:
        return all(w.is_odd for w in self._terms)

    # -- algebra ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms[w] + c if w in terms else c
        return OperatorExpr(terms)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, ExpPoly):
            return OperatorExpr({w: c * other for w, c in self._terms.items()})
        if isinstance(other, OperatorExpr):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ExpPoly)):
            return self * other
        return NotImplemented

    def scale(self, c) -> "OperatorExpr":
        c = as_fraction(c)
        if c == 0:
            return OperatorExpr()
        return OperatorExpr({w: p.scale(c) for w, p in self._terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = one()
        for _ in range(n):
            out = mul(out, self)
        return out

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def map_coefficients(self, fn) -> "OperatorExpr":
        return OperatorExpr({w: fn(c) for w, c in self._terms.items()})

    def truncate(self, max_weight: int) -> "OperatorExpr":
        return OperatorExpr({w: c for w, c in self._terms.items() if w.weight <= max_weight})

    def __repr__(self):
        from .grammar import render

        return f"OperatorExpr({render(self)})"

    def __str__(self):
        from .grammar import render

        return render(self)


def _coerce(x):
    if isinstance(x, OperatorExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return OperatorExpr.from_word(UNIT, x) if x else OperatorExpr()
    return NotImplemented


# -- basic elements -------------------------------------------------------
def zero() -> OperatorExpr:
    return OperatorExpr()


def one() -> OperatorExpr:
    return OperatorExpr.from_word(UNIT)


def beta() -> OperatorExpr:
    return OperatorExpr.from_word(Word(1, ()))


def gen(tag: str | Generator) -> OperatorExpr:
    tag = Generator(tag).value
    return OperatorExpr.from_word(Word(0, (tag,)))


# -- operations -----------------------------------------------------------
def normalize(raw_terms: Iterable[tuple]) -> OperatorExpr:
    """Canonicalize ``(coeff, symbols)`` pairs; symbols may contain ``b`` anywhere."""
    acc: dict[Word, ExpPoly] = {}
    for coeff, symbols in raw_terms:
        if not isinstance(coeff, ExpPoly):
            coeff = ExpPoly.const(coeff)
        sign, word = _canonical_word(symbols)
        c = coeff if sign > 0 else -coeff
        acc[word] = acc[word] + c if word in acc else c
    return OperatorExpr(acc)


def mul(a: OperatorExpr, b: OperatorExpr, max_weight: int | None = None) -> OperatorExpr:
    """Product ``a*b``, optionally dropping words heavier than ``max_weight``."""
    acc: dict[Word, ExpPoly] = {}
    for wa, ca in a.items():
        wa_weight = wa.weight
        for wb, cb in b.items():
            if max_weight is not None and wa_weight + wb.weight > max_weight:
                continue
            sign, w = _word_product(wa, wb)
            c = ca * cb
            if sign < 0:
                c = -c
            acc[w] = acc[w] + c if w in acc else c
    return OperatorExpr(acc)


def commutator(a: OperatorExpr, b: OperatorExpr, max_weight: int | None = None) -> OperatorExpr:
    return mul(a, b, max_weight) - mul(b, a, max_weight)


def anticommutator(a: OperatorExpr, b: OperatorExpr, max_weight: int | None = None) -> OperatorExpr:
    return mul(a, b, max_weight) + mul(b, a, max_weight)


def dagger(a: OperatorExpr) -> OperatorExpr:
    """Adjoint: reverse every word, then move ``b`` back to the front."""
    acc = {}
    for w, c in a.items():
        rev = Word(w.beta, w.factors[::-1])
        # (b X)^+ = X^+ b = (-1)^{#O} b X^+
        if w.beta and w.is_odd:
            c = -c
        acc[rev] = c
    return OperatorExpr(acc)


def beta_conjugate(a: OperatorExpr) -> OperatorExpr:
    return mul(mul(beta(), a), beta())


def parity_split(a: OperatorExpr) -> tuple[OperatorExpr, OperatorExpr]:
    even = {w: c for w, c in a.items() if not w.is_odd}
    odd = {w: c for w, c in a.items() if w.is_odd}
    return OperatorExpr(even), OperatorExpr(odd)


def kappa_slice(a: OperatorExpr, n: int) -> OperatorExpr:
    if n < 0:
        raise ValueError("kappa order must be non-negative")
    return OperatorExpr({w: c for w, c in a.items() if w.weight == n})


def integrate_s(a: OperatorExpr) -> OperatorExpr:
    return a.map_coefficients(ExpPoly.integrate)


def convolve_decay4(a: OperatorExpr) -> OperatorExpr:
    return a.map_coefficients(ExpPoly.convolve_decay)


def limit_s_infinity(a: OperatorExpr) -> OperatorExpr:
    return a.map_coefficients(lambda c: ExpPoly.const(c.limit()))


def evaluate_coefficients_at_zero(a: OperatorExpr) -> OperatorExpr:
    return a.map_coefficients(lambda c: ExpPoly.const(c.at_zero()))


def substitute_generator(a: OperatorExpr, src, dst) -> OperatorExpr:
    src, dst = Generator(src), Generator(dst)
    if src.odd != dst.odd:
        raise ParityMismatch(f"cannot replace {src.value} by {dst.value}: parity differs")
    acc: dict[Word, ExpPoly] = {}
    for w, c in a.items():
        nw = Word(w.beta, tuple(dst.value if f == src.value else f for f in w.factors))
        acc[nw] = acc[nw] + c if nw in acc else c
    return OperatorExpr(acc)
