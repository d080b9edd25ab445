"""Exact exponential-polynomials in the flow parameter ``s``.

An :class:`ExpPoly` is a finite sum ``sum_k exp(-4*k*s) * P_k(s)`` with
rational polynomials ``P_k``.  The set is closed under addition,
multiplication, integration from 0 to ``s`` and the decaying convolution
``f -> int_0^s exp(-4(s - s')) f(s') ds'``, which is everything the flow
recursions need.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = ["ExpPoly", "NonConvergent", "as_fraction"]

DECAY_UNIT = 4


class NonConvergent(ArithmeticError):
    """Raised when the s -> infinity limit of a coefficient does not exist."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not allowed in exact coefficients")
    return Fraction(x)


def _trim(poly: Iterable[Fraction]) -> tuple[Fraction, ...]:
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


class ExpPoly:
    """Immutable element of the exponential-polynomial ring.

    ``parts`` maps the decay index ``k`` (factor ``exp(-4*k*s)``) to the
    coefficient tuple of a polynomial in ``s``, lowest power first.
    """

    __slots__ = ("_parts", "_hash")

    def __init__(self, parts: Mapping[int, Iterable] | None = None):
        clean = {}
        for k, poly in (parts or {}).items():
            if k < 0:
                raise ValueError(f"decay index must be non-negative, got {k}")
            p = _trim(as_fraction(c) for c in poly)
            if p:
                clean[int(k)] = p
        self._parts = dict(sorted(clean.items()))
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "ExpPoly":
        return cls({0: (c,)})

    @classmethod
    def term(cls, c, power: int = 0, k: int = 0) -> "ExpPoly":
        """``c * s**power * exp(-4*k*s)``."""
        poly = [0] * power + [c]
        return cls({k: poly})

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def one(cls) -> "ExpPoly":
        return cls.const(1)

    # -- inspection -------------------------------------------------------
    @property
    def parts(self) -> dict[int, tuple[Fraction, ...]]:
        return dict(self._parts)

    def is_zero(self) -> bool:
        return not self._parts

    def is_constant(self) -> bool:
        return not self._parts or (list(self._parts) == [0] and len(self._parts[0]) == 1)

    def constant_value(self) -> Fraction:
        """Value of a constant coefficient; raises if ``s`` appears."""
        if not self.is_constant():
            raise ValueError(f"{self!r} is not a constant")
        return self._parts[0][0] if self._parts else Fraction(0)

    def coefficient(self, k: int, power: int) -> Fraction:
        poly = self._parts.get(k, ())
        return poly[power] if power < len(poly) else Fraction(0)

    def max_degree(self) -> int:
        return max((len(p) - 1 for p in self._parts.values()), default=-1)

    def __iter__(self):
        """Yield ``(k, power, coefficient)`` for every non-zero monomial."""
        for k, poly in self._parts.items():
            for p, c in enumerate(poly):
                if c != 0:
                    yield k, p, c

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        parts = dict(self._parts)
        for k, poly in other._parts.items():
            parts[k] = _poly_add(parts.get(k, ()), poly)
        return ExpPoly(parts)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({k: tuple(-c for c in p) for k, p in self._parts.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        parts: dict[int, tuple] = {}
        for k1, p1 in self._parts.items():
            for k2, p2 in other._parts.items():
                k = k1 + k2
                parts[k] = _poly_add(parts.get(k, ()), _poly_mul(p1, p2))
        return ExpPoly(parts)

    __rmul__ = __mul__

    def scale(self, c) -> "ExpPoly":
        c = as_fraction(c)
        return ExpPoly({k: tuple(c * x for x in p) for k, p in self._parts.items()})

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._parts == other._parts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._parts.items()))
        return self._hash

    # -- calculus ---------------------------------------------------------
    def derivative(self) -> "ExpPoly":
        parts: dict[int, tuple] = {}
        for k, poly in self._parts.items():
            a = -DECAY_UNIT * k
            dpoly = [Fraction(0)] * len(poly)
            for p, c in enumerate(poly):
                dpoly[p] += a * c
                if p:
                    dpoly[p - 1] += p * c
            parts[k] = _poly_add(parts.get(k, ()), tuple(dpoly))
        return ExpPoly(parts)

    def integrate(self) -> "ExpPoly":
        """``s -> int_0^s f(s') ds'``."""
        acc: dict[int, tuple] = {}
        for k, poly in self._parts.items():
            for kk, pp in _integrate_exp_poly(k, poly).items():
                acc[kk] = _poly_add(acc.get(kk, ()), pp)
        return ExpPoly(acc)

    def convolve_decay(self) -> "ExpPoly":
        """``s -> int_0^s exp(-4(s - s')) f(s') ds'``."""
        acc: dict[int, tuple] = {}
        for k, poly in self._parts.items():
            # exp(4 s') exp(-4 k s') has decay index k - 1, possibly -1
            for kk, pp in _integrate_exp_poly(k - 1, poly).items():
                acc[kk + 1] = _poly_add(acc.get(kk + 1, ()), pp)
        return ExpPoly(acc)

    def limit(self) -> Fraction:
        """Value at ``s -> infinity``."""
        p0 = self._parts.get(0, ())
        if len(p0) > 1:
            raise NonConvergent(f"secular term in coefficient {self.to_text()}")
        return p0[0] if p0 else Fraction(0)

    def at_zero(self) -> Fraction:
        return sum((p[0] for p in self._parts.values()), Fraction(0))

    def evaluate(self, s, exp=math.exp):
        """Numerical value at ``s``; ``exp`` lets callers plug in mpmath."""
        total = 0
        for k, poly in self._parts.items():
            acc = 0
            for c in reversed(poly):
                acc = acc * s + _num(c, exp)
            total += acc * (exp(-DECAY_UNIT * k * s) if k else 1)
        return total

    # -- text -------------------------------------------------------------
    def to_text(self) -> str:
        """Render per the ``epoly`` production of the expression grammar."""
        pieces = []
        for k, p, c in self:
            body = _rational_text(abs(c))
            if p == 1:
                body += "*s"
            elif p > 1:
                body += f"*s^{p}"
            if k:
                body += f"*exp[-{DECAY_UNIT * k}s]"
            pieces.append((c < 0, body))
        if not pieces:
            return "0"
        neg, body = pieces[0]
        out = ("-" if neg else "") + body
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def to_json(self) -> dict[str, list[str]]:
        return {str(k): [_rational_text(c) for c in p] for k, p in self._parts.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, Iterable[str]]) -> "ExpPoly":
        return cls({int(k): [Fraction(c) for c in v] for k, v in data.items()})

    def __repr__(self):
        return f"ExpPoly({self.to_text()})"


def _num(c: Fraction, exp):
    if exp is math.exp:
        return c.numerator / c.denominator
    # mpmath and friends: keep the division in the target precision
    mpf = type(exp(0))
    return mpf(c.numerator) / c.denominator


def _rational_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _coerce(x):
    if isinstance(x, ExpPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return ExpPoly.const(x)
    return NotImplemented


def _integrate_exp_poly(k: int, poly) -> dict[int, tuple]:
    """Exact ``int_0^s exp(-4 k s') P(s') ds'`` for integer ``k >= -1``.

    Returns parts keyed by decay index (may contain ``-1`` when ``k == -1``).
    """
    if k == 0:
        return {0: (Fraction(0),) + tuple(c / (p + 1) for p, c in enumerate(poly))}
    a = Fraction(DECAY_UNIT * k)
    # int_0^s e^{-a t} t^n dt = n!/a^{n+1} - e^{-a s} sum_j n!/(j! a^{n-j+1}) s^j
    const = Fraction(0)
    decaying = [Fraction(0)] * len(poly)
    for n, c in enumerate(poly):
        if c == 0:
            continue
        nf = math.factorial(n)
        const += c * nf / a ** (n + 1)
        for j in range(n + 1):
            decaying[j] -= c * Fraction(nf, math.factorial(j)) / a ** (n - j + 1)
    return {0: (const,), k: tuple(decaying)}
