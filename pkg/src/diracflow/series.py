"""Perturbative flow recursions on top of the operator algebra.

All recursions are kept graded by the kappa-weight of the words, so a
series is stored either as one truncated :class:`OperatorExpr` or as a
:class:`SeriesTable` holding the individual orders.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import (
    Generator,
    OperatorExpr,
    beta,
    commutator,
    convolve_decay4,
    dagger,
    gen,
    integrate_s,
    kappa_slice,
    limit_s_infinity,
    mul,
    parity_split,
    substitute_generator,
    zero,
)
from .expoly import ExpPoly

__all__ = [
    "SeriesTable",
    "kernel_coefficients",
    "ad_series",
    "cosh_coefficients",
    "sinh_coefficients",
    "tanh_coefficients",
    "dirac_hamiltonian",
    "r_table",
    "q_series",
    "omega_series",
    "omega_u_series",
    "omega_u_limit",
    "hnw_series",
    "bp_flow_series",
    "hnw_time_dependent",
]

DECAY4 = ExpPoly.term(1, 0, 1)


@dataclass(frozen=True)
class SeriesTable:
    """Kappa-order -> operator, with an explicit truncation order."""

    by_order: dict[int, OperatorExpr] = field(default_factory=dict)
    max_order: int = 0

    def __getitem__(self, n: int) -> OperatorExpr:
        return self.by_order.get(n, zero())

    def __iter__(self):
        return iter(range(1, self.max_order + 1))

    def total(self) -> OperatorExpr:
        out = zero()
        for n in self:
            out = out + self[n]
        return out

    def map(self, fn) -> "SeriesTable":
        return SeriesTable({n: fn(e) for n, e in self.by_order.items()}, self.max_order)

    @classmethod
    def from_expr(cls, expr: OperatorExpr, max_order: int, start: int = 1) -> "SeriesTable":
        return cls({n: kappa_slice(expr, n) for n in range(start, max_order + 1)}, max_order)


# -- scalar kernels -------------------------------------------------------
def _series_inverse(a: list[Fraction]) -> list[Fraction]:
    inv = [Fraction(1) / a[0]]
    for n in range(1, len(a)):
        acc = sum((a[k] * inv[n - k] for k in range(1, n + 1)), Fraction(0))
        inv.append(-acc / a[0])
    return inv


@lru_cache(maxsize=None)
def _kernel(max_power: int) -> tuple[Fraction, ...]:
    # sinh(2z)/(2z) = sum 4^m z^{2m} / (2m+1)!, as a series in w = z^2
    sinhc = [Fraction(4**m, math.factorial(2 * m + 1)) for m in range(max_power + 1)]
    return tuple(_series_inverse(sinhc))


def kernel_coefficients(max_power: int) -> list[Fraction]:
    """Entry ``m`` is the ``z**(2m)`` coefficient of ``2z/sinh(2z)``."""
    if max_power < 0:
        raise ValueError("max_power must be non-negative")
    return list(_kernel(max_power))


def cosh_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, math.factorial(j)) if j % 2 == 0 else Fraction(0) for j in range(n + 1)]


def sinh_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, math.factorial(j)) if j % 2 == 1 else Fraction(0) for j in range(n + 1)]


def tanh_coefficients(n: int) -> list[Fraction]:
    """Taylor coefficients of tanh by series division sinh/cosh."""
    inv = _series_inverse(cosh_coefficients(n))
    sh = sinh_coefficients(n)
    return [sum((sh[k] * inv[j - k] for k in range(j + 1)), Fraction(0)) for j in range(n + 1)]


def ad_series(x: OperatorExpr, y: OperatorExpr, coeffs, max_order: int) -> OperatorExpr:
    """``sum_j coeffs[j] (ad_x)^j y`` keeping only words of weight <= max_order."""
    out = zero()
    term = y.truncate(max_order)
    for j, c in enumerate(coeffs):
        if term.is_zero():
            break
        if c:
            out = out + term.scale(c)
        term = commutator(x, term, max_order)
    return out


# -- model input ----------------------------------------------------------
def dirac_hamiltonian(field_symbol: str = "E") -> OperatorExpr:
    """``b + O + X`` with weights carried by the words themselves."""
    return beta() + gen("O") + gen(field_symbol)


def r_table(field_symbol: str = "E", max_order: int = 6) -> SeriesTable:
    """Slices of the squared Hamiltonian beyond order zero."""
    h = dirac_hamiltonian(field_symbol)
    sq = mul(h, h)
    return SeriesTable({n: kappa_slice(sq, n) for n in range(2, max_order + 1)}, max_order)


# -- beta-flow generator series --------------------------------------------
@lru_cache(maxsize=None)
def _q_series(max_order: int, field_symbol: str) -> SeriesTable:
    b, o, x = beta(), gen("O"), gen(field_symbol)
    r = r_table(field_symbol, max_order)
    q: dict[int, OperatorExpr] = {1: mul(b, o) * DECAY4}
    for n in range(2, max_order + 1):
        src = r[n]
        for j in range(1, n):
            src = src - mul(q[j], q[n - j])
        qn = convolve_decay4(src).scale(2)
        if n == 2:
            qn = qn + mul(b, x) * DECAY4
        q[n] = qn
    return SeriesTable(q, max_order)


def q_series(max_order: int, field_symbol: str = "E") -> SeriesTable:
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    return _q_series(max_order, Generator(field_symbol).value)


def omega_series(max_order: int, field_symbol: str = "E") -> SeriesTable:
    return q_series(max_order, field_symbol).map(lambda q: dagger(q) - q)


# -- Magnus-type generator --------------------------------------------------
@lru_cache(maxsize=None)
def _omega_u(max_order: int, field_symbol: str) -> OperatorExpr:
    om = omega_series(max_order, field_symbol).total()
    _, omega_u = parity_split(om)
    kern = kernel_coefficients(max_order // 2 + 1)
    coeffs = []
    for c in kern:
        coeffs += [c, Fraction(0)]

    def step(cur: OperatorExpr) -> OperatorExpr:
        return integrate_s(ad_series(cur, omega_u, coeffs, max_order))

    cur = zero()
    for _ in range(math.ceil(max_order / 2)):
        cur = step(cur)
    if step(cur) != cur:
        raise ArithmeticError("Picard iteration did not stabilise within the kappa grading")
    return cur


def omega_u_series(max_order: int, field_symbol: str = "E") -> SeriesTable:
    """Odd orders of the Magnus-type generator as functions of ``s``."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    return SeriesTable.from_expr(_omega_u(max_order, Generator(field_symbol).value), max_order)


def omega_u_limit(max_order: int, field_symbol: str = "E") -> SeriesTable:
    return omega_u_series(max_order, field_symbol).map(limit_s_infinity)


# -- Newton-Wigner series ------------------------------------------------------
def _hnw_from_generator(gen_inf: OperatorExpr, field_symbol: str, max_order: int) -> OperatorExpr:
    even_part = beta() + gen(field_symbol)
    n = max_order + 1
    out = ad_series(gen_inf, even_part, cosh_coefficients(n), max_order)
    return out - ad_series(gen_inf, gen("O"), sinh_coefficients(n), max_order)


@lru_cache(maxsize=None)
def _hnw(max_order: int, field_symbol: str, drop: tuple[int, ...]) -> SeriesTable:
    # the generator is needed one order below the target
    g = omega_u_limit(max(max_order - 1, 1), field_symbol)
    gen_inf = zero()
    for n in g:
        if n not in drop:
            gen_inf = gen_inf + g[n]
    total = _hnw_from_generator(gen_inf, field_symbol, max_order)
    return SeriesTable.from_expr(total, max_order)


def hnw_series(max_order: int, field_symbol: str = "E", drop_orders=()) -> SeriesTable:
    """``cosh(ad W)(b + X) - sinh(ad W) O`` with ``W`` the limit generator.

    ``drop_orders`` zeroes selected orders of ``W``; it exists to show that
    the top order never contributes.
    """
    if max_order < 2 or max_order % 2:
        raise ValueError("max_order must be even and at least 2")
    return _hnw(max_order, Generator(field_symbol).value, tuple(sorted(drop_orders)))


def hnw_time_dependent(max_order: int) -> SeriesTable:
    """Static series with E renamed to F, checked against a direct F run."""
    static = hnw_series(max_order, "E").map(lambda e: substitute_generator(e, "E", "F"))
    direct = hnw_series(max_order, "F")
    for n in static:
        if static[n] != direct[n]:
            raise ArithmeticError(f"substitution and direct F series disagree at order {n}")
    return static


# -- Hamiltonian flow with time dependence ------------------------------------
@lru_cache(maxsize=None)
def _bp(max_order: int) -> SeriesTable:
    b, o, f = beta(), gen("O"), gen("F")
    k: dict[int, OperatorExpr] = {1: o * DECAY4}
    for m in range(2, max_order + 1):
        acc = zero()
        if m % 2 == 0:
            n = m // 2
            for j in range(n):
                acc = acc + integrate_s(mul(k[2 * j + 1], k[m - 2 * j - 1]))
            km = mul(b, acc).scale(4)
            if m == 2:
                km = km + f
        else:
            n = (m - 1) // 2
            for j in range(n):
                acc = acc + convolve_decay4(commutator(k[2 * j + 1], k[m - 2 * j - 1]))
            km = mul(b, acc).scale(2)
        k[m] = km
    return SeriesTable(k, max_order)


def bp_flow_series(max_order: int, at_infinity: bool = True) -> SeriesTable:
    """K-terms of the time-dependent flow; by default their s -> infinity limits.

    F stands for the time-dependent field minus i d/dt, so the order-2
    limit ``F + b*O^2/2`` equals ``E + b*O^2/2`` once ``F + i d/dt = E``.
    """
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    table = _bp(max_order)
    return table.map(limit_s_infinity) if at_infinity else table
