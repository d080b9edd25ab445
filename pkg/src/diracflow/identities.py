"""Exact identity checks over the flow series.

Every checker returns a :class:`Verdict`.  A failing check carries the
non-zero residual so the offending terms can be printed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    OperatorExpr,
    Word,
    anticommutator,
    beta,
    commutator,
    dagger,
    gen,
    kappa_slice,
    mul,
    parity_split,
    substitute_generator,
    zero,
)
from .series import (
    ad_series,
    hnw_series,
    hnw_time_dependent,
    bp_flow_series,
    omega_series,
    omega_u_limit,
    omega_u_series,
    q_series,
    r_table,
    tanh_coefficients,
)

__all__ = [
    "Verdict",
    "Holds",
    "Fails",
    "NotComputed",
    "check_equal",
    "commutator_identities",
    "q_constraint",
    "cancellation_identity",
    "tanh_relation",
    "nested_ad_smallness",
    "order_economy",
    "monomial_table",
    "dvj_table",
    "beta_oe_squared_weight",
    "discrepancy_forms",
    "discrepancy_check",
    "run_all",
]


@dataclass(frozen=True)
class Verdict:
    name: str
    status: str  # "holds" | "fails" | "not-computed"
    witness: OperatorExpr | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    def __bool__(self):
        return self.holds


def Holds(name: str, note: str = "") -> Verdict:
    return Verdict(name, "holds", None, note)


def Fails(name: str, witness: OperatorExpr, note: str = "") -> Verdict:
    return Verdict(name, "fails", witness, note)


def NotComputed(name: str, note: str = "") -> Verdict:
    return Verdict(name, "not-computed", None, note)


def check_equal(name: str, lhs: OperatorExpr, rhs: OperatorExpr) -> Verdict:
    diff = lhs - rhs
    return Holds(name) if diff.is_zero() else Fails(name, diff)


def _all(name: str, verdicts: list[Verdict]) -> Verdict:
    for v in verdicts:
        if not v.holds:
            return Verdict(name, v.status, v.witness, f"{v.name}: {v.note}".rstrip(": "))
    return Holds(name)


O, E, B = gen("O"), gen("E"), beta()


def cm(a, b):
    return commutator(a, b)


def commutator_identities() -> Verdict:
    oe = cm(O, E)
    o2, o3 = O ** 2, O ** 3
    nested = cm(O, cm(O, oe))
    checks = [
        check_equal("sum-of-placements", o2 * oe + O * oe * O + oe * o2, cm(o3, E)),
        check_equal("outer-placements", o2 * oe + oe * o2, cm(O, E * o2 + o2 * E)),
        check_equal("triple-nested", nested, o2 * oe + oe * o2 - (O * oe * O).scale(2)),
        check_equal("triple-nested-cubic", nested, cm(o3, E) - (O * oe * O).scale(3)),
        check_equal(
            "middle-placement",
            O * oe * O,
            cm(o3, E).scale(Fraction(1, 3)) - nested.scale(Fraction(1, 3)),
        ),
        check_equal(
            "outer-placements-basis",
            o2 * oe + oe * o2,
            cm(o3, E).scale(Fraction(2, 3)) + nested.scale(Fraction(1, 3)),
        ),
    ]
    return _all("commutator-identities", checks)


def q_constraint(max_order: int = 5) -> Verdict:
    """Q^+ + Q = R - sum Q_j^+ Q_{n-j} order by order, and Q_1^+ = -Q_1."""
    q = q_series(max_order)
    r = r_table("E", max_order)
    checks = [check_equal("q1-antihermitian", dagger(q[1]), -q[1])]
    for n in range(2, max_order + 1):
        rhs = r[n]
        for j in range(1, n):
            rhs = rhs - mul(dagger(q[j]), q[n - j])
        checks.append(check_equal(f"constraint-{n}", dagger(q[n]) + q[n], rhs))
    return _all("q-constraint", checks)


def cancellation_pair(omega1: OperatorExpr, x: OperatorExpr) -> Verdict:
    lhs = (cm(omega1, cm(x, B)) + cm(x, cm(omega1, B))).scale(Fraction(1, 2))
    return check_equal("cancellation", lhs, cm(x, O))


def cancellation_identity(n: int) -> Verdict:
    if n < 2:
        raise ValueError("n must be at least 2")
    lim = omega_u_limit(2 * n - 1)
    v = cancellation_pair(lim[1], lim[2 * n - 1])
    return Verdict(f"cancellation-{n}", v.status, v.witness, v.note)


def tanh_relation(max_order: int = 6) -> Verdict:
    """Even part of the beta-flow generator equals tanh(ad W_u) of its odd part."""
    om = omega_series(max_order).total()
    w_g, w_u = parity_split(om)
    gen_u = omega_u_series(max_order - 1).total()
    rhs = ad_series(gen_u, w_u, tanh_coefficients(max_order), max_order)
    return check_equal("tanh-relation", w_g.truncate(max_order), rhs)


def nested_ad_smallness(n: int) -> Verdict:
    """The order-(2n+1) slice of (ad W_u)^{2n} w_u vanishes."""
    top = 2 * n + 1
    om = omega_series(top).total()
    _, w_u = parity_split(om)
    gen_u = omega_u_series(top).total()
    term = w_u
    for _ in range(2 * n):
        term = commutator(gen_u, term, top)
    res = kappa_slice(term, top)
    name = f"nested-ad-{n}"
    return Holds(name) if res.is_zero() else Fails(name, res)


def first_order_commutes() -> Verdict:
    """[W_1(s), w_1(s)] = 0 identically in s."""
    return check_equal("first-order-commute", cm(omega_u_series(1)[1], omega_series(1)[1]), zero())


def order_economy(max_order: int = 6) -> Verdict:
    full = hnw_series(max_order)[max_order]
    reduced = hnw_series(max_order, drop_orders=(max_order - 1,))[max_order]
    return check_equal(f"order-economy-{max_order}", full, reduced)


# -- sixth-order monomial structure -----------------------------------------
def monomial_table(h6: OperatorExpr) -> OperatorExpr:
    """Expanded monomial form; OperatorExpr is already canonical so this is the identity
    map, kept as a named step so callers can read off monomial coefficients."""
    return OperatorExpr(h6.terms)


def _words_with(expr: OperatorExpr, count_e: int) -> OperatorExpr:
    return OperatorExpr({w: c for w, c in expr.items() if w.factors.count("E") == count_e})


def dvj_table() -> tuple[OperatorExpr, OperatorExpr]:
    """The E-linear and E-quadratic parts of the reference sixth-order term."""
    o2, o3, o4 = O ** 2, O ** 3, O ** 4
    linear = (
        (o4 * E + E * o4).scale(Fraction(7, 128))
        - (o3 * E * O + O * E * o3).scale(Fraction(3, 32))
        + (o2 * E * o2).scale(Fraction(5, 64))
    )
    e2 = E ** 2
    quad = B * (
        o2 * e2 + e2 * o2 - (O * E * O * E).scale(2) - (E * O * E * O).scale(2) + (O * e2 * O).scale(2)
    )
    return linear, quad.scale(Fraction(1, 16))


def monomial_check(h6: OperatorExpr | None = None) -> Verdict:
    h6 = hnw_series(6)[6] if h6 is None else h6
    expanded = monomial_table(h6)
    linear, quad = dvj_table()
    return _all(
        "monomial-table",
        [
            check_equal("E-linear", _words_with(expanded, 1), linear),
            check_equal("E-quadratic", _words_with(expanded, 2), quad),
        ],
    )


def beta_oe_squared_weight(h6: OperatorExpr | None = None) -> Fraction:
    """Weight of b*[O,E]^2 in the E-quadratic part of the sixth order.

    That part lies in the span of A = b*(O[[O,E],E] + [[O,E],E]O) and
    S = b*[O,E]^2.  Only A contains b*O^2*E^2, which fixes its weight; the
    b*O*E*O*E word then fixes the weight of S.  The span is checked exactly.
    """
    h6 = hnw_series(6)[6] if h6 is None else h6
    quad = _words_with(h6, 2)
    oe = cm(O, E)
    a = B * (O * cm(oe, E) + cm(oe, E) * O)
    sq = B * oe * oe
    # coefficient of b*O^2*E^2: a -> 1, sq -> 0; coefficient of b*O*E*O*E: a -> -2, sq -> 1
    w_o2e2 = Word(1, ("O", "O", "E", "E"))
    w_oeoe = Word(1, ("O", "E", "O", "E"))
    ca = quad.coefficient(w_o2e2).constant_value() / a.coefficient(w_o2e2).constant_value()
    csq = (quad.coefficient(w_oeoe).constant_value() - ca * a.coefficient(w_oeoe).constant_value()) / sq.coefficient(
        w_oeoe
    ).constant_value()
    if quad != a.scale(ca) + sq.scale(csq):
        raise ArithmeticError("E-quadratic part is not in the expected span")
    return csq


# -- time-dependent discrepancy ----------------------------------------------
def discrepancy_forms() -> tuple[OperatorExpr, OperatorExpr]:
    o2 = O ** 2
    h2 = E + (B * o2).scale(Fraction(1, 2))
    nested = (B * cm(E, cm(E, o2))).scale(Fraction(-1, 32)) + cm(o2, cm(o2, E)).scale(Fraction(1, 64))
    bracket = cm(B * cm(E, o2), h2).scale(Fraction(1, 32))
    return nested, bracket


def discrepancy(perturb: Fraction = Fraction(0)) -> OperatorExpr:
    """``hU6|F->E - h6``; ``perturb`` shifts one coefficient for self-tests."""
    hu6 = substitute_generator(bp_flow_series(6)[6], "F", "E")
    h6 = hnw_series(6)[6]
    if perturb:
        h6 = h6 + (B * O ** 6).scale(perturb)
    return hu6 - h6


def discrepancy_check(perturb: Fraction = Fraction(0)) -> Verdict:
    diff = discrepancy(perturb)
    nested, bracket = discrepancy_forms()
    checks = [
        check_equal("nested-form", diff, nested),
        check_equal("bracket-form", diff, bracket),
        check_equal("self-adjoint", dagger(diff), diff),
        check_equal("even", parity_split(diff)[1], zero()),
    ]
    if diff.is_zero():
        checks.append(Fails("nonzero", diff, "difference vanishes"))
    return _all("discrepancy", checks)


def time_dependent_substitution(max_order: int = 6) -> Verdict:
    try:
        hnw_time_dependent(max_order)
    except ArithmeticError as exc:
        return NotComputed("substitution-functoriality", str(exc))
    return Holds("substitution-functoriality")


def series_structure(max_order: int = 6) -> Verdict:
    checks = []
    h = hnw_series(max_order)
    for n in h:
        if n % 2:
            checks.append(check_equal(f"h{n}-vanishes", h[n], zero()))
        else:
            checks.append(check_equal(f"h{n}-even", parity_split(h[n])[1], zero()))
            checks.append(check_equal(f"h{n}-self-adjoint", dagger(h[n]), h[n]))
    g = omega_u_series(max_order - 1)
    om = omega_series(max_order)
    for n in g:
        if n % 2:
            checks.append(check_equal(f"W{n}-anti-self-adjoint", dagger(g[n]), -g[n]))
            checks.append(check_equal(f"W{n}-odd", parity_split(g[n])[0], zero()))
            at0 = g[n].map_coefficients(lambda c: type(c).const(c.at_zero()))
            checks.append(check_equal(f"W{n}-initial", at0, zero()))
    for n in om:
        even, odd = parity_split(om[n])
        checks.append(check_equal(f"w{n}-parity", even if n % 2 else odd, zero()))
    return _all("series-structure", checks)


SYMBOLIC_CHECKS = {
    "commutator-identities": commutator_identities,
    "q-constraint": lambda: q_constraint(5),
    "cancellation": None,  # parametrised by n
    "tanh-relation": lambda: tanh_relation(6),
    "nested-ad": None,  # parametrised by n
    "first-order-commute": first_order_commutes,
    "order-economy": lambda: order_economy(6),
    "monomial-table": monomial_check,
    "discrepancy": discrepancy_check,
    "substitution": time_dependent_substitution,
    "series-structure": series_structure,
}


def run_all(only: str | None = None, n: int | None = None, perturb: Fraction = Fraction(0)) -> list[Verdict]:
    out: list[Verdict] = []

    def want(name):
        return only is None or only == name

    for name, fn in SYMBOLIC_CHECKS.items():
        if not want(name):
            continue
        if name == "cancellation":
            out.extend(cancellation_identity(k) for k in ([n] if n else [2, 3]))
        elif name == "nested-ad":
            out.extend(nested_ad_smallness(k) for k in ([n] if n else [1, 2]))
        elif name == "discrepancy":
            out.append(discrepancy_check(perturb))
        else:
            out.append(fn())
    if not out:
        raise KeyError(f"unknown check {only!r}")
    return out
