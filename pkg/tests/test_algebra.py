from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings

from diracflow import (
    ExpPoly,
    OperatorExpr,
    ParityMismatch,
    Word,
    anticommutator,
    beta,
    commutator,
    convolve_decay4,
    dagger,
    gen,
    integrate_s,
    kappa_slice,
    limit_s_infinity,
    normalize,
    one,
    parity_split,
    parse,
    substitute_generator,
    zero,
)
from diracflow.algebra import NonConvergent, beta_conjugate
from strategies import exprs, small_exprs

O, E, F, B = gen("O"), gen("E"), gen("F"), beta()
H = B + O + E


def test_normalize_examples():
    assert normalize([(1, "Ob")]) == -(B * O)
    assert normalize([(1, "bb")]) == one()
    assert normalize([(1, "EbOb")]) == -(E * O)
    assert normalize([(1, "bObEb")]) == B * O * E


def test_mul_examples():
    assert (B * O) * (B * O) == -(O * O)
    assert one() * H == H
    assert (B * O ** 3) * (B * O) == -(O ** 4)
    assert commutator(B * O ** 3, B * O).is_zero()


def test_commutator_examples():
    x = B * O + E
    assert commutator(x, x).is_zero()
    assert commutator((B * O).scale(Fr(-1, 2)), B) == O
    assert anticommutator(O, zero()).is_zero()


def test_dagger_examples():
    assert dagger(B * O) == -(B * O)
    assert dagger(E * O) == O * E
    q1 = (B * O) * ExpPoly.term(1, 0, 1)
    assert dagger(q1) == -q1


def test_parity_split_examples():
    even, odd = parity_split(H)
    assert even == B + E and odd == O
    assert parity_split(commutator(O, E)) == (zero(), commutator(O, E))


def test_kappa_slice_examples():
    sq = H * H
    assert kappa_slice(H, 1) == O
    assert kappa_slice(sq, 2) == (B * E).scale(2) + O * O
    assert kappa_slice(sq, 5).is_zero()
    with pytest.raises(ValueError):
        kappa_slice(H, -1)


def test_integrate_examples():
    w1 = (B * O) * ExpPoly.term(-2, 0, 1)
    assert integrate_s(w1) == (B * O) * ExpPoly({0: [Fr(-1, 2)], 1: [Fr(1, 2)]})
    assert convolve_decay4(one() * ExpPoly.term(1, 0, 1)) == one() * ExpPoly.term(1, 1, 1)


def test_limit_examples():
    om1 = (B * O) * ExpPoly({0: [Fr(-1, 2)], 1: [Fr(1, 2)]})
    assert limit_s_infinity(om1) == (B * O).scale(Fr(-1, 2))
    with pytest.raises(NonConvergent):
        limit_s_infinity((B * O) * ExpPoly.term(1, 1, 0))


def test_substitute():
    h4 = parse("-(1/8)*b*O^4") - commutator(O, commutator(O, E)).scale(Fr(1, 8))
    want = parse("-(1/8)*b*O^4") - commutator(O, commutator(O, F)).scale(Fr(1, 8))
    assert substitute_generator(h4, "E", "F") == want
    assert substitute_generator(h4, "O", "O") == h4
    with pytest.raises(ParityMismatch):
        substitute_generator(h4, "O", "E")


def test_word_invariants():
    w = Word(1, ("O", "E", "O", "F"))
    assert w.weight == 6 and not w.is_odd
    assert Word(0, ("O",)).is_odd


def test_term_order_is_canonical():
    x = E + B + O + B * O + O * E + E * O + F
    keys = [w for w, _ in x.items()]
    assert keys == sorted(keys, key=Word.sort_key)
    assert keys[0] == Word(0, ("O",))


# -- properties ---------------------------------------------------------------
@given(small_exprs, small_exprs, small_exprs)
@settings(max_examples=60)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c
    assert one() * a == a == a * one()


@given(small_exprs, small_exprs)
def test_involution(a, b):
    assert dagger(dagger(a)) == a
    assert dagger(a * b) == dagger(b) * dagger(a)


@given(small_exprs, small_exprs)
def test_grading(a, b):
    for wa, _ in a.items():
        for wb, _ in b.items():
            prod = OperatorExpr({wa: ExpPoly.one()}) * OperatorExpr({wb: ExpPoly.one()})
            (w, _), = prod.items()
            assert w.is_odd == (wa.is_odd != wb.is_odd)
            assert w.weight == wa.weight + wb.weight


@given(exprs())
def test_parity_split_recombines(a):
    even, odd = parity_split(a)
    assert even + odd == a
    assert beta_conjugate(a) == even - odd


@given(small_exprs, small_exprs, small_exprs)
@settings(max_examples=40)
def test_jacobi(a, b, c):
    total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    assert total.is_zero()


@given(exprs())
def test_integration_vanishes_at_zero(a):
    integ = integrate_s(a)
    assert all(c.at_zero() == 0 for _, c in integ.items())
    assert integ.map_coefficients(ExpPoly.derivative) == a
