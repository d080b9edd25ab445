from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from diracflow import ExpPoly, OperatorExpr, Word, beta, dagger, gen, hnw_series
from diracflow import identities as ids
from strategies import nonzero_rationals

O, E, B = gen("O"), gen("E"), beta()


def test_commutator_identities():
    assert ids.commutator_identities().holds


def test_q_constraint_chain():
    assert ids.q_constraint(5).holds


@pytest.mark.parametrize("n", [2, 3])
def test_cancellation(n):
    assert ids.cancellation_identity(n).holds


odd_words = st.builds(
    lambda b, fs: Word(b, tuple(fs)),
    st.integers(0, 1),
    st.lists(st.sampled_from("OE"), max_size=4),
).filter(lambda w: w.is_odd)


@given(st.lists(st.tuples(odd_words, nonzero_rationals), min_size=1, max_size=3))
@settings(max_examples=50)
def test_cancellation_generic_odd(terms):
    x = OperatorExpr({w: ExpPoly.const(c) for w, c in terms})
    x = x - dagger(x)  # anti-self-adjoint as in the generator series
    assert ids.cancellation_pair((B * O).scale(Fr(-1, 2)), x).holds


def test_tanh_relation():
    assert ids.tanh_relation(6).holds


@pytest.mark.parametrize("n", [1, 2])
def test_nested_ad(n):
    assert ids.nested_ad_smallness(n).holds


def test_first_order_commutes():
    assert ids.first_order_commutes().holds


def test_order_economy():
    assert ids.order_economy(6).holds


def test_monomial_table():
    assert ids.monomial_check().holds
    h6 = ids.monomial_table(hnw_series(6)[6])
    assert h6.coefficient(Word(0, ("O",) * 4 + ("E",))).constant_value() == Fr(7, 128)
    assert h6.coefficient(Word(0, ("O", "O", "O", "E", "O"))).constant_value() == Fr(-3, 32)
    assert h6.coefficient(Word(0, ("O", "O", "E", "O", "O"))).constant_value() == Fr(5, 64)


def test_beta_oe_squared_weight_is_zero():
    assert ids.beta_oe_squared_weight() == 0


def test_discrepancy():
    v = ids.discrepancy_check()
    assert v.holds
    assert not ids.discrepancy().is_zero()


def test_discrepancy_detects_perturbation():
    v = ids.discrepancy_check(Fr(1, 1000))
    assert v.status == "fails"
    assert v.witness == (B * O ** 6).scale(Fr(-1, 1000))


def test_series_structure():
    assert ids.series_structure(6).holds


def test_run_all_holds():
    assert all(v.holds for v in ids.run_all())


def test_run_all_filter():
    (v,) = ids.run_all("cancellation", 3)
    assert v.name == "cancellation-3"
    with pytest.raises(KeyError):
        ids.run_all("nope")


def test_verdict_states():
    assert ids.Holds("x") and not ids.Fails("x", O) and not ids.NotComputed("x")
