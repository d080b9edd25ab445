from fractions import Fraction as Fr

import pytest
import sympy

from diracflow import (
    ExpPoly,
    beta,
    bp_flow_series,
    dagger,
    gen,
    hnw_series,
    hnw_time_dependent,
    kernel_coefficients,
    limit_s_infinity,
    omega_series,
    omega_u_limit,
    omega_u_series,
    parity_split,
    q_series,
    r_table,
    substitute_generator,
)
from diracflow.series import tanh_coefficients
import reference_values as ref

O, E, F, B = gen("O"), gen("E"), gen("F"), beta()


def bernoulli_kernel(m):
    """z^{2m} coefficient of 2z/sinh(2z) from Bernoulli numbers."""
    b2m = Fr(str(sympy.bernoulli(2 * m)))
    return (2 - 2 ** (2 * m)) * b2m * 4**m / sympy.factorial(2 * m)


def test_kernel_leading_values():
    assert kernel_coefficients(3) == ref.KERNEL


@pytest.mark.parametrize("m", range(0, 12))
def test_kernel_against_bernoulli(m):
    assert kernel_coefficients(12)[m] == Fr(str(bernoulli_kernel(m)))


def test_tanh_coefficients():
    assert tanh_coefficients(7) == [0, 1, 0, Fr(-1, 3), 0, Fr(2, 15), 0, Fr(-17, 315)]


def test_r_table():
    r = r_table()
    assert r[2] == (B * E).scale(2) + O * O
    assert r[3] == E * O + O * E
    assert r[4] == E * E
    assert r[5].is_zero() and r[6].is_zero()
    assert r_table(max_order=7)[7].is_zero()


def test_q_initial_data():
    q = q_series(4)
    assert q[1] == (B * O) * ExpPoly.term(1, 0, 1)
    at0 = {n: q[n].map_coefficients(lambda c: ExpPoly.const(c.at_zero())) for n in q}
    assert at0[1] == B * O
    assert at0[2] == B * E
    assert at0[3].is_zero() and at0[4].is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_omega_orders(n):
    assert omega_series(5)[n] == ref.OMEGA[n]


@pytest.mark.parametrize("n", [1, 3, 5])
def test_omega_u_orders(n):
    assert omega_u_series(5)[n] == ref.OMEGA_U[n]


def test_omega_u_two_step_form_agrees():
    assert omega_u_series(5)[5] == ref.OMEGA_U_TWO_STEP_5


@pytest.mark.parametrize("n", [1, 3, 5])
def test_omega_u_limits(n):
    assert omega_u_limit(5)[n] == ref.OMEGA_U_INF[n]
    assert limit_s_infinity(ref.OMEGA_U[n]) == ref.OMEGA_U_INF[n]


def test_omega_u_even_orders_vanish():
    g = omega_u_series(5)
    assert g[2].is_zero() and g[4].is_zero()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_hnw_orders(n):
    assert hnw_series(6)[n] == ref.H[n]


@pytest.mark.parametrize("n", [2, 4, 6])
def test_bp_orders(n):
    assert bp_flow_series(6)[n] == ref.HU[n]


def test_bp_odd_terms_vanish_at_infinity():
    k = bp_flow_series(7)
    for n in (1, 3, 5, 7):
        assert k[n].is_zero()


def test_time_dependent_substitution_path():
    td = hnw_time_dependent(6)
    assert td[2] == F + (B * O * O).scale(Fr(1, 2))
    assert td[4] == ref.HU[4]
    assert td[6] == substitute_generator(ref.H[6], "E", "F")


def test_eighth_order_is_even_and_self_adjoint():
    h8 = hnw_series(8)[8]
    assert parity_split(h8)[1].is_zero()
    assert dagger(h8) == h8


def test_argument_validation():
    with pytest.raises(ValueError):
        hnw_series(5)
    with pytest.raises(ValueError):
        q_series(0)
    with pytest.raises(ValueError):
        kernel_coefficients(-1)
