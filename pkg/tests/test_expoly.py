from fractions import Fraction as Fr
import math

import pytest
from hypothesis import given, settings

from diracflow import ExpPoly, NonConvergent
from strategies import exp_polys


def test_integrate_decay():
    assert ExpPoly.term(1, 0, 1).integrate() == ExpPoly({0: [Fr(1, 4)], 1: [Fr(-1, 4)]})


def test_resonant_convolution():
    assert ExpPoly.term(1, 0, 1).convolve_decay() == ExpPoly.term(1, 1, 1)


def test_convolve_constant():
    # int_0^s e^{-4(s-t)} dt = (1 - e^{-4s}) / 4
    assert ExpPoly.one().convolve_decay() == ExpPoly({0: [Fr(1, 4)], 1: [Fr(-1, 4)]})


def test_no_trailing_zeros_and_no_empty_parts():
    p = ExpPoly({0: [1, 0, 0], 2: [0, 0]})
    assert p.parts == {0: (Fr(1),)}


def test_limit():
    assert ExpPoly({0: [Fr(-1, 2)], 1: [1, 3]}).limit() == Fr(-1, 2)
    assert ExpPoly.term(5, 2, 3).limit() == 0
    with pytest.raises(NonConvergent):
        ExpPoly.term(1, 1, 0).limit()


def test_floats_rejected():
    with pytest.raises(TypeError):
        ExpPoly.const(0.5)


@given(exp_polys())
def test_integral_calculus(f):
    g = f.integrate()
    assert g.derivative() == f
    assert g.at_zero() == 0


@given(exp_polys(max_k=2))
def test_convolution_solves_decay_ode(f):
    # g = conv(f) solves g' = -4 g + f, g(0) = 0
    g = f.convolve_decay()
    assert g.derivative() == g.scale(-4) + f
    assert g.at_zero() == 0


@given(exp_polys(), exp_polys(), exp_polys())
@settings(max_examples=50)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * ExpPoly.one() == a
    assert (a - a).is_zero()


@given(exp_polys())
def test_evaluate_matches_text(f):
    s = 0.37
    direct = sum(float(c) * s**p * math.exp(-4 * k * s) for k, p, c in f)
    assert f.evaluate(s) == pytest.approx(direct, rel=1e-12, abs=1e-12)
