from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import forms
from symplie.exterior import (KForm, e, five_form_to_vector, format_form, interior, vector_to_five_form,
                              wedge, wedge_all)


def test_basis_products():
    assert wedge(e(1), e(2)) == e(1, 2)
    assert wedge(e(1, 2), e(1, 2)).is_zero()
    assert wedge(e(1, 3, 5), e(2, 4, 6)) == -e(1, 2, 3, 4, 5, 6)


def test_blade_constructor_sorts_with_sign():
    assert e(2, 1) == -e(1, 2)
    assert e(3, 1, 2) == e(1, 2, 3)
    with pytest.raises(ValueError):
        e(1, 1)


def test_interior_examples():
    assert interior(1, e(1, 2)) == e(2)
    assert interior(2, e(1, 2)) == -e(1)
    assert interior(3, e(1, 3, 5)) == -e(1, 5)
    assert interior(4, e(1, 3, 5)).is_zero()


def test_interior_of_scalar_is_zero():
    assert interior(1, KForm(0, {0: 5})).is_zero()


def test_five_form_examples():
    assert five_form_to_vector(e(2, 3, 4, 5, 6)) == [1, 0, 0, 0, 0, 0]
    assert five_form_to_vector(e(1, 3, 4, 5, 6)) == [0, -1, 0, 0, 0, 0]
    assert five_form_to_vector(KForm(5)) == [0] * 6


def test_five_form_rejects_other_degrees():
    with pytest.raises(ValueError):
        five_form_to_vector(e(1, 2))


def test_format():
    assert format_form(e(1, 3, 4) - e(1, 5, 6)) == "e134-e156"
    assert format_form(e(1, 2) * 2 + e(3, 4) * Fraction(1, 2)) == "2*e12+1/2*e34"
    assert format_form(KForm(3)) == "0"


def test_mixed_degree_addition_rejected():
    with pytest.raises(ValueError):
        e(1) + e(1, 2)


def test_float_and_exact_backends_agree():
    a = e(1, 2) * Fraction(3, 2) + e(3, 4)
    b = e(5) * 2
    exact = wedge(a, b)
    approx = wedge(a.map_coeffs(float), b.map_coeffs(float))
    assert all(float(exact[m]) == approx[m] for m in exact.coeffs)


@given(forms(), forms())
def test_graded_commutativity(a, b):
    sign = -1 if (a.degree * b.degree) % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign


@given(forms(), forms(), forms())
@settings(max_examples=50)
def test_associativity(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(st.integers(1, 6), st.integers(1, 5).flatmap(forms), st.integers(1, 5).flatmap(forms))
def test_interior_is_antiderivation(v, a, b):
    if a.degree + b.degree > 6:
        return
    sign = -1 if a.degree % 2 else 1
    assert interior(v, wedge(a, b)) == wedge(interior(v, a), b) + wedge(a, interior(v, b)) * sign


@given(forms(5))
def test_five_form_round_trip(a):
    assert vector_to_five_form(five_form_to_vector(a)) == a


def test_wedge_all():
    assert wedge_all(e(1), e(2), e(3)) == e(1, 2, 3)
