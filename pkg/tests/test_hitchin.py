from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from samplers import int_vector, rational_vector
from strategies import three_forms
from symplie import coeff20, hitchin, lemmas
from symplie.errors import UnsupportedAlgebraError
from symplie.exterior import KForm, e, wedge
from symplie.salamon import parse_form
from symplie.symplectic import make_symplectic, primitive_decompose, standard_structure

STD = standard_structure()
TWISTED = make_symplectic("e14+2*e23-1/3*e56")
NEG = parse_form("e135-e146-e236-e245")


def test_zero_form():
    K, F, Q = hitchin.KFQ_def(STD, KForm(3))
    assert all(x == 0 for row in K for x in row)
    assert F.is_zero() and Q == 0


def test_Q_examples():
    assert hitchin.Q_def(STD, e(1, 3, 5) + e(2, 4, 6)) == 4
    assert hitchin.Q_def(STD, NEG) == -16


def test_complex_data_negative_Q():
    b = hitchin.complex_data(STD, NEG)
    assert b.has_complex
    assert b.norm_sq == pytest.approx(4.0)
    J = np.array(b.Jcomplex, dtype=float)
    assert np.allclose(J @ J, -np.eye(6), atol=1e-12)


def test_complex_data_positive_Q_flagged():
    b = hitchin.complex_data(STD, e(1, 3, 5) + e(2, 4, 6))
    assert b.nonnegative_Q and not b.has_complex
    assert b.Qscalar == 4


def test_closed_form_rejects_nonstandard_omega():
    with pytest.raises(UnsupportedAlgebraError):
        lemmas.KFQ_closed_form([1] * 20, TWISTED)


def test_coeff20_round_trip():
    rng = random.Random(0)
    for _ in range(50):
        c = rational_vector(rng)
        assert coeff20.from_form(coeff20.to_form(c)) == c
    assert coeff20.to_form(coeff20.as_list({"A": 1})) == e(1, 3, 5)
    assert coeff20.to_form(coeff20.as_list({"H": 1})) == e(2, 4, 6)


def test_closed_forms_agree_with_definitions():
    rng = random.Random(1)
    for _ in range(200):
        assert lemmas.compare_with_definition(rational_vector(rng)) == []


def test_pairing_expansion():
    rng = random.Random(2)
    for _ in range(100):
        c = rational_vector(rng)
        assert lemmas.pairing_half_Q(c) == Fraction(lemmas.Q_closed(c)) / 2
    # the literal M/N pairing drops the N M^ term and disagrees in general
    c = coeff20.as_list({"M": 1, "N": 2, "A": 1, "H": 1, "B": 3})
    assert lemmas.pairing_half_Q(c, literal=True) != lemmas.pairing_half_Q(c)


@pytest.mark.parametrize("ss", [STD, TWISTED])
@given(phi=three_forms())
@settings(max_examples=40, deadline=None)
def test_prop31_holds_exactly(ss, phi):
    assert hitchin.prop31_check(ss, phi) == (0, 0, 0)


@given(phi=three_forms())
@settings(max_examples=40, deadline=None)
def test_homogeneity(phi):
    c = Fraction(-3, 2)
    K, F, Q = hitchin.KFQ_def(STD, phi)
    Kc, Fc, Qc = hitchin.KFQ_def(STD, phi * c)
    assert Kc == [[x * c ** 2 for x in row] for row in K]
    assert Fc == F * c ** 3
    assert Qc == Q * c ** 4


@given(phi=three_forms())
@settings(max_examples=40, deadline=None)
def test_F_preserves_primitivity(phi):
    p = primitive_decompose(STD, phi)[0]
    assert wedge(STD.omega, hitchin.F_def(STD, p)).is_zero()


def test_omega_scaling_law():
    phi = parse_form("e135-e146-e236-e245+2*e123+e456+e124")
    c = Fraction(2)
    scaled = make_symplectic(STD.omega * c)
    K1, F1, Q1 = hitchin.KFQ_def(STD, phi)
    K2, F2, Q2 = hitchin.KFQ_def(scaled, phi)
    assert scaled.vol == 8
    assert K2 == [[x / c ** 3 for x in row] for row in K1]
    assert F2 == F1 / c ** 3
    assert Q2 == Q1 / c ** 6


def test_numeric_matches_exact():
    rng = random.Random(3)
    nh = hitchin.NumericHitchin(TWISTED)
    for _ in range(50):
        v = int_vector(rng)
        phi = KForm.from_vector(3, v)
        K, F, Q = hitchin.KFQ_def(TWISTED, phi)
        x = np.array(v, dtype=float)
        assert np.allclose(nh.K(x), np.array(K, dtype=float), rtol=1e-9, atol=1e-9)
        assert np.allclose(nh.F(x), np.array(F.to_vector(), dtype=float), rtol=1e-9, atol=1e-9)
        assert nh.Q(x) == pytest.approx(float(Q), rel=1e-9, abs=1e-9)


def test_gradient_check_and_variational_identity():
    rng = random.Random(4)
    for _ in range(20):
        c = [Fraction(x) for x in int_vector(rng, span=3)]
        chk = hitchin.hitchin_gradient_check(c, directions=20, seed=rng.randrange(1000))
        assert chk.max_rel_error <= 1e-6
        assert chk.variational_max_rel_error <= 1e-6
        assert chk.euler_residual == 0


def test_gradient_at_zero():
    grad = lemmas.Q_gradient_closed([0] * 20)
    assert all(v == 0 for v in grad.values())
    assert hitchin.hitchin_gradient_check([0] * 20).max_rel_error == 0
