"""Coefficient-ring arithmetic: field operations, derivations, and the
massless quotient."""

import pytest
import sympy as sp

from spinsplit.scalars import CoefficientError, Ring, eps


@pytest.fixture(scope="module")
def ring():
    return Ring()


@pytest.fixture(scope="module")
def mring():
    return Ring(massless=True)


def test_eps_values():
    assert eps(0, 1, 2) == 1
    assert eps(1, 0, 2) == -1
    assert eps(2, 0, 1) == 1
    assert eps(0, 0, 2) == 0


def test_field_axioms(ring):
    a = ring.H() * ring.P(0) + ring.m() ** 2
    b = ring.i() * ring.R()
    assert a + b - b == a
    assert a * ring.one() == a
    assert a * ring.zero() == ring.zero()
    assert (a * b) / b == a
    assert a - a == ring.zero()
    assert (-a) + a == ring.zero()


def test_inverse_roundtrip(ring):
    a = ring.H() + ring.R()
    assert a * a.inverse() == ring.one()
    assert (ring.one() / a) * a == ring.one()


def test_zero_inverse_raises(ring):
    with pytest.raises(CoefficientError):
        ring.zero().inverse()


def test_pow_negative_and_fractional_h(ring):
    # H^2 = P.P + m^2 holds as ring elements
    lhs = ring.H() ** 2
    rhs = sum((ring.P(a) ** 2 for a in range(3)), ring.m() ** 2)
    assert lhs == rhs
    assert ring.H() ** (-2) == (ring.H() ** 2).inverse()


def test_conjugate(ring):
    a = ring.i() * ring.P(1)
    assert a.conjugate() == -a
    assert ring.H().conjugate() == ring.H()
    assert (a * a).conjugate() == a * a


def test_phat_normalization(ring):
    s = sum((ring.Phat(a) ** 2 for a in range(3)), ring.zero())
    assert s == ring.one()


def test_boost_derivative_of_energy(ring):
    # the boost derivation sends H to i P_a (commutator convention)
    for a in range(3):
        assert ring.H().boost_derivative(a) == ring.i() * ring.P(a)
    # and P_b to i delta_ab H
    assert ring.P(0).boost_derivative(0) == ring.i() * ring.H()
    assert ring.P(1).boost_derivative(0) == ring.zero()


def test_rotation_derivative_of_momentum(ring):
    # the rotation derivation sends P_b to i eps_abc P_c
    got = ring.P(1).rotation_derivative(0)
    assert got == ring.i() * ring.P(2)
    assert ring.H().rotation_derivative(2) == ring.zero()
    assert ring.R().rotation_derivative(0) == ring.zero()


def test_derivations_are_leibniz(ring):
    a = ring.H() * ring.P(2)
    b = ring.R().inverse()
    prod = a * b
    for axis in range(3):
        lhs = prod.boost_derivative(axis)
        rhs = (a.boost_derivative(axis) * b
               + a * b.boost_derivative(axis))
        assert lhs == rhs


def test_massless_quotient_folds_energy(mring):
    # at m = 0 the energy coincides with |P|
    assert mring.H() == mring.R()
    assert mring.m() == mring.zero()
    s = sum((mring.P(a) ** 2 for a in range(3)), mring.zero())
    assert mring.H() ** 2 == s


def test_ring_mismatch_rejected(ring, mring):
    with pytest.raises((ValueError, TypeError)):
        ring.H() + mring.H()


def test_at_point_evaluation(ring):
    a = ring.H() ** 2 - ring.m() ** 2
    v = a.at_point(sp.Rational(7, 10))
    # P = (0, 0, 7/10) so H^2 - m^2 = 49/100
    expect = v.ring.from_expr(sp.Rational(49, 100))
    assert v == expect


def test_at_point_pole_raises(ring):
    # 1/P_1 has a pole on the (0, 0, kappa) ray
    with pytest.raises(CoefficientError):
        ring.P(0).inverse().at_point(1)


def test_repr_does_not_crash(ring):
    assert repr(ring.H() * ring.Phat(0))
    assert repr(ring)
