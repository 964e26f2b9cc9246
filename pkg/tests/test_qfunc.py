from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkadelic.exact_scalars import Cyclo, RootOfUnity
from qkadelic.qfunc import (QRational, adams_q, all_residues, expand_at, partial_fractions,
                            project_polarization, qrational_from_text, residue_at)

from _series_oracle import binom_coeffs, inv

ONE = RootOfUnity(0)
MINUS = RootOfUnity(Fraction(1, 2))


def geometric(z=ONE, j=1, c=Fraction(1), shift=0):
    return QRational.pole(c, z, j, shift)


@st.composite
def rationals(draw):
    f = QRational.const(Fraction(draw(st.integers(-3, 3))))
    for _ in range(draw(st.integers(1, 3))):
        z = RootOfUnity(Fraction(draw(st.integers(0, 3)), draw(st.sampled_from([1, 2, 3, 4]))))
        f = f + QRational.pole(Fraction(draw(st.integers(-3, 3))), z, draw(st.integers(1, 3)),
                               draw(st.integers(-2, 2)))
    return f


def test_partial_fraction_examples():
    q2 = QRational.monomial(Fraction(1), 2)
    pf = partial_fractions(q2)
    assert pf.poly_part == {2: 1} and not pf.fraction_parts
    f = QRational({0: Fraction(1)}, {ONE: 1, MINUS: 1})  # 1/(1 - q^2)
    pf = partial_fractions(f)
    assert pf.fraction_parts[ONE] == [Fraction(1, 2)] and pf.fraction_parts[MINUS] == [Fraction(1, 2)]
    pf = partial_fractions(geometric(shift=1))
    assert pf.poly_part == {0: -1} and pf.fraction_parts[ONE] == [1]


@given(rationals())
def test_partial_fractions_reassemble(f):
    assert partial_fractions(f).reassemble() == f


def test_residue_examples():
    f = QRational({-1: Fraction(1)}, {ONE: 1})  # 1/((1-q) q)
    assert residue_at(f, ONE) == -1
    g = QRational.monomial(Fraction(1), -1)
    assert residue_at(g, "zero") == 1
    assert residue_at(g, "infinity") == -1


@given(rationals())
def test_residue_theorem(f):
    total = sum(all_residues(f).values(), Cyclo(0))
    assert total == 0


def test_expand_at_examples():
    f = geometric()
    s = expand_at(f, ONE, 1, 1, 6)
    assert s.c == {-1: -1}
    # 1/(1 + q^{1/2}) in x = q - 1
    half = binom_coeffs(Fraction(1, 2), 8)
    want = inv([Fraction(1) + half[0]] + half[1:], 8)
    s = expand_at(f, MINUS, 2, 1, 7)
    assert [s[j] for j in range(8)] == want
    assert s[0] == Fraction(1, 2) and s[1] == Fraction(-1, 8)
    # 1/(1 + q) at zeta = -1: 1/(1 - q^{1/2})
    g = geometric(MINUS)
    s = expand_at(g, MINUS, 2, 1, 3)
    assert s[-1] == -2 and s[0] == Fraction(-1, 2)


def test_expand_at_order_mismatch():
    with pytest.raises(ValueError):
        expand_at(geometric(), MINUS, 3, 1, 4)


def test_adams_examples():
    f = geometric()
    assert adams_q(2, f) == QRational({0: Fraction(1)}, {ONE: 1, MINUS: 1})


@given(rationals(), rationals(), st.integers(1, 3))
def test_adams_multiplicative(f, g, r):
    assert adams_q(r, f * g) == adams_q(r, f) * adams_q(r, g)


@given(rationals())
def test_adams_composition(f):
    assert adams_q(2, adams_q(3, f)) == adams_q(6, f)


def test_projection_examples():
    one_minus_q = QRational({0: Fraction(1), 1: Fraction(-1)})
    plus, minus = project_polarization(one_minus_q)
    assert plus == one_minus_q and not minus
    plus, minus = project_polarization(geometric(shift=1))
    assert plus == QRational.const(Fraction(-1)) and minus == geometric()


@given(rationals())
def test_projection_idempotent(f):
    plus, minus = project_polarization(f)
    assert plus + minus == f
    p2, m2 = project_polarization(plus)
    assert p2 == plus and not m2


@given(rationals())
def test_text_round_trip(f):
    assert qrational_from_text(f.to_text()) == f
