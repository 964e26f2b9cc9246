import cmath
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from qkadelic.exact_scalars import (Cyclo, RootOfUnity, bernoulli, cyclo_inverse, root_of_unity,
                                    roots_up_to)


def cyclo_elements(max_level=12):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_level))
        coeffs = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=1, max_size=n))
        x = Cyclo(0)
        for k, c in enumerate(coeffs):
            x = x + root_of_unity(n, k) * c
        return x
    return build()


def numeric(x: Cyclo) -> complex:
    return complex(x)


def test_trivial_roots():
    assert root_of_unity(1, 0) == Cyclo(1)
    assert root_of_unity(2, 1) == Cyclo(-1)


def test_fourth_root_powers():
    i = root_of_unity(4, 1)
    assert i ** 4 == Cyclo(1)
    assert i ** 2 == Cyclo(-1)


def test_inverse_examples():
    assert cyclo_inverse(Cyclo(1)) == Cyclo(1)
    assert cyclo_inverse(root_of_unity(4, 1)) == root_of_unity(4, 3)
    x = Cyclo(1) + root_of_unity(3, 1)
    assert x * cyclo_inverse(x) == Cyclo(1)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        cyclo_inverse(Cyclo(0))


@given(cyclo_elements(), cyclo_elements())
def test_arithmetic_matches_complex_oracle(x, y):
    # the floating evaluation is an independent model of the field operations
    assert cmath.isclose(numeric(x + y), numeric(x) + numeric(y), abs_tol=1e-9)
    assert cmath.isclose(numeric(x * y), numeric(x) * numeric(y), abs_tol=1e-9)


@given(cyclo_elements())
def test_inverse_property(x):
    if x:
        assert x * cyclo_inverse(x) == Cyclo(1)


@given(cyclo_elements())
def test_canonical_form_is_unique(x):
    # lifting to a larger level and coming back preserves equality and hashing
    lifted = x * root_of_unity(60, 0)
    assert lifted == x and hash(lifted) == hash(x)


def test_rational_mixing():
    assert Cyclo(Fraction(1, 3)) + Fraction(2, 3) == Cyclo(1)
    assert (root_of_unity(6, 1) + root_of_unity(6, 5)).is_rational()
    assert (root_of_unity(6, 1) + root_of_unity(6, 5)).to_fraction() == 1


def _bernoulli_by_recurrence(n):
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


def test_bernoulli_examples():
    assert bernoulli(0) == 1
    assert bernoulli(3) == 0
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)


def test_bernoulli_against_recurrence():
    ref = _bernoulli_by_recurrence(24)
    for n in range(25):
        assert bernoulli(n) == ref[n]


def test_bernoulli_negative_index():
    with pytest.raises(ValueError):
        bernoulli(-1)


def test_root_labels():
    z = RootOfUnity(Fraction(1, 4))
    assert z.order == 4 and (z ** 4).is_one() and z.inverse() == RootOfUnity(Fraction(3, 4))
    assert len(roots_up_to(4)) == 1 + 1 + 2 + 2
