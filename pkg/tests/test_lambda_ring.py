from fractions import Fraction

from hypothesis import given, strategies as st

from qkadelic.lambda_ring import GroundRingSpec, LambdaRing, adams, ideal_valuation, truncate

RING = LambdaRing(GroundRingSpec(novikov_count=2, truncation_order=6))


@st.composite
def elements(draw):
    x = RING.zero()
    for _ in range(draw(st.integers(0, 4))):
        a, b, h = draw(st.integers(0, 3)), draw(st.integers(0, 2)), draw(st.integers(0, 2))
        c = draw(st.fractions(min_value=-4, max_value=4, max_denominator=3))
        x = x + (RING.Q(1) ** a) * (RING.Q(2) ** b) * (RING.hbar() ** h) * c
    return x


@given(elements())
def test_adams_one_is_identity(x):
    assert adams(1, x) == x


def test_adams_on_novikov():
    Q = RING.Q()
    assert adams(2, Q ** 3) == Q ** 6


def test_adams_composition_on_hbar():
    h = RING.hbar()
    assert adams(2, adams(3, h)) == adams(6, h) == h ** 6


@given(elements(), elements(), st.integers(1, 4))
def test_adams_is_a_ring_map(x, y, r):
    assert adams(r, x + y) == adams(r, x) + adams(r, y)
    assert adams(r, x * y) == adams(r, x) * adams(r, y)


@given(elements(), st.integers(1, 3), st.integers(1, 3))
def test_adams_composition(x, r, s):
    assert adams(r, adams(s, x)) == adams(r * s, x)


def test_truncate_examples():
    Q = RING.Q()
    assert truncate(1 + Q + Q ** 2, 1) == 1 + Q
    x = 1 + Q * RING.hbar()
    assert truncate(x, RING.D) == x
    assert truncate(adams(3, Q), 2) == RING.zero()


def test_valuation_examples():
    Q = RING.Q()
    assert ideal_valuation(1 + Q) == 0
    assert ideal_valuation(Q * RING.hbar()) == 2


@given(elements(), st.integers(1, 5))
def test_valuation_grows_under_adams(x, r):
    y = adams(r, x)
    if y:
        assert ideal_valuation(y) >= r * ideal_valuation(x)


def test_sqrt_hbar_has_half_weight():
    assert ideal_valuation(RING.sqrt_hbar()) == Fraction(1, 2)
    assert adams(2, RING.sqrt_hbar()) == RING.hbar()


def test_truncation_drops_high_degree_products():
    Q = RING.Q()
    assert Q ** 7 == RING.zero()
