from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkadelic.exact_scalars import RootOfUnity, roots_up_to
from qkadelic.lambda_ring import GroundRingSpec, LambdaRing
from qkadelic.loopspace import (AdelicVector, BalancedNodeError, LoopSequence, SectorVector, adelic_map,
                                darboux_basis, fourier_sectors, omega, omega_adelic, omega_inf, omega_twisted,
                                propagator_kernel, propagator_map, residue_pairing)
from qkadelic.qfunc import QRational, expand_at
from qkadelic.series import Laurent
from qkadelic.target_model import load_target

from _series_oracle import binom_coeffs, inv

ONE = RootOfUnity(0)
MINUS = RootOfUnity(Fraction(1, 2))
I = RootOfUnity(Fraction(1, 4))
RING = LambdaRing(GroundRingSpec(novikov_count=1, truncation_order=6))


def c(x):
    return QRational.const(Fraction(x))


def test_omega_examples():
    g = QRational.pole(Fraction(1), ONE, 1)
    assert omega(c(1), g) == -1
    assert omega(g, g) == 0
    one_minus_q = QRational({0: Fraction(1), 1: Fraction(-1)})
    assert omega(one_minus_q, g) == 0


@st.composite
def rationals(draw):
    f = c(draw(st.integers(-2, 2)))
    for _ in range(draw(st.integers(1, 3))):
        z = RootOfUnity(Fraction(draw(st.integers(0, 3)), draw(st.sampled_from([1, 2, 4]))))
        f = f + QRational.pole(Fraction(draw(st.integers(-3, 3))), z, draw(st.integers(1, 2)), draw(st.integers(-2, 2)))
    return f


@given(rationals(), rationals())
def test_omega_antisymmetric(f, g):
    assert omega(f, g) == -omega(g, f)


def test_omega_inf_examples():
    Q = RING.Q()
    F = LoopSequence({2: QRational.const(RING.one())})
    G = LoopSequence({2: QRational.pole(Q, ONE, 1)})
    assert omega_inf(F, G) == -(Q ** 2) * Fraction(1, 2)
    F1 = LoopSequence({1: c(1)})
    G1 = LoopSequence({1: QRational.pole(Fraction(1), ONE, 1)})
    assert omega_inf(F1, G1) == omega(c(1), QRational.pole(Fraction(1), ONE, 1))
    assert omega_inf(F1, LoopSequence({2: QRational.pole(Fraction(1), ONE, 1)})) == 0


def test_residue_pairing_examples():
    g = Laurent({-1: Fraction(-1)}, 6)
    assert residue_pairing("fake", Laurent({0: Fraction(1)}, 6), g) == -1
    # g(z) = -(e^z - 1)^{-1}
    ez1 = Laurent({j: Fraction(1, __import__("math").factorial(j)) for j in range(1, 9)}, 9)
    assert residue_pairing("cohomological", Laurent({0: Fraction(1)}, 8), -ez1.inverse()) == -1
    f, g = darboux_basis("twisted", 0, 0, ONE, M=2)
    assert residue_pairing("twisted", f, g) == -1
    with pytest.raises(TypeError):
        residue_pairing("fake", f, g)


def test_adelic_map_examples():
    F = LoopSequence({1: QRational.pole(Fraction(1), ONE, 1)})
    A = adelic_map(F, 2, 6)
    assert A.components[(ONE, 1)].c == {-1: -1}
    half = binom_coeffs(Fraction(1, 2), 7)
    want = inv([1 + half[0]] + half[1:], 7)
    assert [A.components[(MINUS, 1)][j] for j in range(7)] == want
    assert all(r == 1 for (_, r) in A.components)
    P = adelic_map(LoopSequence({1: QRational({0: Fraction(1), 1: Fraction(-1)})}), 4, 6)
    assert all(s.valuation() >= 0 for s in P.components.values())


def test_adelic_map_relative_linearity():
    Q = RING.Q()
    g = QRational.pole(RING.one(), MINUS, 2)
    A = adelic_map(LoopSequence({2: g}), 2, 5)
    B = adelic_map(LoopSequence({2: g * Q}), 2, 5)
    for key, s in A.components.items():
        assert B.components[key] == s.map_coeffs(lambda x: x * Q ** 2)


def test_omega_adelic_examples():
    F = adelic_map(LoopSequence({1: c(1)}), 4, 8)
    G = adelic_map(LoopSequence({1: QRational.pole(Fraction(1), ONE, 1)}), 4, 8)
    assert omega_adelic(F, G) == -1
    H = adelic_map(LoopSequence({1: QRational.pole(Fraction(1), MINUS, 1)}), 4, 8)
    assert omega_adelic(F, H) == -1
    assert omega_adelic(G, G) == 0


@given(rationals(), st.sampled_from([c(1), QRational.monomial(Fraction(2), -2), QRational.monomial(Fraction(-1), 3)]),
       st.integers(1, 2))
def test_adelic_map_is_symplectic(g, f, r):
    _, minus = __import__("qkadelic.qfunc", fromlist=["project_polarization"]).project_polarization(g)
    lhs = omega_inf(LoopSequence({r: f}), LoopSequence({r: minus}))
    rhs = omega_adelic(adelic_map(LoopSequence({r: f}), 4, 10), adelic_map(LoopSequence({r: minus}), 4, 10))
    assert lhs == rhs


def test_darboux_examples():
    f, g = darboux_basis("adelic_block", 0, 0, ONE)
    assert f.components[(ONE, 1)].c == {0: 1}
    assert g.components[(ONE, 1)].c == {-1: -1}
    assert omega_adelic(f, g, block=True) == -1
    for k in range(4):
        for l in range(4):
            fk, _ = darboux_basis("adelic_block", k, 0, MINUS)
            _, gl = darboux_basis("adelic_block", l, 0, MINUS)
            assert omega_adelic(fk, gl, block=True) == (-1 if k == l else 0)
    f, g = darboux_basis("twisted", 0, 0, ONE, M=2)
    assert omega_twisted(2, f, g) == -1


@pytest.mark.parametrize("name", ["point", "p1"])
def test_twisted_pairing_normalisations_agree(name):
    # the sector form (1/M, Euler ratio, factor r on g) and the block form agree on Darboux pairs
    T = load_target(name)
    for M in (2, 3, 4):
        for z in roots_up_to(M):
            if M % z.order:
                continue
            for k in range(3):
                f, g = darboux_basis("twisted", k, 0, z, M=M, target=T)
                a, b = darboux_basis("adelic_block", k, 0, z, r=M // z.order, target=T)
                assert omega_twisted(M, f, g) == omega_adelic(a, b, block=True) == -1


def test_propagator_kernel_examples():
    K = propagator_kernel(MINUS, ONE, 1, 3)
    assert K.constant_term() == Fraction(1, 2)
    K2 = propagator_kernel(ONE, MINUS, 1, 3)
    assert K.swapped().coeffs == K2.coeffs
    assert propagator_kernel(I, I, 1, 2).constant_term() == Fraction(1, 2)
    with pytest.raises(BalancedNodeError):
        propagator_kernel(I, I.inverse())


def test_propagator_map_examples():
    s = propagator_map(MINUS, ONE, 0, 0, 6)
    half = binom_coeffs(Fraction(1, 2), 7)
    assert [s[j] for j in range(7)] == inv([1 + half[0]] + half[1:], 7)
    gen = QRational.pole(Fraction(1), ONE, 1)
    assert s == expand_at(gen, MINUS, 2, 1, 6)
    assert propagator_map(MINUS, ONE, 1, 0, 6) == propagator_map(MINUS, ONE, 1, 0, 6, method="residue")


def test_fourier_examples():
    one = Laurent({0: Fraction(1)}, None)
    v = SectorVector(1, {0: one}, "character")
    assert fourier_sectors(v).components == {ONE: one}
    v = SectorVector(2, {0: one, 1: Laurent({}, None)}, "character")
    out = fourier_sectors(v)
    assert out.components[ONE] == one and out.components[MINUS] == one


@given(st.integers(1, 12), st.data())
def test_fourier_round_trip(M, data):
    comps = {j: Laurent({0: Fraction(data.draw(st.integers(-5, 5))), 1: Fraction(data.draw(st.integers(-5, 5)))}, None)
             for j in range(M)}
    v = SectorVector(M, comps, "character")
    back = fourier_sectors(fourier_sectors(v))
    assert all(back.components[j] == comps[j] for j in range(M))
