from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkadelic.exact_scalars import RootOfUnity, root_of_unity
from qkadelic.kawasaki_graphs import (DecoratedGraph, Flag, GraphBounds, GraphError, Vertex, enumerate_graphs,
                                      graph_weights, h_of, hurwitz_euler, input_substitution, monodromy_balanced,
                                      sector_of, validate_graph)
from qkadelic.series import Laurent
from qkadelic.target_model import load_target

from _series_oracle import binom_coeffs

ONE = RootOfUnity(0)
MINUS = RootOfUnity(Fraction(1, 2))
I = RootOfUnity(Fraction(1, 4))


def cycles_of_translation(h, M):
    """Number of cycles of x -> x + h on Z_M, counted by walking the permutation."""
    seen, count = set(), 0
    for start in range(M):
        if start in seen:
            continue
        count += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = (x + h) % M
    return count


def euler_by_monodromy(G):
    """Riemann-Hurwitz with explicit monodromy permutations, then glue and smooth every node orbit."""
    chi = 0
    for i, v in enumerate(G.vertices):
        flags = [G.flags[j] for j in G.flags_at(i)]
        chi += v.M * (2 - 2 * v.genus - len(flags))
        chi += sum(cycles_of_translation(h_of(v.M, f.zeta), v.M) for f in flags)
    for a, _ in G.edges:
        f = G.flags[a]
        orbit = cycles_of_translation(h_of(G.vertices[f.vertex].M, f.zeta), G.vertices[f.vertex].M)
        chi -= 2 * orbit
    return chi


def test_sector_examples():
    lab = sector_of(4, 1)
    assert (lab.r, lab.m, lab.s, lab.zeta) == (1, 4, 1, I)
    lab = sector_of(4, 2)
    assert (lab.r, lab.m, lab.s, lab.zeta) == (2, 2, 1, MINUS)


@pytest.mark.parametrize("M", range(1, 13))
def test_sector_round_trip(M):
    labels = [sector_of(M, p) for p in range(M)]
    assert [h_of(M, lab.zeta) for lab in labels] == list(range(M))
    assert len({lab.zeta for lab in labels}) == M
    assert all(lab.zeta.order == lab.m and lab.m * lab.r == M for lab in labels)
    assert all((root_of_unity(lab.m, lab.zeta.angle.numerator) ** lab.s) == root_of_unity(lab.m, 1) for lab in labels)


def one_vertex(M, genus, flags):
    return DecoratedGraph([Vertex(genus, (0,), M)], [Flag(0, r, z) for r, z in flags], [])


def two_vertex_example():
    return DecoratedGraph(
        [Vertex(0, (0,), 4), Vertex(0, (0,), 4)],
        [Flag(0, 1, I, "edge"), Flag(0, 1, I.inverse()), Flag(1, 1, I, "edge"), Flag(1, 1, I.inverse())],
        [(0, 2)],
    )


def test_validation_examples():
    assert validate_graph(one_vertex(1, 0, [(1, ONE)] * 3)) == []
    bad = DecoratedGraph([Vertex(0, (0,), 4), Vertex(0, (0,), 4)],
                         [Flag(0, 1, I, "edge"), Flag(1, 1, I.inverse(), "edge")], [(0, 1)])
    assert any(v.startswith("balanced-edge:") for v in validate_graph(bad))
    bad = DecoratedGraph([Vertex(0, (0,), 2), Vertex(0, (0,), 2)],
                         [Flag(0, 1, MINUS, "edge"), Flag(1, 2, ONE, "edge")], [(0, 1)])
    assert any(v.startswith("order-mismatch:") for v in validate_graph(bad))
    with pytest.raises(GraphError):
        hurwitz_euler(bad)


def test_euler_examples():
    assert hurwitz_euler(one_vertex(1, 0, [(1, ONE)] * 3)) == 2
    assert hurwitz_euler(one_vertex(2, 0, [(1, MINUS)] * 2)) == 2
    G = two_vertex_example()
    assert hurwitz_euler(G) == 2 == euler_by_monodromy(G)


def test_weight_examples():
    w = graph_weights(two_vertex_example())
    assert w.minus_eu_half_terms == (-8, 8, -2, 1) and w.minus_eu_half == -1
    w = graph_weights(one_vertex(1, 2, []))
    assert w.minus_eu_half == 1 and w.homogeneity_cancels


@st.composite
def graphs(draw):
    nv = draw(st.integers(1, 3))
    verts = [Vertex(draw(st.integers(0, 2)), (draw(st.integers(0, 2)),), draw(st.integers(1, 6))) for _ in range(nv)]
    flags = []

    def flag_at(v, kind, r=None):
        M = verts[v].M
        divisors = [d for d in range(1, M + 1) if M % d == 0]
        r = draw(st.sampled_from(divisors)) if r is None else r
        m = M // r
        t = draw(st.sampled_from([t for t in range(m) if m == 1 or __import__("math").gcd(t, m) == 1]))
        flags.append(Flag(v, r, RootOfUnity(Fraction(t, m)), kind))
        return len(flags) - 1

    for v in range(nv):
        for _ in range(draw(st.integers(0, 3))):
            flag_at(v, "marked")
    edges = []
    for _ in range(draw(st.integers(0, 2))):
        a, b = draw(st.integers(0, nv - 1)), draw(st.integers(0, nv - 1))
        common = [r for r in range(1, 7) if verts[a].M % r == 0 and verts[b].M % r == 0]
        r = draw(st.sampled_from(common))
        fa, fb = flag_at(a, "edge", r), flag_at(b, "edge", r)
        edges.append((fa, fb))
    G = DecoratedGraph(verts, flags, edges)
    return G


@given(graphs())
def test_euler_against_monodromy_oracle(G):
    if validate_graph(G):
        with pytest.raises(GraphError):
            hurwitz_euler(G)
        return
    assert hurwitz_euler(G) == euler_by_monodromy(G)


@given(graphs())
def test_four_terms_recombine(G):
    if validate_graph(G):
        return
    w = graph_weights(G)
    assert w.minus_eu_half * -2 == w.eu
    assert w.homogeneity_cancels
    # flag and edge terms make up whatever the vertex terms leave of -eu/2
    t1, t2, t3, t4 = w.minus_eu_half_terms
    vertex_part = sum(Fraction(v.M * (v.genus - 1)) + Fraction(v.M * G.n_hat(i), 2) for i, v in enumerate(G.vertices))
    assert t3 + t4 == Fraction(-w.eu, 2) - vertex_part


@given(graphs())
def test_balanced_monodromy_gives_even_euler_characteristic(G):
    if validate_graph(G) or not all(monodromy_balanced(G, v) for v in range(len(G.vertices))):
        return
    assert hurwitz_euler(G) % 2 == 0


@given(graphs())
def test_serialization_round_trip(G):
    H = DecoratedGraph.from_text(G.to_text())
    assert H.to_json() == G.to_json()
    assert DecoratedGraph.from_json(G.to_json()).to_text() == G.to_text()


def test_enumeration_small_bounds():
    tiny = list(enumerate_graphs(GraphBounds(1, 1, 0, 0, 1)))
    assert len(tiny) == 2  # no flags, or one marked flag with zeta = 1
    # M_v <= 2, at most one flag per vertex: five one-vertex graphs
    # (M=1: none or zeta=1; M=2: none, (r=1, zeta=-1), (r=2, zeta=1)) and the single unbalanced edge M=1 -- M=2
    small = list(enumerate_graphs(GraphBounds(2, 2, 0, 0, 1)))
    assert len(small) == 6
    assert sum(1 for G in small if len(G.edges) == 1 and len(G.vertices) == 2) == 1


def test_enumeration_output_is_valid_and_distinct():
    from qkadelic.kawasaki_graphs import canonical_form
    gs = list(enumerate_graphs(GraphBounds(3, 2, 0, 0, 2)))
    assert all(validate_graph(G) == [] for G in gs)
    assert len({canonical_form(G) for G in gs}) == len(gs)


def test_input_substitution_dilaton():
    for M in range(1, 6):
        got = input_substitution({}, ONE, M, 8)
        want = [-c for c in binom_coeffs(M, 9)]
        want[0] += 1
        assert [got[j] for j in range(9)] == want


@pytest.mark.parametrize("zeta,r", [(ONE, 2), (MINUS, 1), (I, 3), (RootOfUnity(Fraction(1, 3)), 2)])
def test_input_substitution_linear(zeta, r):
    c = Fraction(5, 3)
    got = input_substitution({1: c}, zeta, r, 6)
    # 1 - zeta^{-1} (1 - c) q^{r/m}
    zinv = zeta.inverse().value()
    b = binom_coeffs(Fraction(r, zeta.order), 7)
    want = [-(zinv * (1 - c) * x) for x in b]
    want[0] = want[0] + 1
    assert all(got[j] == want[j] for j in range(7))


def test_input_substitution_additive():
    T = load_target("p1")
    t1, t2 = {1: T.P()}, {2: T.one() * 3, -1: T.P() * -1}
    both = {1: T.P(), 2: T.one() * 3, -1: T.P() * -1}
    s = lambda t: input_substitution(t, MINUS, 2, 6, zero=T.zero())
    base = s({})
    assert s(both) - base == (s(t1) - base) + (s(t2) - base)
