"""Independent reference computations used by the verification harness and the tests.

Each oracle reaches its answer along a different route from the production
code: series inversion instead of Bernoulli tables, cell counts instead of the
closed Euler characteristic formula, and so on.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from .kawasaki_graphs import DecoratedGraph
from .series import Laurent
from .target_model import Coh, TargetGeometry


def _exp_minus_one_over_u(n: int) -> Laurent:
    """(e^u - 1)/u through u^(n-1)."""
    return Laurent({j: Fraction(1, factorial(j + 1)) for j in range(n)}, n)


def bernoulli_like_coeffs(n: int) -> list[Fraction]:
    """c_j = [u^j] (1/(e^u - 1) - 1/u) for j < n, by inverting (e^u - 1)/u."""
    inv = _exp_minus_one_over_u(n + 2).inverse()  # u/(e^u - 1)
    return [inv[j + 1] for j in range(n)]


def em_oracle(s: dict, lines: dict, target: TargetGeometry, order: int) -> Laurent:
    """exp( sum_n c_n z^n G^(n)(0) + G(0)/2 ), G(t) = sum_i mult_i sum_k s_k (x_i + t)^k / k!.

    Chern roots x_i = c_i w for E = sum mult_i O(c_i).  The sum over r >= 1 of G(-r z) plus half
    of G(0), resummed with 1/(e^{zD} - 1).  The 1/(zD) part contributes the antiderivative
    sum_k s_k ch_{k+1}(E) / z; its integration constant would need s_{-1} and is dropped.
    """
    dim = target.dim
    c = bernoulli_like_coeffs(order + 1)
    log: dict = {}
    for n in range(0, order + 1):
        acc = Coh.scalar(dim, 0)
        for cdeg, mult in lines.items():
            # x^j as a class: (c w)^j
            for k, sk in s.items():
                if k < n or not sk:
                    continue
                j = k - n
                if j > dim:
                    continue
                xj = Coh(dim, [0] * j + [Fraction(cdeg) ** j])
                acc = acc + xj * (sk * Fraction(mult, factorial(j)))
        coef = c[n] + (Fraction(1, 2) if n == 0 else 0)
        if acc and coef:
            log[n] = acc * coef
    anti = Coh.scalar(dim, 0)
    for cdeg, mult in lines.items():
        for k, sk in s.items():
            j = k + 1
            if sk and j <= dim:
                anti = anti + Coh(dim, [0] * j + [Fraction(cdeg) ** j]) * (sk * Fraction(mult, factorial(j)))
    if anti:
        log[-1] = anti
    return Laurent(log, order + 1).exp(one=Coh.scalar(dim, 1))


def euler_by_cells(G: DecoratedGraph) -> int:
    """Euler characteristic of the covering curve from a cell decomposition.

    Quotient vertex curve of genus g with n special points: one base point, 2g loops and n
    spokes to the special points, one face.  Lift: base point, loops, spokes and the face
    each have M_v preimages; a special point whose eigenvalue has order m has M_v/m
    preimages.  Each edge glues M/m point pairs and its smoothing removes one more unit per pair.
    """
    chi = 0
    for i, v in enumerate(G.vertices):
        specials = [G.flags[j] for j in G.flags_at(i)]
        verts = v.M + sum(v.M // f.zeta.order for f in specials)
        edges = v.M * (2 * v.genus + len(specials))
        faces = v.M
        chi += verts - edges + faces
    for a, b in G.edges:
        fa = G.flags[a]
        pairs = G.vertices[fa.vertex].M // fa.zeta.order
        chi -= pairs  # identify the node orbit
        chi -= pairs  # smooth every node
    return chi
