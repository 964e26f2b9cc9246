"""Symplectic loop spaces: the global form, the adelic form, fake/cohomological/twisted
residue pairings, the adelic map, Darboux bases and propagators.

Laurent series near q = 1 are ``Laurent`` objects in x = q - 1 whose
coefficients are K-classes (or bare ground-ring scalars, read as classes on a
point).  Cohomological series are ``Laurent`` objects in z with ``Coh``
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exact_scalars import Cyclo, RootOfUnity, roots_up_to
from .lambda_ring import adams_scalar
from .qfunc import (
    QRational,
    _binom_cached,
    _coeff_adams,
    _expand_at_zero,
    _mul_scalar,
    _simp,
    expand_at,
    rou_value,
)
from .series import Laurent
from .target_model import Coh, KClass, TargetGeometry, adams_k, dual_basis, poincare_pair, twisted_pair


class TruncationError(ValueError):
    pass


class BalancedNodeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# coefficient pairings


def pair_plain(a, b):
    if isinstance(a, KClass):
        return poincare_pair(a, b)
    return a * b


def pair_twisted(r: int):
    def f(a, b):
        if isinstance(a, KClass):
            return twisted_pair(r, a, b)
        return a * b * r

    return f


def pair_coh(a: Coh, b: Coh):
    if not isinstance(a, Coh) and not isinstance(b, Coh):
        return a * b  # point target with plain scalars
    return (a * b).integrate()


# ---------------------------------------------------------------------------
# the global form on K


def _paired_qrational(f: QRational, g: QRational, pair) -> QRational:
    num: dict = {}
    for e1, a in f.num.items():
        for e2, b in g.num.items():
            v = pair(a, b)
            if v:
                e = e1 + e2
                num[e] = num[e] + v if e in num else v
    den = dict(f.den)
    for z, k in g.den.items():
        den[z] = den.get(z, 0) + k
    return QRational(num, den, 0)


def omega(f: QRational, g: QRational):
    """Omega(f, g) = -[Res_0 + Res_inf] (f(1/q), g(q)) dq/q."""
    h = _paired_qrational(f.q_inverse(), g, pair_plain)
    if not h:
        return 0
    hq = QRational({e - 1: c for e, c in h.num.items()}, dict(h.den), 0)
    res0 = _expand_at_zero(hq, 0)[-1]
    # Res_inf h dq = -[w^1] h(1/w)
    resinf = -(_expand_at_zero(hq.q_inverse(), 2)[1])
    return _simp(-(res0 + resinf))


@dataclass
class LoopSequence:
    entries: dict = field(default_factory=dict)  # r -> QRational

    def __getitem__(self, r):
        return self.entries.get(r)

    def scale(self, nu) -> "LoopSequence":
        return LoopSequence({r: f * nu for r, f in self.entries.items()})


def omega_inf(F: LoopSequence, G: LoopSequence):
    """sum_r (1/r) Psi^r Omega(f_r, g_r)."""
    out = 0
    for r, f in F.entries.items():
        g = G.entries.get(r)
        if g is None or not f or not g:
            continue
        w = omega(f, g)
        if w:
            out = out + adams_scalar(r, w) * Fraction(1, r)
    return out


# ---------------------------------------------------------------------------
# residue pairings near q = 1


def residue_product(a: Laurent, b: Laurent, pair, dq_over_q: bool = True):
    """Res_{x=0} pair(a(x), b(x)) (1 + x)^{-1} dx (or dx); only coefficients with i + j <= -1 are formed."""
    pa = a.prec if a.prec is not None else float("inf")
    pb = b.prec if b.prec is not None else float("inf")
    va, vb = a.valuation(), b.valuation()
    if min(va + pb, vb + pa) < 0:
        raise TruncationError("series precision too low for an exact residue")
    out = 0
    for i, x in a.c.items():
        for j, y in b.c.items():
            s = i + j
            if s > -1 or (not dq_over_q and s != -1):
                continue
            v = pair(x, y)
            if v:
                out = out + (v if (-1 - s) % 2 == 0 else -v)
    return out


def omega_fake(f: Laurent, g: Laurent):
    """Res_{q=1} (f(1/q), g(q)) dq/q."""
    return residue_product(f.compose_q_inverse(), g, pair_plain)


def omega_coh(f: Laurent, g: Laurent):
    """Res_{z=0} (f(-z), g(z)) dz with the plain cohomological pairing."""
    fm = Laurent({j: (c if j % 2 == 0 else -c) for j, c in f.c.items()}, f.prec)
    return residue_product(fm, g, pair_coh, dq_over_q=False)


@dataclass
class SectorVector:
    """Components of a Z_M-graded loop vector, by sector (roots of unity) or by character index."""

    M: int
    components: dict
    form: str = "sector"  # or "character"

    def __post_init__(self):
        if self.form not in ("sector", "character"):
            raise ValueError("form must be 'sector' or 'character'")


def omega_twisted(M: int, f: SectorVector, g: SectorVector):
    """(1/M) sum_zeta Res_{q=1} (f^(zeta)(1/q), g^(zeta^-1)(q))^(r(zeta)) dq/q."""
    if f.form != "sector" or g.form != "sector":
        raise ValueError("twisted pairing needs sector form")
    out = 0
    for z, fz in f.components.items():
        gz = g.components.get(z.inverse())
        if gz is None:
            continue
        r = M // z.order
        v = residue_product(fz.compose_q_inverse(), gz, pair_twisted(r))
        if v:
            out = out + v
    return _simp(out * Fraction(1, M)) if out else 0


def residue_pairing(kind: str, f, g, M: int | None = None):
    if kind == "fake":
        if not isinstance(f, Laurent) or not isinstance(g, Laurent):
            raise TypeError("fake pairing takes Laurent series in q - 1")
        return omega_fake(f, g)
    if kind == "cohomological":
        if not isinstance(f, Laurent) or not isinstance(g, Laurent):
            raise TypeError("cohomological pairing takes Laurent series in z")
        return omega_coh(f, g)
    if kind == "twisted":
        if not isinstance(f, SectorVector) or not isinstance(g, SectorVector):
            raise TypeError("twisted pairing takes SectorVectors")
        M = M or f.M
        if f.M != M or g.M != M:
            raise ValueError("sector vectors for a different M")
        return omega_twisted(M, f, g)
    raise ValueError(f"unknown pairing kind {kind!r}")


# ---------------------------------------------------------------------------
# adelic map and form


@dataclass
class AdelicVector:
    components: dict  # (zeta, r) -> Laurent in q - 1


def adelic_map(F: LoopSequence, m_max: int = 4, order: int = 12) -> AdelicVector:
    comps = {}
    for r, f in F.entries.items():
        if not f:
            continue
        for z in roots_up_to(m_max):
            comps[(z, r)] = expand_at(f, z, z.order, r, order)
    return AdelicVector(comps)


def omega_adelic(Fb: AdelicVector, Gb: AdelicVector, block: bool = False):
    """sum_zeta (1/m) sum_r (1/r) Res_{q=1} (F^(zeta,r)(1/q), G^(zeta^-1,r)(q))^(r) dq/q.

    ``block=True`` drops the 1/r, giving the per-block form in which the
    untwisted Darboux system pairs to -1 in every block.
    """
    out = 0
    for (z, r), a in Fb.components.items():
        b = Gb.components.get((z.inverse(), r))
        if b is None or not a or not b:
            continue
        if a.valuation() >= 0 and b.valuation() >= 0:
            continue
        v = residue_product(a.compose_q_inverse(), b, pair_twisted(r))
        if v:
            scale = Fraction(1, z.order) if block else Fraction(1, z.order * r)
            out = out + v * scale
    return _simp(out) if out else 0


# ---------------------------------------------------------------------------
# Darboux bases


def _x_power_series(a: Fraction, order: int) -> Laurent:
    """(1 + x)^a in x = q - 1, through x^order."""
    return _binom_cached(Fraction(a), order + 1)


def positive_basis_element(coeff, m: int, r: int, k: int, order: int) -> Laurent:
    """coeff * (q^{r/m} - 1)^k."""
    base = _x_power_series(Fraction(r, m), order) - 1
    s = base ** k if k else Laurent({0: Fraction(1)}, order + 1)
    return Laurent({j: _mul_scalar(coeff, v) for j, v in s.truncate(order + 1).c.items()}, order + 1)


def negative_basis_element(coeff, m: int, r: int, k: int, order: int) -> Laurent:
    """coeff * q^{kr/m} / (1 - q^{r/m})^{k+1}."""
    W = order + 1 + 2 * (k + 1)
    u = _x_power_series(Fraction(r, m), W - 1)
    den = (1 - u) ** (k + 1)
    s = _x_power_series(Fraction(k * r, m), W - 1) * den.inverse()
    s = s.truncate(order + 1)
    return Laurent({j: _mul_scalar(coeff, v) for j, v in s.c.items()}, order + 1)


def _basis_classes(target: TargetGeometry | None):
    if target is None:
        return [Fraction(1)], [Fraction(1)]
    return target.basis(), dual_basis(target)


def darboux_basis(space: str, k: int, alpha: int, zeta: RootOfUnity, r: int = 1, M: int | None = None,
                  target: TargetGeometry | None = None, order: int = 12):
    """(f, g): f^(zeta)_{k,alpha} and its partner g^(zeta^-1)_{k,alpha}.

    space 'adelic_block': Psi^r(phi^alpha (q^{1/m} - 1)^k) and Psi^r(phi_alpha q^{k/m}/(1 - q^{1/m})^{k+1}),
    as AdelicVectors in block r.  space 'twisted': the same with an extra factor r on g, as
    SectorVectors for Z_M, r = M / m.
    """
    m = zeta.order
    if space == "twisted":
        if M is None or M % m:
            raise ValueError("twisted space needs M divisible by the order of zeta")
        r = M // m
    elif space != "adelic_block":
        raise ValueError(f"unknown space {space!r}")
    basis, dual = _basis_classes(target)
    phi_up = _coeff_adams(r, dual[alpha])
    phi_dn = _coeff_adams(r, basis[alpha])
    f = positive_basis_element(phi_up, m, r, k, order)
    g = negative_basis_element(phi_dn, m, r, k, order)
    if space == "twisted":
        g = Laurent({j: c * r for j, c in g.c.items()}, g.prec)
        return SectorVector(M, {zeta: f}), SectorVector(M, {zeta.inverse(): g})
    return AdelicVector({(zeta, r): f}), AdelicVector({(zeta.inverse(), r): g})


# ---------------------------------------------------------------------------
# propagators


@dataclass
class PropagatorKernel:
    eta: RootOfUnity
    zeta: RootOfUnity
    r: int
    tensor: list  # matrix C with sum_{b,c} C[b][c] phi_b (x) phi_c  (scalar 1x1 on a point)
    coeffs: dict  # (i, j) -> scalar coefficient of X^i Y^j, X = x^{r/m} - 1, Y = y^{r/n} - 1
    order: int

    def constant_term(self):
        return self.coeffs.get((0, 0), 0)

    def swapped(self) -> "PropagatorKernel":
        t = [list(row) for row in zip(*self.tensor)]
        return PropagatorKernel(self.zeta, self.eta, self.r, t, {(j, i): v for (i, j), v in self.coeffs.items()}, self.order)


def _casimir(target: TargetGeometry | None, r: int) -> list:
    """Matrix of sum_alpha Psi^r phi_alpha (x) Psi^r phi^alpha in the phi (x) phi basis."""
    if target is None:
        return [[Fraction(1)]]
    basis, dual = target.basis(), dual_basis(target)
    n = target.rank
    out = [[0] * n for _ in range(n)]
    for a in range(n):
        u = adams_k(r, basis[a]).coords
        v = adams_k(r, dual[a]).coords
        for i in range(n):
            for j in range(n):
                if u[i] and v[j]:
                    out[i][j] = out[i][j] + u[i] * v[j]
    return out


def propagator_kernel(eta: RootOfUnity, zeta: RootOfUnity, r: int = 1, order: int = 4,
                      target: TargetGeometry | None = None) -> PropagatorKernel:
    """sum Psi^r phi_a (x) Psi^r phi^a / (1 - eta^-1 x^{r/m} zeta^-1 y^{r/n}) in X, Y through total degree ``order``."""
    if (eta * zeta).is_one():
        raise BalancedNodeError("eta * zeta = 1: balanced node has no propagator")
    c = _simp(rou_value((eta * zeta).inverse()))
    # 1/(1 - c (1+X)(1+Y)) = sum_n c^n (X + Y + XY)^n / (1 - c)^{n+1}
    inv1c = _simp(Cyclo(1) / Cyclo.coerce(1 - c)) if isinstance(c, Cyclo) else Fraction(1) / (1 - c)
    coeffs: dict = {}
    base = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    power = {(0, 0): 1}
    for n in range(order + 1):
        w = _simp(c ** n * inv1c ** (n + 1)) if n else inv1c
        for key, v in power.items():
            if sum(key) <= order:
                coeffs[key] = _simp(coeffs.get(key, 0) + v * w)
        nxt: dict = {}
        for (i, j), v in power.items():
            for (a, b), u in base.items():
                if i + a + j + b <= order:
                    nxt[(i + a, j + b)] = nxt.get((i + a, j + b), 0) + v * u
        power = nxt
    return PropagatorKernel(eta, zeta, r, _casimir(target, r), {k: v for k, v in coeffs.items() if v}, order)


def propagator_map(eta: RootOfUnity, zeta: RootOfUnity, k: int, alpha: int, order: int = 10,
                   r: int = 1, target: TargetGeometry | None = None, method: str = "closed") -> Laurent:
    """Image of g = phi_alpha q^{k/n}/(1 - q^{1/n})^{k+1} in K_+^(eta):
    Psi^r[phi_alpha C^k / (1 - C)^{k+1}] with C = eta^-1 zeta^-1 q^{1/m}, expanded in q - 1.

    method 'residue' evaluates -Res_{x=1} x^k/(1-x)^{k+1} (1 - C/x)^{-1} dx/x instead.
    """
    if (eta * zeta).is_one():
        raise BalancedNodeError("eta * zeta = 1: balanced node has no propagator")
    basis, _ = _basis_classes(target)
    phi = _coeff_adams(r, basis[alpha])
    m = eta.order
    c = _simp(rou_value((eta * zeta).inverse()))
    C = _x_power_series(Fraction(r, m), order) * c
    U = (1 - C).inverse()  # 1 - C is a unit: C(1) = c != 1
    if method == "closed":
        s = (C ** k) * (U ** (k + 1)) if k else U
    elif method == "residue":
        s = _residue_route(C, U, k, order)
    else:
        raise ValueError(f"unknown method {method!r}")
    s = s.truncate(order + 1)
    return Laurent({j: _mul_scalar(phi, v) for j, v in s.c.items()}, order + 1)


def _residue_route(C: Laurent, U: Laurent, k: int, order: int) -> Laurent:
    """-Res_{w=0} (1+w)^k (-w)^{-(k+1)} (1+w)^{-1} * (1+w)/((1-C) + w) dw, coefficients series in q - 1."""
    one = Laurent({0: Fraction(1)}, order + 1)
    prec = k + 1
    # 1/((1 - C) + w) = sum_j (-1)^j U^{j+1} w^j
    geo = {}
    Uj = U
    for j in range(prec):
        geo[j] = Uj if j % 2 == 0 else -Uj
        Uj = Uj * U
    series = Laurent(geo, prec)
    # (1+w)^k / (-w)^{k+1}
    pref = Laurent({j: one * _binom_int(k, j) * (-1) ** (k + 1) for j in range(k + 1)}, None).shift(-(k + 1))
    integrand = pref * series
    return -integrand[-1]


def _binom_int(n: int, j: int) -> int:
    from math import comb

    return comb(n, j)


# ---------------------------------------------------------------------------
# sectors and Fourier transform


def sector_root(M: int, a: int) -> RootOfUnity:
    """Label of the sector h_0^a of Z_M: r = (a, M), m = M/r, s = a/r, zeta primitive of order m with zeta^s = e^{2 pi i/m}."""
    a %= M
    if a == 0:
        return RootOfUnity(0)
    r = gcd(a, M)
    m, s = M // r, a // r
    t = pow(s, -1, m)
    return RootOfUnity(Fraction(t, m))


def sector_index(M: int, z: RootOfUnity) -> int:
    m = z.order
    if M % m:
        raise ValueError("root order does not divide M")
    r = M // m
    if m == 1:
        return 0
    t = z.angle.numerator
    s = pow(t, -1, m)
    return (r * s) % M


def fourier_sectors(v: SectorVector) -> SectorVector:
    """Toggle between character form f_chi (keys j in Z_M) and sector form f^(h) (keys zeta(h))."""
    M = v.M
    w = RootOfUnity(Fraction(1, M))
    if v.form == "character":
        out = {}
        for a in range(M):
            acc = None
            for j, fj in v.components.items():
                term = _scale(fj, rou_value(w ** (j * a)))
                acc = term if acc is None else acc + term
            out[sector_root(M, a)] = acc
        return SectorVector(M, out, "sector")
    out = {}
    for j in range(M):
        acc = None
        for z, fz in v.components.items():
            a = sector_index(M, z)
            term = _scale(fz, rou_value(w ** (-j * a)))
            acc = term if acc is None else acc + term
        out[j] = _scale(acc, Fraction(1, M))
    return SectorVector(M, out, "character")


def _scale(x, s):
    s = _simp(s)
    if isinstance(x, Laurent):
        return Laurent({j: _mul_scalar(c, s) for j, c in x.c.items()}, x.prec)
    return _simp(x * s) if not isinstance(x, KClass) else x * s
