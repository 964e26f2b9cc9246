"""Rational functions of q with poles only at 0, infinity and roots of unity.

Coefficients are K-classes (or bare ground-ring scalars).  Denominators are
kept factored as products of (1 - q/zeta)^k, which makes partial fractions,
residues and local expansions direct to read off.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .exact_scalars import Cyclo, RootOfUnity
from .lambda_ring import adams_scalar
from .series import Laurent, binomial_series
from .target_model import KClass, adams_k


def rou_value(z: RootOfUnity):
    """Value of a root of unity, as a Fraction when it is +-1."""
    if z.angle == 0:
        return Fraction(1)
    if z.angle == Fraction(1, 2):
        return Fraction(-1)
    return z.value()


def _simp(c):
    if isinstance(c, Cyclo) and c.is_rational():
        return c.to_fraction()
    return c


def _coeff_adams(r: int, c):
    if isinstance(c, KClass):
        return adams_k(r, c)
    return adams_scalar(r, c)


def _zero_like(c):
    if isinstance(c, KClass):
        return c.target.zero()
    return 0


def _mul_scalar(c, s):
    s = _simp(s)
    if isinstance(s, Fraction) and s == 1:
        return c
    return c * s


class QRational:
    """N(q) / prod_zeta (1 - q/zeta)^{k_zeta} with N a Laurent polynomial."""

    __slots__ = ("num", "den", "zero")

    def __init__(self, num: dict, den: dict | None = None, zero=None, reduce: bool = True):
        num = {e: c for e, c in num.items() if c}
        den = {z: k for z, k in (den or {}).items() if k}
        if any(k < 0 for k in den.values()):
            raise ValueError("denominator multiplicities must be positive")
        if zero is None:
            zero = _zero_like(next(iter(num.values()))) if num else 0
        self.zero = zero
        if not num:
            den = {}
        self.num, self.den = num, den
        if reduce:
            self._reduce()

    # constructors ------------------------------------------------------
    @classmethod
    def const(cls, c) -> "QRational":
        return cls({0: c}, {}, _zero_like(c))

    @classmethod
    def monomial(cls, c, e: int) -> "QRational":
        return cls({e: c}, {}, _zero_like(c))

    @classmethod
    def pole(cls, c, zeta: RootOfUnity, j: int, shift: int = 0) -> "QRational":
        """c q^shift / (1 - q/zeta)^j."""
        return cls({shift: c}, {zeta: j}, _zero_like(c))

    # basic -------------------------------------------------------------
    def _reduce(self):
        for z in sorted(self.den):
            while self.den.get(z, 0) and not _eval_laurent(self.num, z, self.zero):
                self.num = _divide_root(self.num, z, self.zero)
                self.den[z] -= 1
                if not self.den[z]:
                    del self.den[z]

    def poles(self) -> list[RootOfUnity]:
        return sorted(self.den)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, QRational):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.den.items())))

    def __repr__(self):
        n = " + ".join(f"({c})q^{e}" for e, c in sorted(self.num.items())) or "0"
        d = "*".join(f"(1-q/{z})^{k}" for z, k in sorted(self.den.items()))
        return f"QRational[{n}]" + (f"/[{d}]" if d else "")

    def __neg__(self):
        return QRational({e: -c for e, c in self.num.items()}, dict(self.den), self.zero, reduce=False)

    def _over(self, den: dict) -> dict:
        """Numerator rewritten over a larger denominator."""
        num = dict(self.num)
        for z, k in den.items():
            extra = k - self.den.get(z, 0)
            for _ in range(extra):
                num = _mul_root_factor(num, z)
        return num

    def __add__(self, other):
        if not isinstance(other, QRational):
            other = QRational.const(other)
        if not other.num:
            return self
        if not self.num:
            return other
        den = dict(self.den)
        for z, k in other.den.items():
            den[z] = max(den.get(z, 0), k)
        a, b = self._over(den), other._over(den)
        num = dict(a)
        for e, c in b.items():
            num[e] = num[e] + c if e in num else c
        return QRational(num, den, self.zero)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QRational):
            other = QRational.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QRational):
            return QRational({e: c * other for e, c in self.num.items()}, dict(self.den), self.zero)
        num: dict = {}
        for e1, c1 in self.num.items():
            for e2, c2 in other.num.items():
                e = e1 + e2
                c = c1 * c2
                num[e] = num[e] + c if e in num else c
        den = dict(self.den)
        for z, k in other.den.items():
            den[z] = den.get(z, 0) + k
        zero = self.zero if isinstance(self.zero, KClass) else other.zero
        return QRational(num, den, zero)

    def __rmul__(self, other):
        return QRational({e: other * c for e, c in self.num.items()}, dict(self.den), self.zero)

    def map_coeffs(self, f) -> "QRational":
        return QRational({e: f(c) for e, c in self.num.items()}, dict(self.den), self.zero)

    def q_inverse(self) -> "QRational":
        """f(1/q).  (1 - 1/(q z)) = -(1 - q z) / (q z)."""
        num = {-e: c for e, c in self.num.items()}
        for z, k in self.den.items():
            s = rou_value(z)
            for _ in range(k):
                num = {e + 1: _mul_scalar(c, -s) for e, c in num.items()}
        den = {z.inverse(): k for z, k in self.den.items()}
        return QRational(num, den, self.zero)

    # serialization -----------------------------------------------------
    def to_text(self) -> str:
        """Numerator coefficients and factored denominator, exact."""
        parts = [f"{e}:{_coeff_text(c)}" for e, c in sorted(self.num.items())]
        dens = [f"{z.angle}^{k}" for z, k in sorted(self.den.items())]
        return "num " + " ; ".join(parts) + " | den " + " ; ".join(dens)


def _coeff_text(c) -> str:
    if isinstance(c, KClass):
        return "[" + ",".join(_coeff_text(x) for x in c.coords) + "]"
    if isinstance(c, Cyclo):
        return f"cyc{c.level}(" + ",".join(str(x) for x in c.coords) + ")"
    return str(c)


def qrational_from_text(text: str, target=None) -> QRational:
    """Inverse of QRational.to_text for rational/cyclotomic coefficients."""
    head, _, tail = text.partition("|")
    num = {}
    body = head.strip()[3:].strip()
    if body:
        for part in body.split(";"):
            e, _, c = part.strip().partition(":")
            num[int(e)] = _parse_coeff(c.strip(), target)
    den = {}
    dbody = tail.strip()[3:].strip()
    if dbody:
        for part in dbody.split(";"):
            a, _, k = part.strip().partition("^")
            den[RootOfUnity(Fraction(a))] = int(k)
    zero = target.zero() if target is not None else 0
    return QRational(num, den, zero)


def _parse_coeff(s: str, target):
    if s.startswith("["):
        items = _split_top(s[1:-1])
        return KClass(target, [_parse_coeff(x, None) for x in items])
    if s.startswith("cyc"):
        level, _, rest = s[3:].partition("(")
        return Cyclo(level=int(level), coords=[Fraction(x) for x in rest.rstrip(")").split(",")])
    return Fraction(s)


def _split_top(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch in "(["
        depth -= ch in ")]"
        cur += ch
    if cur:
        out.append(cur)
    return out


def _eval_laurent(num: dict, z: RootOfUnity, zero):
    s = zero
    for e, c in num.items():
        s = s + _mul_scalar(c, rou_value(z ** e))
    return s


def _mul_root_factor(num: dict, z: RootOfUnity) -> dict:
    """num * (1 - q/z)."""
    inv = rou_value(z.inverse())
    out = dict(num)
    for e, c in num.items():
        t = -_mul_scalar(c, inv)
        out[e + 1] = out[e + 1] + t if e + 1 in out else t
    return {e: c for e, c in out.items() if c}


def _divide_root(num: dict, z: RootOfUnity, zero) -> dict:
    """num / (1 - q/z), assuming num(z) = 0.

    num = q^lo p(q);  p(q) = (q - z) s(q);  1 - q/z = -(q - z)/z  so the quotient is -z q^lo s(q).
    """
    lo, hi = min(num), max(num)
    zv = rou_value(z)
    # synthetic division of p by (q - z), highest degree first
    s: dict = {}
    carry = zero
    for d in range(hi - lo, 0, -1):
        carry = carry * zv + num.get(lo + d, zero) if d != hi - lo else num[hi]
        s[d - 1] = carry
    return {lo + d: -_mul_scalar(c, zv) for d, c in s.items() if c}


# ---------------------------------------------------------------------------
# partial fractions and residues


class PartialFractionForm:
    __slots__ = ("poly_part", "fraction_parts", "zero")

    def __init__(self, poly_part: dict, fraction_parts: dict, zero):
        self.poly_part = poly_part
        self.fraction_parts = fraction_parts  # zeta -> [c_1, ..., c_k], c_j coefficient of (1-q/zeta)^-j
        self.zero = zero

    def reassemble(self) -> QRational:
        out = QRational(dict(self.poly_part), {}, self.zero)
        for z, cs in self.fraction_parts.items():
            for j, c in enumerate(cs, start=1):
                if c:
                    out = out + QRational.pole(c, z, j)
        return out

    def __repr__(self):
        return f"PartialFractionForm(poly={self.poly_part}, parts={self.fraction_parts})"


def _local_at_root(f: QRational, z: RootOfUnity, prec: int) -> Laurent:
    """f near q = z in the variable t with q = z (1 - t), i.e. t = 1 - q/z."""
    k = f.den.get(z, 0)
    zv = rou_value(z)
    num = Laurent({}, prec + k)
    for e, c in f.num.items():
        # q^e = z^e (1 - t)^e
        b = _binom_cached(Fraction(e), prec + k)
        b = Laurent({j: v * (-1) ** j for j, v in b.c.items()}, prec + k)
        num = num + _series_times_coeff(b, _mul_scalar(c, rou_value(z ** e)))
    den = Laurent({0: Fraction(1)}, prec + k)
    for w, kw in f.den.items():
        if w == z:
            continue
        # 1 - z (1 - t)/w = (1 - z/w) + (z/w) t
        a = _simp(zv * rou_value(w.inverse()))
        fac = Laurent({0: _simp(1 - a), 1: a}, prec + k)
        for _ in range(kw):
            den = den * fac
    out = num * den.inverse()
    return out.shift(-k)


def _series_times_coeff(s: Laurent, c) -> Laurent:
    return Laurent({j: _mul_scalar(c, v) for j, v in s.c.items()}, s.prec)


def partial_fractions(f: QRational) -> PartialFractionForm:
    parts = {}
    for z, k in sorted(f.den.items()):
        loc = _local_at_root(f, z, 0)
        parts[z] = [loc[-j] if -j in loc.c else f.zero for j in range(1, k + 1)]
    # Laurent-polynomial part: negative powers from the expansion at 0, the rest from infinity
    poly = {}
    at0 = _expand_at_zero(f, 0)
    for e, c in at0.c.items():
        if e < 0 and c:
            poly[e] = c
    atinf = _expand_at_infinity(f, 1)
    for e, c in atinf.c.items():
        if e <= 0 and c:
            poly[-e] = c
    return PartialFractionForm(poly, parts, f.zero)


def _expand_at_zero(f: QRational, prec: int) -> Laurent:
    """f as a Laurent series in q, up to q^prec (exclusive)."""
    if not f.num:
        return Laurent({}, prec)
    lo = min(f.num)
    width = max(prec - lo, 0)
    inv = Laurent({0: Fraction(1)}, width)
    for z, k in f.den.items():
        zi = rou_value(z.inverse())
        geo = Laurent({j: _simp(zi ** j) if j else Fraction(1) for j in range(width)}, width)
        for _ in range(k):
            inv = inv * geo
    return _laurent_coeff_mul(Laurent(dict(f.num), None), inv, prec)


def _laurent_coeff_mul(a: Laurent, b: Laurent, prec: int) -> Laurent:
    """a (coefficients K-classes) times b (scalar series), truncated at prec."""
    out: dict = {}
    for i, x in a.c.items():
        for j, y in b.c.items():
            if b.prec is not None and j >= b.prec:
                continue
            e = i + j
            if e >= prec:
                continue
            t = _mul_scalar(x, y)
            out[e] = out[e] + t if e in out else t
    return Laurent(out, prec)


def _expand_at_infinity(f: QRational, prec: int) -> Laurent:
    """f(1/w) as a Laurent series in w, up to w^prec (exclusive)."""
    return _expand_at_zero(f.q_inverse(), prec)


def residue_at(f: QRational, point) -> object:
    """Residue of f(q) dq at 'zero', 'infinity' or a RootOfUnity."""
    if point == "zero":
        return _expand_at_zero(f, 0)[-1]
    if point == "infinity":
        # Res_inf f dq = Res_{w=0} -f(1/w) dw / w^2
        return -(_expand_at_infinity(f, 2)[1])
    if isinstance(point, RootOfUnity):
        if point not in f.den:
            return f.zero
        # q = z (1 - t): dq = -z dt
        loc = _local_at_root(f, point, 0)
        c1 = loc.c.get(-1, f.zero)
        return -_mul_scalar(c1, rou_value(point)) if c1 else f.zero
    raise ValueError(f"unknown residue point {point!r}")


def all_residues(f: QRational) -> dict:
    out = {"zero": residue_at(f, "zero"), "infinity": residue_at(f, "infinity")}
    for z in f.poles():
        out[z] = residue_at(f, z)
    return out


# ---------------------------------------------------------------------------
# expansion near q = 1


@lru_cache(maxsize=4096)
def _binom_cached(a: Fraction, prec: int) -> Laurent:
    return binomial_series(a, prec)


def expand_at(f: QRational, zeta: RootOfUnity, m: int, r: int, order: int) -> Laurent:
    """Psi^r( f(zeta^{-1} q^{1/m}) ) as a Laurent series in x = q - 1, through x^order.

    q^{1/m} is the formal branch (1 + x)^{1/m}; after Psi^r it becomes (1 + x)^{r/m}.
    """
    if m != zeta.order:
        raise ValueError(f"m = {m} is not the order of {zeta}")
    if r < 1:
        raise ValueError("r >= 1 required")
    zinv = zeta.inverse()
    # factors (1 - zeta^{-1} q^{r/m} / w) that vanish at q = 1
    k = sum(kw for w, kw in f.den.items() if (zinv * w.inverse()).is_one())
    W = order + 1 + 2 * k
    a = Fraction(r, m)
    den = Laurent({0: Fraction(1)}, W)
    for w, kw in f.den.items():
        c = _simp(rou_value(zinv * w.inverse()))
        fac = 1 - _binom_cached(a, W) * c
        for _ in range(kw):
            den = den * fac
    inv = den.inverse()
    out: dict = {}
    for e, coeff in f.num.items():
        ze = _simp(rou_value(zinv ** e))
        s = (_binom_cached(a * e, W) * inv).truncate(order + 1)
        c = _mul_scalar(_coeff_adams(r, coeff), ze)
        for j, v in s.c.items():
            t = _mul_scalar(c, v)
            out[j] = out[j] + t if j in out else t
    return Laurent(out, order + 1)


def adams_q(r: int, f: QRational) -> QRational:
    """Psi^r: coefficients Adams'd, q -> q^r; (1 - q^r/z) splits over the r-th roots of z."""
    if r < 1:
        raise ValueError("r >= 1 required")
    num = {e * r: _coeff_adams(r, c) for e, c in f.num.items()}
    den: dict = {}
    for z, k in f.den.items():
        for j in range(r):
            w = RootOfUnity((z.angle + j) / r)
            den[w] = den.get(w, 0) + k
    return QRational(num, den, f.zero)


def project_polarization(f: QRational) -> tuple[QRational, QRational]:
    """Split f = plus + minus with plus a Laurent polynomial and minus in K_-."""
    pf = partial_fractions(f)
    plus = QRational(dict(pf.poly_part), {}, f.zero)
    minus = QRational({}, {}, f.zero)
    for z, cs in pf.fraction_parts.items():
        for j, c in enumerate(cs, start=1):
            if c:
                minus = minus + QRational.pole(c, z, j)
    return plus, minus


def residue_at_one(series: Laurent):
    """Res_{q=1} of series(x) dq/q with x = q - 1."""
    # dq/q = dx (1 + x)^{-1}
    out = 0
    for j, c in series.c.items():
        if j <= -1:
            # x^j / (1 + x): coefficient of x^{-1} is (-1)^{-1-j}
            t = c if (-1 - j) % 2 == 0 else -c
            out = out + t
    return out
