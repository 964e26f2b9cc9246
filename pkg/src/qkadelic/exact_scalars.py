"""Exact rational and cyclotomic arithmetic, plus Bernoulli numbers.

Elements of Q(zeta_N) are stored in the power basis 1, z, ..., z^(phi(N)-1)
reduced modulo the N-th cyclotomic polynomial.  Every value is kept at the
least level that contains it, so equal values have identical coordinates.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Iterable

from gmpy2 import mpq

Rational = Fraction


_RAT = (int, Fraction, type(mpq(0)))


def _frac(c) -> Fraction:
    return c if type(c) is Fraction else Fraction(int(c.numerator), int(c.denominator))


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    out = n
    for p in prime_factors(n):
        out = out // p * (p - 1)
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    # x^n - 1 = prod_{d | n} Phi_d
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // lead
        out[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    assert not any(a), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def _power_vectors(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Sparse coordinates of z^e (0 <= e < n) in the reduced power basis."""
    phi = euler_phi(n)
    cp = cyclotomic_poly(n)
    vecs = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        vecs.append(tuple((i, c) for i, c in enumerate(cur) if c))
        # multiply by z, reduce z^phi = -sum cp[i] z^i (Phi_n is monic)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * cp[i]
    return tuple(vecs)


@lru_cache(maxsize=None)
def _descent_data(n: int, d: int):
    """Data to test membership of Q(zeta_n) elements in Q(zeta_d), d | n."""
    step = n // d
    pv = _power_vectors(n)
    phi_n, phi_d = euler_phi(n), euler_phi(d)
    # columns: images of the level-d basis
    cols = []
    for j in range(phi_d):
        col = [Fraction(0)] * phi_n
        for i, c in pv[j * step]:
            col[i] = Fraction(c)
        cols.append(col)
    # choose pivot rows by elimination on the transpose
    mat = [[cols[j][i] for j in range(phi_d)] for i in range(phi_n)]
    pivots = []
    work = [row[:] for row in mat]
    basis_rows: list[list[Fraction]] = []
    for i, row in enumerate(work):
        r = row[:]
        for piv_row, lead in basis_rows:
            if r[lead]:
                f = r[lead] / piv_row[lead]
                r = [a - f * b for a, b in zip(r, piv_row)]
        nz = next((k for k, v in enumerate(r) if v), None)
        if nz is not None:
            basis_rows.append((r, nz))
            pivots.append(i)
        if len(pivots) == phi_d:
            break
    sub = [mat[i] for i in pivots]
    inv = _mat_inverse(sub)
    return tuple(pivots), inv, cols


def _mat_inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def solve_linear(a: list[list], b: list) -> list[Fraction]:
    """Solve a x = b exactly for square invertible a over the rationals."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(b[i])] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular system")
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n] for row in aug]


def _shrink(n: int, coords: list[Fraction]) -> tuple[int, tuple[Fraction, ...]]:
    while n > 1:
        if not any(coords[1:]):
            return 1, (coords[0],)
        for p in prime_factors(n):
            d = n // p
            pivots, inv, cols = _descent_data(n, d)
            rhs = [coords[i] for i in pivots]
            y = [sum((row[k] * rhs[k] for k in range(len(rhs)) if rhs[k]), Fraction(0)) for row in inv]
            ok = True
            for i in range(len(coords)):
                v = sum((y[j] * cols[j][i] for j in range(len(y)) if y[j] and cols[j][i]), Fraction(0))
                if v != coords[i]:
                    ok = False
                    break
            if ok:
                n, coords = d, y
                break
        else:
            break
    return n, tuple(coords)


def _lift(n: int, coords: tuple, big: int) -> list[Fraction]:
    if n == big:
        return list(coords)
    step = big // n
    pv = _power_vectors(big)
    out = [mpq(0)] * euler_phi(big)
    for j, c in enumerate(coords):
        if c:
            for i, v in pv[j * step]:
                out[i] += c * v
    return out


class Cyclo:
    """Exact element of a cyclotomic field.

    Arithmetic works at whatever level the operands share; the reduction to
    the least level happens lazily, the first time ``level``/``coords``,
    hashing or a rationality test needs the canonical form.
    """

    __slots__ = ("_level", "_coords", "_canon")

    def __init__(self, value=0, level: int = 1, coords: Iterable | None = None, _raw: bool = False):
        if coords is None:
            self._level, self._coords, self._canon = 1, (mpq(value),), True
            return
        coords = [mpq(c) for c in coords]
        phi = euler_phi(level)
        if len(coords) != phi:
            # accept a full length-N exponent vector and reduce it
            coords = _reduce_exponent_vector(level, coords)
        self._level, self._coords, self._canon = level, tuple(coords), level == 1
        if not _raw:
            self._canonicalize()

    @classmethod
    def _make(cls, level: int, coords) -> "Cyclo":
        obj = object.__new__(cls)
        obj._level, obj._coords, obj._canon = level, tuple(coords), level == 1
        return obj

    def _canonicalize(self) -> None:
        if not self._canon:
            level, coords = _shrink(self._level, [_frac(c) for c in self._coords])
            self._level, self._coords = level, tuple(mpq(c) for c in coords)
            self._canon = True

    @property
    def level(self) -> int:
        self._canonicalize()
        return self._level

    @property
    def coords(self) -> tuple:
        self._canonicalize()
        return tuple(_frac(c) for c in self._coords)

    # constructors -------------------------------------------------------
    @classmethod
    def from_exponents(cls, level: int, exps: dict[int, object]) -> "Cyclo":
        vec = [Fraction(0)] * euler_phi(level)
        pv = _power_vectors(level)
        for e, c in exps.items():
            c = Fraction(c)
            if c:
                for i, v in pv[e % level]:
                    vec[i] += c * v
        return cls(level=level, coords=vec)

    @staticmethod
    def coerce(x) -> "Cyclo":
        if isinstance(x, Cyclo):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclo(x)
        return NotImplemented

    # queries ------------------------------------------------------------
    def is_rational(self) -> bool:
        if self._level == 1:
            return True
        if not any(self._coords[1:]):
            return True
        return self.level == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return _frac(self._coords[0])

    def __bool__(self) -> bool:
        # the power basis is a basis at every level
        return any(self._coords)

    def __eq__(self, other) -> bool:
        if isinstance(other, Cyclo):
            if self._canon and other._canon:
                return self._level == other._level and self._coords == other._coords
            return not (self - other)
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self._coords[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        self._canonicalize()
        if self._level == 1:
            return hash(self._coords[0])
        return hash((self._level, self._coords))

    def __complex__(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self._level)
        return sum(complex(float(c)) * z ** i for i, c in enumerate(self._coords))

    def __repr__(self) -> str:
        self._canonicalize()
        if self._level == 1:
            return f"Cyclo({_frac(self._coords[0])})"
        terms = [f"{_frac(c)}*z{self._level}^{i}" for i, c in enumerate(self._coords) if c]
        return "Cyclo(" + " + ".join(terms) + ")"

    # arithmetic ---------------------------------------------------------
    def __neg__(self) -> "Cyclo":
        out = Cyclo._make(self._level, [-c for c in self._coords])
        out._canon = self._canon
        return out

    def __add__(self, other) -> "Cyclo":
        if isinstance(other, _RAT):
            if not other:
                return self
            cs = list(self._coords)
            cs[0] += other
            return Cyclo._make(self._level, cs)
        if not isinstance(other, Cyclo):
            return NotImplemented
        if self._level == other._level:
            return Cyclo._make(self._level, [a + b for a, b in zip(self._coords, other._coords)])
        if other._level == 1:
            return self + other._coords[0]
        if self._level == 1:
            return other + self._coords[0]
        big = lcm(self._level, other._level)
        a = _lift(self._level, self._coords, big)
        b = _lift(other._level, other._coords, big)
        return Cyclo._make(big, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other) -> "Cyclo":
        if isinstance(other, _RAT):
            return self + (-other)
        if not isinstance(other, Cyclo):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Cyclo":
        return (-self) + other

    def __mul__(self, other) -> "Cyclo":
        if isinstance(other, _RAT):
            if not other:
                return Cyclo(0)
            out = Cyclo._make(self._level, [c * other for c in self._coords])
            out._canon = self._canon
            return out
        if not isinstance(other, Cyclo):
            return NotImplemented
        if other._level == 1:
            return self * other._coords[0]
        if self._level == 1:
            return other * self._coords[0]
        big = self._level if self._level == other._level else lcm(self._level, other._level)
        a = _lift(self._level, self._coords, big)
        b = _lift(other._level, other._coords, big)
        pv = _power_vectors(big)
        out = [mpq(0)] * euler_phi(big)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        xy = x * y
                        for k, v in pv[(i + j) % big]:
                            out[k] += xy * v if v != 1 else xy
        return Cyclo._make(big, out)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        return cyclo_inverse(self)

    def __truediv__(self, other) -> "Cyclo":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        other = Cyclo.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * cyclo_inverse(other)

    def __rtruediv__(self, other) -> "Cyclo":
        return Cyclo.coerce(other) * cyclo_inverse(self)

    def __pow__(self, e: int) -> "Cyclo":
        if e < 0:
            return cyclo_inverse(self) ** (-e)
        out, base = Cyclo(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "Cyclo":
        """Complex conjugate (the automorphism z -> z^-1)."""
        n = self.level
        if n == 1:
            return self
        exps: dict[int, Fraction] = {}
        for i, c in enumerate(self.coords):
            if c:
                exps[(-i) % n] = exps.get((-i) % n, 0) + c
        return Cyclo.from_exponents(n, exps)


def _reduce_exponent_vector(n: int, vec: list[Fraction]) -> list[Fraction]:
    pv = _power_vectors(n)
    out = [Fraction(0)] * euler_phi(n)
    for e, c in enumerate(vec):
        if c:
            for i, v in pv[e % n]:
                out[i] += c * v
    return out


ZERO = Cyclo(0)
ONE = Cyclo(1)


def root_of_unity(m: int, t: int) -> Cyclo:
    """exp(2 pi i t / m) as a canonical cyclotomic number."""
    if m <= 0:
        raise ValueError("root_of_unity needs m >= 1")
    g = gcd(m, t % m) if t % m else m
    n = m // g
    return Cyclo.from_exponents(n, {(t % m) // g if n > 1 else 0: 1})


def cyclo_inverse(x: Cyclo) -> Cyclo:
    """Multiplicative inverse, by solving the multiplication-matrix system."""
    if not x:
        raise ZeroDivisionError("inverse of zero")
    if x.level == 1:
        return Cyclo(1 / x.coords[0])
    n = x.level
    phi = euler_phi(n)
    pv = _power_vectors(n)
    # column j of the matrix = coordinates of x * z^j
    cols = []
    for j in range(phi):
        col = [Fraction(0)] * phi
        for i, c in enumerate(x.coords):
            if c:
                for k, v in pv[(i + j) % n]:
                    col[k] += c * v
        cols.append(col)
    a = [[cols[j][i] for j in range(phi)] for i in range(phi)]
    b = [Fraction(1)] + [Fraction(0)] * (phi - 1)
    y = solve_linear(a, b)
    return Cyclo(level=n, coords=y)


class RootOfUnity:
    """Hashable root of unity exp(2 pi i a) with a in [0, 1) rational."""

    __slots__ = ("angle",)

    def __init__(self, angle):
        a = Fraction(angle)
        self.angle = a - (a.numerator // a.denominator)

    @classmethod
    def primitive(cls, m: int, t: int = 1) -> "RootOfUnity":
        return cls(Fraction(t, m))

    @property
    def order(self) -> int:
        return self.angle.denominator

    def value(self) -> Cyclo:
        return root_of_unity(self.angle.denominator, self.angle.numerator)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.angle)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.angle + other.angle)

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.angle * e)

    def is_one(self) -> bool:
        return self.angle == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, RootOfUnity) and self.angle == other.angle

    def __lt__(self, other: "RootOfUnity") -> bool:
        return (self.order, self.angle) < (other.order, other.angle)

    def __hash__(self) -> int:
        return hash(("root", self.angle))

    def __repr__(self) -> str:
        if self.angle == 0:
            return "1"
        return f"e(2pi i {self.angle})"


def primitive_roots(m: int) -> list[RootOfUnity]:
    return [RootOfUnity(Fraction(t, m)) for t in range(m) if gcd(t, m) == 1 or m == 1]


def roots_up_to(m_max: int) -> list[RootOfUnity]:
    out = []
    for m in range(1, m_max + 1):
        out.extend(primitive_roots(m))
    return out


_BERN: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """B_n from sum_{j=0}^{n} C(n+1, j) B_j = 0, with B_1 = -1/2."""
    if n < 0:
        raise ValueError("bernoulli index must be non-negative")
    while len(_BERN) <= n:
        k = len(_BERN)
        s = sum(comb(k + 1, j) * _BERN[j] for j in range(k))
        _BERN.append(-s / (k + 1))
    return _BERN[n]


@lru_cache(maxsize=None)
def binomial_series_coeff(a: Fraction, j: int) -> Fraction:
    """Generalized binomial coefficient C(a, j) for rational a."""
    out = Fraction(1)
    for i in range(j):
        out = out * (a - i) / (i + 1)
    return out
