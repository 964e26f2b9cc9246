"""Ground lambda-ring: Novikov variables, Planck's constant, nilpotents, Adams operations.

Elements are truncated polynomials over cyclotomic coefficients.  The
truncation is by total degree in the maximal ideal, with every variable of
weight 1 except sqrt(hbar), which has weight 1/2 (so hbar has weight 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .exact_scalars import Cyclo

INF = math.inf

# variable keys
#   ("Q", i)          Novikov variable Q_i, i >= 1
#   ("sqh",)          square root of hbar
#   ("g", name, r)    Adams image family of an extra generator; r = 1 is the generator


def _var_weight(v) -> Fraction:
    if v[0] == "sqh":
        return Fraction(1, 2)
    if v[0] == "g":
        return Fraction(v[2])
    return Fraction(1)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: tuple) -> Fraction:
    return sum((_var_weight(v) * e for v, e in m), Fraction(0))


@dataclass(frozen=True)
class GroundRingSpec:
    novikov_count: int = 1
    extra_generators: tuple = ()  # tuples (name, nilpotency order or None)
    truncation_order: int = 6
    include_planck: bool = True
    adams_images: tuple = ()  # tuples (name, callable(r) -> LambdaElement); default is the fresh family

    def __post_init__(self):
        if self.truncation_order < 1:
            raise ValueError("truncation_order must be >= 1")
        names = [g[0] for g in self.extra_generators]
        if len(set(names)) != len(names):
            raise ValueError("extra generator names must be unique")
        if self.novikov_count < 0:
            raise ValueError("novikov_count must be >= 0")


class LambdaRing:
    """A concrete ground ring built from a GroundRingSpec."""

    def __init__(self, spec: GroundRingSpec | None = None):
        self.spec = spec or GroundRingSpec()
        self.D = self.spec.truncation_order
        self._nilp = {name: order for name, order in self.spec.extra_generators}
        self._adams = dict(self.spec.adams_images)

    def __eq__(self, other):
        return isinstance(other, LambdaRing) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    # element constructors
    def zero(self) -> "LambdaElement":
        return LambdaElement(self, {})

    def one(self) -> "LambdaElement":
        return LambdaElement(self, {(): Cyclo(1)})

    def scalar(self, c) -> "LambdaElement":
        c = Cyclo.coerce(c)
        return LambdaElement(self, {(): c} if c else {})

    def Q(self, i: int = 1) -> "LambdaElement":
        if not 1 <= i <= self.spec.novikov_count:
            raise ValueError(f"no Novikov variable Q_{i}")
        return LambdaElement(self, {((("Q", i), 1),): Cyclo(1)})

    def sqrt_hbar(self) -> "LambdaElement":
        if not self.spec.include_planck:
            raise ValueError("ring has no Planck variable")
        return LambdaElement(self, {((("sqh",), 1),): Cyclo(1)})

    def hbar(self) -> "LambdaElement":
        return self.sqrt_hbar() * self.sqrt_hbar()

    def gen(self, name: str, r: int = 1) -> "LambdaElement":
        if name not in self._nilp:
            raise ValueError(f"unknown generator {name}")
        return LambdaElement(self, {((("g", name, r), 1),): Cyclo(1)})

    def _kill(self, mono: tuple) -> bool:
        for v, e in mono:
            if v[0] == "g":
                order = self._nilp.get(v[1])
                if order is not None and e >= order:
                    return True
        return _mono_degree(mono) > self.D


class LambdaElement:
    __slots__ = ("ring", "terms", "truncated")

    def __init__(self, ring: LambdaRing, terms: dict, truncated: bool = False):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c}
        self.truncated = truncated

    # helpers -----------------------------------------------------------
    def _wrap(self, other):
        if isinstance(other, LambdaElement):
            if other.ring != self.ring:
                raise ValueError("elements of different ground rings")
            return other
        if isinstance(other, (int, Fraction, Cyclo)):
            return self.ring.scalar(other)
        return NotImplemented

    def constant(self) -> Cyclo:
        return self.terms.get((), Cyclo(0))

    def is_scalar(self) -> bool:
        return all(m == () for m in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            return self.terms == ({(): Cyclo.coerce(other)} if other else {})
        if not isinstance(other, LambdaElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (_mono_degree(kv[0]), str(kv[0]))):
            name = "*".join(_var_name(v) + (f"^{e}" if e != 1 else "") for v, e in m)
            cs = str(c.coords[0]) if c.is_rational() else repr(c)
            parts.append(cs if not name else (name if cs == "1" else f"{cs}*{name}"))
        return " + ".join(parts)

    # ring operations ----------------------------------------------------
    def __neg__(self):
        return LambdaElement(self.ring, {m: -c for m, c in self.terms.items()}, self.truncated)

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return LambdaElement(self.ring, out, self.truncated or other.truncated)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            if not other:
                return self.ring.zero()
            return LambdaElement(self.ring, {m: c * other for m, c in self.terms.items()}, self.truncated)
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        trunc = self.truncated or other.truncated
        ring = self.ring
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                if ring._kill(m):
                    if _mono_degree(m) > ring.D:
                        trunc = True
                    continue
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return LambdaElement(ring, out, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            return self * (Cyclo(1) / Cyclo.coerce(other))
        other = self._wrap(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._wrap(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.ring.one()
        for _ in range(e):
            out = out * self
        return out

    def inverse(self) -> "LambdaElement":
        """Inverse of a unit (nonzero constant term); Lambda is local."""
        c = self.constant()
        if not c:
            raise ZeroDivisionError("only units (nonzero constant term) are invertible")
        cinv = Cyclo(1) / c
        n = self * cinv - 1  # nilpotent modulo truncation
        out = self.ring.one()
        term = self.ring.one()
        for _ in range(self.ring.D * 2 + 2):
            term = term * (-n)
            if not term:
                break
            out = out + term
        return out * cinv

    # Adams operations and filtration ---------------------------------------
    def adams(self, r: int) -> "LambdaElement":
        return adams(r, self)

    def truncate(self, d: int) -> "LambdaElement":
        return truncate(self, d)

    def valuation(self):
        return ideal_valuation(self)


def _var_name(v) -> str:
    if v[0] == "Q":
        return f"Q{v[1]}"
    if v[0] == "sqh":
        return "sqrt_hbar"
    return v[1] if v[2] == 1 else f"{v[1]}_{v[2]}"


def _adams_var(ring: LambdaRing, r: int, v) -> LambdaElement:
    if v[0] == "Q":
        return LambdaElement(ring, {((v, r),): Cyclo(1)})
    if v[0] == "sqh":
        return LambdaElement(ring, {((v, r),): Cyclo(1)})
    name, k = v[1], v[2]
    custom = ring._adams.get(name)
    if custom is not None and k == 1:
        return custom(r)
    return LambdaElement(ring, {((("g", name, k * r), 1),): Cyclo(1)})


def adams(r: int, x):
    """Psi^r: Q^d -> Q^{rd}, hbar -> hbar^r, cyclotomic scalars fixed."""
    if r < 1:
        raise ValueError("Adams operation needs r >= 1")
    if not isinstance(x, LambdaElement):
        return x
    if r == 1:
        return x
    ring = x.ring
    out = ring.zero()
    trunc = x.truncated
    for m, c in x.terms.items():
        # monomials are products of variables: images multiply
        deg = _mono_degree(m)
        if deg * r > ring.D and all(v[0] != "g" or ring._adams.get(v[1]) is None for v, _ in m):
            trunc = True
            continue
        img = ring.scalar(c)
        for v, e in m:
            img = img * (_adams_var(ring, r, v) ** e)
            if not img:
                break
        trunc = trunc or img.truncated
        out = out + img
    out.truncated = trunc
    return out


def truncate(x: LambdaElement, d: int) -> LambdaElement:
    if d > x.ring.D:
        raise ValueError("cannot truncate above the ring's order")
    kept = {m: c for m, c in x.terms.items() if _mono_degree(m) <= d}
    return LambdaElement(x.ring, kept, x.truncated or len(kept) < len(x.terms))


def ideal_valuation(x):
    """Largest k with x in (Lambda_+)^k; infinity for zero."""
    if isinstance(x, LambdaElement):
        if not x.terms:
            return INF
        return min(_mono_degree(m) for m in x.terms)
    return INF if not x else 0


def adams_scalar(r: int, x):
    """Adams operation on any ground-ring scalar (cyclotomic numbers are fixed)."""
    return adams(r, x) if isinstance(x, LambdaElement) else x


def is_zero(x) -> bool:
    return not x
