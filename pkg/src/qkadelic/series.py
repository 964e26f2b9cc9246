"""Truncated Laurent series in one variable over an arbitrary coefficient ring.

A series stores its nonzero coefficients and an exclusive precision bound:
``Laurent({j: c_j}, prec)`` means sum c_j x^j + O(x^prec).  ``prec=None``
marks an exact (finite) expansion.  Arithmetic saturates precision the usual
way, so a result never claims more accuracy than its inputs support.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .exact_scalars import Cyclo, binomial_series_coeff

INF = math.inf


def _p(prec):
    return INF if prec is None else prec


def _unp(prec):
    return None if prec == INF else prec


def one_like(c):
    return c * 0 + 1


class Laurent:
    __slots__ = ("c", "prec")

    def __init__(self, coeffs: dict | None = None, prec=None):
        p = _p(prec)
        self.c = {j: v for j, v in (coeffs or {}).items() if j < p and v}
        self.prec = _unp(p)

    # construction ------------------------------------------------------
    @classmethod
    def const(cls, v, prec=None) -> "Laurent":
        return cls({0: v}, prec)

    @classmethod
    def x(cls, prec=None) -> "Laurent":
        return cls({1: 1}, prec)

    # queries -----------------------------------------------------------
    def valuation(self):
        return min(self.c) if self.c else _p(self.prec)

    def __getitem__(self, j: int):
        if self.prec is not None and j >= self.prec:
            raise IndexError(f"coefficient x^{j} beyond precision {self.prec}")
        return self.c.get(j, 0)

    def coeff(self, j: int):
        return self[j]

    def degree_max(self):
        return max(self.c) if self.c else None

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def principal_part(self) -> "Laurent":
        return Laurent({j: v for j, v in self.c.items() if j < 0})

    def regular_part(self) -> "Laurent":
        return Laurent({j: v for j, v in self.c.items() if j >= 0}, self.prec)

    def truncate(self, prec) -> "Laurent":
        return Laurent(self.c, min(_p(prec), _p(self.prec)))

    def __eq__(self, other):
        if isinstance(other, Laurent):
            p = min(_p(self.prec), _p(other.prec))
            a = {j: v for j, v in self.c.items() if j < p}
            b = {j: v for j, v in other.c.items() if j < p}
            if a.keys() != b.keys():
                return False
            return all(a[j] == b[j] for j in a)
        if other == 0:
            return not self.c
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self.c), self.prec))

    def __repr__(self):
        parts = [f"({v})*x^{j}" for j, v in sorted(self.c.items())]
        tail = f" + O(x^{self.prec})" if self.prec is not None else ""
        return (" + ".join(parts) or "0") + tail

    # arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Laurent):
            return other
        return Laurent({0: other} if other is not None else {}, None)

    def __neg__(self):
        return Laurent({j: -v for j, v in self.c.items()}, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        p = min(_p(self.prec), _p(other.prec))
        out = dict(self.c)
        for j, v in other.c.items():
            out[j] = out[j] + v if j in out else v
        return Laurent(out, p)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s) -> "Laurent":
        return Laurent({j: v * s for j, v in self.c.items()}, self.prec)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            # coefficient-ring scalar
            return Laurent({j: v * other for j, v in self.c.items()}, self.prec)
        va, vb = self.valuation(), other.valuation()
        p = min(va + _p(other.prec), vb + _p(self.prec))
        out: dict = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                if k >= p:
                    continue
                ab = a * b
                out[k] = out[k] + ab if k in out else ab
        return Laurent(out, p)

    def __rmul__(self, other):
        if isinstance(other, Laurent):
            return other.__mul__(self)
        return Laurent({j: other * v for j, v in self.c.items()}, self.prec)

    def shift(self, k: int) -> "Laurent":
        """Multiply by x^k."""
        return Laurent({j + k: v for j, v in self.c.items()}, None if self.prec is None else self.prec + k)

    def map_coeffs(self, f) -> "Laurent":
        return Laurent({j: f(v) for j, v in self.c.items()}, self.prec)

    def inverse(self, prec=None) -> "Laurent":
        """Multiplicative inverse; the leading coefficient must be invertible.

        ``prec`` bounds the output when the input is exact.
        """
        if not self.c:
            raise ZeroDivisionError("inverse of zero series")
        v = self.valuation()
        lead = self.c[v]
        inv_lead = _invert_coeff(lead)
        rel = _p(self.prec) - v
        target = min(rel, _p(prec) + v) if prec is not None else rel
        if target == INF:
            raise ValueError("exact series inverse needs an explicit precision")
        # u = x^-v * self / lead = 1 + w
        w = Laurent({j - v: c * inv_lead for j, c in self.c.items() if j != v}, target)
        out_s = Laurent({0: one_like(lead)}, target)
        # geometric series sum (-w)^k
        term = Laurent({0: one_like(lead)}, target)
        negw = -w
        for _ in range(int(target) + 1):
            term = term * negw
            if not term.c:
                break
            out_s = out_s + term
        res = out_s.scale(inv_lead) if not isinstance(inv_lead, int) else out_s
        return res.shift(-v)

    def __truediv__(self, other):
        if isinstance(other, Laurent):
            return self * other.inverse()
        return self * _invert_coeff(other)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = Laurent({0: 1}, None)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def exp(self, one=1) -> "Laurent":
        """exp of a series that is topologically nilpotent (positive valuation
        or nilpotent coefficients)."""
        out = Laurent({0: one}, self.prec)
        term = Laurent({0: one}, self.prec)
        n = 0
        limit = 4 * (int(_p(self.prec)) if self.prec is not None else 64) + 64
        while True:
            n += 1
            term = (term * self).scale(Fraction(1, n))
            if self.prec is not None:
                term = term.truncate(self.prec)
            if not term.c:
                break
            out = out + term
            if n > limit:
                raise ValueError("exp did not terminate; argument not nilpotent")
        return out

    def log1p(self) -> "Laurent":
        """log(1 + self) for positive valuation."""
        if self.c and self.valuation() <= 0:
            raise ValueError("log1p needs positive valuation")
        out = Laurent({}, self.prec)
        term = Laurent({0: 1}, self.prec)
        n = 0
        while True:
            n += 1
            term = term * self
            if not term.c:
                break
            out = out + term.scale(Fraction((-1) ** (n + 1), n))
        return out

    def compose_q_inverse(self) -> "Laurent":
        """Substitute q -> 1/q for a series in x = q - 1.

        1/q - 1 = -x/(1+x), a series of valuation 1.
        """
        p = _p(self.prec)
        if p == INF:
            raise ValueError("composition of an exact series needs finite precision")
        if not self.c:
            return Laurent({}, p)
        v = self.valuation()
        # y = -x/(1+x) = sum_{j>=1} (-1)^j x^j
        rel = p - v
        y = Laurent({j: (-1) ** j for j in range(1, int(rel) + 2)}, rel + 1)
        yinv = y.inverse()
        result = None
        for j, cj in self.c.items():
            t = (y ** j) if j >= 0 else (yinv ** (-j))
            term = t * cj if not isinstance(cj, int) else t.scale(cj)
            result = term if result is None else result + term
        # precision: y has exact valuation 1, so truncation error O(y^p) = O(x^p)
        if result is None:
            return Laurent({}, p)
        return result.truncate(p)


def _invert_coeff(c):
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    if isinstance(c, Cyclo):
        return Cyclo(1) / c
    return c.inverse()


def binomial_series(a, prec: int) -> Laurent:
    """(1 + x)^a as a series, a rational."""
    a = Fraction(a)
    return Laurent({j: binomial_series_coeff(a, j) for j in range(prec)}, prec)


def geometric_unit(c0, prec: int) -> Laurent:
    return Laurent({0: c0}, prec)
