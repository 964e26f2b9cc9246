"""Desk-scale targets: K^0(X) (x) Lambda for X a point, P^1, P^2 (or any P^n).

K^0(P^n) = Z[P]/(1-P)^(n+1) with P = O(-1), ch(P) = exp(-w), w^(n+1) = 0.
Internally classes are multiplied in the basis 1, u, ..., u^n with u = 1 - P;
externally they are coordinate vectors over the chosen basis phi_alpha.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache

from .exact_scalars import Cyclo, _mat_inverse, binomial_series_coeff
from .lambda_ring import adams_scalar
from .series import Laurent

_SCALARS = (int, Fraction, Cyclo)


def _is_lambda(x) -> bool:
    from .lambda_ring import LambdaElement

    return isinstance(x, LambdaElement)


def _is_scalar(x) -> bool:
    return isinstance(x, _SCALARS) or _is_lambda(x)


class ModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cohomology H(X) = Lambda[w]/(w^(n+1))


class Coh:
    __slots__ = ("dim", "c")

    def __init__(self, dim: int, coeffs):
        coeffs = list(coeffs)[: dim + 1]
        coeffs += [0] * (dim + 1 - len(coeffs))
        self.dim = dim
        self.c = tuple(coeffs)

    @classmethod
    def scalar(cls, dim: int, s) -> "Coh":
        return cls(dim, [s])

    def __bool__(self):
        return any(bool(x) for x in self.c)

    def __eq__(self, other):
        if isinstance(other, Coh):
            return all(a == b for a, b in zip(self.c, other.c))
        if _is_scalar(other):
            return self.c[0] == other and not any(bool(x) for x in self.c[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Coh(" + " + ".join(f"({v})w^{i}" for i, v in enumerate(self.c) if v) + ")"

    def __neg__(self):
        return Coh(self.dim, [-x for x in self.c])

    def __add__(self, other):
        if _is_scalar(other):
            other = Coh.scalar(self.dim, other)
        if not isinstance(other, Coh):
            return NotImplemented
        return Coh(self.dim, [a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return Coh(self.dim, [x * other for x in self.c])
        if not isinstance(other, Coh):
            return NotImplemented
        out = [0] * (self.dim + 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c[: self.dim + 1 - i]):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Coh(self.dim, out)

    __rmul__ = __mul__

    def degree_part(self, l: int) -> "Coh":
        return Coh(self.dim, [x if i == l else 0 for i, x in enumerate(self.c)])

    def integrate(self):
        return self.c[self.dim]

    def inverse(self) -> "Coh":
        c0 = self.c[0]
        if not c0:
            raise ZeroDivisionError("non-unit cohomology class")
        inv0 = (Fraction(1) / c0) if isinstance(c0, (int, Fraction)) else (Cyclo(1) / c0 if isinstance(c0, Cyclo) else c0.inverse())
        n = self * inv0 - 1
        out = Coh.scalar(self.dim, 1)
        term = Coh.scalar(self.dim, 1)
        for _ in range(self.dim):
            term = term * (-n)
            out = out + term
        return out * inv0

    def adams(self, r: int) -> "Coh":
        return Coh(self.dim, [adams_scalar(r, x) for x in self.c])

    def sqrt(self) -> "Coh":
        """Square root of a class with constant term 1."""
        if self.c[0] != 1:
            raise ValueError("sqrt needs constant term 1")
        n = self - 1
        out = Coh.scalar(self.dim, 1)
        term = Coh.scalar(self.dim, 1)
        for k in range(1, self.dim + 1):
            term = term * n
            out = out + term * binomial_series_coeff(Fraction(1, 2), k)
        return out


def _series_in_w(coeffs: list[Fraction], c: Fraction, dim: int) -> Coh:
    """sum_j coeffs[j] (c w)^j truncated at w^dim."""
    return Coh(dim, [coeffs[j] * c ** j if j < len(coeffs) else 0 for j in range(dim + 1)])


@lru_cache(maxsize=None)
def _exp_coeffs(sign: int, n: int) -> tuple[Fraction, ...]:
    out, f = [], Fraction(1)
    for j in range(n):
        out.append(Fraction(sign) ** j * f)
        f = f / (j + 1)
    return tuple(out)


@lru_cache(maxsize=None)
def _todd_coeffs(n: int) -> tuple[Fraction, ...]:
    # x / (1 - e^-x) = 1 / ((1 - e^-x)/x)
    s = Laurent({j: -_exp_coeffs(-1, n + 2)[j + 1] for j in range(n + 1)}, n + 1)
    inv = s.inverse()
    return tuple(Fraction(inv[j]) for j in range(n + 1))


@lru_cache(maxsize=None)
def _eratio_coeffs(r: int, n: int) -> tuple[Fraction, ...]:
    # (1 - e^-x)/(1 - e^-rx) = [(1-e^-x)/x] / [(1-e^-rx)/x]
    num = Laurent({j: -_exp_coeffs(-1, n + 2)[j + 1] for j in range(n + 1)}, n + 1)
    den = Laurent({j: -_exp_coeffs(-1, n + 2)[j + 1] * r ** (j + 1) for j in range(n + 1)}, n + 1)
    q = num * den.inverse()
    return tuple(Fraction(q[j]) for j in range(n + 1))


# ---------------------------------------------------------------------------


class TargetGeometry:
    """A projective-space-like model with a chosen basis of K^0(X)."""

    def __init__(self, name: str, dim: int, basis: list[dict], tangent_roots: dict):
        self.name = name
        self.dim = dim
        self.rank = dim + 1
        if len(basis) != self.rank:
            raise ModelError(f"basis must have {self.rank} elements, got {len(basis)}")
        self.basis_spec = [dict((int(k), Fraction(v)) for k, v in b.items()) for b in basis]
        self.tangent_roots = {Fraction(k): int(v) for k, v in tangent_roots.items() if v}
        self.basis_names = [_name_of(b) for b in self.basis_spec]
        # rows: u-coordinates of phi_alpha
        self.to_u = [self._laurent_P_to_u(b) for b in self.basis_spec]
        try:
            self.from_u = _mat_inverse([list(row) for row in self.to_u])
        except StopIteration:
            raise ModelError("basis classes are linearly dependent in K^0(X)") from None
        self._ch_u = [self._ch_of_u_power(k) for k in range(self.rank)]
        self.td = self._todd()
        gram = [[self._pair_u(self.to_u[a], self.to_u[b], self.td) for b in range(self.rank)] for a in range(self.rank)]
        self.gram = gram
        try:
            self.gram_inv = _mat_inverse([row[:] for row in gram])
        except StopIteration:
            raise ModelError("Poincare pairing is degenerate") from None
        for a in range(self.rank):
            for b in range(self.rank):
                if gram[a][b] != gram[b][a]:
                    raise ModelError("pairing not symmetric")
        self._twisted_cache: dict[int, list] = {}
        self.unit_coords = tuple(self.from_u[0])

    # construction helpers ---------------------------------------------------
    def _laurent_P_to_u(self, lp: dict) -> list[Fraction]:
        out = [Fraction(0)] * self.rank
        for k, c in lp.items():
            for j, v in enumerate(_P_power_in_u(k, self.dim)):
                out[j] += c * v
        return out

    def _ch_of_u_power(self, k: int) -> Coh:
        # ch(u) = 1 - e^{-w}
        chu = Coh(self.dim, [0] + [-x for x in _exp_coeffs(-1, self.dim + 1)[1:]])
        out = Coh.scalar(self.dim, 1)
        for _ in range(k):
            out = out * chu
        return out

    def _todd(self) -> Coh:
        out = Coh.scalar(self.dim, 1)
        for c, mult in self.tangent_roots.items():
            if c == 0:
                continue
            f = _series_in_w(list(_todd_coeffs(self.dim)), c, self.dim)
            out = out * _cpow(f, mult)
        return out

    def _pair_u(self, a_u, b_u, weight: Coh):
        ca = sum((self._ch_u[j] * x for j, x in enumerate(a_u) if x), Coh.scalar(self.dim, 0))
        cb = sum((self._ch_u[j] * x for j, x in enumerate(b_u) if x), Coh.scalar(self.dim, 0))
        return (ca * cb * weight).integrate()

    # public API ------------------------------------------------------------
    def basis(self) -> list["KClass"]:
        out = []
        for a in range(self.rank):
            v = [0] * self.rank
            v[a] = 1
            out.append(KClass(self, v))
        return out

    def one(self) -> "KClass":
        return KClass(self, list(self.unit_coords))

    def zero(self) -> "KClass":
        return KClass(self, [0] * self.rank)

    def line(self, c: int) -> "KClass":
        """The line bundle O(c), with ch = exp(c w)."""
        return KClass.from_u(self, _P_power_in_u(-c, self.dim))

    def P(self) -> "KClass":
        return self.line(-1)

    def line_sum(self, summands: dict) -> "KClass":
        out = self.zero()
        for c, mult in summands.items():
            out = out + self.line(c) * mult
        return out

    def tangent_class(self) -> "KClass":
        return self.line_sum({int(c): m for c, m in self.tangent_roots.items()})

    def cotangent_class(self) -> "KClass":
        return self.line_sum({-int(c): m for c, m in self.tangent_roots.items()})

    def mult_table(self):
        """Structure constants: phi_a * phi_b = sum_c table[a][b][c] phi_c."""
        bs = self.basis()
        return [[list((x * y).coords) for y in bs] for x in bs]

    def ch_map(self) -> list[Coh]:
        return [b.ch() for b in self.basis()]

    def twisted_gram(self, r: int):
        if r not in self._twisted_cache:
            w = euler_ratio_class(self, r) * self.td
            self._twisted_cache[r] = [
                [self._pair_u(self.to_u[a], self.to_u[b], w) for b in range(self.rank)] for a in range(self.rank)
            ]
        return self._twisted_cache[r]

    def __repr__(self):
        return f"TargetGeometry({self.name}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, TargetGeometry) and self.name == other.name and self.basis_spec == other.basis_spec and self.tangent_roots == other.tangent_roots

    def __hash__(self):
        return hash(self.name)


def _cpow(f: Coh, mult: int) -> Coh:
    if mult >= 0:
        out = Coh.scalar(f.dim, 1)
        for _ in range(mult):
            out = out * f
        return out
    return _cpow(f.inverse(), -mult)


@lru_cache(maxsize=None)
def _P_power_in_u(k: int, dim: int) -> tuple[Fraction, ...]:
    """u-coordinates of P^k = (1-u)^k, any integer k, modulo u^(dim+1)."""
    return tuple(binomial_series_coeff(Fraction(k), j) * (-1) ** j for j in range(dim + 1))


def _name_of(b: dict) -> str:
    if b == {0: 1}:
        return "1"
    return "+".join(f"{c}*P^{k}" if c != 1 else f"P^{k}" for k, c in sorted(b.items()))


# ---------------------------------------------------------------------------


class KClass:
    """Element of K = K^0(X) (x) Lambda, as coordinates over the target basis."""

    __slots__ = ("target", "coords")

    def __init__(self, target: TargetGeometry, coords):
        self.target = target
        self.coords = tuple(coords)

    @classmethod
    def from_u(cls, target: TargetGeometry, ucoords) -> "KClass":
        fu = target.from_u
        n = target.rank
        out = []
        for b in range(n):
            s = 0
            for j in range(n):
                if ucoords[j] and fu[j][b]:
                    s = s + ucoords[j] * fu[j][b]
            out.append(s)
        return cls(target, out)

    def u_coords(self) -> list:
        tu = self.target.to_u
        n = self.target.rank
        out = []
        for j in range(n):
            s = 0
            for a in range(n):
                if self.coords[a] and tu[a][j]:
                    s = s + self.coords[a] * tu[a][j]
            out.append(s)
        return out

    def _check(self, other: "KClass"):
        if other.target is not self.target and other.target != self.target:
            raise ModelError("classes on different targets")

    def __bool__(self):
        return any(bool(x) for x in self.coords)

    def __eq__(self, other):
        if isinstance(other, KClass):
            return all(a == b for a, b in zip(self.coords, other.coords))
        if _is_scalar(other):
            return self == self.target.one() * other
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        parts = [f"({c})*{n}" for c, n in zip(self.coords, self.target.basis_names) if c]
        return "KClass(" + (" + ".join(parts) or "0") + ")"

    def __neg__(self):
        return KClass(self.target, [-x for x in self.coords])

    def __add__(self, other):
        if _is_scalar(other):
            if not other:
                return self
            other = self.target.one() * other
        if not isinstance(other, KClass):
            return NotImplemented
        return KClass(self.target, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if isinstance(other, (int, Fraction)) and other == 1:
                return self
            return KClass(self.target, [x * other if x else 0 for x in self.coords])
        if not isinstance(other, KClass):
            return NotImplemented
        self._check(other)
        n = self.target.rank
        if n == 1:
            return KClass(self.target, [self.coords[0] * other.coords[0]])
        a, b = self.u_coords(), other.u_coords()
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j in range(n - i):
                    y = b[j]
                    if y:
                        out[i + j] = out[i + j] + x * y
        return KClass.from_u(self.target, out)

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, KClass):
            return self * s.inverse()
        if isinstance(s, (int, Fraction)):
            return self * (Fraction(1) / Fraction(s))
        return self * (Cyclo(1) / s if isinstance(s, Cyclo) else s.inverse())

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.target.one()
        for _ in range(e):
            out = out * self
        return out

    def inverse(self) -> "KClass":
        u = self.u_coords()
        c0 = u[0]
        if not c0:
            raise ZeroDivisionError("class is not a unit")
        inv0 = Fraction(1) / c0 if isinstance(c0, (int, Fraction)) else (Cyclo(1) / c0 if isinstance(c0, Cyclo) else c0.inverse())
        n = self * inv0 - 1
        out = self.target.one()
        term = self.target.one()
        for _ in range(self.target.dim + 1):
            term = term * (-n)
            out = out + term
        return out * inv0

    def ch(self) -> Coh:
        t = self.target
        out = Coh.scalar(t.dim, 0)
        for j, x in enumerate(self.u_coords()):
            if x:
                out = out + t._ch_u[j] * x
        return out

    def adams(self, r: int) -> "KClass":
        return adams_k(r, self)

    def map_scalars(self, f) -> "KClass":
        return KClass(self.target, [f(x) if x else x for x in self.coords])


# ---------------------------------------------------------------------------


def _proj_basis(n: int) -> list[dict]:
    return [{k: 1} for k in range(n + 1)]


@lru_cache(maxsize=None)
def _builtin(name: str) -> TargetGeometry:
    if name == "point":
        return TargetGeometry("point", 0, [{0: 1}], {})
    if name == "p1":
        return TargetGeometry("p1", 1, _proj_basis(1), {2: 1})
    if name == "p2":
        return TargetGeometry("p2", 2, _proj_basis(2), {1: 3, 0: -1})
    raise ModelError(f"unknown target {name!r}")


def load_target(name) -> TargetGeometry:
    """Load a built-in model ('point', 'p1', 'p2'), an inline dict, or 'file:PATH' (JSON).

    Inline form: {"name": str, "dim": n, "basis": [{P-exponent: coeff}, ...],
    "tangent": {chern-root multiple of w: multiplicity}}.
    """
    if isinstance(name, TargetGeometry):
        return name
    if isinstance(name, str) and name.startswith("file:"):
        with open(name[5:]) as fh:
            name = json.load(fh)
    if isinstance(name, dict):
        missing = [k for k in ("dim", "basis", "tangent") if k not in name]
        if missing:
            raise ModelError(f"inline target missing fields: {missing}")
        dim = name["dim"]
        if not isinstance(dim, int) or dim < 0:
            raise ModelError("dim must be a non-negative integer")
        basis = name["basis"]
        if not isinstance(basis, list) or not all(isinstance(b, dict) for b in basis):
            raise ModelError("basis must be a list of {P-exponent: coefficient} maps")
        return TargetGeometry(name.get("name", "inline"), dim, basis, name["tangent"])
    return _builtin(name)


def poincare_pair(a: KClass, b: KClass):
    """chi(X; a (x) b) = int ch(a) ch(b) td(T_X)."""
    a._check(b)
    return _bilinear(a.target.gram, a, b)


def twisted_pair(r: int, a: KClass, b: KClass):
    """(a, b)^(r) = int ch(a) ch(b) Eu(T-1)/Eu(Psi^r(T-1)) td(T_X)."""
    if r < 1:
        raise ValueError("r >= 1 required")
    a._check(b)
    return _bilinear(a.target.twisted_gram(r), a, b)


def twisted_pair_cohomological(r: int, M: int, a: KClass, b: KClass):
    """(1/M) int td(Psi^r(T_X - 1)) ch(a) ch(b), the sector pairing written in cohomology.

    Differs from ``twisted_pair`` by the constant r^(1 - dim) * M: per Chern root,
    r (1 - e^-x)/(1 - e^-rx) td(x) = td(rx), and the regularized trivial summands add r^2.
    """
    if r < 1 or M < 1:
        raise ValueError("r, M >= 1 required")
    a._check(b)
    t = a.target
    td = Coh.scalar(t.dim, 1)
    for c, mult in t.tangent_roots.items():
        if c:
            td = td * _cpow(_series_in_w(list(_todd_coeffs(t.dim)), r * c, t.dim), mult)
    return (a.ch() * b.ch() * td).integrate() * Fraction(1, M)


def _bilinear(g, a: KClass, b: KClass):
    out = 0
    for i, x in enumerate(a.coords):
        if not x:
            continue
        row = g[i]
        s = 0
        for j, y in enumerate(b.coords):
            if y and row[j]:
                s = s + y * row[j]
        if s:
            out = out + x * s
    return out


def chi(a: KClass):
    t = a.target
    return (a.ch() * t.td).integrate()


def adams_k(r: int, a: KClass) -> KClass:
    """Psi^r on K: line bundles L -> L^r, Lambda-coefficients by their Adams action."""
    if r < 1:
        raise ValueError("r >= 1 required")
    t = a.target
    if r == 1:
        return a
    u = a.u_coords()
    out = [0] * t.rank
    for j, x in enumerate(u):
        if not x:
            continue
        x = adams_scalar(r, x)
        # Psi^r(u^j) = (1 - P^r)^j
        img = _psi_u_power(r, j, t.dim)
        for k, v in enumerate(img):
            if v:
                out[k] = out[k] + x * v
    return KClass.from_u(t, out)


@lru_cache(maxsize=None)
def _psi_u_power(r: int, j: int, dim: int) -> tuple[Fraction, ...]:
    base = [-v for v in _P_power_in_u(r, dim)]
    base[0] += 1
    out = [Fraction(0)] * (dim + 1)
    out[0] = Fraction(1)
    for _ in range(j):
        nxt = [Fraction(0)] * (dim + 1)
        for i, a in enumerate(out):
            if a:
                for k, b in enumerate(base[: dim + 1 - i]):
                    nxt[i + k] += a * b
        out = nxt
    return tuple(out)


def euler_class(target: TargetGeometry, summands: dict) -> KClass:
    """Eu(sum of line bundles O(c) with multiplicities) = prod (1 - O(-c))^mult."""
    out = target.one()
    for c, mult in summands.items():
        if mult < 0:
            raise ModelError(
                "Euler class of a virtual class with negative summands is singular in K; use euler_ratio_class"
            )
        for _ in range(mult):
            out = out * (target.one() - target.line(-c))
    return out


def euler_ratio_class(target: TargetGeometry, r: int) -> Coh:
    """Eu(T_X - 1)/Eu(Psi^r(T_X - 1)) via Chern roots; the trivial summand gives the limit factor r."""
    if r < 1:
        raise ValueError("r >= 1 required")
    dim = target.dim
    out = Coh.scalar(dim, Fraction(r))
    coeffs = list(_eratio_coeffs(r, dim))
    for c, mult in target.tangent_roots.items():
        if c == 0:
            out = out * Fraction(1, r) ** mult if mult >= 0 else out * Fraction(r) ** (-mult)
            continue
        out = out * _cpow(_series_in_w(coeffs, c, dim), mult)
    return out


def dual_basis(target: TargetGeometry) -> list[KClass]:
    """phi^alpha with (phi_alpha, phi^beta) = delta."""
    ginv = target.gram_inv
    n = target.rank
    return [KClass(target, [ginv[g][b] for g in range(n)]) for b in range(n)]


def todd_class(target: TargetGeometry) -> Coh:
    return target.td
