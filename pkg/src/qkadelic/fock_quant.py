"""Quantized quadratic Hamiltonians on truncated polynomial Fock states.

A state is a polynomial in position coordinates q_1..q_N whose coefficients
carry an integer power of hbar (negative powers allowed).  Quantization table:

    q_a q_b -> hbar^-1 q_a q_b,   q_a p_b -> q_a d_b,   p_a p_b -> hbar d_a d_b

Only exponentials of pure second-order operators are implemented; they
terminate on polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

# sign in [F^, G^] = EPS * {F, G}^ for {F, G} = sum(dF/dq dG/dp - dF/dp dG/dq)
EPS = -1


def _zero_vec(n):
    return (0,) * n


def _add_vec(a, b):
    return tuple(x + y for x, y in zip(a, b))


class FockState:
    """sum c * hbar^h * q^e, keyed by (e, h)."""

    __slots__ = ("vars", "poly", "max_degree", "truncated")

    def __init__(self, vars, poly: dict | None = None, max_degree: int = 12, truncated: bool = False):
        self.vars = tuple(vars)
        self.max_degree = max_degree
        self.truncated = truncated
        out = {}
        for (e, h), c in (poly or {}).items():
            if not c:
                continue
            if len(e) != len(self.vars):
                raise ValueError("exponent length does not match variables")
            if sum(e) > max_degree:
                self.truncated = True
                continue
            out[(tuple(e), h)] = c
        self.poly = out

    @classmethod
    def monomial(cls, vars, exps, coeff=1, hbar: int = 0, max_degree: int = 12) -> "FockState":
        return cls(vars, {(tuple(exps), hbar): Fraction(coeff) if isinstance(coeff, int) else coeff}, max_degree)

    @classmethod
    def one(cls, vars, max_degree: int = 12) -> "FockState":
        return cls.monomial(vars, _zero_vec(len(tuple(vars))), 1, 0, max_degree)

    @property
    def hbar_floor(self):
        return min((h for _, h in self.poly), default=0)

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.poly), default=0)

    def _like(self, poly, truncated=False) -> "FockState":
        return FockState(self.vars, poly, self.max_degree, self.truncated or truncated)

    def __add__(self, other: "FockState") -> "FockState":
        self._check(other)
        out = dict(self.poly)
        for k, v in other.poly.items():
            out[k] = out[k] + v if k in out else v
        return FockState(self.vars, out, min(self.max_degree, other.max_degree), self.truncated or other.truncated)

    def __neg__(self):
        return self._like({k: -v for k, v in self.poly.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, hbar: int = 0) -> "FockState":
        return self._like({(e, h + hbar): v * c for (e, h), v in self.poly.items()})

    def __mul__(self, other):
        if not isinstance(other, FockState):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for (e1, h1), a in self.poly.items():
            for (e2, h2), b in other.poly.items():
                k = (_add_vec(e1, e2), h1 + h2)
                t = a * b
                out[k] = out[k] + t if k in out else t
        return FockState(self.vars, out, min(self.max_degree, other.max_degree), self.truncated or other.truncated)

    def __eq__(self, other):
        if not isinstance(other, FockState):
            return NotImplemented
        d = self - other
        return not d.poly

    def __repr__(self):
        if not self.poly:
            return "0"
        parts = []
        for (e, h), c in sorted(self.poly.items(), key=lambda kv: (sum(kv[0][0]), kv[0])):
            mon = "*".join(f"{v}^{k}" if k > 1 else str(v) for v, k in zip(self.vars, e) if k)
            hb = f"hbar^{h}" if h else ""
            parts.append("*".join(x for x in (f"({c})", hb, mon) if x))
        return " + ".join(parts)

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError("states live on different variables")


@dataclass
class LinearOperator:
    """sum coeff * hbar^h * q^mult * d^diff  (derivatives act first)."""

    nvars: int
    terms: list = field(default_factory=list)  # (coeff, h, mult, diff)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.nvars, self.terms + other.terms)

    def scale(self, c) -> "LinearOperator":
        return LinearOperator(self.nvars, [(a * c, h, m, d) for a, h, m, d in self.terms])

    @classmethod
    def identity(cls, n: int) -> "LinearOperator":
        z = _zero_vec(n)
        return cls(n, [(Fraction(1), 0, z, z)])

    @classmethod
    def mult_by(cls, n: int, a: int, coeff=Fraction(1)) -> "LinearOperator":
        m = tuple(1 if i == a else 0 for i in range(n))
        return cls(n, [(coeff, 0, m, _zero_vec(n))])

    @classmethod
    def diff_by(cls, n: int, a: int, coeff=Fraction(1), hbar: int = 0) -> "LinearOperator":
        d = tuple(1 if i == a else 0 for i in range(n))
        return cls(n, [(coeff, hbar, _zero_vec(n), d)])

    def weights(self) -> list[Fraction]:
        """hbar-weight + (deg q - deg d)/2 for each term."""
        return [h + Fraction(sum(m) - sum(d), 2) for _, h, m, d in self.terms]


def apply_operator(op: LinearOperator, s: FockState) -> FockState:
    if op.nvars != len(s.vars):
        raise ValueError("operator and state have different variable counts")
    out: dict = {}
    trunc = s.truncated
    for (e, h), c in s.poly.items():
        for a, hh, m, d in op.terms:
            if any(ei < di for ei, di in zip(e, d)):
                continue
            f = 1
            for ei, di in zip(e, d):
                for j in range(di):
                    f *= ei - j
            ne = tuple(ei - di + mi for ei, di, mi in zip(e, d, m))
            if sum(ne) > s.max_degree:
                trunc = True
                continue
            k = (ne, h + hh)
            t = c * a * f
            out[k] = out[k] + t if k in out else t
    return FockState(s.vars, out, s.max_degree, trunc)


def _matrix(n, rows):
    if rows is None:
        return [[0] * n for _ in range(n)]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("table must be N x N")
    return [list(r) for r in rows]


@dataclass
class QuadHamiltonian:
    """H = sum_{a,b} qq[a][b] q_a q_b + qp[a][b] q_a p_b + pp[a][b] p_a p_b, with qq and pp symmetric."""

    n: int
    qq: list = None
    qp: list = None
    pp: list = None

    def __post_init__(self):
        self.qq = _matrix(self.n, self.qq)
        self.qp = _matrix(self.n, self.qp)
        self.pp = _matrix(self.n, self.pp)
        for t in (self.qq, self.pp):
            for a in range(self.n):
                for b in range(a):
                    if t[a][b] != t[b][a]:
                        raise ValueError("qq and pp tables must be symmetric")

    def is_pure_pp(self) -> bool:
        return not any(x for row in self.qq + self.qp for x in row)

    def __add__(self, other):
        add = lambda A, B: [[x + y for x, y in zip(r, s)] for r, s in zip(A, B)]
        return QuadHamiltonian(self.n, add(self.qq, other.qq), add(self.qp, other.qp), add(self.pp, other.pp))

    def to_phase(self) -> dict:
        """Phase-space polynomial {(qexp, pexp): coeff}."""
        n = self.n
        out: dict = {}

        def put(qe, pe, c):
            if c:
                k = (tuple(qe), tuple(pe))
                out[k] = out.get(k, 0) + c

        for a, b in iproduct(range(n), repeat=2):
            put(_unit2(n, a, b), _zero_vec(n), self.qq[a][b])
            put(_unit2(n, a), _unit2(n, b), self.qp[a][b])
            put(_zero_vec(n), _unit2(n, a, b), self.pp[a][b])
        return {k: v for k, v in out.items() if v}

    @classmethod
    def from_phase(cls, n: int, poly: dict) -> "QuadHamiltonian":
        qq = [[0] * n for _ in range(n)]
        qp = [[0] * n for _ in range(n)]
        pp = [[0] * n for _ in range(n)]
        for (qe, pe), c in poly.items():
            if sum(qe) + sum(pe) != 2:
                raise ValueError("not a quadratic form")
            qi = [i for i in range(n) for _ in range(qe[i])]
            pi = [i for i in range(n) for _ in range(pe[i])]
            if len(qi) == 2:
                a, b = qi
                _sym_put(qq, a, b, c)
            elif len(pi) == 2:
                a, b = pi
                _sym_put(pp, a, b, c)
            else:
                qp[qi[0]][pi[0]] += c
        return cls(n, qq, qp, pp)


def _unit2(n, a, b=None):
    v = [0] * n
    v[a] += 1
    if b is not None:
        v[b] += 1
    return tuple(v)


def _sym_put(t, a, b, c):
    if a == b:
        t[a][a] += c
    else:
        t[a][b] += Fraction(c) / 2
        t[b][a] += Fraction(c) / 2


def quantize_quadratic(H: QuadHamiltonian) -> LinearOperator:
    n = H.n
    z = _zero_vec(n)
    terms = []
    for a, b in iproduct(range(n), repeat=2):
        if H.qq[a][b]:
            terms.append((H.qq[a][b], -1, _unit2(n, a, b), z))
        if H.qp[a][b]:
            terms.append((H.qp[a][b], 0, _unit2(n, a), _unit2(n, b)))
        if H.pp[a][b]:
            terms.append((H.pp[a][b], 1, z, _unit2(n, a, b)))
    return LinearOperator(n, terms)


def exp_apply(H: QuadHamiltonian, s: FockState, max_power: int | None = None) -> FockState:
    """exp(H^/2) s for a pure second-order H; ``max_power`` caps the hbar order of the series."""
    if not H.is_pure_pp():
        raise ValueError("exp_apply needs a pure pp Hamiltonian; the series would not terminate")
    op = quantize_quadratic(H).scale(Fraction(1, 2))
    out = s
    term = s
    k = 0
    while True:
        k += 1
        if max_power is not None and k > max_power:
            break
        term = apply_operator(op, term).scale(Fraction(1, k))
        if not term.poly:
            break
        out = out + term
    return out


def dilaton_shift(s: FockState, v) -> FockState:
    """x -> s(x - v): substitute q_a -> q_a - v_a."""
    n = len(s.vars)
    if len(v) != n:
        raise ValueError("shift vector has wrong length")
    out = FockState(s.vars, {}, s.max_degree, s.truncated)
    lin = [FockState(s.vars, {(_unit2(n, a), 0): Fraction(1), (_zero_vec(n), 0): -v[a]}, s.max_degree) for a in range(n)]
    for (e, h), c in s.poly.items():
        t = FockState(s.vars, {(_zero_vec(n), h): c}, s.max_degree)
        for a, k in enumerate(e):
            for _ in range(k):
                t = t * lin[a]
        out = out + t
    return out


def pp_hamiltonian(S) -> QuadHamiltonian:
    """The pp-Hamiltonian (p, S p) of a symmetric matrix S."""
    return QuadHamiltonian(len(S), pp=S)


def polarization_transport(S, s: FockState) -> FockState:
    """exp((hbar/2) sum S_ab d_a d_b) s."""
    return exp_apply(pp_hamiltonian(S), s)


def transported_position(S, a: int, s: FockState) -> FockState:
    """(q_a + hbar sum_b S_ab d_b) s."""
    n = len(s.vars)
    op = LinearOperator.mult_by(n, a)
    for b in range(n):
        if S[a][b]:
            op = op + LinearOperator.diff_by(n, b, S[a][b], hbar=1)
    return apply_operator(op, s)


def conjugation_check(S, a: int, s: FockState) -> bool:
    """T q_a T^-1 s = (q_a + hbar S d) s with T = polarization_transport."""
    neg = [[-x for x in row] for row in S]
    lhs = polarization_transport(S, apply_operator(LinearOperator.mult_by(len(s.vars), a), polarization_transport(neg, s)))
    return lhs == transported_position(S, a, s)


def poisson_bracket(F: QuadHamiltonian, G: QuadHamiltonian) -> QuadHamiltonian:
    """{F, G} = sum_a dF/dq_a dG/dp_a - dF/dp_a dG/dq_a."""
    n = F.n
    f, g = F.to_phase(), G.to_phase()
    out: dict = {}

    def d(poly, which, a):
        res = {}
        for (qe, pe), c in poly.items():
            e = qe if which == "q" else pe
            if e[a] == 0:
                continue
            ne = tuple(x - (1 if i == a else 0) for i, x in enumerate(e))
            key = (ne, pe) if which == "q" else (qe, ne)
            res[key] = res.get(key, 0) + c * e[a]
        return res

    def mul_into(A, B, sign):
        for (q1, p1), x in A.items():
            for (q2, p2), y in B.items():
                k = (_add_vec(q1, q2), _add_vec(p1, p2))
                out[k] = out.get(k, 0) + sign * x * y

    for a in range(n):
        mul_into(d(f, "q", a), d(g, "p", a), 1)
        mul_into(d(f, "p", a), d(g, "q", a), -1)
    return QuadHamiltonian.from_phase(n, {k: v for k, v in out.items() if v})


def monomials_up_to(vars, degree: int, max_degree: int = 12):
    n = len(vars)

    def rec(i, left):
        if i == n:
            yield ()
            return
        for k in range(left + 1):
            for rest in rec(i + 1, left - k):
                yield (k,) + rest

    for e in rec(0, degree):
        yield FockState.monomial(vars, e, 1, 0, max_degree)


@dataclass
class CommutatorReport:
    passed: bool
    central: object  # scalar c with [F^, G^] - EPS {F,G}^ = c, or None if not central
    checked: int


def commutator_check(F: QuadHamiltonian, G: QuadHamiltonian, vars, degree: int = 6) -> CommutatorReport:
    """Compare [F^, G^] with EPS * {F, G}^ on monomials of degree <= ``degree``; record any central remainder."""
    Fh, Gh = quantize_quadratic(F), quantize_quadratic(G)
    br = poisson_bracket(F, G)
    Bh = quantize_quadratic(QuadHamiltonian(br.n, [[x * EPS for x in r] for r in br.qq],
                                            [[x * EPS for x in r] for r in br.qp], [[x * EPS for x in r] for r in br.pp]))
    central = None
    consistent = True
    count = 0
    for mono in monomials_up_to(vars, degree, degree + 4):
        comm = apply_operator(Fh, apply_operator(Gh, mono)) - apply_operator(Gh, apply_operator(Fh, mono))
        rem = comm - apply_operator(Bh, mono)
        count += 1
        key = next(iter(mono.poly))
        if set(rem.poly) - {key}:
            consistent = False
            continue
        c = rem.poly.get(key, 0)
        if central is None:
            central = c
        elif central != c:
            consistent = False
    return CommutatorReport(consistent, central, count)


# ---------------------------------------------------------------------------
# Wick sums


@dataclass
class WickResult:
    operator: FockState
    graphs: FockState
    agree: bool
    matchings: int


def _groups_of(vertices: list[FockState]) -> list[set]:
    groups = []
    for v in vertices:
        g = {i for (e, _), c in v.poly.items() for i, k in enumerate(e) if k}
        groups.append(g)
    for i in range(len(groups)):
        for j in range(i):
            if groups[i] & groups[j]:
                raise ValueError("vertex variable groups must be disjoint")
    return groups


def _cross(S, groups):
    n = len(S)
    owner = {}
    for gi, g in enumerate(groups):
        for a in g:
            owner[a] = gi
    return [[S[a][b] if a in owner and b in owner and owner[a] != owner[b] else 0 for b in range(n)] for a in range(n)]


def _matchings(half, max_edges):
    """Partial matchings of the half-edge list pairing different vertices; yields list of index pairs."""

    def rec(i, used, edges):
        while i < len(half) and i in used:
            i += 1
        if i >= len(half):
            yield list(edges)
            return
        # leave i unmatched
        yield from rec(i + 1, used | {i}, edges)
        if max_edges is not None and len(edges) >= max_edges:
            return
        for j in range(i + 1, len(half)):
            if j in used or half[j][0] == half[i][0]:
                continue
            edges.append((i, j))
            yield from rec(i + 1, used | {i, j}, edges)
            edges.pop()

    yield from rec(0, frozenset(), [])


def wick_sum(vertices: list[FockState], S, max_edges: int | None = None) -> WickResult:
    """Contract vertices along cross-group propagators S, by exp_apply and by matching enumeration."""
    if not vertices:
        raise ValueError("need at least one vertex")
    vars_ = vertices[0].vars
    n = len(vars_)
    maxd = sum(v.max_degree for v in vertices)
    groups = _groups_of(vertices)
    Sx = _cross(S, groups)
    prod = FockState.one(vars_, maxd)
    for v in vertices:
        prod = prod * FockState(vars_, v.poly, maxd)
    op_res = exp_apply(pp_hamiltonian(Sx), prod, max_power=max_edges)

    graph_res: dict = {}
    count = 0
    for combo in iproduct(*[list(v.poly.items()) for v in vertices]):
        coeff = Fraction(1)
        hsum = 0
        half = []
        for vi, ((e, h), c) in enumerate(combo):
            coeff = coeff * c
            hsum += h
            for a, k in enumerate(e):
                half.extend([(vi, a)] * k)
        for edges in _matchings(half, max_edges):
            w = coeff
            ok = True
            for i, j in edges:
                s_ij = Sx[half[i][1]][half[j][1]]
                if not s_ij:
                    ok = False
                    break
                w = w * s_ij
            if not ok:
                continue
            count += 1
            matched = {i for e in edges for i in e}
            exps = [0] * n
            for idx, (_, a) in enumerate(half):
                if idx not in matched:
                    exps[a] += 1
            key = (tuple(exps), hsum + len(edges))
            graph_res[key] = graph_res[key] + w if key in graph_res else w
    graphs = FockState(vars_, graph_res, maxd)
    return WickResult(op_res, graphs, op_res == graphs, count)
