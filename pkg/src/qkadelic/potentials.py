"""Generating-function bookkeeping over toy correlator tables.

Series are polynomials in slot symbols with ground-ring coefficients.  A
slot symbol is a tuple whose first entry names its family:

    ("t", r, label)            input t_r of cycle length r along basis label
    ("sec", M, j, label)       sector h0^j input of the Z_M factor
    ("adel", zeta, r, label)   adelic input t_r^(zeta)

Planck's constant is kept outside the ground ring as an integer exponent of
sqrt(hbar), so genus-0 terms (hbar^-1) are representable.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import factorial, prod

from .exact_scalars import RootOfUnity
from .kawasaki_graphs import sector_of
from .lambda_ring import LambdaElement, LambdaRing, adams, adams_scalar, _mono_degree
from .loopspace import AdelicVector, omega_adelic, omega_twisted

SN_MAX = 8


class ContractError(ValueError):
    pass


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    """Cycle type: l = ((k, l_k), ...) sorted, l_k > 0."""

    l: tuple

    @classmethod
    def of(cls, mult: dict) -> "Partition":
        return cls(tuple(sorted((k, v) for k, v in mult.items() if v)))

    @property
    def n(self) -> int:
        return sum(k * v for k, v in self.l)

    def mult(self, k: int) -> int:
        return dict(self.l).get(k, 0)

    def lengths(self) -> list[int]:
        return [k for k, v in self.l for _ in range(v)]

    def __str__(self):
        return "(" + ",".join(f"{k}^{v}" for k, v in self.l) + ")"


def partitions(n: int):
    """All cycle types of S_n."""

    def rec(left, maxpart):
        if left == 0:
            yield {}
            return
        for k in range(min(left, maxpart), 0, -1):
            for c in range(left // k, 0, -1):
                for rest in rec(left - c * k, k - 1):
                    yield {k: c, **rest}

    for d in rec(n, n):
        yield Partition.of(d)


def cycle_weight(l: Partition) -> Fraction:
    """Number of permutations in S_n of cycle type l: n! / prod r^{l_r} l_r!."""
    return Fraction(factorial(l.n), prod(k ** v * factorial(v) for k, v in l.l))


def cycle_type(perm: tuple) -> Partition:
    seen = [False] * len(perm)
    counts: dict = {}
    for i in range(len(perm)):
        if seen[i]:
            continue
        k = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            k += 1
        counts[k] = counts.get(k, 0) + 1
    return Partition.of(counts)


# ---------------------------------------------------------------------------
# functional series


def _slot_degree(mono: tuple) -> int:
    return sum(e for _, e in mono)


def _slot_index(sym) -> int:
    if sym[0] == "t":
        return sym[1]
    if sym[0] == "adel":
        return sym[2]
    return 1


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items(), key=lambda kv: repr(kv[0])))


@dataclass(frozen=True)
class SeriesBounds:
    max_slot_degree: int = 4
    max_index: int = 12


class FunctionalSeries:
    """sum c * sqrt(hbar)^h * prod slot^e, keyed by (slot monomial, h)."""

    __slots__ = ("terms", "bounds", "truncated")

    def __init__(self, terms: dict | None = None, bounds: SeriesBounds = SeriesBounds(), truncated: bool = False):
        self.bounds = bounds
        self.truncated = truncated
        out = {}
        for (mono, h), c in (terms or {}).items():
            if not c:
                continue
            if _slot_degree(mono) > bounds.max_slot_degree or any(_slot_index(s) > bounds.max_index for s, _ in mono):
                self.truncated = True
                continue
            out[(mono, h)] = c
        self.terms = out

    @classmethod
    def const(cls, c, hbar_half: int = 0, bounds: SeriesBounds = SeriesBounds()) -> "FunctionalSeries":
        return cls({((), hbar_half): c}, bounds)

    @classmethod
    def slot(cls, sym, c=Fraction(1), bounds: SeriesBounds = SeriesBounds()) -> "FunctionalSeries":
        return cls({(((sym, 1),), 0): c}, bounds)

    def _new(self, terms, truncated=False):
        return FunctionalSeries(terms, self.bounds, self.truncated or truncated)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return FunctionalSeries(out, self.bounds, self.truncated or other.truncated)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FunctionalSeries":
        return self._new({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, FunctionalSeries):
            return self.scale(other)
        out: dict = {}
        B = self.bounds
        for (m1, h1), a in self.terms.items():
            d1 = _slot_degree(m1)
            for (m2, h2), b in other.terms.items():
                if d1 + _slot_degree(m2) > B.max_slot_degree:
                    continue
                k = (_mono_mul(m1, m2), h1 + h2)
                t = a * b
                if not t:
                    continue
                out[k] = out[k] + t if k in out else t
        return FunctionalSeries(out, B, self.truncated or other.truncated)

    def __eq__(self, other):
        if not isinstance(other, FunctionalSeries):
            return NotImplemented
        return not (self - other).terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (mono, h), c in self.terms.items():
            m = "*".join(f"{_sym_str(s)}^{e}" if e > 1 else _sym_str(s) for s, e in mono)
            hb = f"sqrt_hbar^{h}" if h else ""
            parts.append("*".join(x for x in (f"({c})", hb, m) if x))
        return " + ".join(sorted(parts))

    def restrict_index(self, N: int) -> "FunctionalSeries":
        return self._new({k: v for k, v in self.terms.items() if all(_slot_index(s) <= N for s, _ in k[0])})

    # operations on the series --------------------------------------------
    def rescale_indices(self, k: int) -> "FunctionalSeries":
        """R_k: t_r -> t_{rk}."""
        out = {}
        for (mono, h), c in self.terms.items():
            moved = [(((s[0], s[1] * k) + s[2:] if s[0] == "t" else s), e) for s, e in mono]
            nm = tuple(sorted(moved, key=lambda kv: repr(kv[0])))
            out[(nm, h)] = c
        return self._new(out)

    def adams(self, k: int) -> "FunctionalSeries":
        """Psi^k on coefficients and hbar; slot symbols are coordinates and stay fixed."""
        return self._new({(mono, h * k): adams_scalar(k, c) for (mono, h), c in self.terms.items()})

    def exp(self) -> "FunctionalSeries":
        for (mono, h), c in self.terms.items():
            if not mono and not _nilpotent(c):
                raise ValueError("exp needs slot-free terms in the maximal ideal")
        one = FunctionalSeries.const(_one_like(self), 0, self.bounds)
        out = one
        term = one
        n = 0
        while True:
            n += 1
            term = (term * self).scale(Fraction(1, n))
            if not term.terms:
                break
            out = out + term
            if n > 64:
                raise ValueError("exp did not terminate")
        return out


def _sym_str(s) -> str:
    if s[0] == "t":
        return f"t[{s[1]},{s[2]}]"
    return str(s)


def _nilpotent(c) -> bool:
    if isinstance(c, LambdaElement):
        return () not in c.terms
    return not c


def _one_like(fs: FunctionalSeries):
    for c in fs.terms.values():
        if isinstance(c, LambdaElement):
            return c.ring.one()
    return Fraction(1)


# ---------------------------------------------------------------------------
# correlator tables


class CorrelatorTable:
    """Toy correlators <...>_{g,l,d} on basis labels, extended Psi-semilinearly.

    ``base`` maps (g, Partition, d) to a function of the per-cycle-group label
    tuples (or to a constant).  Inputs are dicts label -> coefficient; a
    coefficient c in a length-r slot enters as Psi^r(c).
    """

    def __init__(self, base: dict, labels: list, ring: LambdaRing | None = None):
        self.base = base
        self.labels = list(labels)
        self.ring = ring

    def _base_value(self, g, l, d, label_groups):
        f = self.base.get((g, l, d))
        if f is None:
            return 0
        return f(label_groups) if callable(f) else f

    def evaluate(self, g: int, l: Partition, d: int, inputs: tuple):
        """inputs: per cycle length k (in l order), a tuple of l_k input dicts."""
        groups = [(k, grp) for (k, _), grp in zip(l.l, inputs)]
        slots = [(k, inp) for k, grp in groups for inp in grp]
        total = 0
        for choice in product(*[list(inp.items()) for _, inp in slots]):
            coeff = 1
            for (k, _), (lab, c) in zip(slots, choice):
                coeff = coeff * adams_scalar(k, c)
            labs = []
            pos = 0
            for k, grp in groups:
                labs.append(tuple(lab for lab, _ in choice[pos:pos + len(grp)]))
                pos += len(grp)
            v = self._base_value(g, l, d, tuple(labs))
            if v:
                total = total + coeff * v
        return total

    def support(self):
        return list(self.base)

    @classmethod
    def from_json(cls, text: str, ring: LambdaRing | None = None) -> "CorrelatorTable":
        """{"labels": [...], "entries": [{"g": 0, "l": {"1": 3}, "d": 1, "value": "1/2"}, ...]}"""
        data = json.loads(text)
        base = {}
        for e in data["entries"]:
            l = Partition.of({int(k): int(v) for k, v in e.get("l", {}).items()})
            v = Fraction(e["value"])
            if ring is not None and e.get("Q", 0):
                v = ring.Q() ** int(e["Q"]) * v
            base[(int(e["g"]), l, int(e.get("d", 0)))] = v
        return cls(base, data.get("labels", [0]), ring)


def check_relative_linearity(T: CorrelatorTable, trials: int = 50, seed: int = 0, scalars=None) -> tuple[int, list]:
    """Scaling one length-r input by nu multiplies the value by Psi^r(nu)."""
    rng = random.Random(seed)
    failures = []
    support = [key for key in T.support() if key[1].l]
    if not support:
        return 0, failures
    ring = T.ring
    checks = 0
    for _ in range(trials):
        g, l, d = rng.choice(support)
        inputs = tuple(tuple({lab: Fraction(rng.randint(-3, 3)) for lab in T.labels} for _ in range(v)) for _, v in l.l)
        gi = rng.randrange(len(l.l))
        si = rng.randrange(l.l[gi][1])
        if scalars is not None:
            nu = rng.choice(scalars)
        elif ring is not None and ring.spec.novikov_count:
            nu = ring.Q() * rng.randint(1, 3) + rng.randint(-2, 2)
        else:
            nu = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        k = l.l[gi][0]
        scaled = [list(grp) for grp in inputs]
        scaled[gi][si] = {lab: c * nu for lab, c in scaled[gi][si].items()}
        lhs = T.evaluate(g, l, d, tuple(tuple(grp) for grp in scaled))
        rhs = adams_scalar(k, nu) * T.evaluate(g, l, d, inputs)
        checks += 1
        if not lhs == rhs:
            failures.append({"g": g, "l": str(l), "d": d, "group": gi, "slot": si})
    return checks, failures


def assemble_genus_potential(T: CorrelatorTable, g: int, max_n: int, max_d: int,
                             bounds: SeriesBounds = SeriesBounds()) -> FunctionalSeries:
    """F_g = sum_d Q^d sum_l (1/prod l_r!) <t_1,...; t_2,...; ...>_{g,l,d}, every length-r slot fed t_r."""
    out = FunctionalSeries({}, bounds)
    Q = T.ring.Q() if T.ring is not None and T.ring.spec.novikov_count else None
    for d in range(max_d + 1):
        qd = (Q ** d) if (Q is not None and d) else 1
        for n in range(0, max_n + 1):
            for l in partitions(n):
                if (g, l, d) not in T.base:
                    continue
                w = Fraction(1, prod(factorial(v) for _, v in l.l))
                slots = [k for k, v in l.l for _ in range(v)]
                for labs in product(T.labels, repeat=len(slots)):
                    groups = []
                    pos = 0
                    for k, v in l.l:
                        groups.append(tuple(labs[pos:pos + v]))
                        pos += v
                    val = T._base_value(g, l, d, tuple(groups))
                    if not val:
                        continue
                    mono: dict = {}
                    for k, lab in zip(slots, labs):
                        s = ("t", k, lab)
                        mono[s] = mono.get(s, 0) + 1
                    key = (tuple(sorted(mono.items(), key=lambda kv: repr(kv[0]))), 0)
                    term = FunctionalSeries({key: val * w * qd if qd != 1 else val * w}, bounds)
                    out = out + term
    return out


def hbar_weighted(Fs: dict) -> FunctionalSeries:
    """sum_g hbar^{g-1} F_g."""
    out = None
    for g, F in Fs.items():
        t = FunctionalSeries({(m, h + 2 * (g - 1)): c for (m, h), c in F.terms.items()}, F.bounds)
        out = t if out is None else out + t
    return out


def descendant_log(Fs: dict, K: int) -> FunctionalSeries:
    """G = sum_k Psi^k R_k (sum_g hbar^{g-1} F_g) / k for k <= K."""
    H = hbar_weighted(Fs)
    out = FunctionalSeries({}, H.bounds)
    for k in range(1, K + 1):
        out = out + H.rescale_indices(k).adams(k).scale(Fraction(1, k))
    return out


def assemble_descendant(Fs: dict, K: int) -> FunctionalSeries:
    return descendant_log(Fs, K).exp()


def hbar_adams_consistent(ring: LambdaRing, g_max: int = 3, k_max: int = 4) -> bool:
    """hbar^{k(g-1)} = Psi^k(hbar^{g-1}) for g <= g_max, k <= k_max, both in the ground ring (g >= 1)
    and in the sqrt(hbar)-exponent bookkeeping of FunctionalSeries (all g)."""
    for g in range(0, g_max + 1):
        for k in range(1, k_max + 1):
            s = FunctionalSeries.const(Fraction(1), 2 * (g - 1)).adams(k)
            if set(s.terms) != {((), 2 * k * (g - 1))}:
                return False
            if g >= 1 and ring.spec.include_planck and 2 * k * (g - 1) <= 2 * ring.D:
                if adams(k, ring.hbar() ** (g - 1)) != ring.hbar() ** (k * (g - 1)):
                    return False
    return True


# ---------------------------------------------------------------------------
# Moebius inversion


def primes_upto(P: int) -> list[int]:
    return [p for p in range(2, P + 1) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


class DirichletOperator:
    """sum_n c_n x_n with x_a x_b = x_{ab}, truncated at index N."""

    def __init__(self, coeffs: dict, N: int):
        self.N = N
        self.c = {n: v for n, v in coeffs.items() if v and n <= N}

    def __mul__(self, other):
        out: dict = {}
        for a, u in self.c.items():
            for b, v in other.c.items():
                if a * b <= self.N:
                    out[a * b] = out.get(a * b, 0) + u * v
        return DirichletOperator(out, self.N)


def mobius_coefficients(P: int, N: int) -> dict:
    """prod_{p <= P} (1 - x_p/p) * sum_{k <= N} x_k/k as {n: coefficient}."""
    op = DirichletOperator({k: Fraction(1, k) for k in range(1, N + 1)}, N)
    for p in primes_upto(P):
        op = DirichletOperator({1: Fraction(1), p: Fraction(-1, p)}, N) * op
    return op.c


def mobius_recover(G: FunctionalSeries, P: int, N: int) -> FunctionalSeries:
    """prod_{p <= P} (1 - Psi^p R_p / p) G, restricted to slot index <= N."""
    out = G
    for p in primes_upto(P):
        out = out - out.rescale_indices(p).adams(p).scale(Fraction(1, p))
    return out.restrict_index(N)


# ---------------------------------------------------------------------------
# disconnected exponential and S_n resummation


@dataclass
class Report:
    name: str
    passed: bool
    checks: int
    detail: dict

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "checks": self.checks, "detail": {k: str(v) for k, v in self.detail.items()}}


def disconnected_exp_check(nu: LambdaElement, D: int) -> Report:
    """sum_l prod_k (Psi^k nu / k)^{l_k} / l_k! = exp(sum_k Psi^k nu / k) to Lambda_+-degree D."""
    ring = nu.ring
    if D > ring.D:
        raise ValueError("degree bound exceeds the ring truncation")
    if () in nu.terms:
        raise ValueError("nu must lie in the maximal ideal")
    psi = {k: adams(k, nu) * Fraction(1, k) for k in range(1, D + 1)}
    lhs = ring.zero()
    count = 0
    for n in range(0, D + 1):
        for l in partitions(n):
            term = ring.one()
            for k, v in l.l:
                term = term * (psi[k] ** v) * Fraction(1, factorial(v))
            lhs = lhs + term
            count += 1
    s = ring.zero()
    for k in range(1, D + 1):
        s = s + psi[k]
    rhs = ring.one()
    term = ring.one()
    for n in range(1, 2 * D + 2):
        term = term * s * Fraction(1, n)
        if not term:
            break
        rhs = rhs + term
    lhs, rhs = lhs.truncate(D), rhs.truncate(D)
    return Report("disconnected_exp", lhs == rhs, count, {} if lhs == rhs else {"lhs": lhs, "rhs": rhs})


def sn_resum_check(str_h, n: int) -> Report:
    """(1/n!) sum_{h in S_n} str_h = sum_{l |- n} str(l) / prod(r^{l_r} l_r!), enumerating S_n."""
    if n > SN_MAX:
        raise ValueError(f"n > {SN_MAX} refused")
    by_class: dict = {}
    total = 0
    class_ok = True
    count = 0
    for perm in permutations(range(n)):
        v = str_h(perm)
        ct = cycle_type(perm)
        if ct in by_class:
            class_ok = class_ok and by_class[ct] == v
        else:
            by_class[ct] = v
        total = total + v
        count += 1
    lhs = total * Fraction(1, factorial(n))
    rhs = 0
    for l in partitions(n):
        rhs = rhs + by_class[l] * (cycle_weight(l) / factorial(n))
    ok = class_ok and lhs == rhs
    return Report(f"sn_resum(n={n})", ok, count, {} if ok else {"lhs": lhs, "rhs": rhs, "class_function": class_ok})


# ---------------------------------------------------------------------------
# adelic tensor product


def sector_reindex(bound: int) -> dict:
    """(M, j) for M <= bound, j in Z_M  ->  (zeta, r) with m(zeta) r = M; asserted bijective."""
    out = {}
    for M in range(1, bound + 1):
        for j in range(M):
            lab = sector_of(M, j)
            out[(M, j)] = (lab.zeta, lab.r)
    targets = {(z, r) for m in range(1, bound + 1) for r in range(1, bound // m + 1)
               for z in _primitive(m)}
    if len(set(out.values())) != len(out) or set(out.values()) != targets:
        raise AssertionError("sector re-indexing is not a bijection")
    return out


def _primitive(m: int):
    from math import gcd

    return [RootOfUnity(Fraction(t, m)) for t in range(m) if m == 1 or gcd(t, m) == 1]


def homogeneity_violations(F: FunctionalSeries) -> list:
    """Monomials violating F(t, hbar) = F(t/sqrt(hbar), 1): need sqrt(hbar)-exponent = -slot degree.
    Slot-free terms are exempt (genus-one anomaly, constants)."""
    return [(m, h) for (m, h) in F.terms if m and h != -_slot_degree(m)]


def _novikov_power(c, M: int):
    """Q -> Q^M on a ground-ring coefficient."""
    if not isinstance(c, LambdaElement):
        return c
    out = {}
    for mono, v in c.terms.items():
        nm = tuple(sorted(((var, e * M) if var[0] == "Q" else (var, e)) for var, e in mono))
        if _mono_degree(nm) > c.ring.D:
            continue
        out[nm] = out[nm] + v if nm in out else v
    return LambdaElement(c.ring, out)


def adelic_tensor(factors: dict, bound: int, bounds: SeriesBounds = SeriesBounds()) -> FunctionalSeries:
    """prod_M <D^tw_M>(sum_zeta t^(zeta)_{r}/sqrt(hbar)^r h_zeta, 1, Q^M) over M <= bound."""
    index = sector_reindex(bound)
    out = None
    for M, F in sorted(factors.items()):
        if M > bound:
            continue
        bad = homogeneity_violations(F)
        if bad:
            raise ContractError(f"factor M={M} violates the homogeneity contract at {bad[0]}")
        terms = {}
        for (mono, h), c in F.terms.items():
            new: dict = {}
            sq = 0
            for s, e in mono:
                if s[0] != "sec" or s[1] != M:
                    raise ContractError(f"factor M={M} has a non-sector slot {s}")
                zeta, r = index[(M, s[2] % M)]
                key = ("adel", zeta, r, s[3])
                new[key] = new.get(key, 0) + e
                sq -= r * e
            nm = tuple(sorted(new.items(), key=lambda kv: repr(kv[0])))
            k = (nm, sq)  # hbar -> 1 drops h; each slot brings sqrt(hbar)^{-r}
            v = _novikov_power(c, M)
            terms[k] = terms[k] + v if k in terms else v
        part = FunctionalSeries(terms, bounds)
        out = part if out is None else out * part
    return out if out is not None else FunctionalSeries.const(Fraction(1), 0, bounds)


def reindex_sector_vectors(vectors: dict) -> AdelicVector:
    """{M: SectorVector in sector form} -> AdelicVector with components at (zeta, M/m(zeta))."""
    comps = {}
    for M, v in vectors.items():
        for z, f in v.components.items():
            comps[(z, M // z.order)] = f
    return AdelicVector(comps)


def block_pairing_preserved(f: dict, g: dict) -> bool:
    """sum_M Omega^tw_M(f_M, g_M) equals the adelic form on the re-indexed vectors."""
    lhs = 0
    for M in f:
        if M in g:
            lhs = lhs + omega_twisted(M, f[M], g[M])
    rhs = omega_adelic(reindex_sector_vectors(f), reindex_sector_vectors(g), block=False)
    return lhs == rhs
