"""Command-line verification harness.

    verify [SUITES...] --target {point|p1|p2|file:PATH} --max-r N --max-m N --max-M N
           --series-order N --lambda-degree N --seed N --report {text|json}
           --replay FILE --config FILE

Every suite is a pair of functions: ``cases(ctx)`` lists JSON-able case
descriptions and ``check(case, ctx)`` returns ``(checks, failure)``.  A failing
case is reported together with the configuration that produced it, so the
payload can be fed back through ``--replay``.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable

from . import oracles
from .exact_scalars import RootOfUnity, roots_up_to
from .fock_quant import (FockState, QuadHamiltonian, commutator_check, conjugation_check,
                         monomials_up_to, wick_sum)
from .kawasaki_graphs import (DecoratedGraph, GraphBounds, enumerate_graphs, graph_weights, h_of,
                              hurwitz_euler, input_substitution, sector_of)
from .lambda_ring import GroundRingSpec, LambdaRing, adams_scalar
from .loopspace import (BalancedNodeError, LoopSequence, SectorVector, adelic_map, darboux_basis,
                        fourier_sectors, omega_adelic, omega_coh, omega_fake, omega_inf, omega_twisted,
                        propagator_map)
from .potentials import (FunctionalSeries, SeriesBounds, block_pairing_preserved, disconnected_exp_check,
                         mobius_coefficients, mobius_recover, sector_reindex, sn_resum_check)
from .qfunc import QRational, expand_at, rou_value
from .rr_twist import (MultClass, box_pair_check, composite_delta_check, em_asymptotics, em_log_product,
                       qch, rearrange_product)
from .series import Laurent
from .target_model import KClass, ModelError, adams_k, load_target, poincare_pair, twisted_pair

SUITE_NAMES = (
    "adelic-symplecticity", "darboux", "box-pair", "rearrange", "euler-maclaurin", "qch-symplectic",
    "propagator-graph", "stone-von-neumann", "wick", "hurwitz", "mobius", "disconnected-exp",
    "sector-fourier", "twisted-pairing", "input-substitution",
)
TIMEOUT_ENV = "ALL_SUITES_TIMEOUT_SECS"


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"field '{field_name}': {message}")
        self.field_name = field_name


@dataclass
class SuiteConfig:
    target: str = "point"
    max_r: int = 3
    max_m: int = 4
    max_M: int = 4
    series_order: int = 12
    lambda_degree: int = 6
    seed: int = 0
    novikov_count: int = 1
    include_planck: bool = True
    suites: list = field(default_factory=lambda: list(SUITE_NAMES))

    def validate(self) -> "SuiteConfig":
        if not isinstance(self.target, str) or not (
                self.target in ("point", "p1", "p2") or self.target.startswith("file:")):
            raise ConfigError("target", f"expected point, p1, p2 or file:PATH, got {self.target!r}")
        for name in ("max_r", "max_m", "max_M", "series_order", "lambda_degree"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(name, f"must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed", f"must be an integer, got {self.seed!r}")
        if not isinstance(self.novikov_count, int) or self.novikov_count < 0:
            raise ConfigError("novikov_count", "must be a non-negative integer")
        unknown = [s for s in self.suites if s not in SUITE_NAMES]
        if unknown:
            raise ConfigError("suites", f"unknown suite {unknown[0]!r}")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "SuiteConfig":
        names = {f.name for f in fields(cls)}
        bad = [k for k in d if k not in names]
        if bad:
            raise ConfigError(bad[0], "unknown configuration key")
        return cls(**d).validate()


_INT_KEYS = ("max_r", "max_m", "max_M", "series_order", "lambda_degree", "seed", "novikov_count")


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; keys may use '-' or '_'."""
    out: dict = {}
    names = {f.name for f in fields(SuiteConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in names:
            raise ConfigError(key, "unknown configuration key")
        if key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise ConfigError(key, f"not an integer: {value!r}") from None
        elif key == "include_planck":
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(key, f"not a boolean: {value!r}")
            out[key] = value.lower() in ("true", "1", "yes")
        elif key == "suites":
            out[key] = [s.strip() for s in value.split(",") if s.strip()]
        else:
            out[key] = value
    return out


# ---------------------------------------------------------------------------
# context shared by the suites


class Context:
    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        try:
            self.target = _target(cfg.target)
        except (ModelError, json.JSONDecodeError) as exc:
            raise ConfigError("target", str(exc)) from None
        self.ring = LambdaRing(GroundRingSpec(novikov_count=cfg.novikov_count,
                                              truncation_order=cfg.lambda_degree,
                                              include_planck=cfg.include_planck))

    def rng(self, suite: str) -> random.Random:
        return random.Random(f"{self.cfg.seed}:{suite}")


@lru_cache(maxsize=None)
def _target(name: str):
    if name.startswith("file:"):
        with open(name[5:]) as fh:
            return load_target(json.load(fh))
    return load_target(name)


def _root(z: RootOfUnity) -> list:
    return [z.angle.numerator, z.angle.denominator]


def _unroot(v) -> RootOfUnity:
    return RootOfUnity(Fraction(v[0], v[1]))


def _fr(x) -> str:
    return str(Fraction(x))


def _kclass(target, coords) -> KClass:
    return KClass(target, [Fraction(c) for c in coords])


def _fail(reason: str, **detail) -> dict:
    return {"reason": reason, **{k: str(v) for k, v in detail.items()}}


# ---------------------------------------------------------------------------
# adelic-symplecticity


@lru_cache(maxsize=8192)
def _adelic_image(tname: str, kind: str, r: int, spec: tuple, m_max: int, order: int):
    T = _target(tname)
    f = _plus_or_minus(T, kind, spec)
    return adelic_map(LoopSequence({r: f}), m_max, order)


def _plus_or_minus(T, kind: str, spec: tuple) -> QRational:
    B = T.basis()
    if kind == "plus":
        e, alpha = spec
        return QRational.monomial(B[alpha], e)
    t, m, j, alpha = spec
    return QRational.pole(B[alpha], RootOfUnity(Fraction(t, m)), j)


def _symp_cases(ctx: Context):
    rank = ctx.target.rank
    roots = roots_up_to(ctx.cfg.max_m)
    for r in range(1, ctx.cfg.max_r + 1):
        for e in range(-3, 4):
            for a in range(rank):
                for z in roots:
                    for j in (1, 2, 3):
                        for b in range(rank):
                            yield {"r": r, "plus": [e, a], "minus": _root(z) + [j, b]}


def _symp_check(case, ctx: Context):
    cfg, T = ctx.cfg, ctx.target
    r = case["r"]
    plus, minus = tuple(case["plus"]), tuple(case["minus"])
    f, g = _plus_or_minus(T, "plus", plus), _plus_or_minus(T, "minus", minus)
    lhs = omega_inf(LoopSequence({r: f}), LoopSequence({r: g}))
    Fb = _adelic_image(cfg.target, "plus", r, plus, cfg.max_m, cfg.series_order)
    Gb = _adelic_image(cfg.target, "minus", r, minus, cfg.max_m, cfg.series_order)
    rhs = omega_adelic(Fb, Gb)
    if lhs != rhs:
        return 1, _fail("adelic form differs from the loop-space form", lhs=lhs, rhs=rhs)
    return 1, None


# ---------------------------------------------------------------------------
# darboux


def _darboux_cases(ctx: Context):
    for z in roots_up_to(ctx.cfg.max_m):
        for r in range(1, ctx.cfg.max_r + 1):
            yield {"space": "adelic_block", "zeta": _root(z), "r": r}
    for M in range(1, ctx.cfg.max_M + 1):
        for z in roots_up_to(M):
            if M % z.order == 0:
                yield {"space": "twisted", "zeta": _root(z), "M": M}


def _darboux_check(case, ctx: Context):
    T = ctx.target
    z = _unroot(case["zeta"])
    space = case["space"]
    M = case.get("M")
    r = case.get("r", 1)
    order = ctx.cfg.series_order
    vecs = {}
    for k in range(5):
        for a in range(T.rank):
            vecs[(k, a)] = darboux_basis(space, k, a, z, r=r, M=M, target=T, order=order)

    def form(u, v):
        return omega_twisted(M, u, v) if space == "twisted" else omega_adelic(u, v, block=True)

    checks = 0
    for (k, a), (fk, gk) in vecs.items():
        for (l, b), (fl, gl) in vecs.items():
            want = -1 if (k, a) == (l, b) else 0
            got = form(fk, gl)
            checks += 1
            if got != want:
                return checks, _fail("f/g pairing is not -delta", k=k, alpha=a, l=l, beta=b, value=got)
            for name, u, v in (("f,f", fk, fl), ("g,g", gk, gl)):
                checks += 1
                val = form(u, v)
                if val != 0:
                    return checks, _fail(f"{name} pairing is not zero", k=k, alpha=a, l=l, beta=b, value=val)
    return checks, None


# ---------------------------------------------------------------------------
# box-pair

BOX_ORDER = 8


def _box_cases(ctx: Context):
    for m in range(1, ctx.cfg.max_m + 1):
        for z in roots_up_to(m):
            if z.order == m:
                for r in range(1, ctx.cfg.max_r + 1):
                    yield {"eta": _root(z), "r": r}


def _box_check(case, ctx: Context):
    rep = box_pair_check(_unroot(case["eta"]), case["r"], BOX_ORDER, ctx.target, grading="adams")
    return rep.checks, None if rep.passed else _fail("box pair identity fails", detail=rep.detail)


# ---------------------------------------------------------------------------
# rearrange

REARRANGE_M = 6
COMPOSITE_ORDER = 6


def _rearrange_cases(ctx: Context):
    for M in range(1, max(REARRANGE_M, ctx.cfg.max_M) + 1):
        for s in range(1, M + 1):
            yield {"kind": "product", "M": M, "s": s}
    for M in range(1, ctx.cfg.max_M + 1):
        for s in range(1, M + 1):
            yield {"kind": "composite", "M": M, "s": s}


def _rearrange_check(case, ctx: Context):
    if case["kind"] == "product":
        rep = rearrange_product(case["M"], case["s"], ymax=6, qmax=8)
    else:
        rep = composite_delta_check(case["M"], case["s"], COMPOSITE_ORDER, ctx.target)
    return rep.checks, None if rep.passed else _fail(f"{rep.name} fails", detail=rep.detail)


# ---------------------------------------------------------------------------
# euler-maclaurin

EM_ORDER = 7
EM_TRIALS = 12


def _em_cases(ctx: Context):
    rng = ctx.rng("euler-maclaurin")
    for _ in range(EM_TRIALS):
        s = {str(k): _fr(Fraction(rng.randint(-5, 5), rng.randint(1, 4))) for k in range(0, 7) if rng.random() < 0.6}
        degs = rng.sample(range(-2, 3), rng.randint(1, 2))
        lines = {str(c): rng.randint(1, 3) for c in degs}
        yield {"kind": "oracle", "s": s, "lines": lines}
    yield {"kind": "product"}


def _em_check(case, ctx: Context):
    if case["kind"] == "product":
        rep = em_log_product(order_Y=4, order_q=8)
        return rep.checks, None if rep.passed else _fail("log product identity fails", detail=rep.detail)
    T = ctx.target
    s = {int(k): Fraction(v) for k, v in case["s"].items()}
    lines = {int(k): v for k, v in case["lines"].items()}
    got = em_asymptotics(MultClass(s), T.line_sum(lines), EM_ORDER)
    want = oracles.em_oracle(s, lines, T, EM_ORDER)
    if got != want:
        return 1, _fail("Euler-Maclaurin formula differs from the oracle", got=got, want=want)
    return 1, None


# ---------------------------------------------------------------------------
# qch-symplectic

QCH_ORDER = 8
QCH_PAIRS = 50


def _random_loop(rng: random.Random, rank: int, lo: int, hi: int) -> dict:
    out = {}
    for e in range(lo, hi + 1):
        if rng.random() < 0.5:
            out[str(e)] = [_fr(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) for _ in range(rank)]
    return out


def _loop_from(T, d: dict) -> Laurent:
    # polynomial in q - 1, so any precision above the top degree is exact
    return Laurent({int(e): _kclass(T, v) for e, v in d.items()}, QCH_ORDER + 4)


def _qch_cases(ctx: Context):
    rng = ctx.rng("qch-symplectic")
    rank = ctx.target.rank
    for _ in range(QCH_PAIRS):
        yield {"kind": "pair", "f": _random_loop(rng, rank, -3, 3), "g": _random_loop(rng, rank, -3, 3)}
    yield {"kind": "dilaton"}


def _qch_check(case, ctx: Context):
    T = ctx.target
    if case["kind"] == "dilaton":
        # 1 - q = -x maps to sqrt(td) (1 - e^z) = -z sqrt(td) + O(z^2)
        got = qch(Laurent({1: -T.one()}, None), QCH_ORDER, T)
        sq = T.td.sqrt()
        want = Laurent({j: sq * Fraction(-1, factorial(j)) for j in range(1, QCH_ORDER + 1)}, QCH_ORDER + 1)
        return 1, None if got == want else _fail("qch(1 - q) is not sqrt(td)(1 - e^z)", got=got)
    f, g = _loop_from(T, case["f"]), _loop_from(T, case["g"])
    lhs = omega_fake(f, g)
    rhs = omega_coh(qch(f, QCH_ORDER, T), qch(g, QCH_ORDER, T))
    return 1, None if lhs == rhs else _fail("qch does not preserve the form", lhs=lhs, rhs=rhs)


# ---------------------------------------------------------------------------
# propagator-graph

PROPAGATOR_ORDER = 10
MAX_POLE = 4


def _prop_cases(ctx: Context):
    roots = roots_up_to(ctx.cfg.max_m)
    for z in roots:
        for k in range(MAX_POLE):
            for a in range(ctx.target.rank):
                for r in range(1, ctx.cfg.max_r + 1):
                    yield {"zeta": _root(z), "k": k, "alpha": a, "r": r}


def _prop_check(case, ctx: Context):
    """The generator with a pole of order k+1 at zeta, as a rational function in q, is expanded at
    each (eta, r) by the adelic map and compared with the closed propagator image and the residue route."""
    T = ctx.target
    z = _unroot(case["zeta"])
    k, a, r = case["k"], case["alpha"], case["r"]
    phi = T.basis()[a]
    gen = QRational.pole(phi * rou_value(z ** (-k)), z, k + 1, shift=k)
    checks = 0
    for eta in roots_up_to(ctx.cfg.max_m):
        checks += 1
        if (eta * z).is_one():
            try:
                propagator_map(eta, z, k, a, PROPAGATOR_ORDER, r=r, target=T)
            except BalancedNodeError:
                continue
            return checks, _fail("balanced node accepted", eta=_root(eta))
        image = expand_at(gen, eta, eta.order, r, PROPAGATOR_ORDER)
        closed = propagator_map(eta, z, k, a, PROPAGATOR_ORDER, r=r, target=T)
        residue = propagator_map(eta, z, k, a, PROPAGATOR_ORDER, r=r, target=T, method="residue")
        if image != closed:
            return checks, _fail("adelic image differs from the propagator image", eta=_root(eta))
        checks += 1
        if residue != closed:
            return checks, _fail("residue route differs from the closed form", eta=_root(eta))
    return checks, None


# ---------------------------------------------------------------------------
# stone-von-neumann

SVN_DEGREE = 6
SVN_VARS = 4


def _random_symmetric(rng: random.Random, n: int) -> list:
    S = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            S[i][j] = S[j][i] = _fr(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    return S


def _matrix(S) -> list:
    return [[Fraction(x) for x in row] for row in S]


def _svn_cases(ctx: Context):
    rng = ctx.rng("stone-von-neumann")
    for n in range(1, SVN_VARS + 1):
        yield {"kind": "conjugation", "n": n, "S": _random_symmetric(rng, n)}
    for n in (1, 2, 3):
        yield {"kind": "commutator", "n": n, "F": [_random_symmetric(rng, n) for _ in range(3)],
               "G": [_random_symmetric(rng, n) for _ in range(3)]}


def _svn_check(case, ctx: Context):
    n = case["n"]
    vars_ = tuple(f"q{i}" for i in range(n))
    if case["kind"] == "commutator":
        F = QuadHamiltonian(n, *[_matrix(m) for m in case["F"]])
        G = QuadHamiltonian(n, *[_matrix(m) for m in case["G"]])
        rep = commutator_check(F, G, vars_, degree=4)
        return rep.checked, None if rep.passed else _fail("commutator is not the bracket up to a constant")
    S = _matrix(case["S"])
    checks = 0
    for mono in monomials_up_to(vars_, SVN_DEGREE, SVN_DEGREE + 4):
        for a in range(n):
            checks += 1
            if not conjugation_check(S, a, mono):
                return checks, _fail("conjugation identity fails", monomial=mono, a=a)
    return checks, None


# ---------------------------------------------------------------------------
# wick

WICK_TRIALS = 20
WICK_MAX_EDGES = 3


def _wick_cases(ctx: Context):
    rng = ctx.rng("wick")
    for _ in range(WICK_TRIALS):
        nv = rng.randint(1, 4)
        sizes = [rng.randint(1, 2) for _ in range(nv)]
        n = sum(sizes)
        verts = []
        start = 0
        for size in sizes:
            terms = []
            for _ in range(rng.randint(1, 3)):
                e = [0] * n
                for _ in range(rng.randint(1, 3)):
                    e[start + rng.randrange(size)] += 1
                terms.append([e, rng.randint(0, 1), _fr(Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 3)))])
            verts.append(terms)
            start += size
        yield {"n": n, "vertices": verts, "S": _random_symmetric(rng, n)}


def _wick_check(case, ctx: Context):
    n = case["n"]
    vars_ = tuple(f"q{i}" for i in range(n))
    vertices = []
    for terms in case["vertices"]:
        poly: dict = {}
        for e, h, c in terms:
            key = (tuple(e), h)
            poly[key] = poly.get(key, 0) + Fraction(c)
        vertices.append(FockState(vars_, poly, 6))
    res = wick_sum(vertices, _matrix(case["S"]), max_edges=WICK_MAX_EDGES)
    return max(1, res.matchings), None if res.agree else _fail("operator and graph sums differ",
                                                             operator=res.operator, graphs=res.graphs)


# ---------------------------------------------------------------------------
# hurwitz


def _hurwitz_cases(ctx: Context):
    bounds = GraphBounds(max_vertices=3, max_M=ctx.cfg.max_M, max_genus=0, max_degree=0, max_flags=2)
    for G in enumerate_graphs(bounds):
        yield {"graph": G.to_text()}


def _hurwitz_check(case, ctx: Context):
    G = DecoratedGraph.from_text(case["graph"])
    eu = hurwitz_euler(G)
    cells = oracles.euler_by_cells(G)
    if eu != cells:
        return 1, _fail("Euler characteristic differs from the cell count", formula=eu, cells=cells)
    w = graph_weights(G)
    if sum(w.minus_eu_half_terms, Fraction(0)) != Fraction(-eu, 2) or w.minus_eu_half != Fraction(-eu, 2):
        return 2, _fail("-eu/2 decomposition does not recombine", terms=w.minus_eu_half_terms, eu=eu)
    if not w.homogeneity_cancels:
        return 3, _fail("hbar rescaling and input scaling do not cancel at a vertex")
    return 3, None


# ---------------------------------------------------------------------------
# mobius

MOBIUS_P, MOBIUS_N = 11, 12


def _mobius_cases(ctx: Context):
    yield {"kind": "coefficients"}
    rng = ctx.rng("mobius")
    for _ in range(4):
        terms = []
        for _ in range(rng.randint(1, 4)):
            mono = [[lab, rng.randint(1, 3), rng.randint(1, 2)] for lab in rng.sample(["x", "y"], rng.randint(1, 2))]
            terms.append([mono, rng.randint(0, 2), rng.randint(-3, 3) or 1])
        yield {"kind": "recover", "terms": terms}


def _mobius_check(case, ctx: Context):
    if case["kind"] == "coefficients":
        c = mobius_coefficients(MOBIUS_P, MOBIUS_N)
        want = {1: Fraction(1)}
        got = {n: v for n, v in c.items() if v}
        return MOBIUS_N, None if got == want else _fail("x_n coefficients survive", got=got)
    ring = ctx.ring
    bounds = SeriesBounds(max_slot_degree=4, max_index=MOBIUS_N * 3)
    F = FunctionalSeries({}, bounds)
    for mono, qpow, coef in case["terms"]:
        term = FunctionalSeries.const(ring.Q() ** qpow * coef if ring.spec.novikov_count else Fraction(coef),
                                      0, bounds)
        for lab, r, e in mono:
            for _ in range(e):
                term = term * FunctionalSeries.slot(("t", r, lab), Fraction(1), bounds)
        F = F + term
    G = FunctionalSeries({}, bounds)
    for k in range(1, MOBIUS_N + 1):
        G = G + F.rescale_indices(k).adams(k).scale(Fraction(1, k))
    got = mobius_recover(G.restrict_index(MOBIUS_N), MOBIUS_P, MOBIUS_N)
    want = F.restrict_index(MOBIUS_N)
    return 1, None if got == want else _fail("Mobius recovery is not the identity", got=got, want=want)


# ---------------------------------------------------------------------------
# disconnected-exp

SN_MAX_N = 6


def _disc_cases(ctx: Context):
    rng = ctx.rng("disconnected-exp")
    if ctx.ring.spec.novikov_count:
        yield {"kind": "exp", "nu": [[1, 1]]}
        for _ in range(3):
            yield {"kind": "exp", "nu": [[d, rng.randint(-3, 3) or 1] for d in
                                         sorted(rng.sample(range(1, ctx.cfg.lambda_degree + 1), 2))]}
    for n in range(1, SN_MAX_N + 1):
        yield {"kind": "sn", "n": n, "weights": [rng.randint(-3, 3) for _ in range(n + 1)]}


def _disc_check(case, ctx: Context):
    if case["kind"] == "exp":
        ring = ctx.ring
        nu = ring.zero()
        for d, c in case["nu"]:
            nu = nu + ring.Q() ** d * c
        rep = disconnected_exp_check(nu, ctx.cfg.lambda_degree)
    else:
        w = [Fraction(x) for x in case["weights"]]

        def class_fn(perm):
            # depends only on the cycle type: weight by the number of cycles plus fixed points squared
            seen, cycles, fixed = set(), 0, 0
            for i in range(len(perm)):
                if i in seen:
                    continue
                cycles += 1
                j, length = i, 0
                while j not in seen:
                    seen.add(j)
                    j = perm[j]
                    length += 1
                fixed += length == 1
            return w[cycles] + fixed * fixed

        rep = sn_resum_check(class_fn, case["n"])
    return rep.checks, None if rep.passed else _fail(f"{rep.name} fails", detail=rep.detail)


# ---------------------------------------------------------------------------
# sector-fourier


def _fourier_cases(ctx: Context):
    rng = ctx.rng("sector-fourier")
    for M in range(1, ctx.cfg.max_M + 1):
        comps = {str(j): {str(e): _fr(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) for e in range(-2, 3)}
                 for j in range(M)}
        yield {"kind": "roundtrip", "M": M, "components": comps}
    yield {"kind": "labels", "bound": 12}
    yield {"kind": "reindex", "bound": 6}
    for M in range(1, ctx.cfg.max_M + 1):
        yield {"kind": "block", "M": M}


def _fourier_check(case, ctx: Context):
    kind = case["kind"]
    if kind == "roundtrip":
        M = case["M"]
        comps = {int(j): Laurent({int(e): Fraction(c) for e, c in d.items()}, None)
                 for j, d in case["components"].items()}
        v = SectorVector(M, comps, "character")
        back = fourier_sectors(fourier_sectors(v))
        ok = all(back.components[j] == comps[j] for j in range(M))
        return M, None if ok else _fail("Fourier transform does not invert", M=M)
    if kind == "labels":
        checks = 0
        for M in range(1, case["bound"] + 1):
            for j in range(M):
                checks += 1
                lab = sector_of(M, j)
                if h_of(M, lab.zeta) != j or lab.r * lab.m != M:
                    return checks, _fail("sector labels are not inverse", M=M, power=j)
        return checks, None
    if kind == "reindex":
        index = sector_reindex(case["bound"])
        return len(index), None
    M = case["M"]
    T = ctx.target
    checks = 0
    for z in roots_up_to(M):
        if M % z.order:
            continue
        for k in range(3):
            f, g = darboux_basis("twisted", k, 0, z, M=M, target=T, order=ctx.cfg.series_order)
            checks += 1
            if not block_pairing_preserved({M: f}, {M: g}):
                return checks, _fail("re-indexing changes the block pairing", zeta=_root(z), k=k)
    return checks, None


# ---------------------------------------------------------------------------
# twisted-pairing

TWISTED_R = 5


def _twisted_cases(ctx: Context):
    for r in range(1, max(TWISTED_R, ctx.cfg.max_r) + 1):
        yield {"r": r}


def _twisted_check(case, ctx: Context):
    T, r = ctx.target, case["r"]
    B = T.basis()
    checks = 0
    for i, a in enumerate(B):
        for j, b in enumerate(B):
            checks += 1
            lhs = twisted_pair(r, adams_k(r, a), adams_k(r, b))
            rhs = adams_scalar(r, poincare_pair(a, b)) * r
            if lhs != rhs:
                return checks, _fail("Adams-RR identity fails", a=i, b=j, lhs=lhs, rhs=rhs)
    return checks, None


# ---------------------------------------------------------------------------
# input-substitution

SUBST_ORDER = 8


def _subst_cases(ctx: Context):
    for M in range(1, ctx.cfg.max_M + 1):
        yield {"kind": "dilaton", "M": M}
    rng = ctx.rng("input-substitution")
    for z in roots_up_to(ctx.cfg.max_m):
        yield {"kind": "linear", "zeta": _root(z), "r": rng.randint(1, ctx.cfg.max_r),
               "t": {str(k): _fr(Fraction(rng.randint(-3, 3), rng.randint(1, 2))) for k in range(0, 3)}}


def _subst_check(case, ctx: Context):
    T = ctx.target
    if case["kind"] == "dilaton":
        M = case["M"]
        want = Laurent({j: -T.one() * comb(M, j) for j in range(1, M + 1) if j <= SUBST_ORDER}, SUBST_ORDER + 1)
        got = input_substitution({}, RootOfUnity(0), M, SUBST_ORDER, zero=T.zero())
        return 1, None if got == want else _fail("t = 0 does not give 1 - q^M", got=got)
    # the dilaton part and the input part expand independently
    z, r = _unroot(case["zeta"]), case["r"]
    t = {int(k): T.one() * Fraction(v) for k, v in case["t"].items()}
    full = input_substitution(t, z, r, SUBST_ORDER, zero=T.zero())
    base = input_substitution({}, z, r, SUBST_ORDER, zero=T.zero())
    part = expand_at(QRational(t, {}, T.zero()), z, z.order, r, SUBST_ORDER)
    return 1, None if full == base + part else _fail("substitution is not affine in t")


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Suite:
    name: str
    cases: Callable
    check: Callable
    min_series_order: int = 1


SUITES = {s.name: s for s in (
    Suite("adelic-symplecticity", _symp_cases, _symp_check, 8),
    Suite("darboux", _darboux_cases, _darboux_check, 10),
    Suite("box-pair", _box_cases, _box_check),
    Suite("rearrange", _rearrange_cases, _rearrange_check),
    Suite("euler-maclaurin", _em_cases, _em_check),
    Suite("qch-symplectic", _qch_cases, _qch_check),
    Suite("propagator-graph", _prop_cases, _prop_check),
    Suite("stone-von-neumann", _svn_cases, _svn_check),
    Suite("wick", _wick_cases, _wick_check),
    Suite("hurwitz", _hurwitz_cases, _hurwitz_check),
    Suite("mobius", _mobius_cases, _mobius_check),
    Suite("disconnected-exp", _disc_cases, _disc_check),
    Suite("sector-fourier", _fourier_cases, _fourier_check, 6),
    Suite("twisted-pairing", _twisted_cases, _twisted_check),
    Suite("input-substitution", _subst_cases, _subst_check),
)}
assert tuple(SUITES) == SUITE_NAMES


def _deadline() -> float | None:
    raw = os.environ.get(TIMEOUT_ENV)
    if not raw:
        return None
    try:
        return time.monotonic() + float(raw)
    except ValueError:
        raise ConfigError(TIMEOUT_ENV, f"not a number: {raw!r}") from None


def run_suite(name: str, ctx: Context, deadline: float | None = None, only_case=None) -> dict:
    suite = SUITES[name]
    entry = {"suite": name, "status": "pass", "checks": 0, "duration_ms": 0}
    start = time.monotonic()
    if ctx.cfg.series_order < suite.min_series_order:
        entry.update(status="skipped", reason=f"series_order below the suite minimum {suite.min_series_order}")
        return entry
    cases = [only_case] if only_case is not None else suite.cases(ctx)
    for case in cases:
        if deadline is not None and time.monotonic() > deadline:
            entry.update(status="skipped", reason=f"{TIMEOUT_ENV} exceeded")
            break
        n, failure = suite.check(case, ctx)
        entry["checks"] += n
        if failure is not None:
            entry["status"] = "fail"
            entry["counterexample"] = {"suite": name, "config": ctx.cfg.to_json(), "case": case, "failure": failure}
            break
    entry["duration_ms"] = int((time.monotonic() - start) * 1000)
    return entry


def run(cfg: SuiteConfig) -> list[dict]:
    cfg.validate()
    ctx = Context(cfg)
    deadline = _deadline()
    report = []
    for name in cfg.suites:
        if deadline is not None and time.monotonic() > deadline:
            report.append({"suite": name, "status": "skipped", "checks": 0, "duration_ms": 0,
                           "reason": f"{TIMEOUT_ENV} exceeded"})
            continue
        report.append(run_suite(name, ctx, deadline))
    return report


def replay(payload) -> list[dict]:
    """Re-run counterexamples: a single payload, a report entry, or a whole report."""
    items = payload if isinstance(payload, list) else [payload]
    out = []
    for item in items:
        if "counterexample" in item:
            item = item["counterexample"]
        if "case" not in item:
            continue
        cfg = SuiteConfig.from_json(item["config"])
        if item["suite"] not in SUITES:
            raise ConfigError("suite", f"unknown suite {item['suite']!r}")
        out.append(run_suite(item["suite"], Context(cfg), None, only_case=item["case"]))
    return out


def format_text(report: list[dict]) -> str:
    lines = []
    for e in report:
        line = f"{e['suite']:<22} {e['status']:<8} checks={e['checks']:<6} {e['duration_ms']} ms"
        if "reason" in e:
            line += f"  ({e['reason']})"
        lines.append(line)
        if "counterexample" in e:
            lines.append("  counterexample: " + json.dumps(e["counterexample"], sort_keys=True))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run exact verification suites.")
    p.add_argument("suites", nargs="*", metavar="SUITE", help="suites to run (default: all)")
    p.add_argument("--target", help="point, p1, p2 or file:PATH")
    p.add_argument("--max-r", dest="max_r", type=int)
    p.add_argument("--max-m", dest="max_m", type=int)
    p.add_argument("--max-M", dest="max_M", type=int)
    p.add_argument("--series-order", dest="series_order", type=int)
    p.add_argument("--lambda-degree", dest="lambda_degree", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--report", choices=("text", "json"), default="text")
    p.add_argument("--replay", metavar="FILE")
    p.add_argument("--config", metavar="FILE", help="flat key = value file with the same keys as the flags")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    unknown = [s for s in args.suites if s not in SUITES]
    if unknown:
        parser.print_usage(sys.stderr)
        print(f"verify: error: unknown suite {unknown[0]!r}; choose from {', '.join(SUITE_NAMES)}",
              file=sys.stderr)
        return 2
    try:
        if args.replay:
            with open(args.replay) as fh:
                report = replay(json.load(fh))
        else:
            values: dict = {}
            if args.config:
                with open(args.config) as fh:
                    values.update(parse_config_text(fh.read()))
            for key in ("target", "max_r", "max_m", "max_M", "series_order", "lambda_degree", "seed"):
                v = getattr(args, key)
                if v is not None:
                    values[key] = v
            if args.suites:
                values["suites"] = list(args.suites)
            cfg = SuiteConfig(**values).validate()
            report = run(cfg)
    except ConfigError as exc:
        print(f"verify: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2
    if args.report == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_text(report))
    return 0 if report and all(e["status"] == "pass" for e in report) else 1


if __name__ == "__main__":
    sys.exit(main())
