"""Decorated graphs of Kawasaki strata.

A vertex is a quotient curve of genus g, degree d, covered M-fold; a flag
records the order r of the orbit and the eigenvalue zeta (primitive of order
m, with m r = M).  Edges pair edge-end flags of equal order whose eigenvalues
do not multiply to 1.

Text format, one record per line (blank lines and '#' comments ignored):

    vertex <genus> <d1,d2,...|-> <M>
    flag <vertex-index> <marked|edge> <r> <t>/<m>      # zeta = exp(2 pi i t/m)
    edge <flag-index> <flag-index>

Indices are 0-based in order of appearance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import gcd

from .exact_scalars import RootOfUnity
from .qfunc import QRational, expand_at
from .series import Laurent


class GraphError(ValueError):
    pass


# ---------------------------------------------------------------------------
# sectors


@dataclass(frozen=True)
class SectorLabel:
    M: int
    power: int
    r: int
    m: int
    s: int
    zeta: RootOfUnity


def sector_of(M: int, power: int) -> SectorLabel:
    """h0^power, written h0^{rs} with M = r m and (s, m) = 1, has zeta primitive of order m with zeta^s = e^{2 pi i/m}."""
    if M < 1:
        raise GraphError("M must be positive")
    p = power % M
    r = gcd(p, M) if p else M
    m = M // r
    s = (p // r) % m if m > 1 else 1
    if m > 1 and gcd(s, m) != 1:
        raise GraphError("malformed sector power")
    t = pow(s, -1, m) if m > 1 else 0
    return SectorLabel(M, p, r, m, s, RootOfUnity(Fraction(t, m)))


def h_of(M: int, zeta: RootOfUnity) -> int:
    """Inverse of sector_of: the power p in [0, M) of h0 labelled by zeta."""
    m = zeta.order
    if M % m:
        raise GraphError(f"{zeta} is not an {M}-th root of unity")
    r = M // m
    if m == 1:
        return 0
    t = int(zeta.angle * m)
    s = pow(t, -1, m)
    return (r * s) % M


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Flag:
    vertex: int
    r: int
    zeta: RootOfUnity
    kind: str = "marked"  # or "edge"

    @property
    def m(self) -> int:
        return self.zeta.order


@dataclass
class Vertex:
    genus: int
    degree: tuple
    M: int


@dataclass
class DecoratedGraph:
    vertices: list
    flags: list
    edges: list = field(default_factory=list)  # pairs of flag indices

    def flags_at(self, v: int) -> list[int]:
        return [i for i, f in enumerate(self.flags) if f.vertex == v]

    def n_hat(self, v: int) -> int:
        return len(self.flags_at(v))

    # serialization ------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for v in self.vertices:
            deg = ",".join(str(x) for x in v.degree) or "-"
            lines.append(f"vertex {v.genus} {deg} {v.M}")
        for f in self.flags:
            lines.append(f"flag {f.vertex} {f.kind} {f.r} {int(f.zeta.angle * f.m)}/{f.m}")
        for a, b in self.edges:
            lines.append(f"edge {a} {b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DecoratedGraph":
        vs, fs, es = [], [], []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "vertex":
                    g, deg, M = parts[1:4]
                    degree = () if deg == "-" else tuple(int(x) for x in deg.split(","))
                    vs.append(Vertex(int(g), degree, int(M)))
                elif parts[0] == "flag":
                    v, kind, r, z = parts[1:5]
                    t, m = z.split("/")
                    if kind not in ("marked", "edge"):
                        raise GraphError(f"line {n}: unknown flag kind {kind}")
                    fs.append(Flag(int(v), int(r), RootOfUnity(Fraction(int(t), int(m))), kind))
                elif parts[0] == "edge":
                    es.append((int(parts[1]), int(parts[2])))
                else:
                    raise GraphError(f"line {n}: unknown record {parts[0]}")
            except (ValueError, IndexError) as exc:
                if isinstance(exc, GraphError):
                    raise
                raise GraphError(f"line {n}: malformed record: {raw!r}") from exc
        return cls(vs, fs, es)

    def to_json(self) -> dict:
        return {
            "vertices": [{"genus": v.genus, "degree": list(v.degree), "M": v.M} for v in self.vertices],
            "flags": [{"vertex": f.vertex, "kind": f.kind, "r": f.r, "zeta": [int(f.zeta.angle * f.m), f.m]} for f in self.flags],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, d: dict) -> "DecoratedGraph":
        vs = [Vertex(v["genus"], tuple(v["degree"]), v["M"]) for v in d["vertices"]]
        fs = [Flag(f["vertex"], f["r"], RootOfUnity(Fraction(f["zeta"][0], f["zeta"][1])), f.get("kind", "marked")) for f in d["flags"]]
        return cls(vs, fs, [tuple(e) for e in d.get("edges", [])])


def validate_graph(G: DecoratedGraph) -> list[str]:
    out = []
    nv = len(G.vertices)
    for i, v in enumerate(G.vertices):
        if v.genus < 0:
            out.append(f"genus: vertex {i} has negative genus")
        if v.M < 1:
            out.append(f"cover-degree: vertex {i} has M < 1")
        if any(x < 0 for x in v.degree):
            out.append(f"degree: vertex {i} has a negative degree entry")
    for i, f in enumerate(G.flags):
        if not 0 <= f.vertex < nv:
            out.append(f"flag-vertex: flag {i} points at missing vertex {f.vertex}")
            continue
        if f.r * f.m != G.vertices[f.vertex].M:
            out.append(f"flag-order: flag {i} has m*r = {f.m * f.r} != M = {G.vertices[f.vertex].M}")
        if f.kind not in ("marked", "edge"):
            out.append(f"flag-kind: flag {i} has kind {f.kind}")
    used: dict = {}
    for j, (a, b) in enumerate(G.edges):
        for x in (a, b):
            if not 0 <= x < len(G.flags):
                out.append(f"edge-flag: edge {j} uses missing flag {x}")
                continue
            if G.flags[x].kind != "edge":
                out.append(f"edge-kind: edge {j} uses marked flag {x}")
            used[x] = used.get(x, 0) + 1
        if a == b:
            out.append(f"edge-ends: edge {j} joins flag {a} to itself")
        if 0 <= a < len(G.flags) and 0 <= b < len(G.flags):
            fa, fb = G.flags[a], G.flags[b]
            if fa.r != fb.r:
                out.append(f"order-mismatch: edge {j} joins r={fa.r} to r={fb.r}")
            if (fa.zeta * fb.zeta).is_one():
                out.append(f"balanced-edge: edge {j} has zeta+ zeta- = 1")
    for x, k in used.items():
        if k > 1:
            out.append(f"edge-ends: flag {x} used by {k} edges")
    for i, f in enumerate(G.flags):
        if f.kind == "edge" and i not in used:
            out.append(f"edge-ends: edge flag {i} is not on any edge")
    return out


def _require_valid(G):
    bad = validate_graph(G)
    if bad:
        raise GraphError("; ".join(bad))


def hurwitz_euler(G: DecoratedGraph) -> int:
    """sum_v M_v (2 - 2g_v - n_v) + sum flags r_i - 2 sum_e r_e."""
    _require_valid(G)
    eu = 0
    for i, v in enumerate(G.vertices):
        eu += v.M * (2 - 2 * v.genus - G.n_hat(i))
    eu += sum(f.r for f in G.flags)
    eu -= 2 * sum(G.flags[a].r for a, _ in G.edges)
    return eu


def monodromy_balanced(G: DecoratedGraph, v: int) -> bool:
    """Flag monodromies at v sum to zero in Z_{M_v} (a closed cover exists)."""
    M = G.vertices[v].M
    return sum(h_of(M, G.flags[i].zeta) for i in G.flags_at(v)) % M == 0


@dataclass
class WeightReport:
    eu: int
    minus_eu_half_terms: tuple  # (sum M(g-1), sum M n/2, -sum r_i/2, sum r_e)
    total_degree: tuple
    vertex_records: list
    edge_factor_exponent: Fraction
    homogeneity_cancels: bool

    @property
    def minus_eu_half(self) -> Fraction:
        return sum(self.minus_eu_half_terms, Fraction(0))

    def to_json(self) -> dict:
        return {
            "eu": self.eu,
            "minus_eu_half_terms": [str(x) for x in self.minus_eu_half_terms],
            "total_degree": list(self.total_degree),
            "vertices": self.vertex_records,
            "edge_hbar_exponent": str(self.edge_factor_exponent),
            "homogeneity_cancels": self.homogeneity_cancels,
        }


def graph_weights(G: DecoratedGraph) -> WeightReport:
    """hbar / Q bookkeeping.  hbar exponents are Fractions; half-integers stand for powers of sqrt(hbar)."""
    eu = hurwitz_euler(G)
    nd = max((len(v.degree) for v in G.vertices), default=0)
    total = [0] * nd
    t1 = t2 = t3 = Fraction(0)
    records = []
    cancel = True
    for i, v in enumerate(G.vertices):
        n = G.n_hat(i)
        for k, d in enumerate(v.degree):
            total[k] += v.M * d
        t1 += v.M * (v.genus - 1)
        t2 += Fraction(v.M * n, 2)
        flag_exps = [Fraction(-G.flags[j].r, 2) for j in G.flags_at(i)]
        t3 += sum(flag_exps, Fraction(0))
        # hbar -> hbar^M on hbar^{g-1} against inputs scaled by hbar^{M/2} on a degree (2 - 2g) homogeneous F_g
        rescale = v.M * (v.genus - 1)
        input_scale = Fraction(v.M, 2) * (2 - 2 * v.genus)
        cancel = cancel and (rescale + input_scale == 0)
        records.append({
            "vertex": i,
            "hbar_power_map": v.M,
            "input_scale_exponent": str(Fraction(v.M, 2)),
            "flag_input_exponents": [str(x) for x in flag_exps],
            "novikov_map": [v.M * d for d in v.degree],
        })
    t4 = Fraction(sum(G.flags[a].r for a, _ in G.edges))  # one unit per node orbit
    terms = (t1, t2, t3, t4)
    if sum(terms) * -2 != eu:
        raise AssertionError("four-term decomposition does not recombine")
    return WeightReport(eu, terms, tuple(total), records, t4, cancel)


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class GraphBounds:
    max_vertices: int = 2
    max_M: int = 2
    max_genus: int = 0
    max_degree: int = 0
    max_flags: int = 2
    connected: bool = True
    n_novikov: int = 1


def _decorations(M: int):
    for m in range(1, M + 1):
        if M % m:
            continue
        for t in range(m):
            if m == 1 or gcd(t, m) == 1:
                yield (M // m, RootOfUnity(Fraction(t, m)))


def _vertex_types(b: GraphBounds):
    degs = list(product(range(b.max_degree + 1), repeat=b.n_novikov))
    for M in range(1, b.max_M + 1):
        flag_types = [(kind, r, z) for kind in ("edge", "marked") for r, z in _decorations(M)]
        for g in range(b.max_genus + 1):
            for d in degs:
                for nf in range(b.max_flags + 1):
                    for flags in combinations_with_replacement(range(len(flag_types)), nf):
                        yield (g, d, M, tuple(flag_types[i] for i in flags))


def _perfect_matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for j in range(1, len(items)):
        rest = items[1:j] + items[j + 1:]
        for m in _perfect_matchings(rest):
            yield [(first, items[j])] + m


def _connected(nv, edges):
    if nv == 0:
        return False
    seen = {0}
    stack = [0]
    adj = {i: set() for i in range(nv)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == nv


def _zkey(z: RootOfUnity):
    return (z.order, z.angle)


def canonical_form(G: DecoratedGraph):
    """Invariant of the decorated multigraph under relabelling vertices and flags."""
    nv = len(G.vertices)
    best = None
    for perm in permutations(range(nv)):
        pos = {old: new for new, old in enumerate(perm)}
        verts = []
        for old in perm:
            v = G.vertices[old]
            marked = sorted((f.r, _zkey(f.zeta)) for f in G.flags if f.vertex == old and f.kind == "marked")
            verts.append((v.genus, tuple(v.degree), v.M, tuple(marked)))
        edges = []
        for a, b in G.edges:
            fa, fb = G.flags[a], G.flags[b]
            ea = (pos[fa.vertex], fa.r, _zkey(fa.zeta))
            eb = (pos[fb.vertex], fb.r, _zkey(fb.zeta))
            edges.append(tuple(sorted((ea, eb))))
        key = (tuple(verts), tuple(sorted(edges)))
        if best is None or key < best:
            best = key
    return best


def enumerate_graphs(bounds: GraphBounds):
    """All valid decorated graphs within bounds, one per isomorphism class."""
    vtypes = list(_vertex_types(bounds))
    seen = set()
    for nv in range(1, bounds.max_vertices + 1):
        for combo in combinations_with_replacement(range(len(vtypes)), nv):
            types = [vtypes[i] for i in combo]
            verts = [Vertex(g, d, M) for g, d, M, _ in types]
            flags = [Flag(vi, r, z, kind) for vi, (_, _, _, fl) in enumerate(types) for kind, r, z in fl]
            edge_flags = [i for i, f in enumerate(flags) if f.kind == "edge"]
            if len(edge_flags) % 2:
                continue
            for match in _perfect_matchings(edge_flags):
                ok = True
                for a, b in match:
                    fa, fb = flags[a], flags[b]
                    if fa.r != fb.r or (fa.zeta * fb.zeta).is_one():
                        ok = False
                        break
                if not ok:
                    continue
                if bounds.connected and not _connected(nv, [(flags[a].vertex, flags[b].vertex) for a, b in match]):
                    continue
                G = DecoratedGraph(verts, flags, list(match))
                key = canonical_form(G)
                if key in seen:
                    continue
                seen.add(key)
                yield G


# ---------------------------------------------------------------------------
# input substitution


def input_substitution(t: dict, zeta: RootOfUnity, r: int, order: int = 8, zero=None) -> Laurent:
    """Psi^r[1 - zeta^{-1} q^{1/m} + t(zeta^{-1} q^{1/m})] expanded in q - 1, for t = {k: coeff} a Laurent polynomial."""
    if zero is None:
        c0 = next(iter(t.values()), Fraction(0))
        zero = c0 * 0
    one = zero + 1 if not hasattr(zero, "target") else zero.target.one()
    num = {0: one, 1: -one}
    for k, c in t.items():
        num[k] = num[k] + c if k in num else c
    f = QRational(num, {}, zero)
    return expand_at(f, zeta, zeta.order, r, order)
