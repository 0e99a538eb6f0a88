"""Buchberger's algorithm (grevlex) with Gebauer-Moeller pair pruning.

Internally a monomial is packed into one integer whose natural order is the
graded reverse lexicographic order, so that sorting, multiplication and the
divisibility test are single big-int operations::

    key(e) = deg(e) << (W * n)  |  sum_i (B - e_i) << (W * i)

with ``B`` a bias that keeps every slot nonnegative.  Then
``key(a * b) = key(a) + key(b) - K0`` where ``K0 = sum_i B << (W * i)``.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from .fields import Field
from .linalg import rref
from .poly import MPoly
from .univariate import pgcd, pderiv, ptrim, roots as uroots

log = logging.getLogger(__name__)

__all__ = [
    "Ideal",
    "GroebnerBasis",
    "Limits",
    "LimitsExceeded",
    "buchberger",
    "krull_dimension",
    "projective_dimension",
    "hilbert_numerator",
    "degree",
    "zero_dim_degree",
    "minimal_polynomial",
    "solve_zero_dim",
    "solve_zero_dim_Fp",
    "projective_points",
    "SolveResult",
]

_W = 20
_BIAS = 1 << 18
_GUARD = 1 << 19


class LimitsExceeded(RuntimeError):
    """A Groebner computation hit its resource limits before completing."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class Limits:
    max_pairs: int = 200_000
    max_poly_len: int = 200_000


class _Codec:
    def __init__(self, nvars):
        self.n = nvars
        self.mask = (1 << _W) - 1
        self.k0 = sum(_BIAS << (_W * i) for i in range(nvars))
        self.guard = sum(_GUARD << (_W * i) for i in range(nvars))
        self.tail = (1 << (_W * nvars)) - 1
        self.deg_shift = _W * nvars

    def encode(self, e):
        k = sum(e) << self.deg_shift
        for i, a in enumerate(e):
            k |= (_BIAS - a) << (_W * i)
        return k

    def decode(self, k):
        return tuple(_BIAS - ((k >> (_W * i)) & self.mask) for i in range(self.n))

    def degree(self, k):
        return k >> self.deg_shift

    def divides(self, a, b):
        """Does monomial key a divide monomial key b?"""
        t = (a & self.tail) - (b & self.tail) + self.guard
        return (t & self.guard) == self.guard

    def lcm(self, a, b):
        ea, eb = self.decode(a), self.decode(b)
        return self.encode(tuple(max(x, y) for x, y in zip(ea, eb)))

    def coprime(self, a, b):
        ea, eb = self.decode(a), self.decode(b)
        return all(not (x and y) for x, y in zip(ea, eb))


def _to_internal(codec, f: MPoly):
    return {codec.encode(e): c for e, c in f.terms.items()}


def _to_mpoly(codec, F, d):
    return MPoly(F, codec.n, {codec.decode(k): c for k, c in d.items()}, _clean=True)


def _make_monic(F, d):
    if not d:
        return d
    lc = d[max(d)]
    if lc == 1:
        return d
    inv = F.inv(lc)
    norm = F.norm
    return {k: norm(c * inv) for k, c in d.items()}


def _reduce(F, codec, h, basis, full=True, max_len=None):
    """Normal form of h (dict) modulo monic polynomials ``basis`` = [(lead_key, dict)].

    With ``full=False`` only the leading term is reduced (top reduction).
    """
    h = dict(h)
    p = F.p
    norm = F.norm
    divides = codec.divides
    k0 = codec.k0
    out = {}
    while h:
        k = max(h)
        c = h[k]
        for lk, g in basis:
            if divides(lk, k):
                break
        else:
            if not full:
                out.update(h)
                return out
            out[k] = h.pop(k)
            continue
        shift = k - lk
        get = h.get
        if p:
            for gk, gc in g.items():
                nk = gk + shift
                v = (get(nk, 0) - c * gc) % p
                if v:
                    h[nk] = v
                else:
                    h.pop(nk, None)
        else:
            for gk, gc in g.items():
                nk = gk + shift
                v = norm(get(nk, 0) - c * gc)
                if v:
                    h[nk] = v
                else:
                    h.pop(nk, None)
        if max_len is not None and len(h) > max_len:
            raise LimitsExceeded("intermediate polynomial too long", {"length": len(h)})
    return out


def _spoly(F, codec, f, g, lf, lg):
    lcm = codec.lcm(lf, lg)
    sf = lcm - lf + codec.k0
    sg = lcm - lg + codec.k0
    k0 = codec.k0
    norm = F.norm
    out = {}
    for k, c in f.items():
        out[k + sf - k0] = c
    for k, c in g.items():
        nk = k + sg - k0
        v = norm(out.get(nk, 0) - c)
        if v:
            out[nk] = v
        else:
            out.pop(nk, None)
    return out


@dataclass
class Ideal:
    """Ideal given by generators in a common polynomial ring."""

    gens: list
    nvars: int = None
    field: Field = None

    def __post_init__(self):
        gens = [g for g in self.gens if not g.is_zero()]
        if self.gens:
            nv = {g.nvars for g in self.gens}
            if len(nv) != 1:
                raise ValueError("generators do not share nvars")
            if self.nvars is None:
                self.nvars = self.gens[0].nvars
            if self.field is None:
                self.field = self.gens[0].field
        if self.nvars is None or self.field is None:
            raise ValueError("empty ideal needs nvars and field")
        self.gens = gens

    def is_homogeneous(self):
        return all(g.is_homogeneous() for g in self.gens)

    def to_field(self, F):
        return Ideal([g.to_field(F) for g in self.gens], self.nvars, F)

    def __add__(self, other):
        if isinstance(other, Ideal):
            other = other.gens
        return Ideal(self.gens + list(other), self.nvars, self.field)


@dataclass
class GroebnerBasis:
    """Reduced monic Groebner basis for grevlex."""

    basis: list
    nvars: int
    field: Field
    order: str = "grevlex"
    limits_hit: bool = False
    stats: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self._codec = _Codec(self.nvars)
        self._internal = [(max(d), d) for d in (_to_internal(self._codec, g) for g in self.basis)]

    def leading_exponents(self):
        return [self._codec.decode(lk) for lk, _ in self._internal]

    def normal_form(self, f: MPoly) -> MPoly:
        d = _reduce(self.field, self._codec, _to_internal(self._codec, f), self._internal)
        return _to_mpoly(self._codec, self.field, d)

    def contains(self, f: MPoly) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit(self):
        return any(all(a == 0 for a in e) for e in self.leading_exponents())

    def __len__(self):
        return len(self.basis)


def _prereduce(F, codec, polys):
    """Row-reduce generators of equal degree pattern (linear algebra on coefficients)."""
    mons = sorted({k for d in polys for k in d}, reverse=True)
    idx = {k: i for i, k in enumerate(mons)}
    rows = []
    for d in polys:
        r = [0] * len(mons)
        for k, c in d.items():
            r[idx[k]] = c
        rows.append(r)
    R, _ = rref(F, rows)
    return [{mons[i]: c for i, c in enumerate(r) if c} for r in R]


def buchberger(I, limits: Limits | None = None, prereduce: bool = True) -> GroebnerBasis:
    """Reduced Groebner basis of ``I`` (an :class:`Ideal` or list of MPoly).

    When ``limits`` are exhausted the partial basis is returned with
    ``limits_hit=True``.
    """
    if not isinstance(I, Ideal):
        I = Ideal(list(I))
    limits = limits or Limits()
    F, n = I.field, I.nvars
    codec = _Codec(n)
    gens = [_to_internal(codec, g) for g in I.gens]
    if prereduce and gens:
        gens = _prereduce(F, codec, gens)
    gens = [_make_monic(F, g) for g in gens if g]
    # process small leading terms first
    gens.sort(key=lambda d: max(d))

    polys = []   # all polynomials ever added: (lead_key, dict)
    active = []  # indices into polys forming the current basis
    pairs = []   # (lcm_key, i, j)
    stats = {"pairs_processed": 0, "zero_reductions": 0, "pairs_pruned": 0}
    limits_hit = False

    def basis_view():
        return [polys[i] for i in active]

    def update(h_idx):
        nonlocal pairs, active
        lh = polys[h_idx][0]
        cand = [(codec.lcm(polys[g][0], lh), g) for g in active]
        keep = []
        for pos, (lcm_g, g) in enumerate(cand):
            if codec.coprime(polys[g][0], lh):
                keep.append((lcm_g, g, True))
                continue
            # chain criterion among the new pairs
            redundant = False
            for lcm_o, o in cand[pos + 1:]:
                if codec.divides(lcm_o, lcm_g):
                    redundant = True
                    break
            if not redundant:
                for lcm_o, o, _ in keep:
                    if codec.divides(lcm_o, lcm_g):
                        redundant = True
                        break
            if not redundant:
                keep.append((lcm_g, g, False))
            else:
                stats["pairs_pruned"] += 1
        new_pairs = []
        for lcm_g, g, coprime in keep:
            if coprime:
                stats["pairs_pruned"] += 1
            else:
                new_pairs.append((lcm_g, g, h_idx))
        old = []
        for lcm_ij, i, j in pairs:
            if (codec.divides(lh, lcm_ij)
                    and codec.lcm(polys[i][0], lh) != lcm_ij
                    and codec.lcm(polys[j][0], lh) != lcm_ij):
                stats["pairs_pruned"] += 1
                continue
            old.append((lcm_ij, i, j))
        pairs = old + new_pairs
        active = [g for g in active if not codec.divides(lh, polys[g][0])] + [h_idx]

    for g in gens:
        red = _reduce(F, codec, g, basis_view(), max_len=limits.max_poly_len)
        if red:
            red = _make_monic(F, red)
            polys.append((max(red), red))
            update(len(polys) - 1)

    try:
        while pairs:
            if stats["pairs_processed"] >= limits.max_pairs:
                limits_hit = True
                break
            # normal selection strategy: smallest lcm first
            best = min(range(len(pairs)), key=lambda t: pairs[t][0])
            _, i, j = pairs.pop(best)
            stats["pairs_processed"] += 1
            (li, fi), (lj, fj) = polys[i], polys[j]
            s = _spoly(F, codec, fi, fj, li, lj)
            red = _reduce(F, codec, s, basis_view(), max_len=limits.max_poly_len)
            if not red:
                stats["zero_reductions"] += 1
                continue
            red = _make_monic(F, red)
            polys.append((max(red), red))
            update(len(polys) - 1)
            if max(red) >> codec.deg_shift == 0:
                # unit ideal
                pairs = []
    except LimitsExceeded as exc:
        limits_hit = True
        stats["limit"] = str(exc)

    basis = _interreduce(F, codec, [polys[i] for i in active])
    stats["basis_size"] = len(basis)
    log.debug("buchberger: %s", stats)
    return GroebnerBasis([_to_mpoly(codec, F, d) for _, d in basis], n, F, limits_hit=limits_hit, stats=stats)


def _interreduce(F, codec, basis):
    basis = sorted(basis, key=lambda t: t[0])
    minimal = []
    for lk, d in basis:
        if not any(codec.divides(mk, lk) for mk, _ in minimal):
            minimal.append((lk, d))
    out = []
    for pos, (lk, d) in enumerate(minimal):
        others = [t for q, t in enumerate(minimal) if q != pos]
        red = _reduce(F, codec, d, others)
        red = _make_monic(F, red)
        out.append((max(red), red))
    out.sort(key=lambda t: t[0])
    return out


# ---------------------------------------------------------------------------
# dimension and degree

def _require_complete(G):
    if G.limits_hit:
        raise LimitsExceeded("Groebner basis is partial (limits hit)", G.stats)


def krull_dimension(G: GroebnerBasis) -> int:
    """Affine Krull dimension of the quotient; -1 for the unit ideal."""
    _require_complete(G)
    leads = G.leading_exponents()
    if any(sum(e) == 0 for e in leads):
        return -1
    supports = [frozenset(i for i, a in enumerate(e) if a) for e in leads]
    n = G.nvars
    for size in range(n, -1, -1):
        for S in combinations(range(n), size):
            S = frozenset(S)
            if all(not sup <= S for sup in supports):
                return size
    return 0


def projective_dimension(G: GroebnerBasis) -> int:
    """Dimension of the projective zero set of a homogeneous ideal (-1 if empty)."""
    d = krull_dimension(G)
    return max(d, 0) - 1 if d >= 0 else -1


def hilbert_numerator(leads, nvars):
    """Numerator N(t) of the Hilbert series N(t)/(1-t)^nvars of a monomial ideal.

    Coefficients as an integer list, lowest degree first.
    """
    gens = _minimalize([tuple(e) for e in leads])
    return _hilbert_rec(gens)


def _minimalize(gens):
    gens = sorted(set(gens), key=sum)
    out = []
    for g in gens:
        if not any(all(a <= b for a, b in zip(m, g)) for m in out):
            out.append(g)
    return out


def _poly_mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add_int(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _hilbert_rec(gens):
    if not gens:
        return [1]
    supports = [{i for i, a in enumerate(g) if a} for g in gens]
    # pairwise coprime generators: product of (1 - t^deg)
    seen = set()
    coprime = True
    for s in supports:
        if seen & s:
            coprime = False
            break
        seen |= s
    if coprime:
        out = [1]
        for g in gens:
            d = sum(g)
            f = [0] * (d + 1)
            f[0], f[d] = 1, -1
            out = _poly_mul_int(out, f)
        return out
    # pivot on the variable occurring in the most generators
    counts = {}
    for s in supports:
        for i in s:
            counts[i] = counts.get(i, 0) + 1
    x = max(counts, key=lambda i: (counts[i], -i))
    n = len(gens[0])
    xe = tuple(1 if i == x else 0 for i in range(n))
    # N(I) = N(I + (x)) + t * N(I : x)
    plus = _minimalize([g for g in gens if g[x] == 0] + [xe])
    colon = _minimalize([tuple(a - 1 if i == x and a else a for i, a in enumerate(g)) for g in gens])
    return _poly_add_int(_hilbert_rec(plus), [0] + _hilbert_rec(colon))


def degree(G: GroebnerBasis) -> int:
    """Degree (multiplicity) read off the Hilbert series of the leading-term ideal."""
    _require_complete(G)
    if G.is_unit():
        return 0
    num = hilbert_numerator(G.leading_exponents(), G.nvars)
    # divide by (1 - t) as long as possible
    while len(num) > 1 and sum(num) == 0:
        q = []
        acc = 0
        for c in num[:-1]:
            acc += c
            q.append(acc)
        num = q
    return sum(num)


def zero_dim_degree(G: GroebnerBasis) -> int:
    """Scheme length of a zero-dimensional ideal, or the degree of a homogeneous
    ideal whose projective zero set is finite."""
    d = krull_dimension(G)
    if d == 0 or d == -1:
        return _count_standard_monomials(G) if d == 0 else 0
    homogeneous = all(g.is_homogeneous() for g in G.basis)
    if d == 1 and homogeneous:
        return degree(G)
    raise ValueError(f"ideal is not zero-dimensional (affine dimension {d})")


def _count_standard_monomials(G):
    num = hilbert_numerator(G.leading_exponents(), G.nvars)
    # zero-dimensional: HS = N(t)/(1-t)^n is a polynomial; its value at 1 counts monomials
    n = G.nvars
    for _ in range(n):
        q, acc = [], 0
        for c in num[:-1]:
            acc += c
            q.append(acc)
        if acc + num[-1] != 0:
            raise ValueError("Hilbert series is not a polynomial")
        num = q
    return sum(num)


# ---------------------------------------------------------------------------
# solving

def minimal_polynomial(G: GroebnerBasis, a: MPoly):
    """Minimal polynomial (low-first list) of ``a`` in the zero-dimensional quotient."""
    F = G.field
    vecs = []     # echelonised normal forms, as dicts, with their combination in powers
    power_nf = G.normal_form(MPoly.const(F, G.nvars, 1))
    k = 0
    basis_rows = []  # list of (pivot_exp, row_dict, combo_list)
    while True:
        row = dict(power_nf.terms)
        combo = [0] * k + [1]
        # eliminate against existing rows
        for piv, brow, bcombo in basis_rows:
            c = row.get(piv, 0)
            if c:
                for e, v in brow.items():
                    nv = F.norm(row.get(e, 0) - c * v)
                    if nv:
                        row[e] = nv
                    else:
                        row.pop(e, None)
                combo = [F.norm((combo[i] if i < len(combo) else 0) - c * (bcombo[i] if i < len(bcombo) else 0))
                         for i in range(max(len(combo), len(bcombo)))]
        if not row:
            return ptrim(combo)
        piv = max(row, key=lambda e: (sum(e), e))
        inv = F.inv(row[piv])
        row = {e: F.norm(v * inv) for e, v in row.items()}
        combo = [F.norm(c * inv) for c in combo]
        # keep rows fully reduced on pivots
        new_rows = []
        for p2, brow, bcombo in basis_rows:
            c = brow.get(piv, 0)
            if c:
                for e, v in row.items():
                    nv = F.norm(brow.get(e, 0) - c * v)
                    if nv:
                        brow[e] = nv
                    else:
                        brow.pop(e, None)
                bcombo = [F.norm((bcombo[i] if i < len(bcombo) else 0) - c * (combo[i] if i < len(combo) else 0))
                          for i in range(max(len(combo), len(bcombo)))]
            new_rows.append((p2, brow, bcombo))
        basis_rows = new_rows + [(piv, row, combo)]
        k += 1
        power_nf = G.normal_form(power_nf * a)
        if k > 10_000:
            raise ValueError("minimal polynomial degree runaway; ideal not zero-dimensional?")


@dataclass
class SolveResult:
    """Solutions in the working field plus bookkeeping for the rest."""

    points: list
    multiplicity_total: int      # scheme length
    distinct_total: int          # geometric points over the algebraic closure
    needs_extension: int         # geometric points not defined over the working field

    @property
    def rational_count(self):
        return len(self.points)


def solve_zero_dim(I: Ideal, seed: int = 0, limits: Limits | None = None) -> SolveResult:
    """Points of a zero-dimensional affine ideal with coordinates in the working field."""
    G = buchberger(I, limits)
    _require_complete(G)
    dim = krull_dimension(G)
    if dim > 0:
        raise ValueError(f"ideal is positive-dimensional (affine dimension {dim})")
    if dim < 0:
        return SolveResult([], 0, 0, 0)
    F, n = G.field, G.nvars
    length = zero_dim_degree(G)
    rng = random.Random(seed)
    # a random linear form separates the points with high probability; take the best of a few
    best = None
    for _ in range(3):
        coeffs = [F.random_element(rng, 50) for _ in range(n)]
        ell = MPoly.linear_form(F, coeffs)
        mp = minimal_polynomial(G, ell)
        sqf = len(mp) - len(pgcd(F, mp, pderiv(F, mp)))
        if best is None or sqf > best[0]:
            best = (sqf, ell, mp)
    distinct, ell, mp = best
    values, _ = uroots(F, mp, rng=rng)
    points = []
    missing = distinct - len(values)
    for r in values:
        local = buchberger(Ideal(G.basis + [ell - r], n, F), limits)
        coords = []
        for i in range(n):
            mpi = minimal_polynomial(local, MPoly.var(F, n, i))
            ri, _ = uroots(F, mpi, rng=rng)
            sq = len(mpi) - len(pgcd(F, mpi, pderiv(F, mpi)))
            if sq != 1 or len(ri) != 1:
                coords = None
                break
            coords.append(ri[0])
        if coords is None:
            missing += 1
            continue
        points.append(tuple(coords))
    points.sort()
    return SolveResult(points, length, distinct, missing)


def solve_zero_dim_Fp(I: Ideal, p: int | None = None, seed: int = 0, limits: Limits | None = None) -> SolveResult:
    """:func:`solve_zero_dim` restricted to prime fields."""
    from .fields import GF

    if p is not None and I.field.p != p:
        I = I.to_field(GF(p))
    if not I.field.p:
        raise ValueError("solve_zero_dim_Fp needs a prime field")
    return solve_zero_dim(I, seed=seed, limits=limits)


def projective_points(I: Ideal, seed: int = 0, limits: Limits | None = None):
    """Points of the projective zero set of a homogeneous ideal with finite zero set.

    Intersects the affine cone with a random hyperplane ``ell = 1``; returns
    ``(ProjPoints, SolveResult)``.  Raises if some point escaped to ``ell = 0``.
    """
    from .linalg import ProjPoint

    if not I.is_homogeneous():
        raise ValueError("projective_points needs a homogeneous ideal")
    F, n = I.field, I.nvars
    G = buchberger(I, limits)
    _require_complete(G)
    if krull_dimension(G) > 1:
        raise ValueError("projective zero set is positive-dimensional")
    expected = zero_dim_degree(G) if krull_dimension(G) == 1 else 0
    rng = random.Random(seed)
    for _ in range(5):
        ell = MPoly.linear_form(F, [F.random_element(rng, 50) for _ in range(n)])
        res = solve_zero_dim(Ideal(G.basis + [ell - 1], n, F), seed=rng.randrange(1 << 30), limits=limits)
        if res.multiplicity_total == expected:
            pts = sorted({ProjPoint(F, p) for p in res.points}, key=lambda q: q.coords)
            return pts, res
    raise RuntimeError("could not find a hyperplane missing every point")
