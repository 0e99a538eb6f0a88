"""Hessian matrices, rank strata D_k = {rank H_f <= k} and their minors ideals."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from math import comb

from .fields import GF, QQ, Field, random_prime
from .groebner import (Ideal, Limits, LimitsExceeded, buchberger, degree, krull_dimension,
                       solve_zero_dim)
from .linalg import LinearChange, ProjPoint, kernel_basis, rank
from .poly import MPoly, PolyMatrix, change_of_vars

__all__ = [
    "hessian_matrix",
    "HessianData",
    "hessian",
    "all_minors",
    "StratumReport",
    "stratum_dimension",
    "parse_field_spec",
    "sing_hessian_check",
    "ts_block_factor_check",
    "fourfold_family",
    "fourfold_family_minor",
    "sample_hypersurface_points",
]


def hessian_matrix(f: MPoly) -> PolyMatrix:
    N = f.nvars
    first = [f.diff(i) for i in range(N)]
    rows = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            rows[i][j] = rows[j][i] = first[i].diff(j)
    return PolyMatrix(rows)


def all_minors(M: PolyMatrix, size: int, symmetric: bool = False) -> dict:
    """All size x size minors as {(row_tuple, col_tuple): MPoly}.

    Each row subset is expanded bottom-up with memoisation on column subsets,
    so every column subset shares its sub-minors.  With ``symmetric`` only
    pairs with ``rows <= cols`` are returned.
    """
    n, m = M.rows, M.cols
    F, nv = M.field, M.nvars
    one = MPoly.const(F, nv, 1)
    out = {}
    col_sets = list(combinations(range(m), size))
    for R in combinations(range(n), size):
        level = {(): one}
        for depth in range(1, size + 1):
            r = R[size - depth]
            nxt = {}
            for cols in combinations(range(m), depth):
                total = MPoly.zero(F, nv)
                for pos, c in enumerate(cols):
                    e = M.entries[r][c]
                    if not e:
                        continue
                    sub = level.get(cols[:pos] + cols[pos + 1:])
                    if sub is None or not sub:
                        continue
                    t = e * sub
                    total = total - t if pos & 1 else total + t
                nxt[cols] = total
            level = nxt
        for C in col_sets:
            if symmetric and C < R:
                continue
            out[(R, C)] = level[C]
    return out


class HessianData:
    """The Hessian matrix of ``f`` with its determinant computed on demand."""

    def __init__(self, f: MPoly):
        if f.is_zero() or not f.is_homogeneous():
            raise ValueError("expected a nonzero homogeneous polynomial")
        if f.degree() < 2:
            raise ValueError("need degree at least 2")
        self.f = f
        self.field = f.field
        self.n = f.nvars - 1
        self.d = f.degree()
        self.H = hessian_matrix(f)
        self._h = None

    @property
    def h(self) -> MPoly:
        if self._h is None:
            self._h = self.H.det()
        return self._h

    def matrix_at(self, P):
        coords = list(P.coords if isinstance(P, ProjPoint) else P)
        return self.H.evaluate(coords)

    def rank_at(self, P) -> int:
        return rank(self.field, self.matrix_at(P))

    def iota(self, P):
        """Reduced kernel basis of H_f(P); empty iff P is off the Hessian hypersurface."""
        return kernel_basis(self.field, self.matrix_at(P), ncols=self.n + 1)

    def minors(self, k):
        """{(rows, cols): minor} of order k+1 with rows <= cols (symmetric dedup)."""
        if not 0 <= k <= self.n:
            raise ValueError(f"k must lie in [0, {self.n}]")
        return all_minors(self.H, k + 1, symmetric=True)

    def minors_ideal(self, k) -> Ideal:
        if k == self.n:
            return Ideal([self.h], self.n + 1, self.field)
        gens = [m for m in self.minors(k).values()]
        return Ideal(gens, self.n + 1, self.field)

    def to_field(self, F: Field) -> "HessianData":
        return HessianData(self.f.to_field(F))


def hessian(f: MPoly) -> HessianData:
    return HessianData(f)


def parse_field_spec(spec, seed: int = 0):
    """'q' | 'fp:<p>' | 'fp:auto' | Field  ->  list of fields to run over."""
    if isinstance(spec, Field):
        return [spec]
    if spec in (None, "q", "Q", "qq"):
        return [QQ]
    if isinstance(spec, str) and spec.startswith("fp:"):
        arg = spec[3:]
        if arg == "auto":
            rng = random.Random(seed)
            p1 = random_prime(rng)
            p2 = random_prime(rng)
            while p2 == p1:
                p2 = random_prime(rng)
            return [GF(p1), GF(p2)]
        try:
            p = int(arg)
        except ValueError:
            raise ValueError(f"bad field spec {spec!r}") from None
        return [GF(p)]
    raise ValueError(f"bad field spec {spec!r}")


@dataclass
class StratumReport:
    k: int
    n: int
    expected_codim: int
    minors_ideal: Ideal
    dims: dict = dc_field(default_factory=dict)
    samples: list = dc_field(default_factory=list)
    limits_hit: bool = False

    @property
    def projective_dim(self):
        return self.dims.get("projective")

    def bound_ok(self):
        """dim D_k <= k - 1 (empty sets count as dimension -1)."""
        d = self.projective_dim
        return d is not None and d <= self.k - 1

    def to_json(self):
        return {
            "k": self.k,
            "n": self.n,
            "expected_codim": self.expected_codim,
            "generators": len(self.minors_ideal.gens),
            "dims": self.dims,
            "samples": [{"point": [str(c) for c in P.coords], "rank": r} for P, r in self.samples],
            "limits_hit": self.limits_hit,
        }


def _slice_points(I: Ideal, dim: int, rng, tries: int = 1, limits=None):
    """Points of V(I) on random linear sections of complementary dimension."""
    F, N = I.field, I.nvars
    found = []
    for _ in range(tries):
        extra = [MPoly.linear_form(F, [F.random_element(rng, 50) for _ in range(N)]) for _ in range(dim)]
        chart = MPoly.linear_form(F, [F.random_element(rng, 50) for _ in range(N)]) - 1
        try:
            res = solve_zero_dim(Ideal(I.gens + extra + [chart], N, F), seed=rng.randrange(1 << 30), limits=limits)
        except (ValueError, LimitsExceeded):
            continue
        found.extend(ProjPoint(F, p) for p in res.points)
    return found


def stratum_dimension(hd: HessianData, k: int, field_spec=None, limits: Limits | None = None,
                      seed: int = 0, sample: bool = True) -> StratumReport:
    """Projective dimension of D_k(f) from a Groebner basis of its minors ideal.

    With several fields (``fp:auto``) every field is run and the dimensions
    must agree; ``dims['agree']`` records it.
    """
    n = hd.n
    if field_spec is None:
        field_spec = "q" if n <= 3 else "fp:auto"
    fields = parse_field_spec(field_spec, seed)
    I0 = hd.minors_ideal(k)
    report = StratumReport(k, n, comb(n - k + 2, 2), I0)
    per_field = []
    rng = random.Random(seed)
    for F in fields:
        hF = hd if F == hd.field else hd.to_field(F)
        I = I0 if F == hd.field else hF.minors_ideal(k)
        G = buchberger(I, limits)
        if G.limits_hit:
            report.limits_hit = True
            per_field.append({"field": F.tag, "limits_hit": True, "stats": G.stats})
            continue
        aff = krull_dimension(G)
        entry = {"field": F.tag, "affine": aff, "projective": aff - 1 if aff >= 0 else -1}
        if aff >= 1:
            entry["degree"] = degree(G)
        per_field.append(entry)
        if sample and F.p and aff >= 1 and not report.samples:
            for P in _slice_points(I, aff - 1, rng, tries=2, limits=limits):
                report.samples.append((P, hF.rank_at(P)))
    report.dims["runs"] = per_field
    finished = [e for e in per_field if not e.get("limits_hit")]
    if finished:
        projs = {e["projective"] for e in finished}
        report.dims["agree"] = len(projs) == 1 and len(finished) == len(per_field)
        report.dims["projective"] = max(projs)
        report.dims["affine"] = max(e["affine"] for e in finished)
        degs = {e.get("degree") for e in finished}
        if len(degs) == 1 and None not in degs:
            report.dims["degree"] = degs.pop()
        report.dims["field"] = field_spec if isinstance(field_spec, str) else fields[0].tag
        report.dims["probabilistic"] = any(F.p for F in fields) and hd.field.p == 0
    return report


def sample_hypersurface_points(h: MPoly, count: int, rng, max_lines: int = 10_000):
    """Points of V(h) with coordinates in the field of ``h``, from roots on random lines."""
    from .univariate import roots as uroots

    F, N = h.field, h.nvars
    out = []
    for _ in range(max_lines):
        if len(out) >= count:
            break
        a = [F.random_element(rng, 50) for _ in range(N)]
        b = [F.random_element(rng, 50) for _ in range(N)]
        # h(a + t b) as a univariate polynomial in t
        t = MPoly.var(F, 1, 0)
        images = [MPoly.const(F, 1, ai) + t.scale(bi) for ai, bi in zip(a, b)]
        u = h.substitute(images)
        coeffs = [0] * (max(u.degree(), 0) + 1)
        for e, c in u.terms.items():
            coeffs[e[0]] = c
        if not any(coeffs):
            continue
        for r in uroots(F, coeffs, rng)[0]:
            pt = [F.norm(ai + r * bi) for ai, bi in zip(a, b)]
            if any(pt):
                out.append(ProjPoint(F, pt))
    return out[:count]


def sing_hessian_check(hd: HessianData, points):
    """For each point compare "h = 0 and grad h = 0" with "rank H_f <= n - 1"."""
    grad = hd.h.gradient()
    rows = []
    all_ok = True
    for P in points:
        coords = list(P.coords if isinstance(P, ProjPoint) else P)
        sing = hd.h.evaluate(coords) == 0 and all(g.evaluate(coords) == 0 for g in grad)
        r = hd.rank_at(coords)
        ok = sing == (r <= hd.n - 1)
        all_ok &= ok
        rows.append({"point": coords, "singular": sing, "rank": r, "ok": ok})
    return all_ok, rows


def _blocks_from(sizes_or_blocks, N):
    blocks = list(sizes_or_blocks)
    if blocks and all(isinstance(b, int) for b in blocks):
        out, start = [], 0
        for s in blocks:
            out.append(list(range(start, start + s)))
            start += s
        blocks = out
    flat = sorted(i for b in blocks for i in b)
    if flat != list(range(N)):
        raise ValueError("blocks must partition the variables")
    return blocks


def ts_block_factor_check(f: MPoly, change=None, blocks=None):
    """Check h_{f o L} == product of the determinants of the diagonal blocks of H_{f o L}.

    Each block determinant is a polynomial in all variables (constant in the
    others).  Returns ``(ok, residual)``.
    """
    F = change_of_vars(f, change) if change is not None else f
    N = F.nvars
    blocks = _blocks_from(blocks or [N], N)
    hd = HessianData(F)
    prod = MPoly.const(F.field, N, 1)
    for b in blocks:
        prod = prod * hd.H.submatrix(b, b).det()
    residual = hd.h - prod
    return residual.is_zero(), residual


# ---------------------------------------------------------------------------
# the explicit fourfold family with parameters p0, p1, p2, p3, p6, lam

_FAMILY_KEYS = ("p0", "p1", "p2", "p3", "p6", "lam")


def _params(params):
    if isinstance(params, dict):
        vals = [params[k] for k in _FAMILY_KEYS]
    else:
        vals = list(params)
    vals = [QQ(v) if not isinstance(v, (int, Fraction)) else QQ(v) for v in vals]
    p0, p1, p2, p3, p6, lam = vals
    if not all((lam, p0, p1, p2, p3)):
        raise ValueError("lam, p0, p1, p2, p3 must be nonzero")
    return p0, p1, p2, p3, p6, lam


def fourfold_family(params, field: Field = QQ) -> MPoly:
    """The cubic fourfold f in variables (x, y, z, u, v, w) = (x0, ..., x5) with

    2f = p0 x^3 + p1 y^3 + p2 z^3 + p3 (x - z) u^2 + p6 u^3
         + (x + u)(w^2 + v^2) + y (w^2 - v^2) - 2 (lam z + u / lam) v w.
    """
    p0, p1, p2, p3, p6, lam = _params(params)
    F = field
    x, y, z, u, v, w = (MPoly.var(F, 6, i) for i in range(6))
    c = lambda a: F(Fraction(a))  # noqa: E731
    two_f = (x ** 3).scale(c(p0)) + (y ** 3).scale(c(p1)) + (z ** 3).scale(c(p2)) \
        + ((x - z) * u * u).scale(c(p3)) + (u ** 3).scale(c(p6)) \
        + (x + u) * (w * w + v * v) + y * (w * w - v * v) \
        - (z.scale(c(lam)) + u.scale(F.inv(c(lam)))) * v * w * 2
    return two_f.scale(F.inv(2))


def fourfold_family_minor(params, ij, substitution=None, field: Field = QQ) -> MPoly:
    """Bare minor m_ij of the family's Hessian (row i and column j removed, 0-based),
    after fixing the variables listed in ``substitution`` ({index: value})."""
    f = fourfold_family(params, field)
    H = hessian_matrix(f)
    i, j = ij
    m = H.submatrix([r for r in range(6) if r != i], [c for c in range(6) if c != j]).det()
    if substitution:
        m = m.partial_substitute(dict(substitution))
    return m
