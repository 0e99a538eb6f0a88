"""Pairs and triangles of points with vanishing apolar products.

Points of projective space are identified with lines in A1 through the
coordinate basis, so ``x*y = 0`` in A2 is the same condition as
``H_f(x) y = 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from .apolar import ApolarRing
from .groebner import Ideal, Limits, LimitsExceeded, buchberger, krull_dimension, solve_zero_dim
from .linalg import ProjPoint, kernel_basis, rank, rref, transpose
from .poly import MPoly
from .univariate import pgcd, ptrim, roots as uroots

__all__ = [
    "gamma_contains",
    "is_triangle",
    "triangle_invariants",
    "TriangleSearch",
    "find_triangles_through",
    "gamma_singularity_check",
    "triangle_span",
    "psi_injectivity_probe",
    "tangent_relation_check",
]


def _vec(P):
    return list(P.coords if isinstance(P, ProjPoint) else P)


def gamma_contains(ring: ApolarRing, x, y) -> bool:
    return not any(ring.mult(_vec(x), _vec(y)))


def _independent(F, *vectors):
    return rank(F, [list(v) for v in vectors]) == len(vectors)


def is_triangle(ring: ApolarRing, T) -> bool:
    x, y, z = (_vec(P) for P in T)
    F = ring.field
    for a, b in ((x, y), (y, z), (x, z)):
        if not _independent(F, a, b):
            return False
        if any(ring.mult(a, b)):
            return False
    return True


def triangle_invariants(ring: ApolarRing, T):
    """Check that the vertices are distinct, span a plane, and have independent squares.

    Returns ``(ok, report)``; on failure ``report['failed']`` names the first
    failing check and ``report['witness']`` gives a dependency.
    """
    F = ring.field
    vs = [_vec(P) for P in T]
    report = {"pairwise_independent": True, "span_dim": None, "squares_rank": None}
    for a, b in combinations(range(3), 2):
        if not _independent(F, vs[a], vs[b]):
            report["pairwise_independent"] = False
            report["failed"] = "pairwise_independent"
            report["witness"] = (a, b)
            return False, report
    report["span_dim"] = rank(F, vs)
    if report["span_dim"] != 3:
        report["failed"] = "span"
        report["witness"] = kernel_basis(F, transpose(vs))
        return False, report
    squares = [ring.square(v) for v in vs]
    report["squares_rank"] = rank(F, squares)
    if report["squares_rank"] != 3:
        report["failed"] = "squares"
        report["witness"] = kernel_basis(F, transpose(squares))
        return False, report
    return True, report


@dataclass
class TriangleSearch:
    """Outcome of a triangle search through one point."""

    x: ProjPoint
    kernel_dim: int
    triangles: list = dc_field(default_factory=list)
    families: list = dc_field(default_factory=list)
    needs_extension: int = 0
    ring: ApolarRing | None = dc_field(default=None, repr=False, compare=False)

    def contains(self, y, z) -> bool:
        """Is (x, y, z) a triangle?  Covers members of flagged families as well."""
        return is_triangle(self.ring, (self.x, y, z))

    def to_json(self):
        return {
            "x": str(self.x),
            "kernel_dim": self.kernel_dim,
            "triangles": [[str(P) for P in T] for T in self.triangles],
            "families": self.families,
            "needs_extension": self.needs_extension,
        }


def _combine(F, coeffs, basis):
    N = len(basis[0])
    return [F.norm(sum(c * b[i] for c, b in zip(coeffs, basis))) for i in range(N)]


def _binary_roots(F, forms, rng):
    """Common roots with t = 1 of binary forms given as coefficient lists in s.

    Returns (roots, roots_outside_field, all_forms_zero); the point (1:0) is
    handled by the caller.
    """
    forms = [ptrim(f) for f in forms]
    forms_nz = [f for f in forms if f]
    if not forms_nz:
        return [], 0, True
    g = []
    for f in forms_nz:
        g = pgcd(F, g, f) if g else pgcd(F, f, [])
    found, missing = uroots(F, g, rng) if len(g) > 1 else ([], 0)
    return [(r, 1) for r in found], missing, False


def _search_dim2(ring, x, K, rng):
    F = ring.field
    k1, k2 = K
    a, b, c = ring.mult(k1, k1), ring.mult(k1, k2), ring.mult(k2, k2)
    # rows of N(s, t) = (s a_r + t b_r, s b_r + t c_r); minors are binary quadrics
    minors = []
    for r1, r2 in combinations(range(len(a)), 2):
        # (s a1 + t b1)(s b2 + t c2) - (s b1 + t c1)(s a2 + t b2)
        s2 = F.norm(a[r1] * b[r2] - b[r1] * a[r2])
        st = F.norm(a[r1] * c[r2] + b[r1] * b[r2] - b[r1] * b[r2] - c[r1] * a[r2])
        t2 = F.norm(b[r1] * c[r2] - c[r1] * b[r2])
        minors.append((t2, st, s2))
    candidates = []
    roots, missing, zero = _binary_roots(F, [list(m) for m in minors], rng)
    if zero:
        return [], [{"kind": "pencil", "parameter_space_dim": 1, "reason": "all minors vanish"}], 0
    candidates.extend((s, t) for s, t in roots)
    if all(m[2] == 0 for m in minors):
        candidates.append((1, 0))
    triangles, families = [], []
    seen = set()
    for s, t in candidates:
        y = _combine(F, (s, t), K)
        Nm = [[F.norm(s * a[r] + t * b[r]), F.norm(s * b[r] + t * c[r])] for r in range(len(a))]
        ker = kernel_basis(F, Nm, ncols=2)
        if len(ker) == 2:
            families.append({"kind": "every z in the kernel line", "y": str(ProjPoint(F, y))})
            continue
        if not ker:
            continue
        z = _combine(F, ker[0], K)
        Y, Zp = ProjPoint(F, y), ProjPoint(F, z)
        if Y == Zp:
            continue
        key = frozenset((Y.coords, Zp.coords))
        if key in seen:
            continue
        seen.add(key)
        triangles.append((x, Y, Zp))
    return triangles, families, missing


def _search_general(ring, x, K, rng, limits):
    """dim K >= 3: solve the bilinear system in charts over the working field."""
    F = ring.field
    m = len(K)
    prods = [[ring.mult(K[i], K[j]) for j in range(m)] for i in range(m)]
    nv = 2 * m
    S = [MPoly.var(F, nv, i) for i in range(m)]
    U = [MPoly.var(F, nv, m + i) for i in range(m)]
    eqs = []
    for r in range(len(ring.basisA2)):
        e = MPoly.zero(F, nv)
        for i in range(m):
            for j in range(m):
                if prods[i][j][r]:
                    e = e + (S[i] * U[j]).scale(prods[i][j][r])
        eqs.append(e)
    triangles, families = [], []
    missing = 0
    seen = set()
    for a in range(m):
        for b in range(m):
            chart = [S[a] - 1] + [S[i] for i in range(a)] + [U[b] - 1] + [U[j] for j in range(b)]
            I = Ideal(eqs + chart, nv, F)
            G = buchberger(I, limits)
            if G.limits_hit:
                raise LimitsExceeded("triangle search hit limits", G.stats)
            dim = krull_dimension(G)
            if dim < 0:
                continue
            sols = []
            if dim > 0:
                families.append({"kind": "positive-dimensional", "chart": [a, b], "dim": dim})
                extra = [MPoly.linear_form(F, [F.random_element(rng, 50) for _ in range(nv)]) - F.random_element(rng, 50)
                         for _ in range(dim)]
                try:
                    res = solve_zero_dim(Ideal(G.basis + extra, nv, F), seed=rng.randrange(1 << 30), limits=limits)
                except ValueError:
                    continue
            else:
                res = solve_zero_dim(Ideal(G.basis, nv, F), seed=rng.randrange(1 << 30), limits=limits)
            missing += res.needs_extension
            sols = res.points
            for p in sols:
                y = _combine(F, p[:m], K)
                z = _combine(F, p[m:], K)
                if not any(y) or not any(z):
                    continue
                Y, Zp = ProjPoint(F, y), ProjPoint(F, z)
                if Y == Zp:
                    continue
                key = frozenset((Y.coords, Zp.coords))
                if key in seen:
                    continue
                seen.add(key)
                triangles.append((x, Y, Zp))
    return triangles, families, missing


def find_triangles_through(ring: ApolarRing, x, seed: int = 0, limits: Limits | None = None) -> TriangleSearch:
    """Triangles (x, y, z) with the given first vertex, over the ring's field."""
    F = ring.field
    X = x if isinstance(x, ProjPoint) else ProjPoint(F, x)
    K = ring.annihilator_of(list(X.coords))
    if len(K) < 2:
        raise ValueError("x must have at least a two-dimensional annihilator (rank H_f(x) <= n - 1)")
    rng = random.Random(seed)
    if len(K) == 2:
        tris, fams, missing = _search_dim2(ring, X, K, rng)
    else:
        tris, fams, missing = _search_general(ring, X, K, rng, limits)
    # on singular cubics x may lie in its own kernel; keep genuine triangles only
    tris = [T for T in tris if is_triangle(ring, T)]
    tris.sort(key=lambda T: (T[1].coords, T[2].coords))
    return TriangleSearch(X, len(K), tris, fams, missing, ring)


def gamma_singularity_check(ring: ApolarRing, xy):
    """Jacobian test for a point (x, y) of the incidence correspondence.

    The correspondence is cut out by the n+1 bilinear coordinates of x*y; the
    point is singular when their Jacobian in the affine chart fixing the first
    nonzero coordinates of x and y has rank below n+1.  The answer is
    cross-checked against the existence of z != 0 with x*z = y*z = 0.
    """
    F = ring.field
    X, Y = (P if isinstance(P, ProjPoint) else ProjPoint(F, P) for P in xy)
    x, y = list(X.coords), list(Y.coords)
    if not gamma_contains(ring, x, y):
        raise ValueError("(x, y) is not in the correspondence")
    N = ring.n + 1
    i, j = X.chart(), Y.chart()
    cols = []
    for k in range(N):
        if k != i:
            cols.append(ring.mult([1 if t == k else 0 for t in range(N)], y))
    for l in range(N):
        if l != j:
            cols.append(ring.mult(x, [1 if t == l else 0 for t in range(N)]))
    J = transpose(cols)
    jr = rank(F, J)
    singular = jr < N
    common = kernel_basis(F, ring.mult_matrix(x) + ring.mult_matrix(y), ncols=N)
    z = ProjPoint(F, common[0]) if common else None
    return {
        "singular": singular,
        "jacobian_rank": jr,
        "completing_z": z,
        "agree": singular == bool(common),
    }


def triangle_span(T):
    """Reduced basis of the linear span of the three vertices."""
    F = T[0].field if isinstance(T[0], ProjPoint) else None
    if F is None:
        raise TypeError("triangle vertices must be ProjPoints")
    return rref(F, [list(P.coords) for P in T])[0]


def psi_injectivity_probe(triangles):
    """Distinct triangles (up to vertex order) should have distinct spans."""
    report = {"pairs": 0, "permutation_equivalent": 0, "collisions": []}
    keys = [frozenset(P.coords for P in T) for T in triangles]
    spans = [tuple(tuple(r) for r in triangle_span(T)) for T in triangles]
    for a, b in combinations(range(len(triangles)), 2):
        report["pairs"] += 1
        if keys[a] == keys[b]:
            report["permutation_equivalent"] += 1
            continue
        if spans[a] == spans[b]:
            report["collisions"].append((a, b))
    report["ok"] = not report["collisions"]
    return report


def tangent_relation_check(ring: ApolarRing, T, v):
    """First-order relations at a triangle: x_i x_j' + x_j x_i' = 0 in A2 for i != j,
    and x_i' * x_j^2 = 0 in A3 for j != i.  Returns (ok, failing relation or None)."""
    F = ring.field
    xs = [_vec(P) for P in T]
    ds = [list(d) for d in v]
    for i, j in combinations(range(3), 2):
        lhs = [F.norm(a + b) for a, b in zip(ring.mult(xs[i], ds[j]), ring.mult(xs[j], ds[i]))]
        if any(lhs):
            return False, ("relation", i, j)
    for i in range(3):
        for j in range(3):
            if i != j and ring.pairing(ds[i], ring.square(xs[j])):
                return False, ("annihilator", i, j)
    return True, None
