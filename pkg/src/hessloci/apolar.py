"""Apolarity for homogeneous forms.

Differential operators live in a second polynomial ring whose variable ``y_i``
acts as d/dx_i.  For a cubic ``f`` the quotient A_f = D / Ann(f) is graded
A0 + A1 + A2 + A3 with A3 one-dimensional; products land in A2 and A3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .fields import QQ, GF, Field, random_prime
from .groebner import Ideal, Limits, LimitsExceeded, buchberger, krull_dimension, projective_points
from .linalg import ProjPoint, kernel_basis, matvec, rank, rref, solve
from .poly import MPoly, PolyMatrix, apply_diff_op, monomials

__all__ = [
    "Catalecticant",
    "catalecticant",
    "annihilator_graded",
    "is_cone",
    "is_smooth",
    "singular_points",
    "SmoothnessUndecided",
    "ApolarRing",
    "build_apolar_ring",
    "random_cubic",
    "random_smooth_cubic",
]


class SmoothnessUndecided(LimitsExceeded):
    """Raised when a smoothness test could not finish within its limits."""


@dataclass(frozen=True)
class Catalecticant:
    """The map D^k -> S^(d-k), delta -> delta(f), in lex-descending monomial bases."""

    k: int
    row_monomials: tuple
    col_monomials: tuple
    matrix: tuple

    @property
    def shape(self):
        return len(self.row_monomials), len(self.col_monomials)


def _require_homogeneous(f: MPoly):
    if f.is_zero() or not f.is_homogeneous():
        raise ValueError("expected a nonzero homogeneous polynomial")


def catalecticant(f: MPoly, k: int) -> Catalecticant:
    _require_homogeneous(f)
    d = f.degree()
    if not 0 <= k <= d:
        raise ValueError(f"catalecticant degree {k} outside [0, {d}]")
    n = f.nvars
    cols = tuple(monomials(n, k))
    rows = tuple(monomials(n, d - k))
    ridx = {e: i for i, e in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, e in enumerate(cols):
        img = apply_diff_op(MPoly.monomial(f.field, e), f)
        for m, c in img.terms.items():
            M[ridx[m]][j] = c
    return Catalecticant(k, rows, cols, tuple(tuple(r) for r in M))


def annihilator_graded(f: MPoly, k: int) -> list:
    """Basis of Ann(f) in degree k as operators (MPoly in the y variables), reduced echelon."""
    C = catalecticant(f, k)
    F = f.field
    basis = kernel_basis(F, [list(r) for r in C.matrix], ncols=len(C.col_monomials))
    return [MPoly(F, f.nvars, {C.col_monomials[j]: c for j, c in enumerate(v) if c}) for v in basis]


def is_cone(f: MPoly) -> bool:
    """V(f) is a cone iff some linear operator kills f."""
    return bool(annihilator_graded(f, 1))


def _good_prime(f: MPoly, rng):
    """A random 31-bit prime not dividing any coefficient denominator."""
    from fractions import Fraction

    while True:
        p = random_prime(rng)
        if all(Fraction(c).denominator % p for c in f.terms.values()):
            return p


def _jacobian_smooth(f: MPoly, limits, seed):
    F = f.field
    if F is QQ or F.p == 0:
        # a smooth reduction mod p forces smoothness in characteristic 0
        rng = random.Random(seed)
        fp = f.to_field(GF(_good_prime(f, rng)))
        G = buchberger(Ideal(fp.gradient()), limits)
        if not G.limits_hit and krull_dimension(G) <= 0:
            return True, {"certified_by": f"reduction mod {fp.field.p}"}
    G = buchberger(Ideal(f.gradient(), f.nvars, F), limits)
    if G.limits_hit:
        raise SmoothnessUndecided("jacobian backend hit limits", G.stats)
    return krull_dimension(G) <= 0, {"certified_by": "groebner", "basis_size": len(G)}


def _apolar_smooth(f: MPoly, limits):
    if f.degree() != 3:
        raise ValueError("apolar backend handles cubics only")
    if is_cone(f):
        return False, {"reason": "cone"}
    R = build_apolar_ring(f)
    quadrics = R.square_quadrics()
    G = buchberger(Ideal(quadrics, f.nvars, f.field), limits)
    if G.limits_hit:
        raise SmoothnessUndecided("apolar backend hit limits", G.stats)
    return krull_dimension(G) <= 0, {"certified_by": "groebner", "basis_size": len(G)}


def is_smooth(f: MPoly, backend: str = "jacobian", limits: Limits | None = None, seed: int = 0,
              diagnostics: dict | None = None) -> bool:
    """Smoothness of the projective hypersurface V(f).

    ``backend`` is ``"jacobian"`` (common zeros of the partials) or
    ``"apolar"`` (cubics: points y with y^2 = 0 in A2).
    """
    _require_homogeneous(f)
    if f.degree() < 2:
        if diagnostics is not None:
            diagnostics["reason"] = "linear"
        return True
    if backend == "jacobian":
        ok, diag = _jacobian_smooth(f, limits, seed)
    elif backend == "apolar":
        ok, diag = _apolar_smooth(f, limits)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if diagnostics is not None:
        diagnostics.update(diag)
    return ok


def singular_points(f: MPoly, seed: int = 0, limits: Limits | None = None):
    """Singular points of V(f) with coordinates in the working field, when finitely many.

    Returns ``(points, info)``; ``info`` has the scheme length of the singular
    locus and how many geometric points need a field extension.
    """
    _require_homogeneous(f)
    I = Ideal(f.gradient(), f.nvars, f.field)
    G = buchberger(I, limits)
    if G.limits_hit:
        raise SmoothnessUndecided("singular locus computation hit limits", G.stats)
    dim = krull_dimension(G) - 1
    if dim < 0:
        return [], {"projective_dim": -1, "length": 0, "needs_extension": 0}
    if dim > 0:
        return [], {"projective_dim": dim, "length": None, "needs_extension": None}
    pts, res = projective_points(I, seed=seed, limits=limits)
    return pts, {"projective_dim": 0, "length": res.multiplicity_total, "needs_extension": res.needs_extension}


class ApolarRing:
    """Graded apolar ring of a cubic that is not a cone.

    A1 has the coordinate basis y_0..y_n.  A2 is represented by the monomials
    whose catalecticant columns are pivots (lexicographically least choice);
    ``mult11[i][j]`` holds the A2-coordinates of y_i*y_j and
    ``mult12[i][k]`` the value (y_i * lift_k)(f) identifying A3 with the field.
    """

    socle_normalizer = 1

    def __init__(self, f: MPoly):
        _require_homogeneous(f)
        if f.degree() != 3:
            raise ValueError("apolar ring tables are implemented for cubics")
        if is_cone(f):
            raise ValueError("V(f) is a cone: A1 is smaller than the coordinate space")
        self.f = f
        self.field = F = f.field
        self.n = f.nvars - 1
        N = f.nvars
        C2 = catalecticant(f, 2)
        M2 = [list(r) for r in C2.matrix]
        _, pivots = rref(F, M2)
        self.basisA1 = [tuple(1 if i == j else 0 for i in range(N)) for j in range(N)]
        self.basisA2 = [C2.col_monomials[c] for c in pivots]
        piv_cols = [[row[c] for c in pivots] for row in M2]
        col_of = {e: j for j, e in enumerate(C2.col_monomials)}
        self.mult11 = [[None] * N for _ in range(N)]
        for i in range(N):
            for j in range(i, N):
                e = tuple(a + (1 if t == i else 0) + (1 if t == j else 0) for t, a in enumerate([0] * N))
                col = [row[col_of[e]] for row in M2]
                coords = solve(F, piv_cols, col)
                if coords is None:
                    raise ArithmeticError("A2 image not in the pivot span")
                self.mult11[i][j] = self.mult11[j][i] = tuple(coords)
        self.mult12 = []
        for i in range(N):
            row = []
            for e in self.basisA2:
                op = MPoly.monomial(F, tuple(a + (1 if t == i else 0) for t, a in enumerate(e)))
                row.append(apply_diff_op(op, f).constant_term())
            self.mult12.append(row)

    @property
    def dims(self):
        return (1, len(self.basisA1), len(self.basisA2), 1)

    def _check(self, v, size):
        if len(v) != size:
            raise ValueError(f"expected a vector of length {size}, got {len(v)}")

    def mult(self, a, b):
        """Product of two A1 elements, as A2 coordinates."""
        N = self.n + 1
        self._check(a, N)
        self._check(b, N)
        F = self.field
        out = [0] * len(self.basisA2)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for k, m in enumerate(self.mult11[i][j]):
                    if m:
                        out[k] += c * m
        return [F.norm(x) for x in out]

    def square(self, a):
        return self.mult(a, a)

    def pairing(self, a, q):
        """A1 x A2 -> A3 = field."""
        self._check(a, self.n + 1)
        self._check(q, len(self.basisA2))
        return self.field.norm(sum(a[i] * self.mult12[i][k] * q[k]
                                   for i in range(len(a)) for k in range(len(q))))

    def pairing_matrix(self):
        return [list(r) for r in self.mult12]

    def is_gorenstein_nondegenerate(self):
        N = self.n + 1
        return len(self.basisA2) == N and rank(self.field, self.mult12) == N

    def mult_matrix(self, x):
        """Matrix of v -> mult(x, v): rows indexed by A2 coordinates."""
        N = self.n + 1
        cols = [self.mult(x, [1 if t == j else 0 for t in range(N)]) for j in range(N)]
        return [[cols[j][k] for j in range(N)] for k in range(len(self.basisA2))]

    def annihilator_of(self, x):
        """Reduced kernel basis of v -> mult(x, v)."""
        return kernel_basis(self.field, self.mult_matrix(x), ncols=self.n + 1)

    def square_quadrics(self):
        """Coordinates of y^2 in A2 as quadrics in the coordinates of y."""
        F, N = self.field, self.n + 1
        out = []
        for k in range(len(self.basisA2)):
            terms = {}
            for i in range(N):
                for j in range(i, N):
                    c = self.mult11[i][j][k]
                    if c:
                        e = tuple((t == i) + (t == j) for t in range(N))
                        terms[e] = F.norm(terms.get(e, 0) + (c if i == j else 2 * c))
            out.append(MPoly(F, N, terms))
        return out

    def hessian_kernel_identity_check(self, x, H: PolyMatrix | None = None):
        """Compare ker H_f(x) with {v : x*v = 0}.  Returns (ok, witness_or_None)."""
        from .hessian import hessian_matrix

        F = self.field
        coords = list(x.coords if isinstance(x, ProjPoint) else x)
        H = H or hessian_matrix(self.f)
        K1 = kernel_basis(F, H.evaluate(coords), ncols=self.n + 1)
        K2 = self.annihilator_of(coords)
        if K1 == K2:
            return True, None
        # a witness: a basis vector of one kernel missing from the other
        M = self.mult_matrix(coords)
        Hx = H.evaluate(coords)
        for v in K1:
            if any(matvec(F, M, v)):
                return False, {"in_hessian_kernel_only": v}
        for v in K2:
            if any(matvec(F, Hx, v)):
                return False, {"in_mult_kernel_only": v}
        return False, {"kernels": [K1, K2]}

    def __repr__(self):
        return f"ApolarRing(n={self.n}, dims={self.dims}, field={self.field!r})"


def build_apolar_ring(f: MPoly) -> ApolarRing:
    return ApolarRing(f)


def random_cubic(nvars: int, rng: random.Random, field: Field = QQ, bound: int = 5, density: float = 1.0) -> MPoly:
    terms = {}
    for e in monomials(nvars, 3):
        if density >= 1.0 or rng.random() < density:
            terms[e] = field.random_element(rng, bound)
    return MPoly(field, nvars, terms)


def random_smooth_cubic(nvars: int, seed: int = 0, field: Field = QQ, bound: int = 5, attempts: int = 50) -> MPoly:
    """A dense random cubic, redrawn until the hypersurface is smooth."""
    rng = random.Random(seed)
    for _ in range(attempts):
        f = random_cubic(nvars, rng, field, bound)
        if f.is_zero() or f.degree() != 3:
            continue
        if is_smooth(f, seed=rng.randrange(1 << 30)):
            return f
    raise RuntimeError("no smooth cubic found; try a different seed")
