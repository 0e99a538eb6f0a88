"""Regression suite of known explicit computations, runnable from the CLI.

Each check is registered under a short selector and returns a
:class:`CheckResult` with the residual data needed to diagnose a failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .apolar import build_apolar_ring, is_smooth, random_smooth_cubic, singular_points
from .fields import GF, QQ, random_prime
from .groebner import Ideal, buchberger, krull_dimension, projective_points, zero_dim_degree
from .hessian import (HessianData, fourfold_family, fourfold_family_minor, hessian_matrix,
                      sample_hypersurface_points, stratum_dimension, ts_block_factor_check)
from .linalg import LinearChange, ProjPoint
from .poly import MPoly, change_of_vars, parse_poly
from .ts import TS, detect_ts, verify_split

__all__ = ["CheckResult", "REGISTRY", "run_checks", "CORPUS", "example_fourfold", "cyclic_extension",
           "proportional", "expected_fourfold_hessian", "quartic_hessian_factor", "d5_hessian_factor"]

# fixed inputs shared by the checks, the CLI and the tests
CORPUS = {
    "quartic": "x0^4 + x1^4 + x2^4 + x0*x1^3 + x0*x2^3",
    "d5_surface": "x0*x1^2 + x1*x2^2 + x2*x3^2",
    # Weierstrass cubics with nonzero j-invariant, so neither is a direct sum
    "g1": "x1^2*x2 - x0^3 - x0*x2^2 - x2^3",
    "g2": "x1^2*x2 - x0^3 + 2*x0*x2^2 - 3*x2^3",
    "ten_nodes_seed": 20240,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = dc_field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "details": self.details}


REGISTRY = {}


def _register(name, description):
    def deco(fn):
        REGISTRY[name] = (description, fn)
        return fn
    return deco


def proportional(a: MPoly, b: MPoly):
    """Return c with a == c * b (c nonzero), or None."""
    if a.is_zero() or b.is_zero():
        return None
    e, cb = b.lead()
    ca = a.coeff(e)
    if not ca:
        return None
    c = a.field.div(ca, cb)
    return c if a == b.scale(c) else None


def example_fourfold(field=QQ) -> MPoly:
    g1 = parse_poly(CORPUS["g1"], 3, field)
    g2 = parse_poly(CORPUS["g2"], 3, field)
    return g1.embed(6, [0, 1, 2]) + g2.embed(6, [3, 4, 5])


def cyclic_extension(g: MPoly) -> MPoly:
    """x0^3 + g(x1, ..., xn)."""
    N = g.nvars + 1
    return MPoly.var(g.field, N, 0) ** 3 + g.embed(N, list(range(1, N)))


def expected_fourfold_hessian(params):
    """The displayed Hessian matrix of the fourfold family, entry by entry."""
    p0, p1, p2, p3, p6, lam = [QQ(Fraction(v)) for v in params]
    F = QQ
    x, y, z, u, v, w = (MPoly.var(F, 6, i) for i in range(6))
    zero = MPoly.zero(F, 6)
    il = F.inv(lam)
    rows = [
        [x.scale(3 * p0), zero, zero, u.scale(p3), v, w],
        [zero, y.scale(3 * p1), zero, zero, -v, w],
        [zero, zero, z.scale(3 * p2), u.scale(-p3), w.scale(-lam), v.scale(-lam)],
        [u.scale(p3), zero, u.scale(-p3), (x - z).scale(p3) + u.scale(3 * p6), v - w.scale(il), w - v.scale(il)],
        [v, -v, w.scale(-lam), v - w.scale(il), x - y + u, z.scale(-lam) - u.scale(il)],
        [w, w, v.scale(-lam), w - v.scale(il), z.scale(-lam) - u.scale(il), x + y + u],
    ]
    return rows


def quartic_hessian_factor():
    """y z (8x^4 + 16x^3(y + z) + 32x^2 yz - x(y^3 + z^3) - 2yz(y^2 + z^2)) in x0, x1, x2."""
    x, y, z = (MPoly.var(QQ, 3, i) for i in range(3))
    inner = (x ** 4).scale(8) + (x ** 3 * (y + z)).scale(16) + (x * x * y * z).scale(32) \
        - x * (y ** 3 + z ** 3) - (y * z * (y * y + z * z)).scale(2)
    return y * z * inner


def d5_hessian_factor():
    """x1^2 (x1 x2 - x3^2) in x0..x3."""
    x1, x2, x3 = (MPoly.var(QQ, 4, i) for i in (1, 2, 3))
    return x1 * x1 * (x1 * x2 - x3 * x3)


def _random_params(rng):
    def nz():
        while True:
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if c:
                return c
    return (nz(), nz(), nz(), nz(), Fraction(rng.randint(-9, 9), rng.randint(1, 5)), nz())


def _fourfold_vars():
    return [MPoly.var(QQ, 6, i) for i in range(6)]


# ---------------------------------------------------------------------------

@_register("quartic-hessian", "Hessian of the smooth quartic curve matches the displayed factorisation")
def check_quartic(seed=0):
    f = parse_poly(CORPUS["quartic"], 3)
    h = HessianData(f).h
    expected = quartic_hessian_factor()
    c = proportional(h, expected)
    return c is not None and is_smooth(f), {"scalar": str(c), "h": str(h)}


@_register("d5-hessian", "Hessian of x0*x1^2+x1*x2^2+x2*x3^2 is c*x1^2*(x1*x2-x3^2); singular only at (1:0:0:0)")
def check_d5(seed=0):
    f = parse_poly(CORPUS["d5_surface"], 4)
    h = HessianData(f).h
    expected = d5_hessian_factor()
    c = proportional(h, expected)
    pts, info = singular_points(f, seed=seed)
    ok = c is not None and [str(P) for P in pts] == ["(1:0:0:0)"] and info["needs_extension"] == 0
    return ok, {"scalar": str(c), "singular_points": [str(P) for P in pts], "length": info["length"]}


@_register("cyclic-factorization", "h of x0^3 + g equals 6*x0*h_g for 5 random smooth g")
def check_cyclic(seed=0):
    rows = []
    ok = True
    for t in range(5):
        nv = 3 if t % 2 == 0 else 4
        g = random_smooth_cubic(nv, seed=seed * 100 + t)
        f = cyclic_extension(g)
        hg = HessianData(g).h.embed(nv + 1, list(range(1, nv + 1)))
        expected = MPoly.var(QQ, nv + 1, 0).scale(6) * hg
        good = HessianData(f).h == expected
        ok &= good
        rows.append({"g": str(g), "ok": good})
    return ok, {"instances": rows}


def ten_nodes_surface(seed=None):
    return random_smooth_cubic(4, seed=CORPUS["ten_nodes_seed"] if seed is None else seed)


@_register("ten-nodes", "singular scheme of the Hessian quartic of a random cubic surface has degree 10")
def check_ten_nodes(seed=0):
    g = ten_nodes_surface()
    rng = random.Random(seed)
    runs = []
    ok = True
    for _ in range(2):
        F = GF(random_prime(rng))
        hd = HessianData(g.to_field(F))
        I = Ideal(hd.h.gradient())
        G = buchberger(I)
        pdim = krull_dimension(G) - 1
        deg = zero_dim_degree(G) if pdim == 0 else None
        pts, res = projective_points(I, seed=rng.randrange(1 << 30))
        ranks = [hd.rank_at(P) for P in pts]
        good = pdim == 0 and deg == 10 and res.distinct_total == 10 and all(r == 2 for r in ranks)
        ok &= good
        runs.append({"p": F.p, "projective_dim": pdim, "degree": deg, "rational_nodes": len(pts),
                     "needs_extension": res.needs_extension, "ranks": ranks})
    return ok, {"g": str(g), "runs": runs}


@_register("fourfold-hessian", "h of g1+g2 factors as h_g1 * h_g2")
def check_fourfold_hessian(seed=0):
    f = example_fourfold()
    ok, residual = ts_block_factor_check(f, None, [3, 3])
    return ok, {"residual_terms": len(residual)}


@_register("fourfold-strata", "rank strata of g1+g2: planes in D_3, cubic curves in D_2, D_1 empty, dim D_k = k-1")
def check_fourfold_strata(seed=0, draws=10_000):
    rng = random.Random(seed)
    F = GF(random_prime(rng))
    f = example_fourfold(F)
    hd = HessianData(f)
    details = {"p": F.p}
    ok = True

    def on_plane(first):
        a = [F.random_element(rng) for _ in range(3)]
        return a + [0, 0, 0] if first else [0, 0, 0] + a

    plane_ranks = [hd.rank_at(on_plane(b)) for b in (True, False) for _ in range(100)]
    details["max_rank_planes"] = max(plane_ranks)
    ok &= max(plane_ranks) <= 3
    h1 = HessianData(parse_poly(CORPUS["g1"], 3, F)).h
    h2 = HessianData(parse_poly(CORPUS["g2"], 3, F)).h
    c1 = [list(P.coords) + [0, 0, 0] for P in sample_hypersurface_points(h1, 100, rng)]
    c2 = [[0, 0, 0] + list(P.coords) for P in sample_hypersurface_points(h2, 100, rng)]
    curve_ranks = [hd.rank_at(x) for x in c1 + c2]
    details["curve_points"] = len(curve_ranks)
    details["max_rank_curves"] = max(curve_ranks)
    ok &= len(curve_ranks) == 200 and max(curve_ranks) <= 2
    # the smallest ranks occur on the lowest strata; draw from all of them
    pools = [lambda: on_plane(True), lambda: on_plane(False), lambda: rng.choice(c1), lambda: rng.choice(c2)]
    low = 0
    for _ in range(draws):
        x = rng.choice(pools)()
        if any(x) and hd.rank_at(x) <= 1:
            low += 1
    details["rank_le_1_draws"] = low
    ok &= low == 0
    dims = {}
    for k in range(1, 6):
        rep = stratum_dimension(HessianData(f), k, F, seed=seed, sample=False)
        dims[k] = rep.projective_dim
    details["projective_dims"] = dims
    ok &= all(dims[k] == k - 1 for k in range(2, 6)) and dims[1] == -1
    return ok, details


@_register("fourfold-ts", "g1+g2 is detected as a direct sum with blocks (3,3), also after scrambling")
def check_fourfold_ts(seed=0):
    f = example_fourfold()
    rng = random.Random(seed)
    while True:
        try:
            A = LinearChange(QQ, [[rng.randint(-2, 2) for _ in range(6)] for _ in range(6)])
            break
        except ValueError:
            continue
    out = {}
    ok = True
    for name, g in (("plain", f), ("scrambled", change_of_vars(f, A))):
        cert = detect_ts(g, seed=seed)
        good = cert.verdict == TS and cert.block_sizes == [3, 3]
        if good:
            good, failed = verify_split(g, cert, seed=seed)
        ok &= good
        out[name] = {"verdict": cert.verdict, "blocks": cert.block_sizes, "verified": good}
    return ok, out


@_register("fourfold-family-matrix", "Hessian of the fourfold family agrees with the displayed matrix")
def check_family_matrix(seed=0):
    rng = random.Random(seed)
    ok = True
    for _ in range(5):
        prm = _random_params(rng)
        H = hessian_matrix(fourfold_family(prm))
        E = expected_fourfold_hessian(prm)
        ok &= all(H[i, j] == E[i][j] for i in range(6) for j in range(6))
    return ok, {}


def _family_minor_check(ij, subst, build, seed):
    rng = random.Random(seed)
    signs = []
    for _ in range(5):
        prm = _random_params(rng)
        m = fourfold_family_minor(prm, ij, subst)
        e = build([QQ(v) for v in prm])
        signs.append(1 if m == e else -1 if m == -e else 0)
    return all(signs) and len(set(signs)) == 1, {"signs": signs}


@_register("fourfold-family-m12", "m_12(1,y,z,0,0,w) = -3 p0 w^2 (w^2 - p3 lam^2 z(1-z)) up to sign")
def check_m12(seed=0):
    def build(prm):
        p0, p1, p2, p3, p6, lam = prm
        x, y, z, u, v, w = _fourfold_vars()
        return (w * w * (w * w - (z * (1 - z)).scale(p3 * lam * lam))).scale(-3 * p0)
    return _family_minor_check((1, 2), {0: 1, 3: 0, 4: 0}, build, seed)


@_register("fourfold-family-m11", "m_11(1,y,z,0,0,0) = 9 p0 p2 p3 z(z-1)(y^2+lam^2 z^2-1) up to sign")
def check_m11(seed=0):
    def build(prm):
        p0, p1, p2, p3, p6, lam = prm
        x, y, z, u, v, w = _fourfold_vars()
        return (z * (z - 1) * (y * y + (z * z).scale(lam * lam) - 1)).scale(9 * p0 * p2 * p3)
    return _family_minor_check((1, 1), {0: 1, 3: 0, 4: 0, 5: 0}, build, seed)


@_register("fourfold-family-m22", "m_22(1,y,z,0,0,0) = 9 p0 p1 p3 y(z-1)(y^2+lam^2 z^2-1) up to sign")
def check_m22(seed=0):
    def build(prm):
        p0, p1, p2, p3, p6, lam = prm
        x, y, z, u, v, w = _fourfold_vars()
        return (y * (z - 1) * (y * y + (z * z).scale(lam * lam) - 1)).scale(9 * p0 * p1 * p3)
    return _family_minor_check((2, 2), {0: 1, 3: 0, 4: 0, 5: 0}, build, seed)


@_register("fourfold-family-minor-count", "the 6x6 symmetric Hessian has 21 distinct order-5 minors")
def check_minor_count(seed=0):
    rng = random.Random(seed)
    hd = HessianData(fourfold_family(_random_params(rng)))
    minors = hd.minors(4)
    distinct = {m for m in minors.values()}
    return len(minors) == 21 and len(distinct) == 21, {"pairs": len(minors), "distinct": len(distinct)}


@_register("cyclic-d1", "for x0^3 + g with g a general surface, D_1 is the single point (1:0:0:0:0)")
def check_cyclic_d1(seed=0):
    g = random_smooth_cubic(4, seed=seed + 7)
    f = cyclic_extension(g)
    hd = HessianData(f)
    rep = stratum_dimension(hd, 1, "fp:auto", seed=seed, sample=False)
    rank_p0 = hd.rank_at([1, 0, 0, 0, 0])
    rng = random.Random(seed)
    F = GF(random_prime(rng))
    pts, res = projective_points(hd.to_field(F).minors_ideal(1), seed=seed)
    ok = rep.projective_dim == 0 and rep.dims.get("agree") and rank_p0 == 1 \
        and [str(P) for P in pts] == ["(1:0:0:0:0)"] and res.distinct_total == 1
    return ok, {"projective_dim": rep.projective_dim, "rank_at_P0": rank_p0, "points": [str(P) for P in pts]}


def run_checks(selector="all", seed=0):
    if selector == "all":
        names = list(REGISTRY)
    elif selector in REGISTRY:
        names = [selector]
    else:
        raise KeyError(selector)
    out = []
    for name in names:
        _, fn = REGISTRY[name]
        t0 = time.perf_counter()
        try:
            ok, details = fn(seed=seed)
        except Exception as exc:  # a crash is a failed check, reported with its message
            ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
        out.append(CheckResult(name, bool(ok), details, time.perf_counter() - t0))
    return out
