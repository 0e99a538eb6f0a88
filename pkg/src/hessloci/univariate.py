"""Univariate polynomials as coefficient lists, lowest degree first.

``[]`` is the zero polynomial; otherwise the last entry is nonzero.  Used for
characteristic polynomials, minimal polynomials in zero-dimensional quotients
and binary forms in the triangle search.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .fields import Field

__all__ = [
    "ptrim",
    "padd",
    "psub",
    "pmul",
    "pmul_scalar",
    "pdivmod",
    "pmonic",
    "pgcd",
    "pxgcd",
    "rational_reconstruction",
    "pderiv",
    "peval",
    "ppow",
    "squarefree_decomposition",
    "distinct_coprime_split",
    "factor_over_Fp",
    "roots_Fp",
    "rational_roots",
    "roots",
    "pstr",
]


def ptrim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def padd(F: Field, a, b):
    n = max(len(a), len(b))
    return ptrim(F.norm((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) for i in range(n))


def psub(F: Field, a, b):
    n = max(len(a), len(b))
    return ptrim(F.norm((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) for i in range(n))


def pmul_scalar(F: Field, a, c):
    return ptrim(F.norm(x * c) for x in a)


def pmul(F: Field, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(F.norm(c) for c in out)


def pdivmod(F: Field, a, b):
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    a = ptrim(a)
    inv = F.inv(b[-1])
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        c = F.norm(r[-1] * inv)
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = F.norm(r[shift + i] - c * y)
        r = ptrim(r)
    return ptrim(q), r


def pmonic(F: Field, a):
    a = ptrim(a)
    if not a:
        raise ValueError("zero polynomial")
    return pmul_scalar(F, a, F.inv(a[-1]))


def pgcd(F: Field, a, b):
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(F, a, b)[1]
    return pmonic(F, a) if a else []


def pxgcd(F: Field, a, b):
    """(g, s, t) with s*a + t*b = g, g the monic gcd."""
    r0, r1 = ptrim(a), ptrim(b)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(F, s0, pmul(F, q, s1))
        t0, t1 = t1, psub(F, t0, pmul(F, q, t1))
    if not r0:
        return [], [], []
    c = F.inv(r0[-1])
    return pmul_scalar(F, r0, c), pmul_scalar(F, s0, c), pmul_scalar(F, t0, c)


def rational_reconstruction(a: int, m: int):
    """Fraction n/d == a mod m with |n|, d <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(r1, abs(t1)) != 1:
        return None
    return Fraction(r1, t1)


def pderiv(F: Field, a):
    return ptrim(F.norm(i * c) for i, c in enumerate(a))[1:] if len(a) > 1 else []


def peval(F: Field, a, x):
    acc = 0
    for c in reversed(a):
        acc = F.norm(acc * x + c)
    return acc


def ppow(F: Field, a, k):
    out = [1]
    while k:
        if k & 1:
            out = pmul(F, out, a)
        k >>= 1
        if k:
            a = pmul(F, a, a)
    return out


def _powmod(F, base, k, mod):
    out = [1]
    base = pdivmod(F, base, mod)[1]
    while k:
        if k & 1:
            out = pdivmod(F, pmul(F, out, base), mod)[1]
        k >>= 1
        if k:
            base = pdivmod(F, pmul(F, base, base), mod)[1]
    return out


def squarefree_decomposition(F: Field, a):
    """[(g_i, i)] with a = lc * prod g_i^i, g_i monic squarefree and pairwise coprime.

    Works in characteristic 0 and in characteristic p for polynomials whose
    degree is below p (the only case used here).
    """
    a = ptrim(a)
    if not a:
        raise ValueError("squarefree decomposition of the zero polynomial")
    if F.p and len(a) - 1 >= F.p:
        raise ValueError("degree too large for this characteristic")
    a = pmonic(F, a)
    out = []
    if len(a) == 1:
        return out
    # Yun's algorithm
    da = pderiv(F, a)
    g = pgcd(F, a, da)
    b = pdivmod(F, a, g)[0]
    c = pdivmod(F, da, g)[0]
    d = psub(F, c, pderiv(F, b))
    i = 1
    while len(b) > 1:
        g = pgcd(F, b, d)
        if len(g) > 1:
            out.append((g, i))
        b = pdivmod(F, b, g)[0]
        c = pdivmod(F, d, g)[0]
        d = psub(F, c, pderiv(F, b))
        i += 1
    return out


def distinct_coprime_split(F: Field, a, rng: random.Random | None = None):
    """Split a = g * h with g, h nonconstant and coprime, or return None.

    Over QQ only squarefree decomposition and rational roots are used; over a
    prime field the full factorisation is available.  ``g`` is the full power
    of the first factor found (lowest multiplicity group first, then lowest
    root / first irreducible factor).
    """
    a = ptrim(a)
    if not a:
        raise ValueError("zero polynomial")
    sqf = squarefree_decomposition(F, a)
    if not sqf:
        return None
    if len(sqf) >= 2:
        base, mult = sqf[0]
        g = ppow(F, base, mult)
    else:
        base, mult = sqf[0]
        if len(base) <= 2:
            return None
        if F.p:
            factors = factor_over_Fp(F, base, rng=rng)
            if len(factors) < 2:
                return None
            g = ppow(F, factors[0][0], mult)
        else:
            rs = rational_roots(F, base)
            if not rs:
                return None
            g = ppow(F, [F.norm(-rs[0]), 1], mult)
    h, r = pdivmod(F, a, g)
    assert not r
    return g, h


def _distinct_degree(F, a):
    """Distinct-degree factorisation of a monic squarefree polynomial over GF(p)."""
    p = F.p
    out = []
    x = [0, 1]
    h = x
    rest = a
    d = 0
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = _powmod(F, h, p, rest)
        g = pgcd(F, rest, psub(F, h, x))
        if len(g) > 1:
            out.append((g, d))
            rest = pdivmod(F, rest, g)[0]
            h = pdivmod(F, h, rest)[1]
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(F, a, d, rng):
    """Cantor-Zassenhaus splitting of a product of distinct degree-d irreducibles."""
    n = len(a) - 1
    if n == d:
        return [a]
    p = F.p
    while True:
        r = ptrim([rng.randrange(p) for _ in range(n)])
        if len(r) < 2:
            continue
        g = pgcd(F, a, r)
        if 1 < len(g) < len(a):
            break
        if p == 2:
            raise NotImplementedError("characteristic 2")
        w = _powmod(F, r, (p ** d - 1) // 2, a)
        g = pgcd(F, a, psub(F, w, [1]))
        if 1 < len(g) < len(a):
            break
    return _equal_degree(F, g, d, rng) + _equal_degree(F, pdivmod(F, a, g)[0], d, rng)


def factor_over_Fp(F: Field, a, rng: random.Random | None = None, seed: int = 0):
    """Irreducible factorisation [(monic factor, multiplicity)] over GF(p), sorted."""
    if not F.p:
        raise ValueError("factor_over_Fp needs a prime field")
    rng = rng or random.Random(seed)
    out = []
    for g, mult in squarefree_decomposition(F, a):
        for part, d in _distinct_degree(F, g):
            for fac in _equal_degree(F, part, d, rng):
                out.append((fac, mult))
    out.sort(key=lambda t: (len(t[0]), t[0][::-1], t[1]))
    return out


def roots_Fp(F: Field, a, rng: random.Random | None = None, seed: int = 0):
    """Distinct roots in GF(p), sorted."""
    a = ptrim(a)
    if not a:
        raise ValueError("zero polynomial")
    if len(a) == 1:
        return []
    rng = rng or random.Random(seed)
    a = pmonic(F, a)
    g = pgcd(F, a, psub(F, _powmod(F, [0, 1], F.p, a), [0, 1]))
    if len(g) <= 1:
        return []
    return sorted(F.norm(-f[0]) for f in _equal_degree(F, g, 1, rng))


def rational_roots(F: Field, a):
    """Distinct rational roots of a polynomial over QQ, sorted."""
    a = ptrim(a)
    if not a:
        raise ValueError("zero polynomial")
    roots = []
    while a and a[0] == 0:
        a = a[1:]
        if 0 not in roots:
            roots.append(0)
    if len(a) <= 1:
        return sorted(roots)
    # squarefree part keeps the coefficients small
    g = pgcd(F, a, pderiv(F, a))
    a = pdivmod(F, a, g)[0]
    den = math.lcm(*[Fraction(c).denominator for c in a])
    ints = [int(Fraction(c) * den) for c in a]
    cont = math.gcd(*ints)
    ints = [c // cont for c in ints]
    for r in _integer_poly_rational_roots(ints):
        r = F(r)
        if r not in roots and peval(F, a, r) == 0:
            roots.append(r)
    return sorted(roots)


def _integer_poly_rational_roots(ints):
    """Candidate rational roots of a squarefree integer polynomial with ints[0] != 0.

    Roots are found modulo a prime keeping the polynomial squarefree, lifted
    by Newton iteration until the modulus exceeds 2*|a0|*|lead| (any root
    n/d has |n| <= |a0| and d <= |lead|) and then reconstructed.
    """
    from .fields import GF, is_prime

    lead, a0 = abs(ints[-1]), abs(ints[0])
    target = 2 * a0 * lead + 1
    deriv = [i * c for i, c in enumerate(ints)][1:]
    p = 1_000_003
    while True:
        if is_prime(p) and lead % p:
            Fp = GF(p)
            ap = ptrim(Fp(c) for c in ints)
            if len(pgcd(Fp, ap, pderiv(Fp, ap))) == 1:
                break
        p += 2
    out = []
    for r in roots_Fp(Fp, ap, seed=p):
        m = p
        r = int(r)
        while m < target * target:
            m = m * m
            val = sum(c * pow(r, i, m) for i, c in enumerate(ints)) % m
            dval = sum(c * pow(r, i, m) for i, c in enumerate(deriv)) % m
            r = (r - val * pow(dval, -1, m)) % m
        q = rational_reconstruction(r, m)
        if q is not None:
            out.append(q)
    return out


def roots(F: Field, a, rng=None):
    """Distinct roots in the working field, plus the count of roots outside it."""
    a = ptrim(a)
    found = roots_Fp(F, a, rng=rng) if F.p else rational_roots(F, a)
    sqf_deg = len(a) - len(pgcd(F, a, pderiv(F, a)))
    return found, sqf_deg - len(found)


def pstr(a, var="t"):
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c == 1:
            parts.append(mono)
        elif mono:
            parts.append(f"{c}*{mono}")
        else:
            parts.append(str(c))
    return " + ".join(parts)
