"""Sparse multivariate polynomials over QQ or GF(p).

A polynomial is a map from exponent tuples to nonzero field elements.  The
same type carries forms in the ``x`` variables and constant-coefficient
differential operators in the dual ``y`` variables; :func:`apply_diff_op`
lets the latter act on the former.

Terms are printed and compared in graded reverse lexicographic order.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from operator import add

from .fields import QQ, Field

__all__ = [
    "MPoly",
    "PolyMatrix",
    "ParseError",
    "grevlex_key",
    "monomials",
    "parse_poly",
    "apply_diff_op",
    "det_poly_matrix",
    "cofactor_det",
    "change_of_vars",
]


def grevlex_key(e):
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(e), tuple(-a for a in reversed(e)))


def monomials(nvars: int, degree: int):
    """Exponent tuples of the given degree, y0^d first (lex descending)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


class MPoly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms=None, _clean=False):
        self.field = field
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            norm = field.norm
            cleaned = {}
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = norm(field(c) if not isinstance(c, int) else c)
                if c:
                    cleaned[tuple(e)] = c
            terms = cleaned
        self.terms = terms

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars, {}, _clean=True)

    @classmethod
    def const(cls, field, nvars, c):
        c = field(c)
        return cls(field, nvars, {(0,) * nvars: c} if c else {}, _clean=True)

    @classmethod
    def var(cls, field, nvars, i, power=1):
        e = [0] * nvars
        e[i] = power
        return cls(field, nvars, {tuple(e): 1}, _clean=True)

    @classmethod
    def monomial(cls, field, e, c=1):
        c = field(c)
        return cls(field, len(e), {tuple(e): c} if c else {}, _clean=True)

    @classmethod
    def linear_form(cls, field, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = field(c)
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(field, n, terms, _clean=True)

    # basic queries ------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def support(self) -> set:
        """Indices of variables that occur."""
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def coeff(self, e):
        return self.terms.get(tuple(e), 0)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def lead(self):
        """(exponent, coefficient) of the grevlex-leading term."""
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def homogeneous_part(self, d):
        return MPoly(self.field, self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d}, _clean=True)

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def _coerce(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.const(self.field, self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        norm = self.field.norm
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = norm(terms.get(e, 0) + c)
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return MPoly(self.field, self.nvars, terms, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        norm = self.field.norm
        return MPoly(self.field, self.nvars, {e: norm(-c) for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = self.field(c)
        if not c:
            return MPoly.zero(self.field, self.nvars)
        norm = self.field.norm
        return MPoly(self.field, self.nvars, {e: norm(v * c) for e, v in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc = {}
        get = acc.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(add, e1, e2))
                acc[e] = get(e, 0) + c1 * c2
        norm = self.field.norm
        terms = {}
        for e, c in acc.items():
            c = norm(c)
            if c:
                terms[e] = c
        return MPoly(self.field, self.nvars, terms, _clean=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.const(self.field, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.field == other.field and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MPoly.const(self.field, self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def monic(self):
        _, c = self.lead()
        return self.scale(self.field.inv(c))

    def exact_div(self, other: "MPoly") -> "MPoly":
        """Divide by ``other``; raises ValueError if the division leaves a remainder."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        F = self.field
        le, lc = other.lead()
        lc_inv = F.inv(lc)
        rem = self
        quot = {}
        while rem:
            e, c = rem.lead()
            if any(a < b for a, b in zip(e, le)):
                raise ValueError("polynomial division is not exact")
            qe = tuple(a - b for a, b in zip(e, le))
            qc = F.norm(c * lc_inv)
            quot[qe] = qc
            rem = rem - other * MPoly(F, self.nvars, {qe: qc}, _clean=True)
        return MPoly(F, self.nvars, quot, _clean=True)

    # calculus and evaluation -------------------------------------------
    def diff(self, i: int, times: int = 1) -> "MPoly":
        norm = self.field.norm
        terms = {}
        for e, c in self.terms.items():
            a = e[i]
            if a >= times:
                ne = list(e)
                ne[i] = a - times
                f = math.perm(a, times)
                v = norm(c * f)
                if v:
                    terms[tuple(ne)] = v
        return MPoly(self.field, self.nvars, terms, _clean=True)

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    def evaluate(self, point):
        F = self.field
        pt = [F(v) for v in point]
        if len(pt) != self.nvars:
            raise ValueError("point has wrong length")
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, a in zip(pt, e):
                if a:
                    t = t * v ** a
            total += t
        return F.norm(total)

    def substitute(self, images) -> "MPoly":
        """Replace variable i by ``images[i]`` (polynomials sharing a target ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0]
        F, m = target.field, target.nvars
        cache = {}

        def power(i, a):
            key = (i, a)
            if key not in cache:
                cache[key] = images[i] ** a
            return cache[key]

        out = MPoly.zero(F, m)
        for e, c in self.sorted_terms():
            t = MPoly.const(F, m, c)
            for i, a in enumerate(e):
                if a:
                    t = t * power(i, a)
            out = out + t
        return out

    def partial_substitute(self, values: dict) -> "MPoly":
        """Set the listed variables to constants, keeping nvars."""
        F = self.field
        images = []
        for i in range(self.nvars):
            if i in values:
                images.append(MPoly.const(F, self.nvars, values[i]))
            else:
                images.append(MPoly.var(F, self.nvars, i))
        return self.substitute(images)

    def to_field(self, field: Field) -> "MPoly":
        return MPoly(field, self.nvars, {e: field(c) for e, c in self.terms.items()})

    def embed(self, nvars: int, positions) -> "MPoly":
        """Rename variable i to ``positions[i]`` in a ring with ``nvars`` variables."""
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                ne[positions[i]] += a
            terms[tuple(ne)] = c
        return MPoly(self.field, nvars, terms, _clean=True)

    def restrict(self, positions) -> "MPoly":
        """Inverse of :meth:`embed`: keep only the listed variables (others must not occur)."""
        idx = list(positions)
        terms = {}
        for e, c in self.terms.items():
            if any(a for i, a in enumerate(e) if i not in idx):
                raise ValueError("polynomial involves a dropped variable")
            terms[tuple(e[i] for i in idx)] = c
        return MPoly(self.field, len(idx), terms, _clean=True)

    # printing -----------------------------------------------------------
    def __str__(self):
        return self.to_str()

    def to_str(self, var="x"):
        if not self.terms:
            return "0"
        pieces = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            neg = False
            if self.field.p == 0 and c < 0:
                neg, c = True, -c
            factors = [f"{var}{i}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a]
            if not factors:
                body = str(c)
            elif c == 1:
                body = "*".join(factors)
            else:
                body = f"{c}*" + "*".join(factors)
            if k == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"MPoly({self.field!r}, {self.nvars}, '{self}')"


# ---------------------------------------------------------------------------
# parser

class ParseError(ValueError):
    """Malformed polynomial text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)|([-+*/^]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos
            while start < len(text) and text[start].isspace():
                start += 1
            raise ParseError(f"unexpected character {text[start]!r}", len(text[:start].encode()))
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("$", len(text.encode())))
    return tokens


def parse_poly(text: str, nvars_hint: int | None = None, field: Field = QQ) -> MPoly:
    """Parse ``c*x0^2*x1 - x2^3 + ...`` into an :class:`MPoly`.

    Grammar (whitespace ignored)::

        poly   := [sign] term (sign term)*
        term   := coeff ['*' factor ('*' factor)*] | factor ('*' factor)*
        factor := 'x' index ['^' nat]
        coeff  := int ['/' int]
    """
    tokens = _tokenize(text)
    pos = 0
    terms = []  # (sign, coeff, {var: exp})
    max_var = -1

    def peek():
        return tokens[pos][0]

    def take(expected=None):
        nonlocal pos
        tok, off = tokens[pos]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", off)
        pos += 1
        return tok, off

    def nat():
        tok, off = take()
        if not tok.isdigit():
            raise ParseError(f"expected a number, found {tok!r}", off)
        return int(tok), off

    def factor(exps):
        nonlocal max_var
        take("x")
        idx, off = nat()
        if nvars_hint is not None and idx >= nvars_hint:
            raise ParseError(f"variable x{idx} exceeds nvars={nvars_hint}", off)
        max_var = max(max_var, idx)
        power = 1
        if peek() == "^":
            take()
            power, _ = nat()
        exps[idx] = exps.get(idx, 0) + power

    def term(sign):
        exps = {}
        coeff = Fraction(1)
        if peek().isdigit():
            num, _ = nat()
            coeff = Fraction(num)
            if peek() == "/":
                take()
                den, off = nat()
                if den == 0:
                    raise ParseError("zero denominator", off)
                coeff = Fraction(num, den)
            if peek() == "*":
                take()
                factor(exps)
            else:
                terms.append((sign, coeff, exps))
                return
        elif peek() == "x":
            factor(exps)
        else:
            tok, off = tokens[pos]
            raise ParseError(f"expected a term, found {tok!r}", off)
        while peek() == "*":
            take()
            factor(exps)
        terms.append((sign, coeff, exps))

    if peek() == "$":
        raise ParseError("empty polynomial", tokens[pos][1])
    sign = 1
    if peek() in "+-":
        sign = -1 if take()[0] == "-" else 1
    term(sign)
    while peek() != "$":
        tok, off = tokens[pos]
        if tok not in ("+", "-"):
            raise ParseError(f"expected '+' or '-', found {tok!r}", off)
        take()
        term(-1 if tok == "-" else 1)

    nvars = nvars_hint if nvars_hint is not None else max_var + 1
    nvars = max(nvars, 1)
    acc = {}
    for sign, coeff, exps in terms:
        e = [0] * nvars
        for i, a in exps.items():
            e[i] = a
        e = tuple(e)
        acc[e] = acc.get(e, 0) + sign * coeff
    return MPoly(field, nvars, {e: field(c) for e, c in acc.items()})


# ---------------------------------------------------------------------------
# differential operators

def apply_diff_op(delta: MPoly, f: MPoly) -> MPoly:
    """Let the operator ``delta`` (y_i = d/dx_i) act on ``f``."""
    if delta.nvars != f.nvars:
        raise ValueError(f"variable count mismatch: {delta.nvars} vs {f.nvars}")
    F = f.field
    acc = {}
    for a, ca in delta.terms.items():
        for b, cb in f.terms.items():
            if any(x < y for x, y in zip(b, a)):
                continue
            mult = 1
            for x, y in zip(b, a):
                if y:
                    mult *= math.perm(x, y)
            e = tuple(x - y for x, y in zip(b, a))
            acc[e] = acc.get(e, 0) + ca * cb * mult
    return MPoly(F, f.nvars, {e: F.norm(c) for e, c in acc.items() if F.norm(c)}, _clean=True)


# ---------------------------------------------------------------------------
# polynomial matrices

class PolyMatrix:
    """Dense matrix of :class:`MPoly` entries sharing one ring."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        entries = tuple(tuple(r) for r in entries)
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        if any(len(r) != self.cols for r in entries):
            raise ValueError("ragged matrix")
        nv = {e.nvars for r in entries for e in r}
        if len(nv) > 1:
            raise ValueError("entries do not share nvars")
        self.entries = entries

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def field(self):
        return self.entries[0][0].field

    @property
    def nvars(self):
        return self.entries[0][0].nvars

    def is_symmetric(self):
        return all(self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i))

    def evaluate(self, point):
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def submatrix(self, rows, cols):
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def map(self, fn):
        return PolyMatrix([[fn(e) for e in row] for row in self.entries])

    def det(self):
        return det_poly_matrix(self)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.entries) + "]"


def det_poly_matrix(M: PolyMatrix) -> MPoly:
    """Division-free determinant by Laplace expansion memoised on column subsets."""
    if M.rows != M.cols:
        raise ValueError(f"determinant of non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    F, nv = M.field, M.nvars
    if n == 0:
        return MPoly.const(F, nv, 1)
    one = MPoly.const(F, nv, 1)
    # minors[mask] = det of the bottom |mask| rows restricted to columns in mask
    minors = {0: one}
    for size in range(1, n + 1):
        row = n - size
        nxt = {}
        for mask in _masks(n, size):
            total = MPoly.zero(F, nv)
            sign_pos = 0
            for c in range(n):
                if mask >> c & 1:
                    entry = M.entries[row][c]
                    if entry:
                        sub = minors.get(mask ^ (1 << c))
                        if sub:
                            term = entry * sub
                            total = total - term if sign_pos & 1 else total + term
                    sign_pos += 1
            if total:
                nxt[mask] = total
        minors = nxt
    return minors.get((1 << n) - 1, MPoly.zero(F, nv))


def _masks(n, size):
    for combo in itertools.combinations(range(n), size):
        m = 0
        for c in combo:
            m |= 1 << c
        yield m


def cofactor_det(M: PolyMatrix) -> MPoly:
    """Plain recursive cofactor expansion along row 0 (reference implementation)."""
    n = M.rows
    if n != M.cols:
        raise ValueError("non-square matrix")
    F, nv = M.field, M.nvars
    if n == 0:
        return MPoly.const(F, nv, 1)
    if n == 1:
        return M.entries[0][0]
    total = MPoly.zero(F, nv)
    for j in range(n):
        if not M.entries[0][j]:
            continue
        sub = M.submatrix(range(1, n), [c for c in range(n) if c != j])
        term = M.entries[0][j] * cofactor_det(sub)
        total = total + term if j % 2 == 0 else total - term
    return total


def change_of_vars(f: MPoly, L) -> MPoly:
    """Return ``f`` composed with ``x_i -> sum_j L[i][j] x_j``."""
    from .linalg import LinearChange

    if not isinstance(L, LinearChange):
        L = LinearChange(f.field, L)
    if L.size != f.nvars:
        raise ValueError("linear change has wrong size")
    F = f.field
    images = [MPoly.linear_form(F, [F(c) for c in row]) for row in L.matrix]
    return f.substitute(images)
