import random
from fractions import Fraction

import pytest
import sympy

from hessloci.fields import QQ
from hessloci.poly import MPoly


def sym_vars(n):
    return sympy.symbols(f"x0:{n}")


def to_sympy(f: MPoly):
    xs = sym_vars(f.nvars)
    out = sympy.Integer(0)
    for e, c in f.terms.items():
        term = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) if f.field.p == 0 else sympy.Integer(c)
        for x, a in zip(xs, e):
            term *= x ** a
        out += term
    return sympy.expand(out)


def from_sympy(expr, nvars):
    xs = sym_vars(nvars)
    P = sympy.Poly(sympy.expand(expr), *xs)
    return MPoly(QQ, nvars, {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in P.terms()})


@pytest.fixture
def rng():
    return random.Random(1234)
