"""Exact base fields: the rationals and prime fields.

Field elements are plain Python numbers so that polynomial and matrix code can
use ``+``, ``-`` and ``*`` directly and only call :meth:`norm` to bring a value
back to canonical form:

* over ``QQ`` an element is an ``int`` or a ``fractions.Fraction`` in lowest
  terms (integral fractions are collapsed to ``int``);
* over ``GF(p)`` an element is an ``int`` in ``[0, p)``.

Division always goes through :meth:`inv` / :meth:`div`.
"""

from __future__ import annotations

import functools
import random
from fractions import Fraction

__all__ = ["Field", "RationalField", "PrimeField", "QQ", "GF", "is_prime", "random_prime"]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, which covers every prime we use."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, bits: int = 31) -> int:
    """A uniformly drawn prime with exactly ``bits`` bits."""
    while True:
        c = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_prime(c):
            return c


class Field:
    """Common interface. ``p`` is the characteristic (0 for the rationals)."""

    p = 0

    def __call__(self, x):
        raise NotImplementedError

    def norm(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def div(self, a, b):
        return self.norm(a * self.inv(b))

    def neg(self, a):
        return self.norm(-a)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def random_element(self, rng: random.Random, bound: int = 10, nonzero: bool = False):
        while True:
            c = self(rng.randint(-bound, bound))
            if c or not nonzero:
                return c

    def to_json(self, x) -> str:
        return str(x)


class RationalField(Field):
    p = 0

    def __call__(self, x):
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, str):
            return self.norm(Fraction(x.strip()))
        raise TypeError(f"cannot convert {x!r} to a rational")

    def norm(self, x):
        if type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("division by zero in QQ")
        return self.norm(Fraction(1) / x)

    def div(self, a, b):
        if not b:
            raise ZeroDivisionError("division by zero in QQ")
        return self.norm(Fraction(a) / b)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    @property
    def tag(self) -> str:
        return "q"


class PrimeField(Field):
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __call__(self, x):
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {self.p}")
            return x.numerator * pow(den, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x.strip()))
        raise TypeError(f"cannot convert {x!r} to GF({self.p})")

    def norm(self, x):
        return x % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return pow(x, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def random_element(self, rng: random.Random, bound: int | None = None, nonzero: bool = False):
        lo = 1 if nonzero else 0
        return rng.randrange(lo, self.p)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    @property
    def tag(self) -> str:
        return f"fp:{self.p}"


QQ = RationalField()


@functools.lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)
