"""Exact coefficient rings.

Polynomial and linear-algebra code stores coefficients as raw Python values
(``Fraction`` over the rationals, ``int`` in ``[0, n)`` over ``Z/n``) and
asks a ring object to normalize them. :class:`FpElement` and
:class:`Zp2Element` wrap single values for the public scalar API.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


class DenominatorDivisibleByP(ArithmeticError):
    """A rational cannot be reduced mod p; the prime is too small for the algebra."""


class NotDivisibleByP(ArithmeticError):
    """An element of Z/p^2 expected to be divisible by p is not."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p == 2 or not is_prime(p) or p >= 2**31:
        raise ValueError(f"expected an odd prime below 2^31, got {p!r}")
    return p


def parse_rational(x) -> Fraction:
    """Parse ``int``, ``Fraction`` or a ``"num/den"`` string exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"not an exact rational: {x!r}") from None
        if d == 0:
            raise ZeroDivisionError(f"zero denominator in {x!r}")
        return Fraction(n, d)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalField:
    name = "QQ"
    modulus = None
    characteristic = 0
    is_field = True

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x) -> Fraction:
        return parse_rational(x)

    def norm(self, c):
        return c

    def inv(self, c):
        if c == 0:
            raise ZeroDivisionError("zero is not invertible")
        return 1 / Fraction(c)

    def format(self, c) -> str:
        return format_rational(Fraction(c))

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


@dataclass(frozen=True)
class ModularRing:
    """``Z/p^k`` for an odd prime ``p``; a field when ``k == 1``."""

    p: int
    k: int = 1

    zero = 0
    one = 1

    def __post_init__(self):
        object.__setattr__(self, "modulus", self.p**self.k)

    @property
    def characteristic(self) -> int:
        return self.modulus

    @property
    def is_field(self) -> bool:
        return self.k == 1

    @property
    def name(self) -> str:
        return f"GF({self.p})" if self.k == 1 else f"Z/{self.p}^{self.k}"

    def __call__(self, x) -> int:
        q = parse_rational(x)
        if q.denominator % self.p == 0:
            raise DenominatorDivisibleByP(f"{q} has a denominator divisible by {self.p}")
        n = self.modulus
        return q.numerator * pow(q.denominator, -1, n) % n

    def norm(self, c):
        return c % self.modulus

    def inv(self, c):
        if c % self.p == 0:
            raise ZeroDivisionError(f"{c} is not a unit mod {self.modulus}")
        return pow(c, -1, self.modulus)

    def format(self, c) -> str:
        return str(c % self.modulus)

    def __repr__(self):
        return self.name


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> ModularRing:
    return ModularRing(check_prime(p), 1)


@lru_cache(maxsize=None)
def Zmod_p2(p: int) -> ModularRing:
    return ModularRing(check_prime(p), 2)


@dataclass(frozen=True)
class FpElement:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def inverse(self) -> FpElement:
        if self.value == 0:
            raise ZeroDivisionError("zero is not invertible")
        return FpElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * FpElement(o, self.p).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FpElement(pow(self.value, n, self.p), self.p)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class Zp2Element:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % (self.p * self.p))

    @property
    def modulus(self) -> int:
        return self.p * self.p

    def _coerce(self, other):
        if isinstance(other, Zp2Element):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Zp2Element(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Zp2Element(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Zp2Element(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Zp2Element(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Zp2Element(-self.value, self.p)

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o % self.p == 0:
            raise ZeroDivisionError("division by a non-unit of Z/p^2")
        return Zp2Element(self.value * pow(o, -1, self.modulus), self.p)

    def reduce(self) -> FpElement:
        return FpElement(self.value, self.p)


def reduce_mod_p(x, p: int) -> FpElement:
    q = parse_rational(x)
    return FpElement(GF(p)(q), p)


def lift(x: FpElement) -> Zp2Element:
    """Canonical lift: the representative in ``[0, p)``."""
    return Zp2Element(x.value, x.p)


def divide_by_p(x: Zp2Element) -> FpElement:
    if x.value % x.p:
        raise NotDivisibleByP(f"{x.value} is not divisible by {x.p} in Z/{x.p}^2")
    return FpElement(x.value // x.p, x.p)
