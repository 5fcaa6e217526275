"""Exact numerics for the rational execution mode.

``DigitFraction`` is a rational with denominator a power of a fixed base:
num / base**exp, kept canonical (num not divisible by the base).  The
point of the type is that addition and small-integer scaling never run a
gcd, so the digit-encoded feature values of the refinement-simulating
networks (whose denominators reach thousands of digits) stay cheap.  Two
canonical (num, exp) pairs are equal iff the values are, so hashing and
table lookups are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def parse_rational(text: str | int | float) -> Fraction | int:
    """Parse "p/q" or "p" (ints stay ints)."""
    if isinstance(text, int):
        return text
    if isinstance(text, float):
        raise ValueError("rational mode does not accept floats")
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return int(text)


def format_rational(x) -> str:
    if isinstance(x, DigitFraction):
        x = x.to_fraction()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    raise TypeError(f"not a rational: {x!r}")


@dataclass(frozen=True)
class DigitFraction:
    """num / base**exp with num not divisible by base (0 has exp 0)."""

    base: int
    num: int
    exp: int

    @staticmethod
    def make(base: int, num: int, exp: int) -> "DigitFraction":
        if base < 2:
            raise ValueError("base must be >= 2")
        if num == 0:
            return DigitFraction(base, 0, 0)
        while num % base == 0:
            num //= base
            exp -= 1
        return DigitFraction(base, num, exp)

    @staticmethod
    def power(base: int, k: int) -> "DigitFraction":
        """base**(-k)."""
        return DigitFraction.make(base, 1, k)

    @staticmethod
    def from_fraction(base: int, value: Fraction | int) -> "DigitFraction":
        if isinstance(value, int):
            return DigitFraction.make(base, value, 0)
        d = value.denominator
        exp = 0
        while d > 1:
            g = math.gcd(d, base)
            if g == 1:
                raise ValueError(
                    f"denominator {value.denominator} does not divide a power of {base}")
            d //= g
            exp += 1
        num = value.numerator * (base**exp // value.denominator)
        return DigitFraction.make(base, num, exp)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.base**self.exp)

    def __bool__(self) -> bool:
        return self.num != 0

    def _coerce(self, other) -> "DigitFraction | None":
        if isinstance(other, DigitFraction):
            if other.base != self.base:
                raise TypeError("mixed DigitFraction bases")
            return other
        if isinstance(other, int):
            return DigitFraction.make(self.base, other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        e = max(self.exp, o.exp)
        num = (self.num * self.base ** (e - self.exp)
               + o.num * self.base ** (e - o.exp))
        return DigitFraction.make(self.base, num, e)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, int):
            return DigitFraction.make(self.base, self.num * other, self.exp)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return DigitFraction(self.base, -self.num, self.exp)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def _cmp_key(self, other) -> tuple[int, int]:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare DigitFraction with {type(other).__name__}")
        e = max(self.exp, o.exp)
        return (self.num * self.base ** (e - self.exp),
                o.num * self.base ** (e - o.exp))

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._cmp_key(other)
        return a >= b

    def in_unit_interval(self) -> bool:
        """True iff 0 < value < 1."""
        return self.num > 0 and self.num < self.base**self.exp

    def digit_map(self) -> dict[int, int]:
        """Base-b digits of the fractional expansion: position j (>= 1,
        counting from the point) -> digit, zero digits omitted.

        Digit strings are typically sparse but long, so digits are pulled
        in 64-position chunks to keep the number of big divisions small.
        """
        digits: dict[int, int] = {}
        chunk_base = self.base**64
        num = self.num
        pos = self.exp
        while num:
            num, chunk = divmod(num, chunk_base)
            at = pos
            while chunk:
                chunk, d = divmod(chunk, self.base)
                if d:
                    digits[at] = d
                at -= 1
            pos -= 64
        return digits

    def __repr__(self) -> str:
        return f"DigitFraction({self.num}/{self.base}^{self.exp})"


def canonical_number(x):
    """Collapse numerically-zero and integer-valued entries to ints so that
    oracle keys hash consistently across numeric representations."""
    if isinstance(x, DigitFraction):
        if x.num == 0:
            return 0
        if x.exp == 0:
            return x.num
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return x
    return x


def canonical_vector(vec) -> tuple:
    return tuple(canonical_number(x) for x in vec)
