"""Half-open intervals [a, b) with exact extended-rational endpoints.

Endpoints are plain rationals plus the symbolic values ``-inf`` / ``inf``;
comparisons and all derived predicates are exact (no tolerances anywhere).
The degenerate interval [a, a) is rejected at construction: the zero object
is represented by an empty barcode, never by an empty interval.

The three-valued Hom classifier between rank-one interval modules lives
here as well, since everything else in the package is built on top of it:

    hom([a,b), [c,d)) == DEG0   iff  a <= c < b <= d      (dim Hom^0 = 1)
    hom([a,b), [c,d)) == DEG1   iff  c < a <= d < b       (dim Hom^1 = 1)
    hom([a,b), [c,d)) == ZERO   otherwise
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "ExtRat",
    "Endpoint",
    "NEG_INF",
    "POS_INF",
    "Interval",
    "HomType",
    "ZERO",
    "DEG0",
    "DEG1",
    "leq",
    "hom",
    "compose_generator",
    "parse_endpoint",
    "parse_interval",
]

RatLike = Union[int, Fraction, str, "ExtRat"]

_INF_TOKENS = {"inf": 1, "+inf": 1, "-inf": -1, "oo": 1, "-oo": -1}


class ExtRat:
    """An exact rational extended with -inf and +inf.

    Totally ordered: -inf < every rational < +inf.  Arithmetic is defined
    for the combinations that make sense for endpoint/length bookkeeping
    (inf + finite, inf - finite, finite - inf, scalar multiples); the
    indeterminate forms raise ArithmeticError.
    """

    __slots__ = ("_kind", "_q")

    def __init__(self, value: RatLike = 0):
        if isinstance(value, ExtRat):
            self._kind = value._kind
            self._q = value._q
            return
        if isinstance(value, str):
            token = value.strip()
            if token in _INF_TOKENS:
                self._kind = _INF_TOKENS[token]
                self._q = None
                return
            value = Fraction(token)
        if isinstance(value, (int, Fraction)):
            self._kind = 0
            self._q = Fraction(value)
            return
        raise TypeError(f"cannot build ExtRat from {value!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def _make_inf(sign: int) -> "ExtRat":
        out = ExtRat.__new__(ExtRat)
        out._kind = sign
        out._q = None
        return out

    # -- predicates --------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self._kind == 0

    @property
    def is_pos_inf(self) -> bool:
        return self._kind > 0

    @property
    def is_neg_inf(self) -> bool:
        return self._kind < 0

    def as_fraction(self) -> Fraction:
        if self._kind != 0:
            raise ArithmeticError(f"{self} is not finite")
        return self._q

    # -- ordering ----------------------------------------------------------

    def _key(self):
        # kind dominates; finite values compare by q
        return (self._kind, self._q if self._kind == 0 else 0)

    @staticmethod
    def _coerce(other) -> "ExtRat":
        if isinstance(other, ExtRat):
            return other
        if isinstance(other, (int, Fraction, str)):
            return ExtRat(other)
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() == o._key()

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() < o._key()

    def __le__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() <= o._key()

    def __gt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() > o._key()

    def __ge__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() >= o._key()

    def __hash__(self):
        if self._kind == 0:
            return hash(self._q)
        return hash(("ExtRat", self._kind))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._kind == 0 and o._kind == 0:
            return ExtRat(self._q + o._q)
        if self._kind != 0 and o._kind != 0:
            if self._kind != o._kind:
                raise ArithmeticError("inf + (-inf) is undefined")
            return self
        return self if self._kind != 0 else o

    __radd__ = __add__

    def __neg__(self):
        if self._kind == 0:
            return ExtRat(-self._q)
        return ExtRat._make_inf(-self._kind)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._kind == 0 and o._kind == 0:
            return ExtRat(self._q * o._q)
        # at least one infinite factor: require the other to be nonzero finite
        # or infinite; sign rule applies.
        def sign(e: "ExtRat") -> int:
            if e._kind != 0:
                return e._kind
            return (e._q > 0) - (e._q < 0)

        if sign(self) == 0 or sign(o) == 0:
            raise ArithmeticError("0 * inf is undefined")
        return ExtRat._make_inf(sign(self) * sign(o))

    __rmul__ = __mul__

    def __abs__(self):
        return -self if self < 0 else self

    # -- display -----------------------------------------------------------

    def __str__(self):
        if self._kind > 0:
            return "inf"
        if self._kind < 0:
            return "-inf"
        if self._q.denominator == 1:
            return str(self._q.numerator)
        return f"{self._q.numerator}/{self._q.denominator}"

    def __repr__(self):
        return f"ExtRat({str(self)!r})"


# alias naming what an interval stores
Endpoint = ExtRat

NEG_INF = ExtRat._make_inf(-1)
POS_INF = ExtRat._make_inf(1)


def parse_endpoint(token: str) -> ExtRat:
    """Parse ``p/q``, an integer, a finite decimal, or ``-inf``/``inf``."""
    return ExtRat(token)


class Interval:
    """Half-open interval [lo, hi) with lo < hi (nonempty, non-degenerate)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: RatLike, hi: RatLike):
        lo = ExtRat(lo)
        hi = ExtRat(hi)
        if not lo < hi:
            raise ValueError(f"empty interval [{lo},{hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *a):
        raise AttributeError("Interval is immutable")

    @property
    def length(self) -> ExtRat:
        return self.hi - self.lo

    def shift(self, c) -> "Interval":
        c = Fraction(c)
        return Interval(self.lo + c, self.hi + c)

    def contains(self, x) -> bool:
        x = ExtRat(x)
        return self.lo <= x and x < self.hi

    def intersects(self, other: "Interval") -> bool:
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    def key(self):
        return (self.lo, self.hi)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __str__(self):
        return f"[{self.lo},{self.hi})"

    def __repr__(self):
        return f"Interval({str(self.lo)!r}, {str(self.hi)!r})"


_INTERVAL_RE = re.compile(r"^\[\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$")


def parse_interval(text: str) -> Interval:
    """Parse the literal syntax ``[a,b)``."""
    m = _INTERVAL_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed interval literal {text!r}")
    return Interval(parse_endpoint(m.group(1)), parse_endpoint(m.group(2)))


class HomType(enum.Enum):
    """Shape of the (derived) morphism space between two interval modules.

    At most one of the two degrees carries a one-dimensional space; the
    other possibilities do not occur for intervals on the line.
    """

    ZERO = 0
    DEG0 = 1
    DEG1 = 2

    def __repr__(self):
        return f"HomType.{self.name}"


ZERO = HomType.ZERO
DEG0 = HomType.DEG0
DEG1 = HomType.DEG1


def leq(i: Interval, j: Interval) -> bool:
    """Product order on endpoints: I <= J iff I.lo <= J.lo and I.hi <= J.hi."""
    return i.lo <= j.lo and i.hi <= j.hi


def hom(i: Interval, j: Interval) -> HomType:
    """Classify the morphism space from k_I to k_J (see module docstring)."""
    a, b = i.lo, i.hi
    c, d = j.lo, j.hi
    if a <= c and c < b and b <= d:
        return DEG0
    if c < a and a <= d and d < b:
        return DEG1
    return ZERO


def compose_generator(i: Interval, j: Interval, k: Interval) -> HomType:
    """Hom class of the composite of the canonical generators I -> J -> K.

    Both legs must be nonzero in degree 0; the composite is the canonical
    generator I -> K, which may itself vanish (the supports may fail to
    chain up).  Returns hom(i, k).
    """
    if hom(i, j) is not DEG0:
        raise ValueError(f"no degree-0 generator {i} -> {j}")
    if hom(j, k) is not DEG0:
        raise ValueError(f"no degree-0 generator {j} -> {k}")
    return hom(i, k)


def endpoint_absdiff(x: ExtRat, y: ExtRat) -> ExtRat:
    """|x - y| with the convention that two equal infinities are 0 apart."""
    if x == y:
        return ExtRat(0)
    if not (x.is_finite and y.is_finite):
        return POS_INF
    return abs(x - y)
